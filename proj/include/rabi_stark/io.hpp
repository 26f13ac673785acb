// rabi_stark/io.hpp: tables written as '#'-annotated CSV or JSON
#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace rabi_stark::io {

using Cell = std::variant<double, long long, bool, std::string>;

/// 15 significant digits; non-finite values as nan / inf / -inf.
[[nodiscard]] inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

[[nodiscard]] inline std::string format_cell(const Cell& c) {
    struct {
        std::string operator()(double v) const { return format_number(v); }
        std::string operator()(long long v) const { return std::to_string(v); }
        std::string operator()(bool v) const { return v ? "1" : "0"; }
        std::string operator()(const std::string& v) const { return v; }
    } visit;
    return std::visit(visit, c);
}

struct Table {
    /// Echoed as '# key = value' lines and as the JSON "meta" object.
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_meta(std::string key, std::string value) { meta.emplace_back(std::move(key), std::move(value)); }
    void add_meta(std::string key, double value) { meta.emplace_back(std::move(key), format_number(value)); }
};

inline void write_csv(std::ostream& os, const Table& t) {
    for (const auto& [k, v] : t.meta) os << "# " << k << " = " << v << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_cell(row[i]);
        os << '\n';
    }
}

[[nodiscard]] inline nlohmann::ordered_json cell_json(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) {
        if (std::isfinite(*d)) return *d;
        return format_number(*d);
    }
    if (const auto* i = std::get_if<long long>(&c)) return *i;
    if (const auto* b = std::get_if<bool>(&c)) return *b;
    return std::get<std::string>(c);
}

[[nodiscard]] inline nlohmann::ordered_json to_json(const Table& t) {
    nlohmann::ordered_json j;
    j["meta"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : t.meta) j["meta"][k] = v;
    j["columns"] = t.columns;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        auto r = nlohmann::ordered_json::array();
        for (const auto& c : row) r.push_back(cell_json(c));
        j["rows"].push_back(std::move(r));
    }
    return j;
}

/// Serialized with 15 significant digits like the CSV path.
[[nodiscard]] inline std::string dump_json(const nlohmann::ordered_json& j) {
    // nlohmann prints shortest round-trip doubles; rewrite numbers at 15 digits
    // so both formats carry identical values.
    std::string out;
    const auto walk = [](const auto& self, const nlohmann::ordered_json& v) -> nlohmann::ordered_json {
        if (v.is_number_float()) return nlohmann::ordered_json::parse(format_number(v.get<double>()));
        if (v.is_array()) {
            auto a = nlohmann::ordered_json::array();
            for (const auto& e : v) a.push_back(self(self, e));
            return a;
        }
        if (v.is_object()) {
            auto o = nlohmann::ordered_json::object();
            for (const auto& [k, e] : v.items()) o[k] = self(self, e);
            return o;
        }
        return v;
    };
    return walk(walk, j).dump(2) + "\n";
}

inline void write_json(std::ostream& os, const Table& t) { os << dump_json(to_json(t)); }

enum class Format { csv, json };

inline void write(std::ostream& os, const Table& t, Format f) {
    if (f == Format::csv)
        write_csv(os, t);
    else
        write_json(os, t);
}

}  // namespace rabi_stark::io
