// rabi-stark: command-line front-end for the spectral solvers.
//
// Exit codes: 0 success, 1 usage or I/O error, 2 regime error, 3 validation failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rabi_stark/collapse.hpp"
#include "rabi_stark/ed.hpp"
#include "rabi_stark/gfunction.hpp"
#include "rabi_stark/io.hpp"
#include "rabi_stark/spectrum.hpp"
#include "rabi_stark/validation.hpp"

using namespace rabi_stark;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRegime = 2;
constexpr int kExitValidation = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Config {
    double delta{0.5};
    double omega{1.0};
    double u{0.0};
    double g{0.1};
    double gmin{0.0};
    double gmax{1.2};
    int gsteps{61};
    std::optional<double> emin;
    std::optional<double> emax;
    std::string parity{"both"};
    int ntr{300};
    double tol{1e-14};
    std::string format{"csv"};
    std::string out;

    int samples{2001};
    int levels{20};
    int upper_levels{3};
    int m_max{3};
    bool exceptional{false};
    bool full{false};
    std::string ntr_list;
    std::string grid{"standard"};
};

void add_model_flags(CLI::App* cmd, Config& c, bool with_g) {
    cmd->add_option("--delta", c.delta, "qubit frequency Delta")->capture_default_str();
    cmd->add_option("--omega", c.omega, "cavity frequency omega")->capture_default_str();
    cmd->add_option("--u", c.u, "Stark coupling U")->capture_default_str();
    if (with_g) cmd->add_option("--g", c.g, "dipole coupling g")->capture_default_str();
}

void add_output_flags(CLI::App* cmd, Config& c) {
    cmd->add_option("--format", c.format, "output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    cmd->add_option("--out", c.out, "output file (default: stdout)");
}

io::Format format_of(const Config& c) { return c.format == "json" ? io::Format::json : io::Format::csv; }

std::string extension(const Config& c) { return c.format == "json" ? ".json" : ".csv"; }

/// Sidecar path next to --out: "levels.csv" -> "levels.<tag>.<ext>".
std::string sidecar_path(const Config& c, const std::string& tag, const std::string& ext) {
    std::string base = c.out;
    const auto dot = base.find_last_of('.');
    const auto slash = base.find_last_of('/');
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) base = base.substr(0, dot);
    return base + "." + tag + ext;
}

void emit(const Config& c, const io::Table& t) {
    if (c.out.empty()) {
        io::write(std::cout, t, format_of(c));
        return;
    }
    std::ofstream os(c.out);
    if (!os) throw std::ios_base::failure("cannot open " + c.out + " for writing");
    io::write(os, t, format_of(c));
    if (!os) throw std::ios_base::failure("write failed: " + c.out);
}

void emit_file(const std::string& path, const std::string& text) {
    std::ofstream os(path);
    if (!os) throw std::ios_base::failure("cannot open " + path + " for writing");
    os << text;
    if (!os) throw std::ios_base::failure("write failed: " + path);
}

std::vector<Parity> parities_of(const std::string& s) {
    if (s == "both") return {Parity::even, Parity::odd};
    if (s == "+" || s == "even" || s == "1" || s == "+1") return {Parity::even};
    if (s == "-" || s == "odd" || s == "-1") return {Parity::odd};
    throw UsageError("--parity must be one of +, -, even, odd, both");
}

void echo_model(io::Table& t, const std::string& command, const Config& c) {
    t.add_meta("command", command);
    t.add_meta("delta", c.delta);
    t.add_meta("omega", c.omega);
    t.add_meta("u", c.u);
}

ModelParams model_of(const Config& c, double g) {
    ModelParams p{c.delta, c.omega, c.u, g};
    p.validate();
    return p;
}

void require_boa(const Config& c) {
    if (!(std::abs(c.u / c.omega) < 2.0 - kCollapseRatioTolerance))
        throw RegimeError("this subcommand needs |u/omega| < 2; use 'collapse' for |u/omega| = 2");
}

void require_positive(double v, const char* name) {
    if (!(v > 0.0)) throw UsageError(std::string(name) + " must be positive");
}

std::vector<double> g_grid_of(const Config& c) {
    if (c.gsteps < 1) throw UsageError("--gsteps must be >= 1");
    if (c.gmin < 0.0 || c.gmax < c.gmin) throw UsageError("need 0 <= gmin <= gmax");
    std::vector<double> out;
    for (int i = 0; i < c.gsteps; ++i)
        out.push_back(c.gsteps == 1 ? c.gmin : c.gmin + (c.gmax - c.gmin) * i / (c.gsteps - 1));
    return out;
}

// ---------------------------------------------------------------------------

int cmd_gcurve(const Config& c) {
    require_boa(c);
    require_positive(c.tol, "--tol");
    const auto p = model_of(c, c.g);
    const BoaModel model(p);
    const double emin = c.emin.value_or(spectrum_lower_bound(p));
    const double emax = c.emax.value_or(emin + 5.0 * c.omega);
    SeriesOptions opt;
    opt.tol = c.tol;

    io::Table t;
    echo_model(t, "gcurve", c);
    t.add_meta("g", c.g);
    t.add_meta("emin", emin);
    t.add_meta("emax", emax);
    t.add_meta("samples", std::to_string(c.samples));
    t.add_meta("tol", c.tol);
    t.add_meta("g_plus", "sum (Omega_n - 1) f_n w^n, zeros are even-parity levels");
    t.add_meta("g_minus", "sum (Omega_n + 1) f_n w^n, zeros are odd-parity levels");
    t.columns = {"energy", "g_plus", "g_minus", "is_break", "pole_index"};
    for (const auto& r : g_curve(emin, emax, c.samples, model, opt))
        t.rows.push_back({r.energy, r.g_plus, r.g_minus, r.is_break, static_cast<long long>(r.pole_index)});
    emit(c, t);

    if (!c.out.empty()) {
        nlohmann::ordered_json j;
        j["delta"] = c.delta;
        j["omega"] = c.omega;
        j["u"] = c.u;
        j["g"] = c.g;
        j["emin"] = emin;
        j["emax"] = emax;
        j["pole0"] = pole_0(p);
        auto poles = nlohmann::ordered_json::array();
        for (const auto& pl : poles_in(p, emin, emax))
            poles.push_back({{"index", pl.index}, {"energy", pl.energy}});
        j["poles_in_window"] = poles;
        const auto set = make_pole_set(p, emax);
        auto omega_poles = nlohmann::ordered_json::array();
        for (std::size_t n = 0; n < set.omega_poles.size(); ++n)
            if (set.omega_poles[n] >= emin && set.omega_poles[n] <= emax)
                omega_poles.push_back({{"index", n}, {"energy", set.omega_poles[n]}});
        j["omega_poles_in_window"] = omega_poles;
        emit_file(sidecar_path(c, "poles", ".json"), io::dump_json(j));
    }
    return 0;
}

int cmd_spectrum(const Config& c) {
    require_boa(c);
    require_positive(c.tol, "--tol");
    const FamilyParams f{c.delta, c.omega, c.u};
    model_of(c, 0.0);
    const auto grid = g_grid_of(c);
    const double emin = c.emin.value_or(spectrum_lower_bound(f.with_g(grid.back())) - 1e-3 * c.omega);
    const double emax = c.emax.value_or(2.0 * c.omega);
    if (!(emax > emin)) throw UsageError("need emin < emax");
    const auto wanted = parities_of(c.parity);

    SweepOptions opt;
    opt.regular.series.tol = c.tol;
    opt.include_exceptional = c.exceptional;
    opt.exceptional.series.tol = c.tol;
    const auto s = sweep(f, grid, emin, emax, opt);

    io::Table t;
    echo_model(t, "spectrum", c);
    t.add_meta("gmin", c.gmin);
    t.add_meta("gmax", c.gmax);
    t.add_meta("gsteps", std::to_string(c.gsteps));
    t.add_meta("emin", emin);
    t.add_meta("emax", emax);
    t.add_meta("parity", c.parity);
    t.add_meta("tol", c.tol);
    if (s.first_order)
        t.add_meta("first_order_g", s.first_order->g);
    else
        t.add_meta("first_order_g", "none");
    for (const auto& w : s.warnings) t.add_meta("warning", w);
    t.columns = {"g", "level_index", "energy", "parity", "kind"};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        long long idx = 0;
        for (const auto& lvl : s.levels[i]) {
            if (lvl.parity && std::find(wanted.begin(), wanted.end(), *lvl.parity) == wanted.end()) continue;
            t.rows.push_back({grid[i], idx++, lvl.energy, lvl.parity ? to_string(*lvl.parity) : std::string("+-"),
                              to_string(lvl.kind)});
        }
    }
    emit(c, t);

    io::Table pts;
    echo_model(pts, "spectrum points", c);
    pts.columns = {"kind", "pole_index", "g", "energy", "parity", "on_crossing_line", "first_order"};
    for (const auto& cr : s.crossings) {
        const bool first = s.first_order && cr.g == s.first_order->g && cr.n == s.first_order->n;
        pts.rows.push_back({std::string("juddian"), static_cast<long long>(cr.n), cr.g, cr.energy,
                            std::string("degenerate"), cr.on_ladder, first});
    }
    for (const auto& e : s.exceptional)
        if (std::find(wanted.begin(), wanted.end(), *e.parity) != wanted.end())
            pts.rows.push_back({to_string(e.kind), static_cast<long long>(*e.pole_index), e.g, e.energy,
                                to_string(*e.parity), false, false});
    if (!c.out.empty()) {
        std::ostringstream os;
        io::write(os, pts, format_of(c));
        emit_file(sidecar_path(c, "points", extension(c)), os.str());
    } else if (c.format == "csv") {
        std::cout << "\n";
        io::write_csv(std::cout, pts);
    }
    return 0;
}

int cmd_exceptional(const Config& c) {
    require_boa(c);
    require_positive(c.tol, "--tol");
    model_of(c, 0.0);
    if (c.m_max < 0) throw UsageError("--m must be >= 0");
    if (c.gmax <= c.gmin) throw UsageError("need gmin < gmax");
    const FamilyParams f{c.delta, c.omega, c.u};
    ExceptionalOptions opt;
    opt.samples = std::max(c.samples, 2);
    opt.series.tol = c.tol;

    io::Table t;
    echo_model(t, "exceptional", c);
    t.add_meta("gmin", c.gmin);
    t.add_meta("gmax", c.gmax);
    t.add_meta("m_max", std::to_string(c.m_max));
    t.add_meta("samples", std::to_string(opt.samples));
    t.columns = {"pole_index", "parity", "g", "energy"};
    for (int m = 0; m <= c.m_max; ++m)
        for (const Parity par : parities_of(c.parity))
            for (const auto& lvl : exceptional_nondegenerate(m, par, f, c.gmin, c.gmax, opt))
                t.rows.push_back({static_cast<long long>(m), to_string(par), lvl.g, lvl.energy});
    emit(c, t);
    return 0;
}

int cmd_collapse(const Config& c, bool sweep_mode) {
    const auto p = model_of(c, c.g);
    const collapse::CollapseModel model(p);
    if (c.levels < 0 || c.upper_levels < 0) throw UsageError("level counts must be >= 0");

    io::Table t;
    echo_model(t, "collapse", c);
    t.add_meta("delta_effective", model.delta_eff());
    if (model.delta_eff() < 1.0)
        t.add_meta("g_c_plus", model.critical_point().g_c);
    else
        t.add_meta("g_c_plus", "none");
    t.add_meta("levels", std::to_string(c.levels));
    t.add_meta("upper_levels", std::to_string(c.upper_levels));

    auto add_rows = [&](const collapse::CollapseModel& m, bool with_g) {
        const double ec = m.collapse_energy();
        if (m.has_lower_branch()) {
            for (int n = 0; n < c.levels; ++n) {
                const auto s = m.lower(n);
                std::vector<io::Cell> row;
                if (with_g) row.push_back(m.params().g);
                row.insert(row.end(), {std::string("lower"), static_cast<long long>(n), s.energy, s.omega_eff,
                                       s.energy - ec, m.photon_number_approx(s.energy)});
                t.rows.push_back(std::move(row));
            }
        }
        for (int n = 0; n < c.upper_levels; ++n) {
            const auto s = m.upper(n);
            std::vector<io::Cell> row;
            if (with_g) row.push_back(m.params().g);
            row.insert(row.end(), {std::string("upper"), static_cast<long long>(n), s.energy, s.omega_eff,
                                   s.energy - ec, std::nan("")});
            t.rows.push_back(std::move(row));
        }
    };

    if (sweep_mode) {
        const auto grid = g_grid_of(c);
        t.add_meta("gmin", c.gmin);
        t.add_meta("gmax", c.gmax);
        t.add_meta("gsteps", std::to_string(c.gsteps));
        t.columns = {"g", "branch", "n", "energy", "omega_eff", "energy_minus_ec", "photon_number_approx"};
        for (const double g : grid) add_rows(collapse::CollapseModel(model_of(c, g)), true);
    } else {
        t.add_meta("g", c.g);
        t.add_meta("e_c_plus", model.collapse_energy());
        if (!model.has_lower_branch()) t.add_meta("lower_branch", "none (g >= g_c_plus)");
        t.columns = {"branch", "n", "energy", "omega_eff", "energy_minus_ec", "photon_number_approx"};
        add_rows(model, false);
    }
    emit(c, t);
    return 0;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("--ntr-list must be comma-separated integers, got '" + s + "'");
        }
    }
    if (out.empty()) throw UsageError("--ntr-list is empty");
    return out;
}

int cmd_ed(const Config& c) {
    const auto p = model_of(c, c.g);
    if (std::abs(p.u_ratio()) > 2.0 + kCollapseRatioTolerance)
        throw RegimeError("ED covers |u/omega| <= 2 only");
    io::Table t;
    echo_model(t, "ed", c);
    t.add_meta("g", c.g);
    if (!c.ntr_list.empty()) {
        const auto list = parse_int_list(c.ntr_list);
        t.add_meta("ntr_list", c.ntr_list);
        t.add_meta("levels", std::to_string(c.levels));
        t.add_meta("threshold", ed::kDefaultConvergenceThreshold);
        t.columns = {"n_tr", "level", "energy", "drift", "converged"};
        for (const auto& r : ed::convergence_sweep(p, list, std::max(c.levels, 1)))
            t.rows.push_back({static_cast<long long>(r.n_tr), static_cast<long long>(r.level), r.energy, r.drift,
                              r.converged});
        emit(c, t);
        return 0;
    }
    ed::EDOptions opt;
    opt.by_sector = !c.full;
    opt.max_levels = c.levels;
    const auto r = ed::diagonalize(p, c.ntr, opt);
    const auto wanted = parities_of(c.parity);
    t.add_meta("ntr", std::to_string(c.ntr));
    t.add_meta("mode", c.full ? "full" : "sector");
    t.columns = {"level", "energy", "parity", "photon_number"};
    long long idx = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (c.levels > 0 && idx >= c.levels) break;
        if (std::find(wanted.begin(), wanted.end(), r.parities[i]) == wanted.end()) continue;
        t.rows.push_back({idx++, r.eigenvalues[i], to_string(r.parities[i]), r.photon_numbers[i]});
    }
    emit(c, t);
    return 0;
}

int cmd_validate(const Config& c) {
    std::vector<validation::Check> checks;
    if (c.grid == "standard")
        checks = validation::standard_grid();
    else if (c.grid == "quick")
        checks = validation::quick_grid();
    else
        throw UsageError("--grid must be 'standard' or 'quick'");
    bool ok = true;
    for (const auto& ch : checks) {
        std::cout << (ch.passed ? "PASS " : "FAIL ") << ch.name << ": " << ch.detail << "\n";
        ok = ok && ch.passed;
    }
    std::cout << (ok ? "all checks passed" : "validation FAILED") << "\n";
    return ok ? 0 : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectrum of the quantum Rabi-Stark model"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "rabi-stark 1.0");
    Config c;

    auto* gcurve = app.add_subcommand("gcurve", "sample G_+ and G_- over an energy window");
    add_model_flags(gcurve, c, true);
    gcurve->add_option("--emin", c.emin, "window start (default: spectrum lower bound)");
    gcurve->add_option("--emax", c.emax, "window end (default: emin + 5 omega)");
    gcurve->add_option("--samples", c.samples, "uniform samples in the window")->capture_default_str();
    gcurve->add_option("--tol", c.tol, "series tail tolerance")->capture_default_str();
    add_output_flags(gcurve, c);
    gcurve->footer(
        "Columns: energy, g_plus (even parity), g_minus (odd parity), is_break (1 on a pole, values nan), "
        "pole_index (-1 for samples).\nWith --out, pole locations go to <out>.poles.json.");

    auto* spectrum = app.add_subcommand("spectrum", "regular levels over a g grid, with crossings");
    add_model_flags(spectrum, c, false);
    spectrum->add_option("--gmin", c.gmin)->capture_default_str();
    spectrum->add_option("--gmax", c.gmax)->capture_default_str();
    spectrum->add_option("--gsteps", c.gsteps)->capture_default_str();
    spectrum->add_option("--emin", c.emin, "window start (default: lower bound at gmax)");
    spectrum->add_option("--emax", c.emax, "window end (default: 2 omega)");
    spectrum->add_option("--parity", c.parity, "+, -, or both")->capture_default_str();
    spectrum->add_option("--tol", c.tol, "series tail tolerance")->capture_default_str();
    spectrum->add_flag("--exceptional", c.exceptional, "also locate nondegenerate exceptional points");
    add_output_flags(spectrum, c);
    spectrum->footer(
        "Columns: g, level_index, energy, parity (+/-), kind.\n"
        "Crossings and exceptional points: kind, pole_index, g, energy, parity, on_crossing_line, first_order; "
        "written to <out>.points.<ext> (appended after a blank line on stdout for csv).");

    auto* exceptional = app.add_subcommand("exceptional", "nondegenerate exceptional points on pole curves");
    add_model_flags(exceptional, c, false);
    exceptional->add_option("--gmin", c.gmin)->capture_default_str();
    exceptional->add_option("--gmax", c.gmax)->capture_default_str();
    exceptional->add_option("--m", c.m_max, "highest pole index")->capture_default_str();
    exceptional->add_option("--parity", c.parity, "+, -, or both")->capture_default_str();
    exceptional->add_option("--samples", c.samples, "g samples per scan")->capture_default_str();
    exceptional->add_option("--tol", c.tol, "series tail tolerance")->capture_default_str();
    add_output_flags(exceptional, c);
    exceptional->footer("Columns: pole_index, parity, g, energy.");

    auto* collapse_cmd = app.add_subcommand("collapse", "effective-oscillator branches at |u| = 2 omega");
    c.u = 0.0;
    add_model_flags(collapse_cmd, c, true);
    auto* gmin_opt = collapse_cmd->add_option("--gmin", c.gmin, "sweep start");
    auto* gmax_opt = collapse_cmd->add_option("--gmax", c.gmax, "sweep end (enables sweep mode)");
    collapse_cmd->add_option("--gsteps", c.gsteps, "sweep points")->capture_default_str();
    collapse_cmd->add_option("--levels", c.levels, "lower-branch levels")->capture_default_str();
    collapse_cmd->add_option("--upper-levels", c.upper_levels, "upper-branch levels")->capture_default_str();
    add_output_flags(collapse_cmd, c);
    collapse_cmd->footer(
        "Columns: [g], branch, n, energy, omega_eff, energy_minus_ec, photon_number_approx (lower branch only).\n"
        "--u defaults to 2 omega.");

    auto* ed_cmd = app.add_subcommand("ed", "exact diagonalization in a truncated Fock space");
    add_model_flags(ed_cmd, c, true);
    ed_cmd->add_option("--ntr", c.ntr, "truncation (highest Fock index)")->capture_default_str();
    ed_cmd->add_option("--levels", c.levels, "lowest levels to report (0: all)")->capture_default_str();
    ed_cmd->add_option("--parity", c.parity, "+, -, or both")->capture_default_str();
    ed_cmd->add_option("--ntr-list", c.ntr_list, "comma-separated truncations for a convergence table");
    ed_cmd->add_flag("--full", c.full, "dense solve of the full matrix instead of parity sectors");
    add_output_flags(ed_cmd, c);
    ed_cmd->footer(
        "Columns: level, energy, parity, photon_number.\n"
        "With --ntr-list: n_tr, level, energy, drift, converged.");

    auto* validate = app.add_subcommand("validate", "cross-check the solvers against exact diagonalization");
    validate->add_option("--grid", c.grid, "standard or quick")->capture_default_str();

    bool u_given = false;
    try {
        app.parse(argc, argv);
        u_given = collapse_cmd->count("--u") > 0;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitUsage;
    }

    try {
        if (*gcurve) return cmd_gcurve(c);
        if (*spectrum) return cmd_spectrum(c);
        if (*exceptional) return cmd_exceptional(c);
        if (*collapse_cmd) {
            if (!u_given) c.u = 2.0 * c.omega;
            const bool sweep_mode = gmax_opt->count() > 0;
            if (gmin_opt->count() > 0 && !sweep_mode) throw UsageError("--gmin needs --gmax");
            return cmd_collapse(c, sweep_mode);
        }
        if (*ed_cmd) return cmd_ed(c);
        if (*validate) return cmd_validate(c);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const RegimeError& e) {
        std::cerr << "regime error: " << e.what() << "\n";
        return kExitRegime;
    } catch (const NoLowerBranch& e) {
        std::cerr << "regime error: " << e.what() << "\n";
        return kExitRegime;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
