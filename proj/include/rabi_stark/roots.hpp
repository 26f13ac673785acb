// rabi_stark/roots.hpp: sign-change scanning and bisection
#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace rabi_stark::roots {

struct Bracket {
    double a;
    double b;
    double fa;
    double fb;
};

/// Samples on [a, b] clustered towards both ends (cosine spacing), so roots
/// hugging a pole at either end of a segment are still bracketed.
[[nodiscard]] inline std::vector<double> clustered_grid(double a, double b, int n) {
    std::vector<double> xs;
    if (n < 2) {
        xs = {a, b};
        return xs;
    }
    xs.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double theta = std::numbers::pi * i / (n - 1);
        xs.push_back(a + (b - a) * 0.5 * (1.0 - std::cos(theta)));
    }
    xs.front() = a;
    xs.back() = b;
    return xs;
}

[[nodiscard]] inline std::vector<double> uniform_grid(double a, double b, int n) {
    std::vector<double> xs;
    if (n < 2) return {a, b};
    xs.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) xs.push_back(a + (b - a) * i / (n - 1));
    xs.back() = b;
    return xs;
}

/// Bisection on a bracket with f(a) f(b) < 0. Stops when the interval is
/// no wider than `tol`, or when it can no longer shrink if tol <= 0.
template <class F>
[[nodiscard]] double bisect(F&& f, Bracket br, double tol) {
    double a = br.a;
    double b = br.b;
    double fa = br.fa;
    for (int it = 0; it < 400; ++it) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        if (tol > 0.0 && (b - a) <= tol) break;
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fm < 0.0) == (fa < 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

struct ScanResult {
    std::vector<Bracket> brackets;
    /// Abscissae where |f| has a local minimum below the tangency threshold
    /// without a sign change.
    std::vector<double> tangencies;
};

/// Evaluates f on xs and collects sign-change brackets. Points where f
/// throws are treated as gaps: no bracket is formed across them.
template <class F>
[[nodiscard]] ScanResult scan_sign_changes(F&& f, std::span<const double> xs,
                                           double tangency_threshold = 0.0) {
    ScanResult out;
    std::vector<double> fx(xs.size());
    std::vector<bool> ok(xs.size(), true);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        try {
            fx[i] = f(xs[i]);
            ok[i] = std::isfinite(fx[i]);
        } catch (...) {
            ok[i] = false;
        }
    }
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        if (!ok[i] || !ok[i + 1]) continue;
        if (fx[i] == 0.0) {
            // Exact hit: shrink to a degenerate bracket around it.
            out.brackets.push_back({xs[i], xs[i], 0.0, 0.0});
            continue;
        }
        if ((fx[i] < 0.0) != (fx[i + 1] < 0.0) && fx[i + 1] != 0.0)
            out.brackets.push_back({xs[i], xs[i + 1], fx[i], fx[i + 1]});
    }
    if (!xs.empty() && ok.back() && fx.back() == 0.0)
        out.brackets.push_back({xs.back(), xs.back(), 0.0, 0.0});
    if (tangency_threshold > 0.0) {
        for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
            if (!ok[i - 1] || !ok[i] || !ok[i + 1]) continue;
            const double a = std::abs(fx[i]);
            const bool same_sign = (fx[i - 1] < 0.0) == (fx[i] < 0.0) && (fx[i] < 0.0) == (fx[i + 1] < 0.0);
            if (same_sign && a < tangency_threshold && a <= std::abs(fx[i - 1]) &&
                a <= std::abs(fx[i + 1]))
                out.tangencies.push_back(xs[i]);
        }
    }
    return out;
}

/// Bisects every bracket; degenerate brackets (exact zeros) pass through.
template <class F>
[[nodiscard]] std::vector<double> solve_brackets(F&& f, const std::vector<Bracket>& brs, double tol) {
    std::vector<double> out;
    out.reserve(brs.size());
    for (const auto& br : brs) out.push_back(br.a == br.b ? br.a : bisect(f, br, tol));
    return out;
}

}  // namespace rabi_stark::roots
