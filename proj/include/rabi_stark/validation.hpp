// rabi_stark/validation.hpp: cross-checks of the analytic solvers against ED
#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "rabi_stark/collapse.hpp"
#include "rabi_stark/ed.hpp"
#include "rabi_stark/spectrum.hpp"

namespace rabi_stark::validation {

struct Check {
    std::string name;
    bool passed{};
    std::string detail;
};

namespace detail {

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

/// Smallest |a - e| over a.
inline double distance_to(const std::vector<double>& a, double e) {
    double best = 1e300;
    for (const double x : a) best = std::min(best, std::abs(x - e));
    return best;
}

/// Gap between the level nearest e and its closest neighbour.
inline double neighbour_gap(const std::vector<double>& sorted, double e) {
    const auto it = std::min_element(sorted.begin(), sorted.end(),
                                     [&](double a, double b) { return std::abs(a - e) < std::abs(b - e); });
    double gap = 1e300;
    if (it != sorted.begin()) gap = std::min(gap, *it - *(it - 1));
    if (it + 1 != sorted.end()) gap = std::min(gap, *(it + 1) - *it);
    return gap;
}

inline std::vector<double> merged_sectors(const ModelParams& p, int n_tr) {
    auto a = ed::sector_eigenvalues(p, n_tr, Parity::even);
    const auto b = ed::sector_eigenvalues(p, n_tr, Parity::odd);
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    return a;
}

}  // namespace detail

/// Lowest `count` G-function roots of each parity against parity-sector ED.
inline Check regular_vs_ed(const ModelParams& p, int count, int n_tr, double tol) {
    const BoaModel model(p);
    double worst = 0.0;
    for (const Parity par : {Parity::even, Parity::odd}) {
        const auto roots = lowest_regular_levels(model, par, count).levels;
        const auto ref = ed::sector_eigenvalues(p, n_tr, par, count);
        for (int i = 0; i < count; ++i) worst = std::max(worst, std::abs(roots[i].energy - ref[i]));
    }
    std::ostringstream name;
    name << "regular roots vs ED (delta=" << p.delta << ", u=" << p.u << ", g=" << p.g << ")";
    return {name.str(), worst <= tol, "max |dE| = " + detail::fmt(worst)};
}

/// ED double degeneracy at each ladder coupling g_c^(n), n = 0..n_top.
inline Check juddian_ladder(const FamilyParams& f, int n_top, int n_tr, double tol) {
    double worst_gap = 0.0;
    double worst_energy = 0.0;
    const double e_cross = crossing_energy(f);
    for (int n = 0; n <= n_top; ++n) {
        const double g = juddian_gcn(n, f);
        const auto levels = detail::merged_sectors(f.with_g(g), n_tr);
        std::vector<double> near = levels;
        std::sort(near.begin(), near.end(),
                  [&](double a, double b) { return std::abs(a - e_cross) < std::abs(b - e_cross); });
        worst_gap = std::max(worst_gap, std::abs(near[0] - near[1]));
        worst_energy = std::max(worst_energy, std::abs(near[0] - e_cross));
    }
    std::ostringstream name;
    name << "Juddian ladder degeneracy (delta=" << f.delta << ", u=" << f.u << ", n=0.." << n_top << ")";
    return {name.str(), worst_gap < tol && worst_energy < tol,
            "max gap = " + detail::fmt(worst_gap) + ", max |E + delta/U| = " + detail::fmt(worst_energy)};
}

/// Exceptional nondegenerate points on pole curves 0..m_top against ED.
inline Check exceptional_vs_ed(const FamilyParams& f, int m_top, double g_hi, int n_tr, double tol,
                               double min_gap) {
    double worst = 0.0;
    double smallest_gap = 1e300;
    int count = 0;
    for (int m = 0; m <= m_top; ++m)
        for (const Parity par : {Parity::even, Parity::odd})
            for (const auto& lvl : exceptional_nondegenerate(m, par, f, 0.0, g_hi)) {
                ++count;
                const auto levels = detail::merged_sectors(f.with_g(lvl.g), n_tr);
                worst = std::max(worst, detail::distance_to(levels, lvl.energy));
                smallest_gap = std::min(smallest_gap, detail::neighbour_gap(levels, lvl.energy));
            }
    std::ostringstream name;
    name << "exceptional points vs ED (delta=" << f.delta << ", u=" << f.u << ", m=0.." << m_top << ")";
    return {name.str(), count > 0 && worst < tol && smallest_gap > min_gap,
            std::to_string(count) + " points, max |dE| = " + detail::fmt(worst) +
                ", min neighbour gap = " + detail::fmt(smallest_gap)};
}

/// Branch roots at U = +2 against ED.
inline Check collapse_vs_ed(double delta, double g, int lower, int upper, int n_tr, double tol) {
    const auto levels = detail::merged_sectors({delta, 1.0, 2.0, g}, n_tr);
    double worst = 0.0;
    for (int n = 0; n < lower; ++n)
        worst = std::max(worst, std::abs(collapse::solve_lower(delta, g, n).energy - levels[static_cast<std::size_t>(n)]));
    // Truncation leaves a spurious level at exactly -delta/2.
    std::vector<double> above;
    for (const double e : levels)
        if (e > -delta / 2.0 + 1e-9) above.push_back(e);
    for (int n = 0; n < upper; ++n)
        worst = std::max(worst, std::abs(collapse::solve_upper(delta, g, n).energy - above[static_cast<std::size_t>(n)]));
    std::ostringstream name;
    name << "collapse branches vs ED (delta=" << delta << ", g=" << g << ")";
    return {name.str(), worst <= tol, "max |dE| = " + detail::fmt(worst)};
}

/// The reference grid run by `validate --grid standard`.
inline std::vector<Check> standard_grid() {
    std::vector<Check> out;
    for (const double delta : {0.5, 1.0})
        for (const double u : {-1.0, 1.0, 1.9})
            for (const double g : {0.1, 0.7}) out.push_back(regular_vs_ed({delta, 1.0, u, g}, 6, 300, 1e-6));
    out.push_back(regular_vs_ed({0.5, 1.0, 0.0, 0.7}, 6, 300, 1e-6));
    out.push_back(juddian_ladder({0.5, 1.0, 1.0}, 3, 400, 1e-6));
    out.push_back(juddian_ladder({1.0, 1.0, 1.9}, 2, 400, 1e-6));
    out.push_back(exceptional_vs_ed({1.0, 1.0, 1.9}, 3, 1.0, 400, 1e-5, 1e-4));
    out.push_back(collapse_vs_ed(0.5, 0.3, 5, 3, 2000, 1e-4));
    return out;
}

/// A fast subset for smoke runs.
inline std::vector<Check> quick_grid() {
    return {regular_vs_ed({0.5, 1.0, 1.0, 0.1}, 4, 200, 1e-6), juddian_ladder({0.5, 1.0, 1.0}, 1, 300, 1e-6),
            collapse_vs_ed(0.5, 0.3, 2, 1, 1000, 1e-4)};
}

}  // namespace rabi_stark::validation
