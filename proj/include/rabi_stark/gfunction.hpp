// rabi_stark/gfunction.hpp: G-function and its pole ladder
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "rabi_stark/errors.hpp"
#include "rabi_stark/model.hpp"
#include "rabi_stark/series.hpp"

namespace rabi_stark {

namespace detail {

inline void require_boa_regime(const ModelParams& p) {
    p.validate();
    if (std::abs(p.u_ratio()) >= 2.0 - kCollapseRatioTolerance)
        throw RegimeError("pole structure requires |u/omega| < 2");
}

struct Normalized {
    double delta;
    double u;
    double g;
    double c;
};

inline Normalized normalize(const ModelParams& p) {
    require_boa_regime(p);
    const double u = p.u_ratio();
    return {p.delta / p.omega, u, p.g / p.omega, std::sqrt(1.0 - u * u / 4.0)};
}

}  // namespace detail

/// E_n^pole = (1 - U²/4) n - UΔ/4 - g² for n >= 1.
[[nodiscard]] inline double pole_n(int n, const ModelParams& p) {
    if (n < 1) throw InvalidArgument("pole_n requires n >= 1; use pole_0 for the zeroth pole");
    const auto q = detail::normalize(p);
    return p.omega * (q.c * q.c * n - q.u * q.delta / 4.0 - q.g * q.g);
}

/// Zeroth pole, where Ω_0 ± 1 diverges.
[[nodiscard]] inline double pole_0(const ModelParams& p) {
    const auto q = detail::normalize(p);
    const double du = q.delta * q.u;
    return p.omega * (-(q.g * q.g + du / 4.0) / q.c + du / (4.0 - q.u * q.u + 4.0 * q.c));
}

/// Energy where Ω_n diverges. Not a pole of G for n >= 1; diagnostic only.
[[nodiscard]] inline double omega_pole(int n, const ModelParams& p) {
    if (n < 0) throw InvalidArgument("omega_pole requires n >= 0");
    const auto q = detail::normalize(p);
    const double en = q.c * q.c * n - q.u * q.delta / 4.0 - q.g * q.g;
    return p.omega * (en / q.c + q.delta * q.u / (4.0 - q.u * q.u + 4.0 * q.c));
}

struct PoleSet {
    double pole0{};
    /// poles[i] = E_{i+1}^pole.
    std::vector<double> poles;
    /// omega_poles[i] = E_Ω_i.
    std::vector<double> omega_poles;
};

/// Pole ladder covering every pole up to e_max, plus two spare rungs.
[[nodiscard]] inline PoleSet make_pole_set(const ModelParams& p, double e_max) {
    const auto q = detail::normalize(p);
    const double offset = q.u * q.delta / 4.0 + q.g * q.g;
    const double reach = (e_max / p.omega + offset) / (q.c * q.c);
    const int n_cap = std::max(1, static_cast<int>(std::ceil(std::max(reach, 0.0))) + 2);
    PoleSet out;
    out.pole0 = pole_0(p);
    out.poles.reserve(n_cap);
    for (int n = 1; n <= n_cap; ++n) out.poles.push_back(pole_n(n, p));
    for (int n = 0; n <= n_cap; ++n) out.omega_poles.push_back(omega_pole(n, p));
    return out;
}

struct Pole {
    double energy;
    int index;
};

/// All poles of G (zeroth included) inside [lo, hi], ascending.
[[nodiscard]] inline std::vector<Pole> poles_in(const ModelParams& p, double lo, double hi) {
    std::vector<Pole> out;
    if (!(hi >= lo)) return out;
    const auto set = make_pole_set(p, hi);
    if (set.pole0 >= lo && set.pole0 <= hi) out.push_back({set.pole0, 0});
    for (std::size_t i = 0; i < set.poles.size(); ++i)
        if (set.poles[i] >= lo && set.poles[i] <= hi)
            out.push_back({set.poles[i], static_cast<int>(i) + 1});
    std::sort(out.begin(), out.end(), [](const Pole& a, const Pole& b) { return a.energy < b.energy; });
    return out;
}

/// Sums Σ (Ω_n ∓ 1) t_n for parity ±. An even (Π = +1) state is a zero of
/// Σ (Ω_n - 1) f_n wⁿ, an odd one of Σ (Ω_n + 1) f_n wⁿ.
[[nodiscard]] inline double g_sum(const CoefficientSeries& s, Parity parity) {
    const double sg = sign(parity);
    double total = 0.0;
    for (std::size_t n = 0; n < s.terms.size(); ++n) total += s.e_terms[n] - sg * s.terms[n];
    return total;
}

[[nodiscard]] inline double evaluate_g(double energy, Parity parity, const BoaModel& model,
                                       const SeriesOptions& opt = {}) {
    const auto s = coefficient_series(energy, model, opt);
    if (!s.converged)
        throw ConvergenceError("G-function series did not converge within " +
                               std::to_string(opt.max_order) + " terms at E = " +
                               std::to_string(energy));
    return g_sum(s, parity);
}

[[nodiscard]] inline double evaluate_g(double energy, Parity parity, const ModelParams& p,
                                       const SeriesOptions& opt = {}) {
    return evaluate_g(energy, parity, BoaModel(p), opt);
}

/// Both parities at once, sharing one series.
struct GPair {
    double plus;
    double minus;
};

[[nodiscard]] inline GPair evaluate_g_pair(double energy, const BoaModel& model,
                                           const SeriesOptions& opt = {}) {
    const auto s = coefficient_series(energy, model, opt);
    if (!s.converged)
        throw ConvergenceError("G-function series did not converge at E = " + std::to_string(energy));
    return {g_sum(s, Parity::even), g_sum(s, Parity::odd)};
}

/// One sampled row of the G-curves. Break rows sit exactly on a pole and
/// carry NaN values.
struct GCurveRow {
    double energy;
    double g_plus;
    double g_minus;
    bool is_break;
    int pole_index{-1};
};

/// Uniform sampling of both G-curves over [e_min, e_max]; samples inside an
/// exclusion radius are dropped and a break row is emitted at every pole.
[[nodiscard]] inline std::vector<GCurveRow> g_curve(double e_min, double e_max, int samples,
                                                    const BoaModel& model,
                                                    const SeriesOptions& opt = {}) {
    std::vector<GCurveRow> rows;
    if (!(e_max > e_min) || samples < 1) return rows;
    const auto poles = poles_in(model.params(), e_min, e_max);
    std::size_t next_pole = 0;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double step = samples > 1 ? (e_max - e_min) / (samples - 1) : 0.0;
    for (int i = 0; i < samples; ++i) {
        const double e = samples > 1 ? e_min + i * step : e_min;
        while (next_pole < poles.size() && poles[next_pole].energy <= e) {
            rows.push_back({poles[next_pole].energy, nan, nan, true, poles[next_pole].index});
            ++next_pole;
        }
        try {
            const auto gp = evaluate_g_pair(e, model, opt);
            rows.push_back({e, gp.plus, gp.minus, false});
        } catch (const PoleProximityError&) {
            // inside an exclusion radius; the break row marks it
        }
    }
    for (; next_pole < poles.size(); ++next_pole)
        rows.push_back({poles[next_pole].energy, nan, nan, true, poles[next_pole].index});
    return rows;
}

}  // namespace rabi_stark
