// rabi_stark/series.hpp: Ω ratio, three-term recurrence and wavefunction reconstruction
#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "rabi_stark/errors.hpp"
#include "rabi_stark/model.hpp"

namespace rabi_stark {

struct SeriesOptions {
    /// Stop once two consecutive scaled terms fall below this.
    double tol{1e-14};
    int max_order{400};
    /// Energies closer than this to a pole of the G-function are rejected.
    double pole_radius{1e-8};
};

/// Expansion coefficients of the Bogoliubov wavefunction at a fixed trial
/// energy, stored in the scaled form t_n = f_n wⁿ and e_terms_n = e_n wⁿ.
struct CoefficientSeries {
    double energy{};
    std::vector<double> terms;
    std::vector<double> e_terms;
    std::vector<double> ratios;
    int order{};
    bool converged{false};
    double w{};
};

namespace detail {

/// Normalized couplings with the Ω numerator/denominator pieces.
///   Ω_m = x_m / y_m
///   x_m = Uw/(g+w) (Γ_m - E + 2gw) - (Δ + U Γ_m)
///   y_m = Uw/(2(g+w)) (Δ + U Γ_m) - 2 (Γ_m - E - 2gw),   Γ_m = m + w²
/// The recurrence denominator (U/2) w Ω_m - (g + w) is carried as
/// beta_m / y_m with beta_m = (U/2) w x_m - (g + w) y_m, so Ω is never
/// divided out explicitly.
template <std::floating_point T>
struct Couplings {
    T delta;
    T u;
    T g;
    T w;

    static Couplings from(const BoaModel& m) {
        // Rebuild w in T so long double runs keep their extra digits.
        const T u = static_cast<T>(m.u());
        const T g = static_cast<T>(m.g());
        const T w = g / std::sqrt(T(1) - u * u / T(4));
        return {static_cast<T>(m.delta()), u, g, w};
    }

    [[nodiscard]] T gamma(int m) const noexcept { return T(m) + w * w; }

    [[nodiscard]] T x(int m, T e) const noexcept {
        const T gm = gamma(m);
        return u * w / (g + w) * (gm - e + T(2) * g * w) - (delta + u * gm);
    }

    [[nodiscard]] T y(int m, T e) const noexcept {
        const T gm = gamma(m);
        return u * w / (T(2) * (g + w)) * (delta + u * gm) - T(2) * (gm - e - T(2) * g * w);
    }

    [[nodiscard]] T beta(int m, T e) const noexcept {
        return u / T(2) * w * x(m, e) - (g + w) * y(m, e);
    }

    /// |beta| relative to the size of its two pieces; tiny means pole.
    [[nodiscard]] T beta_relative(int m, T e) const noexcept {
        const T a = u / T(2) * w * x(m, e);
        const T b = (g + w) * y(m, e);
        const T scale = std::abs(a) + std::abs(b);
        return scale == T(0) ? T(0) : std::abs(a - b) / scale;
    }

    /// Right-hand side (m+1)(βₘ₊₁/yₘ₊₁) t_{m+1} of the scaled recurrence at row m.
    [[nodiscard]] T rhs(int m, T e, T s_m, T t_m, T s_prev, T t_prev) const noexcept {
        const T gm = gamma(m);
        return w * ((delta + u * gm) / T(2) * s_m - (gm - e + T(2) * g * w) * t_m) -
               w * w * (u / T(2) * w * s_prev - (g + w) * t_prev);
    }
};

template <std::floating_point T>
inline constexpr T kPoleThreshold = T(1e3) * std::numeric_limits<T>::epsilon();

/// Scaled series started at index `start` with (e, f) seeds already
/// multiplied by w^start. Entries below `start` are zero.
template <std::floating_point T>
struct RawSeries {
    std::vector<T> s;
    std::vector<T> t;
    bool converged{false};
};

template <std::floating_point T>
RawSeries<T> run_recurrence(const Couplings<T>& c, T e, int start, T s_start, T t_start,
                            const SeriesOptions& opt) {
    RawSeries<T> out;
    out.s.assign(static_cast<std::size_t>(start) + 1, T(0));
    out.t.assign(static_cast<std::size_t>(start) + 1, T(0));
    out.s.back() = s_start;
    out.t.back() = t_start;
    const T tol = static_cast<T>(opt.tol);
    int small_run = 0;
    for (int k = start; k < opt.max_order; ++k) {
        const T sk = out.s[k];
        const T tk = out.t[k];
        const T sp = k > 0 ? out.s[k - 1] : T(0);
        const T tp = k > 0 ? out.t[k - 1] : T(0);
        const T r = c.rhs(k, e, sk, tk, sp, tp);
        const int n = k + 1;
        const T beta = c.beta(n, e);
        if (c.beta_relative(n, e) <= kPoleThreshold<T>)
            throw PoleProximityError(n, static_cast<double>(e));
        const T scale = r / (T(n) * beta);
        out.s.push_back(scale * c.x(n, e));
        out.t.push_back(scale * c.y(n, e));
        small_run = (std::abs(out.t.back()) + std::abs(out.s.back()) < tol) ? small_run + 1 : 0;
        if (small_run >= 2) {
            out.converged = true;
            break;
        }
    }
    return out;
}

}  // namespace detail

/// Nearest analytic pole index n >= 1 of the regular series, in ω = 1 units.
[[nodiscard]] inline double pole_energy_internal(const BoaModel& m, int n) noexcept {
    return m.c() * m.c() * n - m.u() * m.delta() / 4.0 - m.g() * m.g();
}

[[nodiscard]] inline double pole0_energy_internal(const BoaModel& m) noexcept {
    const double c = m.c();
    const double du = m.delta() * m.u();
    return -(m.g() * m.g() + du / 4.0) / c + du / (4.0 - m.u() * m.u() + 4.0 * c);
}

/// Ω_m at physical energy E.
[[nodiscard]] inline double omega_ratio(int m, double energy, const BoaModel& model) {
    if (m < 0) throw InvalidArgument("omega_ratio: index must be non-negative");
    const auto c = detail::Couplings<double>::from(model);
    const double e = model.to_internal(energy);
    const double x = c.x(m, e);
    const double y = c.y(m, e);
    const double gm = c.gamma(m);
    const double scale = std::abs(c.u * c.w / (2.0 * (c.g + c.w)) * (c.delta + c.u * gm)) +
                         2.0 * (std::abs(gm) + std::abs(e) + 2.0 * c.g * c.w);
    if (std::abs(y) <= 64.0 * std::numeric_limits<double>::epsilon() * scale)
        throw DivergenceError("Omega_" + std::to_string(m) + " diverges at E = " +
                              std::to_string(energy));
    return x / y;
}

[[nodiscard]] inline double omega_ratio(int m, double energy, const ModelParams& p) {
    return omega_ratio(m, energy, BoaModel(p));
}

/// Throws PoleProximityError if the (internal) energy is inside the
/// exclusion radius of E_0^pole or any E_n^pole.
inline void check_pole_distance(const BoaModel& m, double e_internal, double radius_internal) {
    if (std::abs(e_internal - pole0_energy_internal(m)) < radius_internal)
        throw PoleProximityError(0, m.to_physical(e_internal));
    const double spacing = m.c() * m.c();
    const double offset = m.u() * m.delta() / 4.0 + m.g() * m.g();
    const double nearest = std::round((e_internal + offset) / spacing);
    if (nearest >= 1.0 &&
        std::abs(e_internal - pole_energy_internal(m, static_cast<int>(nearest))) < radius_internal)
        throw PoleProximityError(static_cast<int>(nearest), m.to_physical(e_internal));
}

/// Runs the recurrence from f_0 = 1, f_{-1} = 0 at physical energy E.
[[nodiscard]] inline CoefficientSeries coefficient_series(double energy, const BoaModel& model,
                                                          const SeriesOptions& opt = {}) {
    if (opt.max_order < 1 || !(opt.tol > 0.0))
        throw InvalidArgument("coefficient_series: tol must be positive and max_order >= 1");
    const double e = model.to_internal(energy);
    check_pole_distance(model, e, opt.pole_radius / model.omega());

    const auto c = detail::Couplings<double>::from(model);
    const double y0 = c.y(0, e);
    if (std::abs(y0) <= detail::kPoleThreshold<double> * (std::abs(e) + c.gamma(0) + 1.0))
        throw PoleProximityError(0, energy);

    const auto raw = detail::run_recurrence<double>(c, e, 0, c.x(0, e) / y0, 1.0, opt);
    CoefficientSeries out;
    out.energy = energy;
    out.terms = raw.t;
    out.e_terms = raw.s;
    out.order = static_cast<int>(raw.t.size()) - 1;
    out.converged = raw.converged;
    out.w = c.w;
    out.ratios.reserve(raw.t.size());
    for (int n = 0; n <= out.order; ++n) out.ratios.push_back(c.x(n, e) / c.y(n, e));
    return out;
}

[[nodiscard]] inline CoefficientSeries coefficient_series(double energy, const ModelParams& p,
                                                          const SeriesOptions& opt = {}) {
    return coefficient_series(energy, BoaModel(p), opt);
}

/// Two-component state in the Fock basis of the rotated frame
/// (upper = σz = +1 component, lower = σz = -1 component).
struct FockState {
    Eigen::VectorXd upper;
    Eigen::VectorXd lower;
    /// Weight lost by truncating to fock_dim.
    double norm_deficit{};
    /// Weight removed by the parity projection.
    double parity_leak{};
    int terms_used{};

    [[nodiscard]] double overlap(const FockState& o) const {
        return upper.dot(o.upper) + lower.dot(o.lower);
    }
};

struct FockOptions {
    double max_norm_deficit{1e-10};
    double max_parity_leak{1e-6};
};

/// Applies Π = σx (-1)^{a†a} in the rotated frame.
inline void apply_parity(const Eigen::VectorXd& up, const Eigen::VectorXd& dn,
                         Eigen::VectorXd& up_out, Eigen::VectorXd& dn_out) {
    const auto n = up.size();
    up_out.resize(n);
    dn_out.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double s = (k % 2 == 0) ? 1.0 : -1.0;
        up_out[k] = s * dn[k];
        dn_out[k] = s * up[k];
    }
}

/// Expands Σ √n! (e_n, f_n) |n⟩_A in the original Fock basis, where
/// |n⟩_A = (a† + w)ⁿ/√n! e^{-w²/2 - w a†}|0⟩ is a displaced Fock state.
///
/// The scaled coefficients are only summed while their Fock-space weight
/// √n! f_n keeps falling: at an approximate root the tail picks up a
/// component that grows like (2w)^{-n} √n!, which must not be included.
[[nodiscard]] inline FockState fock_coefficients(const CoefficientSeries& series,
                                                 const BoaModel& model, Parity parity,
                                                 int fock_dim, const FockOptions& opt = {}) {
    if (!series.converged) throw ConvergenceError("fock_coefficients: series not converged");
    if (fock_dim < 2) throw InvalidArgument("fock_coefficients: fock_dim must be >= 2");
    const double w = model.w();
    const int order = series.order;

    // Fock-space amplitudes √n! f_n and √n! e_n.
    std::vector<double> amp_f;
    std::vector<double> amp_e;
    double peak = 0.0;
    const double log_w = std::log(w);
    for (int n = 0; n <= order; ++n) {
        const double factor = std::exp(0.5 * std::lgamma(n + 1.0) - n * log_w);
        const double af = series.terms[n] * factor;
        const double ae = series.e_terms[n] * factor;
        const double a = std::max(std::abs(af), std::abs(ae));
        if (n > 0) {
            const double prev = std::max(std::abs(amp_f.back()), std::abs(amp_e.back()));
            if (a < 1e-15 * peak) break;
            if (a > prev && prev < 1e-7 * peak) break;
        }
        peak = std::max(peak, a);
        amp_f.push_back(af);
        amp_e.push_back(ae);
    }
    const int terms = static_cast<int>(amp_f.size());

    // Displaced Fock states need room above fock_dim to measure truncation.
    const int work = fock_dim + 4 * terms + static_cast<int>(std::ceil(8.0 * w * w)) + 40;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(work);
    v[0] = std::exp(-0.5 * w * w);
    for (int k = 1; k < work; ++k) v[k] = v[k - 1] * (-w) / std::sqrt(static_cast<double>(k));

    Eigen::VectorXd up = Eigen::VectorXd::Zero(work);
    Eigen::VectorXd dn = Eigen::VectorXd::Zero(work);
    Eigen::VectorXd next(work);
    for (int n = 0; n < terms; ++n) {
        if (n > 0) {
            next[0] = w * v[0];
            for (int k = 1; k < work; ++k) next[k] = std::sqrt(static_cast<double>(k)) * v[k - 1] + w * v[k];
            v = next / std::sqrt(static_cast<double>(n));
        }
        up += amp_e[n] * v;
        dn += amp_f[n] * v;
    }

    Eigen::VectorXd pu;
    Eigen::VectorXd pd;
    apply_parity(up, dn, pu, pd);
    const double s = sign(parity);
    Eigen::VectorXd proj_up = 0.5 * (up + s * pu);
    Eigen::VectorXd proj_dn = 0.5 * (dn + s * pd);
    const double full = up.squaredNorm() + dn.squaredNorm();
    const double kept = proj_up.squaredNorm() + proj_dn.squaredNorm();

    FockState out;
    out.terms_used = terms;
    out.parity_leak = 1.0 - kept / full;
    if (out.parity_leak > opt.max_parity_leak)
        throw Error("fock_coefficients: state does not carry parity " + to_string(parity) +
                    " (leak " + std::to_string(out.parity_leak) + ")");
    out.upper = proj_up.head(fock_dim);
    out.lower = proj_dn.head(fock_dim);
    const double in_range = out.upper.squaredNorm() + out.lower.squaredNorm();
    out.norm_deficit = 1.0 - in_range / kept;
    if (out.norm_deficit > opt.max_norm_deficit)
        throw Error("fock_coefficients: fock_dim " + std::to_string(fock_dim) +
                    " too small, norm deficit " + std::to_string(out.norm_deficit));
    const double norm = std::sqrt(in_range);
    out.upper /= norm;
    out.lower /= norm;
    return out;
}

/// Bare level at g = 0: photon number n with σx = sx (±1).
/// Energy ω n - sx (Δ + U n)/2, parity (-1)^n for sx = +1, (-1)^{n+1} otherwise.
[[nodiscard]] inline double decoupled_energy(const ModelParams& p, int n, int sx) {
    return p.omega * n - sx * (p.delta + p.u * n) / 2.0;
}

[[nodiscard]] inline Parity decoupled_parity(int n, int sx) {
    const int excitations = n + (sx == 1 ? 0 : 1);
    return excitations % 2 == 0 ? Parity::even : Parity::odd;
}

/// Fock-basis vector of the bare state |n⟩ ⊗ |σx = sx⟩.
[[nodiscard]] inline FockState decoupled_state(int n, int sx, int fock_dim) {
    if (n < 0 || n >= fock_dim) throw InvalidArgument("decoupled_state: n outside fock_dim");
    FockState out;
    out.upper = Eigen::VectorXd::Zero(fock_dim);
    out.lower = Eigen::VectorXd::Zero(fock_dim);
    out.upper[n] = 1.0 / std::sqrt(2.0);
    out.lower[n] = sx / std::sqrt(2.0);
    return out;
}

}  // namespace rabi_stark
