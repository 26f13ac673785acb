// rabi_stark/collapse.hpp: effective oscillator at |U| = 2ω
//
// Free functions work in U = +2, ω = 1 units. CollapseModel maps a physical
// ModelParams with u = ±2ω onto them (U = -2 is U = +2 with Δ -> -Δ).
#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rabi_stark/errors.hpp"
#include "rabi_stark/model.hpp"
#include "rabi_stark/roots.hpp"

namespace rabi_stark::collapse {

enum class Branch { upper, lower };

[[nodiscard]] inline std::string to_string(Branch b) { return b == Branch::upper ? "upper" : "lower"; }

struct CriticalPoint {
    double g_c;
    double e_c;
};

/// E_c^+ = -Δ/2 - 2g², the accumulation point of the lower branch.
[[nodiscard]] inline double collapse_energy(double delta, double g) noexcept { return -delta / 2.0 - 2.0 * g * g; }

/// g_c^+ = sqrt((1 - Δ)/2) together with E_c^+ evaluated there.
[[nodiscard]] inline CriticalPoint critical_point(double delta) {
    if (!(delta < 1.0))
        throw RegimeError("no finite-g collapse for delta >= 1 (got " + std::to_string(delta) + ")");
    const double gc = std::sqrt((1.0 - delta) / 2.0);
    return {gc, collapse_energy(delta, gc)};
}

struct CollapseSolution {
    Branch branch;
    int n;
    double energy;
    double omega_eff;
    /// |E + 1 - Δ/2 - 2 ω_eff (n + 1/2)|
    double residual;
};

[[nodiscard]] inline double omega_eff(double delta, double g, double energy) {
    const double r = 1.0 + 2.0 * g * g / (delta / 2.0 + energy);
    if (!(r > 0.0)) throw RegimeError("effective frequency is imaginary at E = " + std::to_string(energy));
    return std::sqrt(r);
}

namespace detail {

inline CollapseSolution finish(Branch b, int n, double delta, double energy, double w_eff) {
    const double res = std::abs(energy + 1.0 - delta / 2.0 - 2.0 * w_eff * (n + 0.5));
    return {b, n, energy, w_eff, res};
}

inline void check_inputs(double delta, double g, int n) {
    if (n < 0) throw InvalidArgument("oscillator index n must be >= 0");
    if (!(g >= 0.0) || !std::isfinite(g)) throw InvalidArgument("g must be finite and >= 0");
    if (!std::isfinite(delta)) throw InvalidArgument("delta must be finite");
}

}  // namespace detail

/// Root of the branch above -Δ/2, in v = E + Δ/2 > 0:
///   sqrt(v) (v + 1 - Δ) / sqrt(v + 2g²) = 2n + 1.
/// Brackets are found by a geometric scan in v; the lowest root is returned.
[[nodiscard]] inline CollapseSolution solve_upper(double delta, double g, int n) {
    detail::check_inputs(delta, g, n);
    const double target = 2.0 * n + 1.0;
    const double g2 = 2.0 * g * g;
    auto f = [&](double v) { return std::sqrt(v) * (v + 1.0 - delta) / std::sqrt(v + g2) - target; };

    // The left side grows like v for large v, so the root sits below this cap.
    const double v_hi = 4.0 * (target + std::abs(delta) + g2 + 1.0);
    const double v_lo = 1e-300;
    std::vector<double> xs;
    const int samples = 4000;
    for (int i = 0; i <= samples; ++i) xs.push_back(v_lo * std::pow(v_hi / v_lo, static_cast<double>(i) / samples));
    const auto scan = roots::scan_sign_changes(f, xs);
    if (scan.brackets.empty())
        throw NoBracket("upper branch: no sign change of the branch equation for v in [" + std::to_string(v_lo) +
                        ", " + std::to_string(v_hi) + "], n = " + std::to_string(n));
    const double v = scan.brackets.front().a == scan.brackets.front().b ? scan.brackets.front().a
                                                                        : roots::bisect(f, scan.brackets.front(), 0.0);
    const double e = v - delta / 2.0;
    return detail::finish(Branch::upper, n, delta, e, std::sqrt(1.0 + g2 / v));
}

/// Root of the branch below E_c^+, in u = E_c^+ - E > 0:
///   sqrt(u + 2g²) (1 - Δ - 2g² - u) / sqrt(u) = 2n + 1,  0 < u < 1 - Δ - 2g².
/// The left side falls monotonically from +inf to 0, so each n has one root.
[[nodiscard]] inline CollapseSolution solve_lower(double delta, double g, int n) {
    detail::check_inputs(delta, g, n);
    const double g2 = 2.0 * g * g;
    const double width = 1.0 - delta - g2;
    if (!(width > 0.0))
        throw NoLowerBranch("no lower branch: g = " + std::to_string(g) + " is not below g_c^+ for delta = " +
                            std::to_string(delta));
    if (g == 0.0) throw NoLowerBranch("no lower branch at g = 0");
    const double target = 2.0 * n + 1.0;
    // Bisection in log u keeps relative accuracy for the roots crowding at u -> 0.
    auto f = [&](double lu) {
        const double u = std::exp(lu);
        return std::sqrt((u + g2) / u) * (width - u) - target;
    };
    double lo = std::log(std::numeric_limits<double>::min());
    const double hi = std::log(width);
    if (!(f(lo) > 0.0)) throw NoBracket("lower branch: root below the smallest representable offset");
    // Tighten the left end before bisecting so the last steps resolve u itself.
    const double guess = std::log(g2 * width * width / (target * target));
    if (guess > lo && guess < hi && f(guess - 2.0) > 0.0) lo = guess - 2.0;
    const double lu = roots::bisect(f, {lo, hi, f(lo), -target}, 0.0);
    const double u = std::exp(lu);
    const double e = collapse_energy(delta, g) - u;
    return detail::finish(Branch::lower, n, delta, e, std::sqrt(u / (u + g2)));
}

[[nodiscard]] inline std::vector<CollapseSolution> lower_branch(double delta, double g, int count) {
    std::vector<CollapseSolution> out;
    for (int n = 0; n < count; ++n) out.push_back(solve_lower(delta, g, n));
    return out;
}

[[nodiscard]] inline std::vector<CollapseSolution> upper_branch(double delta, double g, int count) {
    std::vector<CollapseSolution> out;
    for (int n = 0; n < count; ++n) out.push_back(solve_upper(delta, g, n));
    return out;
}

/// Asymptotic photon number of a lower-branch level near E_c^+:
///   N ≈ g² + 3g²(Δ + 2g² - 1) / (4(E_n - E_c^+)) + 3 / (8(1 - Δ - 2g²)).
[[nodiscard]] inline double photon_number_approx(double delta, double g, double energy) {
    const double gap = energy - collapse_energy(delta, g);
    if (gap == 0.0) throw DivergenceError("photon number diverges at E = E_c^+");
    const double width = 1.0 - delta - 2.0 * g * g;
    if (width == 0.0) throw DivergenceError("photon number diverges at g = g_c^+");
    return g * g + 3.0 * g * g * (delta + 2.0 * g * g - 1.0) / (4.0 * gap) + 3.0 / (8.0 * width);
}

// ---------------------------------------------------------------------------
// Wavefunctions

/// Normalized oscillator eigenfunctions φ_0..φ_nmax (mω = 1) at ξ, by the
/// stable three-term recurrence; φ_n ∝ H_n(ξ) exp(-ξ²/2).
[[nodiscard]] inline std::vector<double> hermite_functions(int nmax, double xi) {
    std::vector<double> phi(static_cast<std::size_t>(nmax) + 1);
    phi[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-xi * xi / 2.0);
    if (nmax >= 1) phi[1] = std::sqrt(2.0) * xi * phi[0];
    for (int k = 1; k < nmax; ++k)
        phi[k + 1] = std::sqrt(2.0 / (k + 1)) * xi * phi[k] - std::sqrt(static_cast<double>(k) / (k + 1)) * phi[k - 1];
    return phi;
}

/// Two-component state sampled on a uniform x grid, in the σz basis of the
/// unrotated Hamiltonian with x = (a + a†)/√2.
struct Wavefunction {
    std::vector<double> x;
    std::vector<double> psi1;
    std::vector<double> psi2;
    /// Largest |ψ| on the two grid edges relative to the peak.
    double edge_weight{};
};

/// ψ = (1, g√2 x/(E + Δ/2)) φ_n(√ω_eff x), normalized on the grid.
[[nodiscard]] inline Wavefunction wavefunction_ho(double delta, double g, const CollapseSolution& s,
                                                  const std::vector<double>& x_grid, double max_edge_weight = 1e-8) {
    if (x_grid.size() < 3) throw InvalidArgument("x grid needs at least 3 points");
    const double dx = x_grid[1] - x_grid[0];
    if (!(dx > 0.0)) throw InvalidArgument("x grid must be ascending");
    const double denom = s.energy + delta / 2.0;
    if (denom == 0.0) throw DivergenceError("second component diverges at E = -delta/2");
    const double scale = std::sqrt(s.omega_eff);
    Wavefunction wf;
    wf.x = x_grid;
    double norm = 0.0;
    double peak = 0.0;
    for (const double x : x_grid) {
        const double a = hermite_functions(s.n, scale * x)[static_cast<std::size_t>(s.n)];
        const double b = g * std::sqrt(2.0) * x / denom * a;
        wf.psi1.push_back(a);
        wf.psi2.push_back(b);
        norm += (a * a + b * b) * dx;
        peak = std::max({peak, std::abs(a), std::abs(b)});
    }
    const double inv = 1.0 / std::sqrt(norm);
    for (auto& v : wf.psi1) v *= inv;
    for (auto& v : wf.psi2) v *= inv;
    const auto edge = [&](std::size_t i) { return std::max(std::abs(wf.psi1[i]), std::abs(wf.psi2[i])); };
    wf.edge_weight = std::max(edge(0), edge(x_grid.size() - 1)) / (peak * inv);
    if (wf.edge_weight > max_edge_weight)
        throw ConvergenceError("x grid too narrow: edge weight " + std::to_string(wf.edge_weight));
    return wf;
}

/// Grid wide enough for wavefunction_ho at this solution.
[[nodiscard]] inline std::vector<double> default_x_grid(const CollapseSolution& s, int points = 4001) {
    const double turning = std::sqrt((2.0 * s.n + 1.0) / s.omega_eff);
    const double half = turning + 12.0 / std::sqrt(s.omega_eff);
    std::vector<double> xs;
    for (int i = 0; i < points; ++i) xs.push_back(-half + 2.0 * half * i / (points - 1));
    return xs;
}

/// Fock-basis amplitudes ⟨k|ψ_i⟩ (k < fock_dim) by quadrature on the grid.
/// Returns a stacked vector (component 1, then component 2).
[[nodiscard]] inline Eigen::VectorXd project_to_fock(const Wavefunction& wf, int fock_dim) {
    if (fock_dim < 1) throw InvalidArgument("fock_dim must be >= 1");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(2 * fock_dim);
    const double dx = wf.x[1] - wf.x[0];
    for (std::size_t i = 0; i < wf.x.size(); ++i) {
        const auto phi = hermite_functions(fock_dim - 1, wf.x[i]);
        for (int k = 0; k < fock_dim; ++k) {
            out[k] += phi[static_cast<std::size_t>(k)] * wf.psi1[i] * dx;
            out[fock_dim + k] += phi[static_cast<std::size_t>(k)] * wf.psi2[i] * dx;
        }
    }
    return out;
}

/// Maps a full-basis ED vector (rotated frame, see ed.hpp) to the σz basis
/// used by wavefunction_ho.
[[nodiscard]] inline Eigen::VectorXd ed_to_sigma_z(const Eigen::VectorXd& v) {
    const auto m = v.size() / 2;
    Eigen::VectorXd out(v.size());
    const double r = 1.0 / std::sqrt(2.0);
    for (Eigen::Index n = 0; n < m; ++n) {
        out[n] = r * (v[n] - v[m + n]);
        out[m + n] = r * (v[n] + v[m + n]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Physical-unit wrapper

/// A ModelParams with u = ±2ω, reduced to the U = +2, ω = 1 problem.
class CollapseModel {
public:
    explicit CollapseModel(const ModelParams& p) : params_(p) {
        p.validate();
        if (!is_collapse_regime(p))
            throw RegimeError("collapse pathway requires |u/omega| = 2, got " + std::to_string(p.u_ratio()));
        delta_ = (p.u > 0.0 ? 1.0 : -1.0) * p.delta / p.omega;
        g_ = p.g / p.omega;
    }

    [[nodiscard]] const ModelParams& params() const noexcept { return params_; }
    /// Δ/ω, sign-flipped for U = -2.
    [[nodiscard]] double delta_eff() const noexcept { return delta_; }
    [[nodiscard]] double g() const noexcept { return g_; }

    [[nodiscard]] double collapse_energy() const noexcept {
        return params_.omega * collapse::collapse_energy(delta_, g_);
    }
    [[nodiscard]] CriticalPoint critical_point() const {
        auto c = collapse::critical_point(delta_);
        return {c.g_c * params_.omega, c.e_c * params_.omega};
    }
    [[nodiscard]] bool has_lower_branch() const noexcept { return g_ > 0.0 && 1.0 - delta_ - 2.0 * g_ * g_ > 0.0; }

    [[nodiscard]] CollapseSolution lower(int n) const { return physical(solve_lower(delta_, g_, n)); }
    [[nodiscard]] CollapseSolution upper(int n) const { return physical(solve_upper(delta_, g_, n)); }

    [[nodiscard]] double photon_number_approx(double energy) const {
        return collapse::photon_number_approx(delta_, g_, energy / params_.omega);
    }

private:
    [[nodiscard]] CollapseSolution physical(CollapseSolution s) const {
        s.energy *= params_.omega;
        s.residual *= params_.omega;
        return s;
    }

    ModelParams params_;
    double delta_{};
    double g_{};
};

}  // namespace rabi_stark::collapse
