// rabi_stark/model.hpp: physical parameters, parity and the |U| < 2ω pathway
#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "rabi_stark/errors.hpp"

namespace rabi_stark {

/// Physical parameters of the Rabi-Stark Hamiltonian
///   H = -(Δ + U a†a) σx / 2 + ω a†a + g (a† + a) σz
/// (the frame rotated about y). All four are energies; ω sets the unit.
struct ModelParams {
    double delta{0.5};
    double omega{1.0};
    double u{0.0};
    double g{0.0};

    void validate() const {
        if (!(omega > 0.0) || !std::isfinite(omega))
            throw InvalidArgument("omega must be positive, got " + std::to_string(omega));
        if (!(delta > 0.0) || !std::isfinite(delta))
            throw InvalidArgument("delta must be positive, got " + std::to_string(delta));
        if (!(g >= 0.0) || !std::isfinite(g))
            throw InvalidArgument("g must be non-negative, got " + std::to_string(g));
        if (!std::isfinite(u)) throw InvalidArgument("u must be finite");
    }

    [[nodiscard]] double u_ratio() const noexcept { return u / omega; }
};

/// Parameters with the coupling left free, for scans over g.
struct FamilyParams {
    double delta{0.5};
    double omega{1.0};
    double u{0.0};

    [[nodiscard]] ModelParams with_g(double g) const noexcept { return {delta, omega, u, g}; }
};

/// Eigenvalue of Π = exp(iπN̂), N̂ = (1 - σx)/2 + a†a.
enum class Parity : int { even = 1, odd = -1 };

[[nodiscard]] constexpr int sign(Parity p) noexcept { return static_cast<int>(p); }

[[nodiscard]] constexpr Parity flip(Parity p) noexcept {
    return p == Parity::even ? Parity::odd : Parity::even;
}

[[nodiscard]] inline Parity parity_from_sign(int s) {
    if (s == 1) return Parity::even;
    if (s == -1) return Parity::odd;
    throw InvalidArgument("parity sign must be +1 or -1, got " + std::to_string(s));
}

[[nodiscard]] inline std::string to_string(Parity p) { return p == Parity::even ? "+" : "-"; }

inline constexpr double kCollapseRatioTolerance = 1e-12;

[[nodiscard]] inline bool is_collapse_regime(const ModelParams& p) noexcept {
    return std::abs(std::abs(p.u_ratio()) - 2.0) <= kCollapseRatioTolerance;
}

/// Validated model on the Bogoliubov-operator pathway (|U| < 2ω, g > 0).
/// Stores everything in ω = 1 units; energies cross the API boundary in
/// physical units and are rescaled by the accessors below.
class BoaModel {
public:
    explicit BoaModel(const ModelParams& p) : params_(p) {
        p.validate();
        const double ur = p.u_ratio();
        if (std::abs(ur) >= 2.0 - kCollapseRatioTolerance)
            throw RegimeError("Bogoliubov pathway requires |u/omega| < 2, got " + std::to_string(ur));
        if (p.g == 0.0)
            throw RegimeError("g = 0 is the decoupled limit; use decoupled_levels()");
        delta_ = p.delta / p.omega;
        u_ = ur;
        g_ = p.g / p.omega;
        c_ = std::sqrt(1.0 - u_ * u_ / 4.0);
        w_ = g_ / c_;
    }

    [[nodiscard]] const ModelParams& params() const noexcept { return params_; }
    [[nodiscard]] double omega() const noexcept { return params_.omega; }

    // Normalized (ω = 1) quantities.
    [[nodiscard]] double delta() const noexcept { return delta_; }
    [[nodiscard]] double u() const noexcept { return u_; }
    [[nodiscard]] double g() const noexcept { return g_; }
    /// sqrt(1 - U²/4); also the square root of the pole spacing.
    [[nodiscard]] double c() const noexcept { return c_; }
    /// Bogoliubov displacement w = g / sqrt(1 - U²/4).
    [[nodiscard]] double w() const noexcept { return w_; }

    [[nodiscard]] double to_internal(double energy) const noexcept { return energy / params_.omega; }
    [[nodiscard]] double to_physical(double energy) const noexcept { return energy * params_.omega; }

private:
    ModelParams params_;
    double delta_{};
    double u_{};
    double g_{};
    double c_{};
    double w_{};
};

/// Shift of the Bogoliubov operator A = a + w, in units of ω.
[[nodiscard]] inline double shift_w(const ModelParams& p) {
    p.validate();
    const double ur = p.u_ratio();
    const double denom = 1.0 - ur * ur / 4.0;
    if (!(denom > 0.0))
        throw RegimeError("shift w undefined for |u/omega| >= 2 (collapse regime), got " +
                          std::to_string(ur));
    return (p.g / p.omega) / std::sqrt(denom);
}

}  // namespace rabi_stark
