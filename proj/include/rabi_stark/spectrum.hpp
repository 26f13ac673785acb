// rabi_stark/spectrum.hpp: regular levels, Juddian crossings, exceptional points, g-sweeps
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "rabi_stark/ed.hpp"
#include "rabi_stark/errors.hpp"
#include "rabi_stark/gfunction.hpp"
#include "rabi_stark/model.hpp"
#include "rabi_stark/parallel.hpp"
#include "rabi_stark/roots.hpp"
#include "rabi_stark/series.hpp"

namespace rabi_stark {

enum class LevelKind { regular, juddian, exceptional_nondegenerate, collapse_branch };

[[nodiscard]] inline std::string to_string(LevelKind k) {
    switch (k) {
        case LevelKind::regular: return "regular";
        case LevelKind::juddian: return "juddian";
        case LevelKind::exceptional_nondegenerate: return "exceptional_nondegenerate";
        case LevelKind::collapse_branch: return "collapse_branch";
    }
    return "unknown";
}

struct EnergyLevel {
    double energy{};
    /// Empty for doubly degenerate (Juddian) levels.
    std::optional<Parity> parity;
    double g{};
    LevelKind kind{LevelKind::regular};
    std::optional<int> pole_index;
};

// ---------------------------------------------------------------------------
// Regular spectrum

struct RegularSearchOptions {
    int samples_per_segment{64};
    /// Bisection stops at this bracket width; <= 0 bisects to machine precision.
    double energy_tol{1e-10};
    double tangency_threshold{1e-9};
    SeriesOptions series{};
    /// Truncation for the optional ED cross-check (0 disables it).
    int ed_check_ntr{0};
    int max_refinements{4};
    double match_tol{1e-6};
};

struct LevelSearch {
    std::vector<EnergyLevel> levels;
    std::vector<std::string> warnings;
    int samples_used{};
};

/// Rigorous lower bound -Δ/2 - g²/(ω - |U|/2) on the whole spectrum.
[[nodiscard]] inline double spectrum_lower_bound(const ModelParams& p) {
    p.validate();
    const double soft = p.omega - std::abs(p.u) / 2.0;
    if (!(soft > 0.0)) throw RegimeError("spectrum_lower_bound requires |u/omega| < 2");
    return -p.delta / 2.0 - p.g * p.g / soft;
}

/// Levels of the g = 0 Hamiltonian inside [lo, hi].
[[nodiscard]] inline std::vector<EnergyLevel> decoupled_levels(const ModelParams& p, double lo, double hi) {
    p.validate();
    std::vector<EnergyLevel> out;
    const double slope = p.omega - std::abs(p.u) / 2.0;
    const int n_cap = slope > 0.0 ? static_cast<int>(std::ceil((hi + p.delta) / slope)) + 2 : 0;
    for (int n = 0; n <= n_cap; ++n) {
        for (const int sx : {1, -1}) {
            const double e = decoupled_energy(p, n, sx);
            if (e >= lo && e <= hi) out.push_back({e, decoupled_parity(n, sx), p.g, LevelKind::regular, {}});
        }
    }
    std::sort(out.begin(), out.end(), [](const EnergyLevel& a, const EnergyLevel& b) { return a.energy < b.energy; });
    return out;
}

namespace detail {

inline std::vector<double> scan_window(const BoaModel& model, Parity parity, double lo, double hi, int samples,
                                       const RegularSearchOptions& opt, std::vector<std::string>& warnings) {
    const auto poles = poles_in(model.params(), lo, hi);
    const double margin = 2.0 * opt.series.pole_radius;
    std::vector<double> cuts;
    cuts.push_back(lo);
    for (const auto& p : poles) cuts.push_back(p.energy);
    cuts.push_back(hi);

    auto g_of = [&](double e) { return evaluate_g(e, parity, model, opt.series); };
    std::vector<double> roots_found;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const bool left_pole = i > 0;
        const bool right_pole = i + 2 < cuts.size();
        const double a = cuts[i] + (left_pole ? margin : 0.0);
        const double b = cuts[i + 1] - (right_pole ? margin : 0.0);
        if (!(b > a)) continue;
        const auto xs = roots::clustered_grid(a, b, samples);
        const auto scan = roots::scan_sign_changes(g_of, xs, opt.tangency_threshold);
        for (const double r : roots::solve_brackets(g_of, scan.brackets, opt.energy_tol)) roots_found.push_back(r);
        for (const double t : scan.tangencies)
            warnings.push_back("suspected tangency of G" + to_string(parity) + " near E = " + std::to_string(t));
    }
    std::sort(roots_found.begin(), roots_found.end());
    return roots_found;
}

}  // namespace detail

/// Zeros of the G-function of one parity inside [lo, hi]. The window is cut
/// at every pole and each open segment is scanned for sign changes and
/// bisected. With ed_check_ntr > 0 the result is compared with the parity
/// sector of an exact diagonalization and the sampling is doubled while ED
/// levels remain unmatched.
[[nodiscard]] inline LevelSearch find_regular_levels(const BoaModel& model, Parity parity, double lo, double hi,
                                                     const RegularSearchOptions& opt = {}) {
    if (opt.samples_per_segment < 2) throw InvalidArgument("samples_per_segment must be >= 2");
    LevelSearch out;
    if (!(hi > lo)) return out;

    std::vector<double> reference;
    if (opt.ed_check_ntr > 0) {
        const auto ed_levels = ed::sector_eigenvalues(model.params(), opt.ed_check_ntr, parity);
        const auto poles = poles_in(model.params(), lo, hi);
        for (const double e : ed_levels) {
            if (e < lo || e > hi) continue;
            // Levels sitting on a pole are exceptional, not zeros of G.
            const bool on_pole = std::any_of(poles.begin(), poles.end(), [&](const Pole& p) {
                return std::abs(p.energy - e) < opt.match_tol;
            });
            if (!on_pole) reference.push_back(e);
        }
    }

    int samples = opt.samples_per_segment;
    std::vector<double> roots_found;
    for (int attempt = 0;; ++attempt) {
        std::vector<std::string> warnings;
        roots_found = detail::scan_window(model, parity, lo, hi, samples, opt, warnings);
        int unmatched = 0;
        for (const double e : reference) {
            const bool hit = std::any_of(roots_found.begin(), roots_found.end(),
                                         [&](double r) { return std::abs(r - e) <= opt.match_tol; });
            if (!hit) ++unmatched;
        }
        if (unmatched == 0 || attempt >= opt.max_refinements) {
            out.warnings = std::move(warnings);
            if (unmatched > 0)
                out.warnings.push_back(std::to_string(unmatched) + " ED level(s) of parity " + to_string(parity) +
                                       " unmatched with " + std::to_string(samples) +
                                       " samples per segment; sampling too coarse");
            break;
        }
        samples *= 2;
    }
    out.samples_used = samples;
    for (const double r : roots_found) out.levels.push_back({r, parity, model.params().g, LevelKind::regular, {}});
    return out;
}

/// The `count` lowest regular levels of one parity; the search window grows
/// upward from the spectrum lower bound until enough zeros are found.
[[nodiscard]] inline LevelSearch lowest_regular_levels(const BoaModel& model, Parity parity, int count,
                                                       const RegularSearchOptions& opt = {}) {
    if (count < 1) throw InvalidArgument("count must be >= 1");
    const auto& p = model.params();
    const double lo = spectrum_lower_bound(p) - 1e-3 * p.omega;
    double span = (count + 2.0) * p.omega;
    for (int attempt = 0; attempt < 12; ++attempt, span *= 2.0) {
        auto found = find_regular_levels(model, parity, lo, lo + span, opt);
        if (static_cast<int>(found.levels.size()) >= count) {
            found.levels.resize(static_cast<std::size_t>(count));
            return found;
        }
    }
    throw ConvergenceError("could not locate " + std::to_string(count) + " regular levels of parity " +
                           to_string(parity));
}

// ---------------------------------------------------------------------------
// Juddian (doubly degenerate) crossings

/// Coupling of the n-th crossing on the line E = -Δ/U:
///   g_c^(n) = sqrt((n + Δ/U)(1 - U²/4)).
/// Throws NoCrossing when the radicand is not positive.
[[nodiscard]] inline double juddian_gcn(int n, const FamilyParams& f) {
    if (n < 0) throw InvalidArgument("juddian_gcn requires n >= 0");
    const auto p = f.with_g(0.0);
    p.validate();
    const double u = p.u_ratio();
    if (std::abs(u) >= 2.0 - kCollapseRatioTolerance) throw RegimeError("juddian_gcn requires |u/omega| < 2");
    if (u == 0.0) throw NoCrossing("no Juddian ladder on E = -delta/U for U = 0");
    const double d = p.delta / p.omega;
    const double radicand = (n + d / u) * (1.0 - u * u / 4.0);
    if (!(radicand > 0.0))
        throw NoCrossing("no real crossing coupling for n = " + std::to_string(n));
    return p.omega * std::sqrt(radicand);
}

/// First-order transition coupling g_c, where the lowest levels of both
/// parities meet at E = -Δ/U.
[[nodiscard]] inline double juddian_gc(const FamilyParams& f) {
    if (!(f.u > 0.0))
        throw NoFirstOrderTransition("a ground-state crossing requires U > 0, got U = " + std::to_string(f.u));
    return juddian_gcn(0, f);
}

/// Energy -Δ/U shared by every crossing of the ladder.
[[nodiscard]] inline double crossing_energy(const FamilyParams& f) {
    if (f.u == 0.0) throw NoCrossing("crossing energy undefined for U = 0");
    return -f.delta / (f.u / f.omega);
}

/// Largest n with g_c^(n) < g, or -1 when no crossing has happened yet.
[[nodiscard]] inline int n_max(const ModelParams& p) {
    p.validate();
    const double u = p.u_ratio();
    if (!(u > 0.0)) throw InvalidArgument("n_max requires U > 0");
    if (u >= 2.0 - kCollapseRatioTolerance) throw RegimeError("n_max requires U < 2 omega");
    const double g = p.g / p.omega;
    const double value = std::floor(g * g / (1.0 - u * u / 4.0) - (p.delta / p.omega) / u);
    return static_cast<int>(std::max(value, -1.0));
}

/// Numerator of f_n at E = E_n^pole(g) with every denominator cleared:
/// y_0 clears Ω_0 and y_n restores the factor that vanishes at g_c^(n).
/// Its zeros in g are the crossings on the n-th pole curve.
template <std::floating_point T = long double>
[[nodiscard]] T juddian_residual(int n, const FamilyParams& f, double g) {
    if (n < 1) throw InvalidArgument("juddian_residual requires n >= 1");
    const BoaModel model(f.with_g(g));
    if (model.u() == 0.0) throw RegimeError("juddian_residual requires U != 0");
    const auto c = detail::Couplings<T>::from(model);
    const T e = (T(1) - c.u * c.u / T(4)) * T(n) - c.u * c.delta / T(4) - c.g * c.g;
    T s = c.x(0, e);
    T t = c.y(0, e);
    T sp = 0;
    T tp = 0;
    for (int k = 0;; ++k) {
        const T r = c.rhs(k, e, s, t, sp, tp);
        if (k == n - 1) return r * c.y(n, e);
        const T scale = r / (T(k + 1) * c.beta(k + 1, e));
        sp = s;
        tp = t;
        s = scale * c.x(k + 1, e);
        t = scale * c.y(k + 1, e);
    }
}

/// All couplings in [g_lo, g_hi] where a doubly degenerate level sits on the
/// n-th pole curve (n >= 1). Requires U != 0.
[[nodiscard]] inline std::vector<double> juddian_general(int n, const FamilyParams& f, double g_lo, double g_hi,
                                                         int samples = 400) {
    if (n < 1) throw InvalidArgument("juddian_general requires n >= 1");
    if (f.u == 0.0) throw RegimeError("juddian_general requires U != 0");
    if (std::abs(f.u / f.omega) >= 2.0 - kCollapseRatioTolerance)
        throw RegimeError("juddian_general requires |u/omega| < 2");
    const double lo = std::max(g_lo, 1e-6 * f.omega);
    if (!(g_hi > lo)) return {};
    auto fn = [&](double g) { return static_cast<double>(juddian_residual<long double>(n, f, g)); };
    const auto xs = roots::uniform_grid(lo, g_hi, samples);
    const auto scan = roots::scan_sign_changes(fn, xs);
    auto out = roots::solve_brackets(fn, scan.brackets, 0.0);
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Nondegenerate exceptional solutions

struct ExceptionalOptions {
    int samples{400};
    SeriesOptions series{};
    /// Roots this close to a Juddian crossing are left to the Juddian machinery.
    double juddian_exclusion{1e-6};
};

/// Energy of the m-th pole curve at coupling g.
[[nodiscard]] inline double pole_curve(int m, const FamilyParams& f, double g) {
    const auto p = f.with_g(g);
    return m == 0 ? pole_0(p) : pole_n(m, p);
}

/// Exceptional G-function at E = E_m^pole(g). For m >= 1 (U != 0) the
/// series starts at f_m = 1; for m = 0, and for every m at U = 0, the
/// diverging Ω_m forces e_m = 1, f_m = 0 instead.
[[nodiscard]] inline double exceptional_g(int m, Parity parity, const FamilyParams& f, double g,
                                          const SeriesOptions& opt = {}) {
    if (m < 0) throw InvalidArgument("exceptional_g requires m >= 0");
    const BoaModel model(f.with_g(g));
    const auto c = detail::Couplings<double>::from(model);
    const double e = model.to_internal(pole_curve(m, f, g));
    const double wm = std::pow(c.w, m);
    double s0 = wm;
    double t0 = 0.0;
    if (m >= 1 && model.u() != 0.0) {
        const double y = c.y(m, e);
        if (y == 0.0) throw DivergenceError("Omega_m diverges on the pole curve (Juddian point)");
        s0 = c.x(m, e) / y * wm;
        t0 = wm;
    }
    const auto raw = detail::run_recurrence<double>(c, e, m, s0, t0, opt);
    if (!raw.converged) throw ConvergenceError("exceptional series did not converge at g = " + std::to_string(g));
    const double sg = sign(parity);
    double total = 0.0;
    for (std::size_t n = 0; n < raw.t.size(); ++n) total += raw.s[n] - sg * raw.t[n];
    return total;
}

/// Couplings where a nondegenerate level of the given parity lies exactly on
/// the m-th pole curve.
[[nodiscard]] inline std::vector<EnergyLevel> exceptional_nondegenerate(int m, Parity parity, const FamilyParams& f,
                                                                        double g_lo, double g_hi,
                                                                        const ExceptionalOptions& opt = {}) {
    if (m < 0) throw InvalidArgument("exceptional_nondegenerate requires m >= 0");
    if (std::abs(f.u / f.omega) >= 2.0 - kCollapseRatioTolerance)
        throw RegimeError("exceptional_nondegenerate requires |u/omega| < 2");
    const double lo = std::max(g_lo, 1e-6 * f.omega);
    if (!(g_hi > lo)) return {};

    auto fn = [&](double g) { return exceptional_g(m, parity, f, g, opt.series); };
    const auto xs = roots::uniform_grid(lo, g_hi, opt.samples);
    const auto scan = roots::scan_sign_changes(fn, xs);

    std::vector<double> juddian;
    if (f.u != 0.0) {
        if (m == 0) {
            if (f.u > 0.0) juddian.push_back(juddian_gc(f));
        } else {
            juddian = juddian_general(m, f, g_lo, g_hi);
        }
    }

    std::vector<EnergyLevel> out;
    for (const auto& br : scan.brackets) {
        // A pole of the series in g also flips the sign; bisection either
        // runs into it or ends on a large value. Both are rejected.
        double g;
        double value;
        try {
            g = br.a == br.b ? br.a : roots::bisect(fn, br, 0.0);
            value = fn(g);
        } catch (const Error&) {
            continue;
        }
        if (std::abs(value) > std::max(std::abs(br.fa), std::abs(br.fb))) continue;
        const bool near_juddian = std::any_of(juddian.begin(), juddian.end(), [&](double gj) {
            return std::abs(gj - g) <= opt.juddian_exclusion * f.omega;
        });
        if (near_juddian) continue;
        out.push_back({pole_curve(m, f, g), parity, g, LevelKind::exceptional_nondegenerate, m});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sweeps over g

struct Crossing {
    double g;
    double energy;
    /// Index of the pole curve carrying the crossing.
    int n;
    /// True for the points on E = -Δ/U given by the closed-form ladder.
    bool on_ladder;
};

struct SweepOptions {
    RegularSearchOptions regular{};
    bool include_exceptional{false};
    ExceptionalOptions exceptional{};
    unsigned workers{0};
};

struct SpectrumSweep {
    std::vector<double> g_grid;
    /// Per-g levels, ascending in energy.
    std::vector<std::vector<EnergyLevel>> levels;
    /// Juddian crossings inside the scanned (g, E) box.
    std::vector<Crossing> crossings;
    /// Exceptional nondegenerate points inside the box (when requested).
    std::vector<EnergyLevel> exceptional;
    /// Ground / first-excited crossing (first-order transition), if present.
    std::optional<Crossing> first_order;
    std::vector<std::string> warnings;
};

/// Regular levels at one coupling (both parities, ascending).
[[nodiscard]] inline std::vector<EnergyLevel> levels_at(const FamilyParams& f, double g, double lo, double hi,
                                                        const RegularSearchOptions& opt,
                                                        std::vector<std::string>* warnings = nullptr) {
    const auto p = f.with_g(g);
    if (g == 0.0) return decoupled_levels(p, lo, hi);
    const BoaModel model(p);
    std::vector<EnergyLevel> all;
    for (const Parity par : {Parity::even, Parity::odd}) {
        auto found = find_regular_levels(model, par, lo, hi, opt);
        all.insert(all.end(), found.levels.begin(), found.levels.end());
        if (warnings) warnings->insert(warnings->end(), found.warnings.begin(), found.warnings.end());
    }
    std::sort(all.begin(), all.end(), [](const EnergyLevel& a, const EnergyLevel& b) { return a.energy < b.energy; });
    return all;
}

/// Spectrum on a g grid with Juddian crossings from the closed-form ladder
/// plus the general pole-curve residual, never from tracking levels in g.
[[nodiscard]] inline SpectrumSweep sweep(const FamilyParams& f, const std::vector<double>& g_grid, double e_lo,
                                         double e_hi, const SweepOptions& opt = {}) {
    if (g_grid.empty()) throw InvalidArgument("sweep: empty g grid");
    if (!(e_hi > e_lo)) throw InvalidArgument("sweep: empty energy window");
    if (!std::is_sorted(g_grid.begin(), g_grid.end())) throw InvalidArgument("sweep: g grid must be ascending");
    if (std::abs(f.u / f.omega) >= 2.0 - kCollapseRatioTolerance) throw RegimeError("sweep requires |u/omega| < 2");

    SpectrumSweep out;
    out.g_grid = g_grid;
    struct PerG {
        std::vector<EnergyLevel> levels;
        std::vector<std::string> warnings;
    };
    const unsigned workers = opt.workers == 0 ? worker_count() : opt.workers;
    auto per_g = parallel_map<PerG>(
        g_grid.size(),
        [&](std::size_t i) {
            PerG r;
            r.levels = levels_at(f, g_grid[i], e_lo, e_hi, opt.regular, &r.warnings);
            return r;
        },
        workers);
    for (auto& r : per_g) {
        out.levels.push_back(std::move(r.levels));
        out.warnings.insert(out.warnings.end(), r.warnings.begin(), r.warnings.end());
    }

    const double g_min = g_grid.front();
    const double g_max = g_grid.back();
    if (f.u == 0.0) {
        out.warnings.emplace_back("U = 0: Juddian crossings are not classified");
    } else {
        const double e_cross = crossing_energy(f);
        if (f.u > 0.0) {
            const double gc = juddian_gc(f);
            if (gc >= g_min && gc <= g_max && e_cross >= e_lo && e_cross <= e_hi) {
                out.crossings.push_back({gc, e_cross, 0, true});
                out.first_order = out.crossings.back();
            }
        }
        const auto fam_max = f.with_g(g_max);
        const double c2 = 1.0 - (f.u / f.omega) * (f.u / f.omega) / 4.0;
        const double reach =
            (e_hi / f.omega + (f.u / f.omega) * (f.delta / f.omega) / 4.0 + (g_max / f.omega) * (g_max / f.omega)) / c2;
        const int n_cap = static_cast<int>(std::floor(reach));
        for (int n = 1; n <= n_cap; ++n) {
            if (pole_n(n, fam_max) > e_hi) break;
            for (const double g : juddian_general(n, f, g_min, g_max)) {
                const double e = pole_n(n, f.with_g(g));
                if (e < e_lo || e > e_hi) continue;
                const bool ladder = std::abs(e - e_cross) <= 1e-9 * std::max(1.0, std::abs(e_cross));
                out.crossings.push_back({g, ladder ? e_cross : e, n, ladder});
            }
            if (opt.include_exceptional) {
                for (const Parity par : {Parity::even, Parity::odd}) {
                    for (auto& lvl : exceptional_nondegenerate(n, par, f, g_min, g_max, opt.exceptional))
                        if (lvl.energy >= e_lo && lvl.energy <= e_hi) out.exceptional.push_back(lvl);
                }
            }
        }
        std::sort(out.crossings.begin(), out.crossings.end(),
                  [](const Crossing& a, const Crossing& b) { return a.g < b.g || (a.g == b.g && a.n < b.n); });
    }
    if (opt.include_exceptional) {
        for (const Parity par : {Parity::even, Parity::odd})
            for (auto& lvl : exceptional_nondegenerate(0, par, f, g_min, g_max, opt.exceptional))
                if (lvl.energy >= e_lo && lvl.energy <= e_hi) out.exceptional.push_back(lvl);
        std::sort(out.exceptional.begin(), out.exceptional.end(),
                  [](const EnergyLevel& a, const EnergyLevel& b) { return a.g < b.g; });
    }
    return out;
}

/// Juddian crossings as EnergyLevel records (parity left empty).
[[nodiscard]] inline std::vector<EnergyLevel> crossing_levels(const SpectrumSweep& s) {
    std::vector<EnergyLevel> out;
    for (const auto& c : s.crossings) out.push_back({c.energy, std::nullopt, c.g, LevelKind::juddian, c.n});
    return out;
}

}  // namespace rabi_stark
