// rabi_stark/ed.hpp: truncated-Fock exact diagonalization
//
// Basis conventions
//   full mode:   |n, σz⟩ with index n for σz = +1 and (n_tr + 1) + n for σz = -1
//   sector mode: the chain |0, s0⟩, |1, s1⟩, ... of σx eigenstates with
//                fixed total excitation parity; it is tridiagonal
//                  diag  ω n - s_n (Δ + U n)/2,   off-diag g sqrt(n + 1)
//                with s_n = +1 when (-1)^n equals the sector parity.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <lapacke.h>

#include "rabi_stark/errors.hpp"
#include "rabi_stark/model.hpp"

namespace rabi_stark::ed {

inline constexpr int kMaxFullTruncation = 2000;
inline constexpr int kMaxSectorTruncation = 200000;

struct EDOptions {
    bool by_sector{true};
    bool with_vectors{false};
    bool photon_numbers{true};
    /// Lowest levels to keep per sector (by_sector) or overall (full);
    /// 0 keeps all of them.
    int max_levels{0};
};

struct EDResult {
    int n_tr{};
    std::vector<double> eigenvalues;
    std::vector<Parity> parities;
    /// ⟨a†a⟩ per level; empty when photon numbers were not requested.
    std::vector<double> photon_numbers;
    /// Columns in the full-mode basis (see file header); empty unless requested.
    Eigen::MatrixXd eigenvectors;

    [[nodiscard]] std::size_t size() const noexcept { return eigenvalues.size(); }

    /// Eigenvalues of one parity, ascending.
    [[nodiscard]] std::vector<double> sector(Parity p) const {
        std::vector<double> out;
        for (std::size_t i = 0; i < eigenvalues.size(); ++i)
            if (parities[i] == p) out.push_back(eigenvalues[i]);
        return out;
    }
};

namespace detail {

inline void check_params(const ModelParams& p, int n_tr, int limit) {
    p.validate();
    if (std::abs(p.u_ratio()) > 2.0 + kCollapseRatioTolerance)
        throw RegimeError("exact diagonalization covers |u/omega| <= 2 only");
    if (n_tr < 1) throw InvalidArgument("n_tr must be >= 1");
    if (n_tr > limit)
        throw InvalidArgument("n_tr " + std::to_string(n_tr) + " exceeds the dimension limit " +
                              std::to_string(limit));
}

inline int spin_of(int n, Parity p) { return ((n % 2 == 0) == (p == Parity::even)) ? 1 : -1; }

struct Eigenpairs {
    std::vector<double> values;
    Eigen::MatrixXd vectors;
};

/// Lowest `count` eigenpairs of a symmetric tridiagonal matrix (dstevr, MRRR).
inline Eigenpairs tridiagonal_eigen(Eigen::VectorXd diag, Eigen::VectorXd off, int count, bool vectors) {
    const lapack_int n = static_cast<lapack_int>(diag.size());
    const lapack_int keep = (count <= 0 || count > n) ? n : count;
    if (off.size() < n) off.conservativeResize(n);
    Eigenpairs out;
    std::vector<double> w(static_cast<std::size_t>(n));
    Eigen::MatrixXd z;
    if (vectors) z.resize(n, keep);
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(std::max<lapack_int>(keep, 1)));
    lapack_int found = 0;
    const lapack_int info = LAPACKE_dstevr(
        LAPACK_COL_MAJOR, vectors ? 'V' : 'N', keep == n ? 'A' : 'I', n, diag.data(), off.data(), 0.0,
        0.0, 1, keep, 0.0, &found, w.data(), vectors ? z.data() : nullptr, vectors ? n : 1,
        support.data());
    if (info != 0)
        throw Error("tridiagonal eigensolver failed (dstevr info " + std::to_string(info) +
                    ", dimension " + std::to_string(n) + ")");
    out.values.assign(w.begin(), w.begin() + found);
    if (vectors) out.vectors = z.leftCols(found);
    return out;
}

}  // namespace detail

/// Symmetric Hamiltonian in the full (Fock ⊗ σz) basis, dimension 2(n_tr + 1):
///   [ ω a†a + g(a† + a)      -(Δ + U a†a)/2   ]
///   [ -(Δ + U a†a)/2         ω a†a - g(a† + a) ]
[[nodiscard]] inline Eigen::MatrixXd build_hamiltonian(const ModelParams& p, int n_tr) {
    detail::check_params(p, n_tr, kMaxFullTruncation);
    const int m = n_tr + 1;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    for (int n = 0; n < m; ++n) {
        h(n, n) = p.omega * n;
        h(m + n, m + n) = p.omega * n;
        const double mix = -(p.delta + p.u * n) / 2.0;
        h(n, m + n) = mix;
        h(m + n, n) = mix;
        if (n + 1 < m) {
            const double hop = p.g * std::sqrt(static_cast<double>(n + 1));
            h(n, n + 1) = hop;
            h(n + 1, n) = hop;
            h(m + n, m + n + 1) = -hop;
            h(m + n + 1, m + n) = -hop;
        }
    }
    return h;
}

struct SectorMatrix {
    Eigen::VectorXd diag;
    Eigen::VectorXd off;
};

[[nodiscard]] inline SectorMatrix sector_tridiagonal(const ModelParams& p, int n_tr, Parity parity) {
    detail::check_params(p, n_tr, kMaxSectorTruncation);
    SectorMatrix s;
    s.diag.resize(n_tr + 1);
    s.off.resize(n_tr);
    for (int n = 0; n <= n_tr; ++n) {
        s.diag[n] = p.omega * n - detail::spin_of(n, parity) * (p.delta + p.u * n) / 2.0;
        if (n < n_tr) s.off[n] = p.g * std::sqrt(static_cast<double>(n + 1));
    }
    return s;
}

/// Maps a sector-basis vector to the full basis.
[[nodiscard]] inline Eigen::VectorXd sector_to_full(const Eigen::VectorXd& v, Parity parity) {
    const auto m = v.size();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(2 * m);
    const double r = 1.0 / std::sqrt(2.0);
    for (Eigen::Index n = 0; n < m; ++n) {
        out[n] = r * v[n];
        out[m + n] = detail::spin_of(static_cast<int>(n), parity) * r * v[n];
    }
    return out;
}

/// ⟨Π⟩ of a full-basis vector.
[[nodiscard]] inline double parity_expectation(const Eigen::VectorXd& v) {
    const auto m = v.size() / 2;
    double acc = 0.0;
    for (Eigen::Index n = 0; n < m; ++n) acc += ((n % 2 == 0) ? 2.0 : -2.0) * v[n] * v[m + n];
    return acc;
}

[[nodiscard]] inline double photon_number_full(const Eigen::VectorXd& v) {
    const auto m = v.size() / 2;
    double acc = 0.0;
    for (Eigen::Index n = 0; n < m; ++n) acc += n * (v[n] * v[n] + v[m + n] * v[m + n]);
    return acc;
}

/// Eigenvalues of one parity sector only (no vectors), ascending.
[[nodiscard]] inline std::vector<double> sector_eigenvalues(const ModelParams& p, int n_tr, Parity parity,
                                                            int max_levels = 0) {
    auto s = sector_tridiagonal(p, n_tr, parity);
    return detail::tridiagonal_eigen(std::move(s.diag), std::move(s.off), max_levels, false).values;
}

namespace detail {

inline EDResult diagonalize_sectors(const ModelParams& p, int n_tr, const EDOptions& opt) {
    const bool need_vectors = opt.with_vectors || opt.photon_numbers;
    struct Level {
        double e;
        Parity parity;
        double photons;
        Eigen::Index column;
        int sector;
    };
    std::vector<Level> levels;
    Eigenpairs pairs[2];
    const Parity sectors[2] = {Parity::even, Parity::odd};
    for (int si = 0; si < 2; ++si) {
        auto s = sector_tridiagonal(p, n_tr, sectors[si]);
        pairs[si] = tridiagonal_eigen(std::move(s.diag), std::move(s.off), opt.max_levels, need_vectors);
        for (std::size_t j = 0; j < pairs[si].values.size(); ++j) {
            double photons = std::numeric_limits<double>::quiet_NaN();
            if (need_vectors) {
                const auto col = pairs[si].vectors.col(static_cast<Eigen::Index>(j));
                photons = 0.0;
                for (Eigen::Index n = 0; n < col.size(); ++n) photons += n * col[n] * col[n];
            }
            levels.push_back({pairs[si].values[j], sectors[si], photons, static_cast<Eigen::Index>(j), si});
        }
    }
    std::stable_sort(levels.begin(), levels.end(), [](const Level& a, const Level& b) { return a.e < b.e; });

    EDResult r;
    r.n_tr = n_tr;
    for (const auto& l : levels) {
        r.eigenvalues.push_back(l.e);
        r.parities.push_back(l.parity);
        if (opt.photon_numbers) r.photon_numbers.push_back(l.photons);
    }
    if (opt.with_vectors) {
        r.eigenvectors.resize(2 * (n_tr + 1), static_cast<Eigen::Index>(levels.size()));
        for (std::size_t i = 0; i < levels.size(); ++i)
            r.eigenvectors.col(static_cast<Eigen::Index>(i)) =
                sector_to_full(pairs[levels[i].sector].vectors.col(levels[i].column), levels[i].parity);
    }
    return r;
}

inline EDResult diagonalize_full(const ModelParams& p, int n_tr, const EDOptions& opt) {
    const Eigen::MatrixXd h = build_hamiltonian(p, n_tr);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    if (solver.info() != Eigen::Success)
        throw Error("dense eigensolver failed for dimension " + std::to_string(h.rows()));
    Eigen::VectorXd values = solver.eigenvalues();
    Eigen::MatrixXd vecs = solver.eigenvectors();

    // Degenerate clusters (level crossings) may come out parity-mixed;
    // rotate each cluster onto Π eigenvectors.
    const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
    const double cluster_tol = 1e-9 * scale;
    const Eigen::Index dim = values.size();
    for (Eigen::Index i = 0; i < dim;) {
        Eigen::Index j = i + 1;
        while (j < dim && values[j] - values[j - 1] < cluster_tol) ++j;
        if (j - i > 1) {
            const Eigen::Index k = j - i;
            Eigen::MatrixXd block = vecs.middleCols(i, k);
            Eigen::MatrixXd pblock(block.rows(), k);
            for (Eigen::Index c = 0; c < k; ++c) {
                Eigen::VectorXd up;
                Eigen::VectorXd dn;
                const auto m = block.rows() / 2;
                up.resize(m);
                dn.resize(m);
                for (Eigen::Index n = 0; n < m; ++n) {
                    const double s = (n % 2 == 0) ? 1.0 : -1.0;
                    up[n] = s * block(m + n, c);
                    dn[n] = s * block(n, c);
                }
                pblock.col(c) << up, dn;
            }
            Eigen::MatrixXd small = block.transpose() * pblock;
            small = 0.5 * (small + small.transpose()).eval();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> rot(small);
            vecs.middleCols(i, k) = block * rot.eigenvectors();
        }
        i = j;
    }

    const Eigen::Index keep = (opt.max_levels <= 0 || opt.max_levels > dim) ? dim : opt.max_levels;
    EDResult r;
    r.n_tr = n_tr;
    for (Eigen::Index i = 0; i < keep; ++i) {
        const Eigen::VectorXd v = vecs.col(i);
        r.eigenvalues.push_back(values[i]);
        r.parities.push_back(parity_expectation(v) >= 0.0 ? Parity::even : Parity::odd);
        if (opt.photon_numbers) r.photon_numbers.push_back(photon_number_full(v));
    }
    if (opt.with_vectors) r.eigenvectors = vecs.leftCols(keep);
    return r;
}

}  // namespace detail

/// Full or parity-blocked eigensolve. Eigenvalues come back ascending with
/// parity labels taken from block membership (sector mode) or from ⟨Π⟩
/// (full mode).
[[nodiscard]] inline EDResult diagonalize(const ModelParams& p, int n_tr, const EDOptions& opt = {}) {
    return opt.by_sector ? detail::diagonalize_sectors(p, n_tr, opt) : detail::diagonalize_full(p, n_tr, opt);
}

struct ConvergenceRow {
    int n_tr;
    int level;
    double energy;
    /// Change against the previous truncation in the list (NaN for the first).
    double drift;
    bool converged;
};

inline constexpr double kDefaultConvergenceThreshold = 1e-8;

/// Lowest `level_count` eigenvalues across a list of truncations.
[[nodiscard]] inline std::vector<ConvergenceRow> convergence_sweep(const ModelParams& p,
                                                                   const std::vector<int>& n_tr_list,
                                                                   int level_count,
                                                                   double threshold = kDefaultConvergenceThreshold) {
    if (n_tr_list.empty()) throw InvalidArgument("convergence_sweep: empty truncation list");
    if (level_count < 1) throw InvalidArgument("convergence_sweep: level_count must be >= 1");
    std::vector<ConvergenceRow> rows;
    std::vector<double> previous;
    for (const int n_tr : n_tr_list) {
        EDOptions opt;
        opt.photon_numbers = false;
        opt.max_levels = level_count;
        const auto r = diagonalize(p, n_tr, opt);
        const int count = std::min<int>(level_count, static_cast<int>(r.size()));
        for (int i = 0; i < count; ++i) {
            double drift = std::numeric_limits<double>::quiet_NaN();
            if (static_cast<std::size_t>(i) < previous.size()) drift = std::abs(r.eigenvalues[i] - previous[i]);
            rows.push_back({n_tr, i, r.eigenvalues[i], drift, std::isfinite(drift) && drift < threshold});
        }
        previous.assign(r.eigenvalues.begin(), r.eigenvalues.begin() + count);
    }
    return rows;
}

}  // namespace rabi_stark::ed
