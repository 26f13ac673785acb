#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "rabi_stark/ed.hpp"
#include "rabi_stark/series.hpp"

using namespace rabi_stark;

TEST(Hamiltonian, Symmetric) {
    const auto h = ed::build_hamiltonian({0.5, 1.0, 1.3, 0.7}, 40);
    EXPECT_EQ(h.rows(), 82);
    EXPECT_EQ((h - h.transpose()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Hamiltonian, DecoupledLimitSmall) {
    ed::EDOptions opt;
    opt.by_sector = false;
    const auto r = ed::diagonalize({0.5, 1.0, 0.0, 0.0}, 1, opt);
    ASSERT_EQ(r.size(), 4u);
    EXPECT_NEAR(r.eigenvalues[0], -0.25, 1e-14);
    EXPECT_NEAR(r.eigenvalues[1], 0.25, 1e-14);
    EXPECT_NEAR(r.eigenvalues[2], 0.75, 1e-14);
    EXPECT_NEAR(r.eigenvalues[3], 1.25, 1e-14);
}

TEST(Hamiltonian, DecoupledWithStark) {
    const ModelParams p{0.5, 1.0, 1.2, 0.0};
    const auto r = ed::diagonalize(p, 10);
    std::vector<double> expect;
    for (int n = 0; n <= 10; ++n)
        for (const int sx : {1, -1}) expect.push_back(decoupled_energy(p, n, sx));
    std::sort(expect.begin(), expect.end());
    ASSERT_EQ(r.size(), expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i) EXPECT_NEAR(r.eigenvalues[i], expect[i], 1e-13);
}

TEST(Diagonalize, SectorAndFullAgree) {
    const ModelParams p{0.5, 1.0, 1.0, 0.7};
    ed::EDOptions full;
    full.by_sector = false;
    full.with_vectors = true;
    const auto a = ed::diagonalize(p, 60, full);
    const auto b = ed::diagonalize(p, 60);
    ASSERT_EQ(a.size(), b.size());
    EXPECT_EQ(a.size(), 2u * 61u);
    for (std::size_t i = 0; i < 20; ++i) {
        EXPECT_NEAR(a.eigenvalues[i], b.eigenvalues[i], 1e-10);
        EXPECT_EQ(a.parities[i], b.parities[i]);
        EXPECT_NEAR(a.photon_numbers[i], b.photon_numbers[i], 1e-8);
    }
    EXPECT_EQ(b.sector(Parity::even).size() + b.sector(Parity::odd).size(), 2u * 61u);
}

TEST(Diagonalize, ParityAndPhotonNumberInvariants) {
    ed::EDOptions opt;
    opt.by_sector = false;
    opt.with_vectors = true;
    for (const double u : {-1.0, 1.0, 2.0}) {
        const auto r = ed::diagonalize({0.5, 1.0, u, 0.4}, 50, opt);
        for (std::size_t i = 0; i < r.size(); ++i) {
            const double pe = ed::parity_expectation(r.eigenvectors.col(static_cast<Eigen::Index>(i)));
            EXPECT_NEAR(pe, sign(r.parities[i]), 1e-12);
            EXPECT_GE(r.photon_numbers[i], -1e-14);
        }
    }
}

TEST(Diagonalize, SectorVectorsCarryParity) {
    ed::EDOptions opt;
    opt.with_vectors = true;
    opt.max_levels = 5;
    const auto r = ed::diagonalize({0.5, 1.0, 1.0, 0.7}, 80, opt);
    for (std::size_t i = 0; i < r.size(); ++i) {
        const Eigen::VectorXd v = r.eigenvectors.col(static_cast<Eigen::Index>(i));
        EXPECT_NEAR(v.norm(), 1.0, 1e-12);
        EXPECT_NEAR(ed::parity_expectation(v), sign(r.parities[i]), 1e-12);
    }
}

TEST(Diagonalize, RejectsBeyondCollapse) {
    EXPECT_THROW((void)ed::diagonalize({0.5, 1.0, 2.5, 0.4}, 20), RegimeError);
    EXPECT_THROW((void)ed::diagonalize({0.5, 1.0, 1.0, 0.4}, 0), InvalidArgument);
    ed::EDOptions full;
    full.by_sector = false;
    EXPECT_THROW((void)ed::diagonalize({0.5, 1.0, 1.0, 0.4}, ed::kMaxFullTruncation + 1, full), InvalidArgument);
}

TEST(Convergence, RegularRegimeConvergesBy300) {
    const auto rows = ed::convergence_sweep({0.5, 1.0, 1.0, 0.1}, {100, 200, 300}, 6);
    for (const auto& r : rows)
        if (r.n_tr >= 200) EXPECT_TRUE(r.converged) << "level " << r.level;
}

TEST(Convergence, LowLevelsStableAt200) {
    const ModelParams p{0.5, 1.0, 1.0, 0.1};
    const auto a = ed::diagonalize(p, 200);
    const auto b = ed::diagonalize(p, 300);
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(a.eigenvalues[i], b.eigenvalues[i], 1e-8);
}

TEST(Convergence, VariationalMonotonicity) {
    for (const double u : {1.0, 2.0}) {
        const ModelParams p{0.5, 1.0, u, 0.6};
        std::vector<double> prev;
        for (const int n_tr : {50, 100, 200, 400}) {
            const auto r = ed::diagonalize(p, n_tr);
            for (std::size_t i = 0; i < prev.size() && i < 8; ++i) EXPECT_LE(r.eigenvalues[i], prev[i] + 1e-12);
            prev.assign(r.eigenvalues.begin(), r.eigenvalues.begin() + 8);
        }
    }
}

TEST(Convergence, CollapseAboveCriticalIsFlagged) {
    const auto rows = ed::convergence_sweep({0.5, 1.0, 2.0, 0.6}, {250, 500, 1000}, 4);
    int flagged = 0;
    for (const auto& r : rows)
        if (r.n_tr == 1000 && !r.converged) ++flagged;
    EXPECT_EQ(flagged, 4);
}
