#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qedvar/error.hpp"
#include "qedvar/matter.hpp"
#include "support/oracles.hpp"

using namespace qedvar;

TEST(Matter, HamiltonianIsTridiagonal) {
    EmitterSpec spec;
    spec.site_potentials = {0.1, -0.2, 0.3};
    spec.hopping = -0.4;
    const auto h = build_matter_hamiltonian(spec);
    ASSERT_EQ(h.rows(), 3);
    EXPECT_DOUBLE_EQ(h(0, 0), 0.1);
    EXPECT_DOUBLE_EQ(h(1, 1), -0.2);
    EXPECT_DOUBLE_EQ(h(2, 2), 0.3);
    EXPECT_DOUBLE_EQ(h(0, 1), -0.4);
    EXPECT_DOUBLE_EQ(h(1, 2), -0.4);
    EXPECT_DOUBLE_EQ(h(2, 1), -0.4);
    EXPECT_DOUBLE_EQ(h(0, 2), 0.0);
}

TEST(Matter, TwoLevelSymmetricSpectrum) {
    EmitterSpec spec;
    spec.site_potentials = {0.0, 0.0};
    spec.hopping = -0.25;
    const auto sys = solve_matter(spec);
    EXPECT_NEAR(sys.energies(0), -0.25, 1e-15);
    EXPECT_NEAR(sys.energies(1), 0.25, 1e-15);
}

TEST(Matter, ChainSpectrumMatchesCosineBand) {
    for (int n = 2; n <= 8; ++n) {
        EmitterSpec spec;
        spec.site_potentials.assign(static_cast<std::size_t>(n), 0.0);
        spec.hopping = -0.3;
        const auto sys = solve_matter(spec);
        for (int k = 1; k <= n; ++k) {
            const double expected = 2 * -0.3 * std::cos(k * std::numbers::pi / (n + 1));
            EXPECT_NEAR(sys.energies(k - 1), expected, 1e-13) << "n=" << n << " k=" << k;
        }
    }
}

TEST(Matter, EigenvectorSignConvention) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const auto spec = testsupport::random_emitter(rng, 2 + trial % 5);
        const auto basis = diagonalize_matter(build_matter_hamiltonian(spec));
        for (Eigen::Index c = 0; c < basis.vectors.cols(); ++c) {
            Eigen::Index i = 0;
            basis.vectors.col(c).cwiseAbs().maxCoeff(&i);
            EXPECT_GT(basis.vectors(i, c), 0.0);
        }
    }
}

TEST(Matter, MomentumFromSiteDefinition) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 2 + trial % 4;
        auto spec = testsupport::random_emitter(rng, n);
        spec.site_length = 3.0;
        const auto sys = solve_matter(spec);
        Eigen::MatrixXcd p_site = Eigen::MatrixXcd::Zero(n, n);
        for (int i = 0; i + 1 < n; ++i) {
            p_site(i, i + 1) = std::complex<double>(0, -1.0 / 3.0);
            p_site(i + 1, i) = std::complex<double>(0, 1.0 / 3.0);
        }
        Eigen::MatrixXcd expected = sys.eigenvectors.transpose() * p_site * sys.eigenvectors;
        expected.diagonal().setZero();
        EXPECT_LT((expected - sys.momentum).cwiseAbs().maxCoeff(), 1e-14);
        EXPECT_LT((sys.momentum - sys.momentum.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
        EXPECT_LT(sys.momentum.real().cwiseAbs().maxCoeff(), 1e-15);
    }
}

TEST(Matter, CalibratedSumRuleIsOne) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const auto spec = testsupport::random_emitter(rng, 2 + trial % 7);
        const auto sys = solve_matter(spec);
        EXPECT_NEAR(trk_sum(sys), 1.0, 1e-12);
    }
}

TEST(Matter, TwoLevelClosedFormSiteLength) {
    for (double t : {-0.25, 0.1, -1.3}) {
        EmitterSpec spec;
        spec.hopping = t;
        const double expected = 1.0 / std::sqrt(spec.mass * std::abs(t));
        EXPECT_NEAR(calibrate_site_length(spec) / expected, 1.0, 1e-12);
    }
}

TEST(Matter, SumRuleScalesAsInverseSquareLength) {
    EmitterSpec spec;
    spec.site_potentials = {0.0, 0.1, 0.0};
    spec.site_length = 1.0;
    const double base = trk_sum(solve_matter(spec));
    spec.site_length = 2.5;
    EXPECT_NEAR(trk_sum(solve_matter(spec)), base / 6.25, 1e-12 * base);
}

TEST(Matter, FixedSiteLengthIsKept) {
    EmitterSpec spec;
    spec.site_length = 42.0;
    EXPECT_DOUBLE_EQ(solve_matter(spec).site_length, 42.0);
}

TEST(Matter, RejectsInvalidSpecs) {
    EmitterSpec one;
    one.site_potentials = {0.0};
    EXPECT_THROW(solve_matter(one), Error);
    EmitterSpec no_hop;
    no_hop.hopping = 0.0;
    EXPECT_THROW(solve_matter(no_hop), Error);
    EmitterSpec bad_mass;
    bad_mass.mass = -1.0;
    EXPECT_THROW(solve_matter(bad_mass), Error);
    EmitterSpec bad_length;
    bad_length.site_length = 0.0;
    EXPECT_THROW(solve_matter(bad_length), Error);
}

TEST(Matter, DegenerateGroundStateIsReported) {
    MatterEigensystem sys;
    sys.energies = Eigen::Vector3d(-1.0, -1.0, 0.5);
    sys.momentum = Eigen::MatrixXcd::Zero(3, 3);
    sys.eigenvectors = Eigen::MatrixXd::Identity(3, 3);
    try {
        trk_sum(sys);
        FAIL() << "expected a degeneracy error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::degenerate);
    }
}
