#include <gtest/gtest.h>

#include <cmath>

#include "qedvar/energies.hpp"
#include "qedvar/error.hpp"
#include "qedvar/units.hpp"
#include "support/oracles.hpp"

using namespace qedvar;

namespace {

MatterEigensystem chain(int n, double hopping = -0.25) {
    EmitterSpec spec;
    spec.site_potentials.assign(static_cast<std::size_t>(n), 0.0);
    spec.hopping = hopping;
    if (n == 3) spec.site_potentials = {0.05, -0.1, 0.0};
    return solve_matter(spec);
}

CavityGeometry cavity(double fraction, double lambda) {
    const double l = units::nm_to_natural(620);
    return CavityGeometry{l, fraction * l, lambda};
}

StateLabel label(const char* text) { return StateLabel::parse(text); }

/// Linear coefficient a of E(x) = a x + b x^2 fitted by least squares.
double linear_coefficient(const std::vector<double>& x, const std::vector<double>& y) {
    Eigen::MatrixXd a(static_cast<Eigen::Index>(x.size()), 2);
    Eigen::VectorXd b(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) {
        a(static_cast<Eigen::Index>(i), 0) = x[i];
        a(static_cast<Eigen::Index>(i), 1) = x[i] * x[i];
        b(static_cast<Eigen::Index>(i)) = y[i];
    }
    return a.colPivHouseholderQr().solve(b)(0);
}

}  // namespace

TEST(StateLabels, FormatAndParse) {
    for (const char* text : {"a0", "a1+m1", "a0+2m1", "a0+m1+m3", "a3+2m2+m10"}) {
        const auto l = StateLabel::parse(text);
        EXPECT_EQ(l.to_string(), text);
    }
    const auto l = label("a2+2m1+m4");
    EXPECT_EQ(l.matter, 2);
    EXPECT_EQ(l.quanta(), 3);
    EXPECT_EQ(l.count_in(0), 2);
    EXPECT_EQ(l.count_in(3), 1);
    EXPECT_EQ(l.highest_mode(), 3);
    for (const char* bad : {"", "b0", "a", "a0+", "a0+m0", "a0+m2+m1", "a0+0m1", "a0m1"})
        EXPECT_THROW(StateLabel::parse(bad), Error) << bad;
}

TEST(Spectrum, EnumeratesEveryCandidate) {
    // 3 levels x (1 + 10 + 55) photon configurations
    EXPECT_EQ(enumerate_states(3, 10, 2).size(), 3u * 66u);
    EXPECT_EQ(enumerate_states(2, 4, 0).size(), 2u);
}

TEST(Energies, UncoupledLimitIsBare) {
    const auto matter = chain(2);
    const auto c = cavity(0.3, 0.0);
    const auto modes = solve_frequencies(c, 20);
    for (const char* text : {"a0", "a1", "a0+m1", "a1+2m3"}) {
        const auto v = variational_energy(matter, modes, label(text));
        const auto p = bare_pt_energy(matter, c, 20, label(text));
        const auto l = label(text);
        double expected = matter.energies(l.matter);
        for (const auto& ph : l.photons) expected += ph.count * bare_frequency(c, ph.mode + 1);
        EXPECT_DOUBLE_EQ(v.total, expected);
        EXPECT_DOUBLE_EQ(p.total, expected);
        EXPECT_EQ(v.correlation, 0.0);
        EXPECT_EQ(v.field_shift, 0.0);
    }
}

TEST(Energies, BreakdownSumsToTotal) {
    const auto matter = chain(3);
    const auto modes = solve_frequencies(cavity(0.3, 0.2), 30);
    for (const auto& e : spectrum(matter, modes))
        EXPECT_NEAR(e.bare_matter + e.field_shift + e.photon + e.correlation, e.total, 1e-15);
}

TEST(Energies, CorrelationMatchesDenseSecondOrder) {
    for (int n : {2, 3}) {
        const auto matter = chain(n);
        const auto modes = solve_frequencies(cavity(0.31, 0.3), 3);
        testsupport::DressedLevel oracle{matter, {}, {}, {}, 0.0, 5};
        for (std::size_t i = 0; i < modes.size(); ++i) {
            oracle.omega.push_back(modes.omega(i));
            oracle.g.push_back(std::sqrt(0.3 / matter.mass) * modes.profile_at_emitter(i) /
                               std::sqrt(2 * modes.omega(i)));
        }
        struct Case {
            const char* text;
            std::vector<int> occupation;
        };
        for (const auto& [text, occ] : {Case{"a0", {0, 0, 0}}, Case{"a1", {0, 0, 0}}, Case{"a0+m1", {1, 0, 0}},
                                        Case{"a1+m2", {0, 1, 0}}, Case{"a0+2m1", {2, 0, 0}}}) {
            const auto l = label(text);
            const double expected = oracle.second_order(l.matter, occ);
            const double got = correlation_shift(matter, modes, l);
            EXPECT_NEAR(got, expected, 1e-6 * std::abs(expected)) << "n=" << n << " " << text;
        }
    }
}

TEST(Energies, VacuumModelIgnoresOccupation) {
    const auto matter = chain(2);
    const auto modes = solve_frequencies(cavity(0.3, 0.2), 10);
    EXPECT_DOUBLE_EQ(correlation_shift(matter, modes, label("a1"), CorrelationModel::vacuum),
                     correlation_shift(matter, modes, label("a1"), CorrelationModel::occupation_aware));
    EXPECT_DOUBLE_EQ(correlation_shift(matter, modes, label("a0+m1"), CorrelationModel::vacuum),
                     correlation_shift(matter, modes, label("a0"), CorrelationModel::occupation_aware));
    EXPECT_NE(correlation_shift(matter, modes, label("a0+m1"), CorrelationModel::vacuum),
              correlation_shift(matter, modes, label("a0+m1"), CorrelationModel::occupation_aware));
}

TEST(Energies, BarePerturbationMatchesLinearCoefficientOfExactEnergy) {
    const auto matter = chain(2);
    const double lambda = 0.25;
    const auto c = cavity(0.31, lambda);
    const std::size_t m = 3;
    testsupport::DressedLevel oracle{matter, {}, {}, {}, 0.5 * lambda, 5};
    for (std::size_t i = 0; i < m; ++i) {
        const int n = static_cast<int>(i) + 1;
        const double w = bare_frequency(c, n);
        const double u = bare_profile(c, n, c.emitter_position) / std::sqrt(2 * w);
        oracle.omega.push_back(w);
        oracle.u.push_back(u);
        oracle.g.push_back(std::sqrt(lambda / matter.mass) * u);
    }
    for (const auto& [text, occ] : {std::pair{"a0", std::vector<int>{0, 0, 0}}, std::pair{"a1", std::vector<int>{0, 0, 0}},
                                    std::pair{"a0+m2", std::vector<int>{0, 1, 0}}}) {
        const auto e = bare_pt_energy(matter, c, m, label(text));
        const double expected = oracle.second_order(e.label.matter, occ);
        EXPECT_NEAR(e.field_shift + e.correlation, expected, 1e-6 * std::abs(expected)) << text;
    }
}

TEST(Energies, CasimirTailTracksFirstOrderShifts) {
    const auto c = cavity(0.3, 1e-3);
    const auto all = solve_frequencies(c, 80);
    const auto half = all.truncated(40);
    const double actual = casimir_energy(all).value - casimir_energy(half).value;
    EXPECT_NEAR(casimir_energy(half).tail_estimate / actual, 1.0, 1e-3);
    EXPECT_GT(casimir_energy(all).value, 0.0);
}

TEST(Energies, CutoffSensitivityComparesAgainstHalfCutoff) {
    const auto matter = chain(2);
    const auto modes = solve_frequencies(cavity(0.3, 0.2), 20);
    for (const char* text : {"a0", "a1+m3"}) {
        const auto full = variational_energy(matter, modes, label(text));
        const auto half = variational_energy(matter, modes.truncated(10), label(text));
        EXPECT_DOUBLE_EQ(full.cutoff_sensitivity, std::abs(full.total - half.total));
        EXPECT_EQ(full.mode_cutoff, 20u);
    }
}

TEST(Energies, ExactResonanceIsReported) {
    const auto c = cavity(0.3, 0.1);
    const auto modes = solve_frequencies(c, 5);
    EmitterSpec spec;
    spec.hopping = -0.5 * modes.omega(0);
    const auto matter = solve_matter(spec);
    try {
        correlation_shift(matter, modes, label("a1"));
        FAIL() << "expected resonance error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::degenerate);
        EXPECT_NE(std::string(e.what()).find("a1"), std::string::npos);
    }
}

TEST(Energies, StateBeyondCutoffIsRejected) {
    const auto matter = chain(2);
    const auto modes = solve_frequencies(cavity(0.3, 0.1), 3);
    EXPECT_THROW(variational_energy(matter, modes, label("a0+m4")), Error);
    EXPECT_THROW(variational_energy(matter, modes, label("a2")), Error);
}

TEST(Spectrum, LowestLevelsAscend) {
    const auto matter = chain(3);
    const auto c = cavity(0.3, 0.2);
    const auto modes = solve_frequencies(c, 30);
    for (const auto& s : {spectrum(matter, modes), bare_pt_spectrum(matter, c, 30)}) {
        ASSERT_EQ(s.size(), 5u);
        EXPECT_EQ(s.front().label.to_string(), "a0");
        for (std::size_t i = 1; i < s.size(); ++i) EXPECT_LE(s[i - 1].total, s[i].total);
    }
}

TEST(Energies, WeakCouplingSlopesAgreeBetweenMethods) {
    const auto matter = chain(2);
    for (double fraction : {0.5, 0.3}) {
        std::vector<double> x, var, pt;
        const auto c0 = cavity(fraction, 0.0);
        const double v0 = variational_energy(matter, solve_frequencies(c0, 50), label("a0")).total;
        const double p0 = bare_pt_energy(matter, c0, 50, label("a0")).total;
        for (int k = 1; k <= 6; ++k) {
            const double lambda = 2e-4 * k;
            const auto c = cavity(fraction, lambda);
            x.push_back(lambda);
            var.push_back(variational_energy(matter, solve_frequencies(c, 50), label("a0")).total - v0);
            pt.push_back(bare_pt_energy(matter, c, 50, label("a0")).total - p0);
        }
        const double a = linear_coefficient(x, var);
        const double b = linear_coefficient(x, pt);
        EXPECT_NEAR(a / b, 1.0, 5e-3);
    }
}
