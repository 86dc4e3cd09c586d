#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "oracles.hpp"
#include "workreal/tpm.hpp"
#include "workreal/two_level.hpp"

using namespace workreal;
using workreal::testing::Gen;

namespace {

std::vector<double> vec(std::span<const double> s) { return {s.begin(), s.end()}; }

}  // namespace

TEST(TwoTimeJoint, IdentityGivesDiagonalThermalJoint) {
    const auto s = EnergySpectrum::two_level();
    const auto rho = build_thermal_state(s, 1.0);
    const auto j = two_time_joint(rho, UnitaryPropagator::identity(2), s, s);
    EXPECT_NEAR(j(0, 0), 0.7310585786300049, 1e-15);
    EXPECT_EQ(j(1, 0), 0.0);
    EXPECT_EQ(j(0, 1), 0.0);
    EXPECT_NEAR(j(1, 1), 0.2689414213699951, 1e-15);
    const auto w = work_distribution(j, WorkView::ValueGrouped);
    ASSERT_EQ(w.size(), 1u);
    EXPECT_EQ(w.entries()[0].work, 0.0);
    EXPECT_NEAR(w.entries()[0].probability, 1.0, 1e-15);
}

TEST(TwoTimeJoint, DimensionMismatchThrows) {
    const auto s2 = EnergySpectrum::two_level();
    const EnergySpectrum s3({0.0, 1.0, 2.0});
    EXPECT_THROW(two_time_joint(DiagonalDensity::uniform(3), UnitaryPropagator::identity(2), s3, s2),
                 InvalidParameter);
    EXPECT_THROW(two_time_joint(DiagonalDensity::uniform(2), UnitaryPropagator::identity(2), s2, s3),
                 InvalidParameter);
}

TEST(JointDistribution, RejectsUnnormalizedOrNegative) {
    const auto s = EnergySpectrum::two_level();
    Eigen::MatrixXd p(2, 2);
    p << 0.5, 0.1, 0.1, 0.1;
    EXPECT_THROW(JointDistribution(p, s, s), InvalidParameter);
    p << 0.5, 0.5, 0.1, -0.1;
    EXPECT_THROW(JointDistribution(p, s, s), InvalidParameter);
    p << 0.5, 0.1, 0.1, 0.1;
    EXPECT_NO_THROW(JointDistribution(p, s, s, 0.3));
}

TEST(ThreeTimeJoint, MatchesPathEnumeration) {
    Gen g(77);
    for (int i = 0; i < 50; ++i) {
        const std::size_t d = g.index(2, 4);
        const auto s0 = g.spectrum(d, 0), s1 = g.spectrum(d, 1), s2 = g.spectrum(d, 2);
        const Eigen::MatrixXcd a = g.unitary(d), b = g.unitary(d);
        const auto rho = build_thermal_state(s0, 0.7);
        const auto joint = three_time_joint(rho, UnitaryPropagator(a), UnitaryPropagator(b), s0, s1, s2);
        const auto oracle = workreal::testing::path_enumeration_three_time(vec(rho.populations()), a, b);
        for (std::size_t k2 = 0; k2 < d; ++k2)
            for (std::size_t k1 = 0; k1 < d; ++k1)
                for (std::size_t k0 = 0; k0 < d; ++k0)
                    EXPECT_NEAR(joint(k2, k1, k0), oracle[(k2 * d + k1) * d + k0], 1e-13);
    }
}

TEST(ThreeTimeJoint, SkippingMiddleUsesComposedPropagator) {
    Gen g(8);
    const auto s = EnergySpectrum({0.0, 0.4, 1.3});
    const UnitaryPropagator a(g.unitary(3)), b(g.unitary(3));
    const auto rho = build_thermal_state(s, 1.0);
    const auto skipped = two_time_joint_skipping_middle(rho, a, b, s, s);
    const auto composed = two_time_joint(rho, compose_propagators(a, b), s, s);
    EXPECT_LT((skipped.probs() - composed.probs()).cwiseAbs().maxCoeff(), 1e-15);
    const auto measured = three_time_joint(rho, a, b, s, s, s).marginal_20();
    EXPECT_GT(total_variation(measured, skipped), 1e-3);
}

TEST(ThreeTimeJoint, DenseStorageAgreesWithFactorized) {
    Gen g(9);
    const std::size_t d = 3;
    const auto s0 = g.spectrum(d, 0), s1 = g.spectrum(d, 1), s2 = g.spectrum(d, 2);
    const UnitaryPropagator a(g.unitary(d)), b(g.unitary(d));
    const auto rho = build_thermal_state(s0, 1.5);
    const auto joint = three_time_joint(rho, a, b, s0, s1, s2);
    std::vector<double> flat(d * d * d);
    for (std::size_t k2 = 0; k2 < d; ++k2)
        for (std::size_t k1 = 0; k1 < d; ++k1)
            for (std::size_t k0 = 0; k0 < d; ++k0) flat[(k2 * d + k1) * d + k0] = joint(k2, k1, k0);
    const auto dense = JointDistribution3::dense(flat, d, s0, s1, s2);
    EXPECT_FALSE(dense.is_factorized());
    EXPECT_TRUE(joint.is_factorized());
    EXPECT_LT((dense.marginal_10().probs() - joint.marginal_10().probs()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((dense.marginal_21().probs() - joint.marginal_21().probs()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((dense.marginal_20().probs() - joint.marginal_20().probs()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_THROW(JointDistribution3::dense(std::vector<double>(5, 0.2), d, s0, s1, s2), InvalidParameter);
}

TEST(WorkDistribution, FineGrainedKeepsIndexPairs) {
    const auto s = EnergySpectrum::two_level();
    const auto u = tls_propagator({0.0, 0.0, std::numbers::pi / 3});
    const auto j = two_time_joint(build_thermal_state(s, 1.0), u, s, s);
    const auto fine = work_distribution(j, WorkView::FineGrained);
    EXPECT_EQ(fine.size(), 4u);
    const auto grouped = work_distribution(j, WorkView::ValueGrouped);
    ASSERT_EQ(grouped.size(), 3u);
    EXPECT_DOUBLE_EQ(grouped.entries()[0].work, -1.0);
    EXPECT_DOUBLE_EQ(grouped.entries()[1].work, 0.0);
    EXPECT_EQ(grouped.entries()[1].sources.size(), 2u);
    EXPECT_NEAR(grouped.entries()[1].probability, j(0, 0) + j(1, 1), 1e-15);
    EXPECT_NEAR(fine.mean(), grouped.mean(), 1e-15);
}

TEST(WorkDistribution, GroupingToleranceIsAnchoredOnFirstValue) {
    std::vector<WorkEntry> e{{0.0, 0.25, {{0, 0}}}, {6e-10, 0.25, {{1, 0}}}, {1.2e-9, 0.25, {{0, 1}}}, {1.0, 0.25, {{1, 1}}}};
    const WorkDistribution w(e, WorkView::FineGrained);
    const auto g = w.grouped(1e-9);
    ASSERT_EQ(g.size(), 3u);
    EXPECT_DOUBLE_EQ(g.entries()[0].probability, 0.5);
    EXPECT_DOUBLE_EQ(g.entries()[1].work, 1.2e-9);
}

TEST(Jarzynski, IdentityEvolutionIsExact) {
    const auto s = EnergySpectrum({0.0, 0.3, 2.0});
    const auto rho = build_thermal_state(s, 2.0);
    const auto j = three_time_joint(rho, UnitaryPropagator::identity(3), UnitaryPropagator::identity(3), s, s, s);
    EXPECT_LT(jarzynski_deviation(total_work_distribution(j), 2.0, 0.0), 1e-15);
}

TEST(Jarzynski, RandomUnitariesAndSpectra) {
    Gen g(31);
    for (int i = 0; i < 100; ++i) {
        const std::size_t d = g.index(2, 5);
        const auto s0 = g.spectrum(d, 0), s1 = g.spectrum(d, 1), s2 = g.spectrum(d, 2);
        const double beta = g.log_uniform(0.1, 10.0);
        const auto j = three_time_joint(build_thermal_state(s0, beta), UnitaryPropagator(g.unitary(d)),
                                        UnitaryPropagator(g.unitary(d)), s0, s1, s2);
        const double df = thermodynamic_potentials(s2, beta).free_energy - thermodynamic_potentials(s0, beta).free_energy;
        EXPECT_LT(jarzynski_deviation(total_work_distribution(j), beta, df), 1e-10);
        // First step alone
        const double df1 = thermodynamic_potentials(s1, beta).free_energy - thermodynamic_potentials(s0, beta).free_energy;
        EXPECT_LT(jarzynski_deviation(work_distribution(j.marginal_10()), beta, df1), 1e-10);
    }
}

TEST(Jarzynski, LargeBetaWorkStaysFinite) {
    const EnergySpectrum s0({0.0, 1.0}, 0), s1({0.0, 50.0}, 1);
    const auto u = tls_propagator({0.0, 0.0, 1.0});
    const double beta = 30.0;
    const auto j = two_time_joint(build_thermal_state(s0, beta), u, s0, s1);
    const double df = thermodynamic_potentials(s1, beta).free_energy - thermodynamic_potentials(s0, beta).free_energy;
    EXPECT_LT(jarzynski_deviation(work_distribution(j), beta, df), 1e-10);
    EXPECT_THROW(jarzynski_deviation(work_distribution(j), 0.0, df), InvalidParameter);
}

TEST(SampleTrajectories, DeterministicForSeed) {
    const auto s = EnergySpectrum::two_level();
    const auto u = tls_propagator({0.1, 0.2, 1.0});
    const auto rho = build_thermal_state(s, 1.0);
    const auto a = sample_trajectories(rho, u, u, 5000, 42, s, s, s);
    const auto b = sample_trajectories(rho, u, u, 5000, 42, s, s, s);
    const auto c = sample_trajectories(rho, u, u, 5000, 43, s, s, s);
    bool differs = false;
    for (std::size_t k2 = 0; k2 < 2; ++k2)
        for (std::size_t k1 = 0; k1 < 2; ++k1)
            for (std::size_t k0 = 0; k0 < 2; ++k0) {
                EXPECT_EQ(a(k2, k1, k0), b(k2, k1, k0));
                differs = differs || a(k2, k1, k0) != c(k2, k1, k0);
            }
    EXPECT_TRUE(differs);
    ASSERT_TRUE(a.sample_count().has_value());
    EXPECT_EQ(*a.sample_count(), 5000u);
    EXPECT_NEAR(a.total(), 1.0, 1e-12);
}

TEST(SampleTrajectories, ForbiddenTransitionsNeverSampled) {
    const auto s = EnergySpectrum::two_level();
    const auto rho = build_thermal_state(s, 1.0);
    const auto id = UnitaryPropagator::identity(2);
    const auto a = sample_trajectories(rho, id, id, 10000, 1, s, s, s);
    EXPECT_EQ(a(1, 0, 0), 0.0);
    EXPECT_EQ(a(0, 1, 1), 0.0);
    EXPECT_EQ(a(0, 0, 1), 0.0);
    EXPECT_THROW(sample_trajectories(rho, id, id, 0, 1, s, s, s), InvalidParameter);
}
