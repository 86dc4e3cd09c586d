#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "oracles.hpp"
#include "properties.hpp"
#include "workreal/entropy.hpp"
#include "workreal/two_level.hpp"

using namespace workreal;

TEST(ShannonEntropy, UniformAndBits) {
    const std::vector<double> p(8, 0.125);
    EXPECT_NEAR(shannon_entropy(p).value, std::log(8.0), 1e-15);
    const auto bits = shannon_entropy(p, EntropyBase::Bits);
    EXPECT_NEAR(bits.value, 3.0, 1e-15);
    EXPECT_EQ(bits.base, EntropyBase::Bits);
    EXPECT_EQ(bits.support_size, 8u);
}

TEST(ShannonEntropy, ZeroCellsAndPointMass) {
    EXPECT_EQ(shannon_entropy(std::vector<double>{0.0, 1.0, 0.0}).value, 0.0);
    const auto r = shannon_entropy(std::vector<double>{0.5, 0.0, 0.5});
    EXPECT_NEAR(r.value, std::log(2.0), 1e-15);
    EXPECT_EQ(r.support_size, 2u);
}

TEST(ShannonEntropy, ThermalTwoLevel) {
    EXPECT_NEAR(shannon_entropy(std::vector<double>{0.7310585786300049, 0.2689414213699951}).value,
                0.5822031088882180, 1e-14);
}

TEST(ShannonEntropy, SmallDefectsAreRescaledAndFlagged) {
    const auto r = shannon_entropy(std::vector<double>{0.5, 0.5 + 1e-10});
    EXPECT_TRUE(r.renormalized);
    EXPECT_NEAR(r.value, std::log(2.0), 1e-12);
    EXPECT_FALSE(shannon_entropy(std::vector<double>{0.5, 0.5}).renormalized);
}

TEST(ShannonEntropy, RejectsBadInput) {
    EXPECT_THROW(shannon_entropy(std::vector<double>{0.5, 0.6}), InvalidParameter);
    EXPECT_THROW(shannon_entropy(std::vector<double>{1.5, -0.5}), InvalidParameter);
    EXPECT_THROW(shannon_entropy(std::vector<double>{}), InvalidParameter);
    EXPECT_THROW(shannon_entropy(std::vector<double>{0.5, std::nan("")}), InvalidParameter);
}

TEST(ConditionalEntropy, DeterministicChannelIsZero) {
    const auto s = EnergySpectrum::two_level();
    const auto j = two_time_joint(DiagonalDensity({0.3, 0.7}), UnitaryPropagator::identity(2), s, s);
    EXPECT_NEAR(conditional_entropy(j).value, 0.0, 1e-15);
    EXPECT_NEAR(joint_entropy(j).value, shannon_entropy(std::vector<double>{0.3, 0.7}).value, 1e-15);
}

TEST(ConditionalEntropy, IndependentJointEqualsMarginal) {
    Eigen::MatrixXd p(2, 2);
    p << 0.1 * 0.4, 0.1 * 0.6, 0.9 * 0.4, 0.9 * 0.6;
    const JointDistribution j(p, EnergySpectrum::two_level(), EnergySpectrum::two_level());
    EXPECT_NEAR(conditional_entropy(j).value, shannon_entropy(std::vector<double>{0.1, 0.9}).value, 1e-14);
}

TEST(ConditionalEntropy, ChainIdentityRandom) {
    const auto r = workreal::testing::entropy_chain_property(101, 300);
    EXPECT_TRUE(r.passed) << r.worst;
}

TEST(GroupedEntropy, FormulaOnExample) {
    const std::vector<double> p{0.1, 0.2, 0.3, 0.4};
    const auto r = grouped_entropy(p, {{0, 3}, {1, 2}});
    EXPECT_NEAR(r.grouped.value, std::log(2.0), 1e-15);
    EXPECT_NEAR(r.grouped.value + r.within, shannon_entropy(p).value, 1e-15);
}

TEST(GroupedEntropy, RejectsInvalidPartition) {
    const std::vector<double> p{0.5, 0.5};
    EXPECT_THROW(grouped_entropy(p, {{0}}), InvalidParameter);
    EXPECT_THROW(grouped_entropy(p, {{0, 1}, {1}}), InvalidParameter);
    EXPECT_THROW(grouped_entropy(p, {{0, 2}}), InvalidParameter);
}

TEST(WorkEntropy, FineGrainedEqualsJointEntropyOfIndices) {
    const auto s = EnergySpectrum::two_level();
    const auto u = tls_propagator({0.3, 0.1, 1.1});
    const auto j = two_time_joint(build_thermal_state(s, 0.8), u, s, s);
    EXPECT_NEAR(work_entropy(j, WorkView::FineGrained).value, joint_entropy(j).value, 1e-15);
    const auto grouped = work_entropy(j, WorkView::ValueGrouped);
    EXPECT_LT(grouped.value, joint_entropy(j).value);
    const auto direct = work_entropy(work_distribution(j, WorkView::ValueGrouped));
    EXPECT_NEAR(grouped.value, direct.value, 1e-15);
}

TEST(WorkEntropy, IncommensurateSpectraMakeViewsAgree) {
    const auto spectra = TlsSpectra::incommensurate();
    const auto u = tls_propagator({0.0, 0.0, 0.9});
    const auto j = two_time_joint(build_thermal_state(spectra.t0, 1.0), u, spectra.t0, spectra.t1);
    EXPECT_NEAR(work_entropy(j, WorkView::FineGrained).value, work_entropy(j, WorkView::ValueGrouped).value, 1e-15);
}
