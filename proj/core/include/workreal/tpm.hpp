#pragma once

// Joint outcome statistics of two or three sequential projective energy
// measurements, and the work distributions built from them.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "workreal/hilbert.hpp"

namespace workreal {

inline constexpr double kNormalizationTolerance = 1e-10;
inline constexpr double kWorkDegeneracyTolerance = 1e-9;

/// p(k_later, k_earlier): rows index the later outcome, columns the earlier.
class JointDistribution {
public:
    /// `normalization_tolerance` may be loosened to a truncation budget.
    JointDistribution(Eigen::MatrixXd probs, EnergySpectrum earlier, EnergySpectrum later,
                      double normalization_tolerance = kNormalizationTolerance);

    std::size_t later_dim() const noexcept { return static_cast<std::size_t>(probs_.rows()); }
    std::size_t earlier_dim() const noexcept { return static_cast<std::size_t>(probs_.cols()); }
    double operator()(std::size_t later, std::size_t earlier) const {
        return probs_(static_cast<Eigen::Index>(later), static_cast<Eigen::Index>(earlier));
    }
    const Eigen::MatrixXd& probs() const noexcept { return probs_; }
    const EnergySpectrum& earlier_spectrum() const noexcept { return earlier_; }
    const EnergySpectrum& later_spectrum() const noexcept { return later_; }

    std::vector<double> earlier_marginal() const;  ///< column sums
    std::vector<double> later_marginal() const;    ///< row sums
    double total() const { return probs_.sum(); }
    /// |1 - total|
    double normalization_defect() const { return std::abs(1.0 - total()); }

private:
    Eigen::MatrixXd probs_;
    EnergySpectrum earlier_;
    EnergySpectrum later_;
};

/// p(k2, k1, k0) for measurements at t0, t1, t2.
///
/// Exact joints are kept in factorized form p0(k0) T10(k1,k0) T21(k2,k1):
/// after the outcome k1 the state is the pure eigenstate |k1>, so the
/// protocol is a Markov chain over outcome indices. Empirical joints from
/// sampling are stored densely together with their sample count.
class JointDistribution3 {
public:
    static JointDistribution3 markov(std::vector<double> p0, Eigen::MatrixXd t10, Eigen::MatrixXd t21,
                                     EnergySpectrum s0, EnergySpectrum s1, EnergySpectrum s2,
                                     double normalization_tolerance = kNormalizationTolerance);
    /// `probs` laid out as ((k2 * d + k1) * d + k0).
    static JointDistribution3 dense(std::vector<double> probs, std::size_t dim, EnergySpectrum s0,
                                    EnergySpectrum s1, EnergySpectrum s2,
                                    std::optional<std::uint64_t> sample_count = std::nullopt);

    std::size_t dim() const noexcept { return dim_; }
    double operator()(std::size_t k2, std::size_t k1, std::size_t k0) const;
    bool is_factorized() const noexcept { return factorized_; }
    std::optional<std::uint64_t> sample_count() const noexcept { return sample_count_; }

    const EnergySpectrum& spectrum(int time) const;

    /// Sum over k2; for factorized joints this is p0 T10 evaluated directly.
    JointDistribution marginal_10() const;
    /// Sum over k0.
    JointDistribution marginal_21() const;
    /// Sum over the middle outcome k1 (the measured t0 -> t2 statistics).
    JointDistribution marginal_20() const;
    /// Distribution of the t1 outcome.
    std::vector<double> marginal_1() const;
    double total() const;

private:
    JointDistribution3(std::size_t dim, EnergySpectrum s0, EnergySpectrum s1, EnergySpectrum s2);

    std::size_t dim_;
    EnergySpectrum s0_, s1_, s2_;
    bool factorized_ = false;
    std::vector<double> p0_;
    Eigen::MatrixXd t10_, t21_;
    std::vector<double> dense_;
    std::optional<std::uint64_t> sample_count_;
    double normalization_tolerance_ = kNormalizationTolerance;
};

enum class WorkView { FineGrained, ValueGrouped };

struct IndexPair {
    std::size_t later;
    std::size_t earlier;
};

struct WorkEntry {
    double work;
    double probability;
    std::vector<IndexPair> sources;  ///< one pair when fine-grained
};

class WorkDistribution {
public:
    WorkDistribution(std::vector<WorkEntry> entries, WorkView view)
        : entries_(std::move(entries)), view_(view) {}

    const std::vector<WorkEntry>& entries() const noexcept { return entries_; }
    WorkView view() const noexcept { return view_; }
    std::size_t size() const noexcept { return entries_.size(); }
    double total() const;
    std::vector<double> probabilities() const;
    double mean() const;

    /// Merge entries whose work values lie within `tolerance` of the first
    /// value of their group; result is sorted by work.
    WorkDistribution grouped(double tolerance = kWorkDegeneracyTolerance) const;

private:
    std::vector<WorkEntry> entries_;
    WorkView view_;
};

struct WorkPair {
    double w1;  ///< E1_{k1} - E0_{k0}
    double w2;  ///< E2_{k2} - E1_{k1}
    double probability;
    std::size_t k2, k1, k0;
};

JointDistribution two_time_joint(const DiagonalDensity& rho0, const UnitaryPropagator& u,
                                 const EnergySpectrum& earlier, const EnergySpectrum& later);
/// Same, from a precomputed matrix of transition probabilities |U_{k1,k0}|^2.
JointDistribution two_time_joint(const DiagonalDensity& rho0, const Eigen::MatrixXd& transitions,
                                 const EnergySpectrum& earlier, const EnergySpectrum& later,
                                 double normalization_tolerance = kNormalizationTolerance);

JointDistribution3 three_time_joint(const DiagonalDensity& rho0, const UnitaryPropagator& u10,
                                    const UnitaryPropagator& u21, const EnergySpectrum& s0,
                                    const EnergySpectrum& s1, const EnergySpectrum& s2);
JointDistribution3 three_time_joint(const DiagonalDensity& rho0, const Eigen::MatrixXd& t10,
                                    const Eigen::MatrixXd& t21, const EnergySpectrum& s0,
                                    const EnergySpectrum& s1, const EnergySpectrum& s2,
                                    double normalization_tolerance = kNormalizationTolerance);

/// t0 -> t2 statistics when nothing is measured at t1: evolves with the
/// composed propagator u21 * u10.
JointDistribution two_time_joint_skipping_middle(const DiagonalDensity& rho0, const UnitaryPropagator& u10,
                                                 const UnitaryPropagator& u21, const EnergySpectrum& s0,
                                                 const EnergySpectrum& s2);

WorkDistribution work_distribution(const JointDistribution& joint, WorkView view = WorkView::FineGrained,
                                   double degeneracy_tolerance = kWorkDegeneracyTolerance);

/// w_tot = E2_{k2} - E0_{k0}, weighted by sum_{k1} p(k2,k1,k0).
WorkDistribution total_work_distribution(const JointDistribution3& joint3,
                                         WorkView view = WorkView::FineGrained,
                                         double degeneracy_tolerance = kWorkDegeneracyTolerance);

/// One entry per index triple with non-zero weight. O(d^3).
std::vector<WorkPair> work_pair_distribution(const JointDistribution3& joint3);

/// |<exp(-beta w)> - exp(-beta dF)|, with the average formed by log-sum-exp.
double jarzynski_deviation(const WorkDistribution& work, double beta, double delta_free_energy);

/// Total-variation distance between two joints of equal shape.
double total_variation(const JointDistribution& a, const JointDistribution& b);

/// Monte Carlo over measurement records: k0 ~ rho0, k1 ~ |u10(., k0)|^2,
/// k2 ~ |u21(., k1)|^2. Deterministic for a given (seed, n_samples).
JointDistribution3 sample_trajectories(const DiagonalDensity& rho0, const UnitaryPropagator& u10,
                                       const UnitaryPropagator& u21, std::uint64_t n_samples,
                                       std::uint64_t seed, const EnergySpectrum& s0,
                                       const EnergySpectrum& s1, const EnergySpectrum& s2);

}  // namespace workreal
