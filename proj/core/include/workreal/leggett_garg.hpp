#pragma once

// Dichotomic and entropic Leggett-Garg parameters for three energy
// measurements. Negative values witness a failure of macrorealism.

#include <cstddef>
#include <optional>
#include <vector>

#include "workreal/entropy.hpp"
#include "workreal/tpm.hpp"

namespace workreal {

inline constexpr double kViolationTolerance = 1e-12;

/// Q(k) in {-1, +1} for every outcome index k.
class DichotomicMapping {
public:
    explicit DichotomicMapping(std::vector<int> assignment);

    /// +1 on the ground state, -1 on every excited level.
    static DichotomicMapping ground_excited(std::size_t dim = 2);

    std::size_t size() const noexcept { return q_.size(); }
    int operator[](std::size_t k) const;
    DichotomicMapping flipped() const;

private:
    std::vector<int> q_;
};

/// Which statistics fed C02.
enum class CorrelatorSource {
    NoMiddleMeasurement,  ///< u21 * u10 evolution, nothing measured at t1
    MeasuredMarginal,     ///< sum over k1 of the three-time joint
};

struct CorrelatorSet {
    double c01 = 1.0;
    double c12 = 1.0;
    double c02 = 1.0;
    CorrelatorSource c02_source = CorrelatorSource::NoMiddleMeasurement;
};

/// sum Q(kj) Q(ki) p(kj, ki)
double dichotomic_correlator(const JointDistribution& joint, const DichotomicMapping& mapping);
double dichotomic_correlator(const JointDistribution& joint, const DichotomicMapping& earlier,
                             const DichotomicMapping& later);

/// (1 - C01 - C12 + C02) / 4; negative iff C01 + C12 - C02 > 1.
/// Throws unless C02 came from the unmeasured branch.
double k3_correlator(const CorrelatorSet& c);

/// Q1 -> -Q1: (1 + C01 + C12 + C02) / 4.
double k3_correlator_flipped(const CorrelatorSet& c);

/// (1 - C01 - C02 + C12) / 4, with C02 and C12 swapped. Non-negative for the
/// two-level rotation model at every angle.
double k3_correlator_swapped(const CorrelatorSet& c);

struct EntropicParameter {
    double full = 0.0;  ///< (H(w21) + H(w10) - H(w20) - H(E1)) / 2
    double weak = 0.0;  ///< same without the H(E1) term
};

EntropicParameter k3_entropic(const EntropyReport& h_w21, const EntropyReport& h_w10, const EntropyReport& h_w20,
                              const EntropyReport& h_e1);

/// (H(E2|E1) + H(E1|E0) - H(E2|E0)) / 2, the conditional-entropy form. Equals
/// k3_entropic(...).full for fine-grained work entropies.
double k3_entropic_conditional(const JointDistribution3& measured, const JointDistribution& no_middle,
                               EntropyBase base = EntropyBase::Natural);

struct LeggettGargOptions {
    WorkView view = WorkView::FineGrained;
    EntropyBase base = EntropyBase::Natural;
    double violation_tolerance = kViolationTolerance;
    double degeneracy_tolerance = kWorkDegeneracyTolerance;
    /// When set, the dichotomic parameters are evaluated too.
    std::optional<DichotomicMapping> mapping;
};

struct LeggettGargResult {
    std::optional<CorrelatorSet> correlators;
    std::optional<double> k_cor;
    std::optional<double> k_cor_flipped;
    double k_en = 0.0;
    double k_en_weak = 0.0;
    bool cor_violated = false;
    bool cor_flipped_violated = false;
    bool en_violated = false;
};

/// All Leggett-Garg quantities from the measured three-time statistics and
/// the t0 -> t2 statistics without the middle measurement.
LeggettGargResult evaluate_leggett_garg(const JointDistribution3& measured, const JointDistribution& no_middle,
                                        const LeggettGargOptions& options = {});

}  // namespace workreal
