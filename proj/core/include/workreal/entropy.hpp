#pragma once

// Shannon, joint and conditional entropies of outcome and work statistics.

#include <cstddef>
#include <span>
#include <vector>

#include "workreal/tpm.hpp"

namespace workreal {

enum class EntropyBase { Natural, Bits };

struct EntropyReport {
    double value = 0.0;
    EntropyBase base = EntropyBase::Natural;
    std::size_t support_size = 0;
    /// Input summed to 1 only within 1e-8 and was rescaled first.
    bool renormalized = false;
};

/// -sum_{p > 0} p log p. Inputs off normalization by more than 1e-8 are
/// rejected; smaller defects are rescaled away and flagged.
EntropyReport shannon_entropy(std::span<const double> probs, EntropyBase base = EntropyBase::Natural);

/// H(E^j | E^i) = -sum p(kj,ki) log p(kj|ki).
EntropyReport conditional_entropy(const JointDistribution& joint, EntropyBase base = EntropyBase::Natural);

/// H(E^j, E^i) over index pairs.
EntropyReport joint_entropy(const JointDistribution& joint, EntropyBase base = EntropyBase::Natural);

struct GroupedEntropy {
    EntropyReport grouped;  ///< H(q), q_j = sum_{i in I_j} p_i
    double within = 0.0;    ///< sum_j q_j H({p_i / q_j : i in I_j})
};

/// Grouping formula H(q) = H(p) - within. `groups` must partition the
/// indices of `probs` that carry non-zero probability.
GroupedEntropy grouped_entropy(std::span<const double> probs, const std::vector<std::vector<std::size_t>>& groups,
                               EntropyBase base = EntropyBase::Natural);

/// Entropy of a work distribution as given (fine-grained or grouped).
EntropyReport work_entropy(const WorkDistribution& work, EntropyBase base = EntropyBase::Natural);
/// Entropy of the work statistics of `joint` under `view`.
EntropyReport work_entropy(const JointDistribution& joint, WorkView view, EntropyBase base = EntropyBase::Natural,
                           double degeneracy_tolerance = kWorkDegeneracyTolerance);

}  // namespace workreal
