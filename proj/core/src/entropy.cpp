#include "workreal/entropy.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace workreal {

namespace {

constexpr double kSumTolerance = 1e-8;
constexpr double kRescaleThreshold = 1e-14;

double to_base(double nats, EntropyBase base) {
    return base == EntropyBase::Natural ? nats : nats / std::numbers::ln2;
}

// Plain -sum p log p, no normalization checks.
double raw_entropy(std::span<const double> probs, std::size_t* support = nullptr) {
    double h = 0.0;
    std::size_t n = 0;
    for (double p : probs) {
        if (p > 0.0) {
            h -= p * std::log(p);
            ++n;
        }
    }
    if (support) *support = n;
    return h;
}

}  // namespace

EntropyReport shannon_entropy(std::span<const double> probs, EntropyBase base) {
    double total = 0.0;
    for (double p : probs) {
        if (p < 0.0 || !std::isfinite(p)) throw InvalidParameter("entropy of a distribution with negative entries");
        total += p;
    }
    const double defect = std::abs(1.0 - total);
    if (defect > kSumTolerance) {
        throw InvalidParameter("entropy input sums to " + std::to_string(total));
    }
    EntropyReport report;
    report.base = base;
    if (defect > kRescaleThreshold) {
        // H(p / s) = H(p) / s + log s
        const double h = raw_entropy(probs, &report.support_size);
        report.value = to_base(h / total + std::log(total), base);
        report.renormalized = true;
    } else {
        report.value = to_base(raw_entropy(probs, &report.support_size), base);
    }
    if (report.value < 0.0) report.value = 0.0;  // -0 and round-off for point masses
    return report;
}

EntropyReport joint_entropy(const JointDistribution& joint, EntropyBase base) {
    const auto& m = joint.probs();
    return shannon_entropy(std::span<const double>(m.data(), static_cast<std::size_t>(m.size())), base);
}

EntropyReport conditional_entropy(const JointDistribution& joint, EntropyBase base) {
    const auto& m = joint.probs();
    const double total = m.sum();
    if (std::abs(1.0 - total) > kSumTolerance) {
        throw InvalidParameter("conditional entropy of an unnormalized joint (sum " + std::to_string(total) + ")");
    }
    double h = 0.0;
    std::size_t support = 0;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        const double pc = m.col(c).sum();
        if (pc <= 0.0) continue;
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            const double p = m(r, c);
            if (p > 0.0) {
                h -= p * std::log(p / pc);
                ++support;
            }
        }
    }
    h /= total;
    return EntropyReport{to_base(std::max(h, 0.0), base), base, support,
                         std::abs(1.0 - total) > kRescaleThreshold};
}

GroupedEntropy grouped_entropy(std::span<const double> probs, const std::vector<std::vector<std::size_t>>& groups,
                               EntropyBase base) {
    std::vector<int> seen(probs.size(), 0);
    for (const auto& g : groups) {
        for (std::size_t i : g) {
            if (i >= probs.size()) throw InvalidParameter("grouping refers to index " + std::to_string(i));
            if (seen[i]++) throw InvalidParameter("grouping is not a partition: index " + std::to_string(i) + " repeated");
        }
    }
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (!seen[i] && probs[i] > 0.0) {
            throw InvalidParameter("grouping does not cover index " + std::to_string(i));
        }
    }
    // Validates normalization and sign of the input.
    (void)shannon_entropy(probs, base);

    std::vector<double> q;
    q.reserve(groups.size());
    double within = 0.0;
    std::vector<double> sub;
    for (const auto& g : groups) {
        double qj = 0.0;
        for (std::size_t i : g) qj += probs[i];
        q.push_back(qj);
        if (qj <= 0.0) continue;
        sub.clear();
        for (std::size_t i : g) sub.push_back(probs[i] / qj);
        within += qj * raw_entropy(sub);
    }
    GroupedEntropy out;
    out.grouped = shannon_entropy(q, base);
    out.within = to_base(within, base);
    return out;
}

EntropyReport work_entropy(const WorkDistribution& work, EntropyBase base) {
    const auto p = work.probabilities();
    return shannon_entropy(p, base);
}

EntropyReport work_entropy(const JointDistribution& joint, WorkView view, EntropyBase base,
                           double degeneracy_tolerance) {
    if (view == WorkView::FineGrained) return joint_entropy(joint, base);
    return work_entropy(work_distribution(joint, view, degeneracy_tolerance), base);
}

}  // namespace workreal
