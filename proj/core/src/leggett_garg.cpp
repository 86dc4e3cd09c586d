#include "workreal/leggett_garg.hpp"

#include <string>

namespace workreal {

DichotomicMapping::DichotomicMapping(std::vector<int> assignment) : q_(std::move(assignment)) {
    if (q_.empty()) throw InvalidParameter("dichotomic mapping is empty");
    for (int q : q_) {
        if (q != 1 && q != -1) throw InvalidParameter("dichotomic values must be +1 or -1");
    }
}

DichotomicMapping DichotomicMapping::ground_excited(std::size_t dim) {
    std::vector<int> q(dim, -1);
    if (dim > 0) q[0] = 1;
    return DichotomicMapping(std::move(q));
}

int DichotomicMapping::operator[](std::size_t k) const {
    if (k >= q_.size()) throw InvalidParameter("outcome index " + std::to_string(k) + " is not mapped");
    return q_[k];
}

DichotomicMapping DichotomicMapping::flipped() const {
    std::vector<int> q(q_);
    for (int& x : q) x = -x;
    return DichotomicMapping(std::move(q));
}

double dichotomic_correlator(const JointDistribution& joint, const DichotomicMapping& earlier,
                             const DichotomicMapping& later) {
    if (earlier.size() != joint.earlier_dim() || later.size() != joint.later_dim()) {
        throw InvalidParameter("dichotomic mapping does not cover every outcome index");
    }
    double c = 0.0;
    for (std::size_t ki = 0; ki < joint.earlier_dim(); ++ki)
        for (std::size_t kj = 0; kj < joint.later_dim(); ++kj) c += later[kj] * earlier[ki] * joint(kj, ki);
    return c;
}

double dichotomic_correlator(const JointDistribution& joint, const DichotomicMapping& mapping) {
    return dichotomic_correlator(joint, mapping, mapping);
}

double k3_correlator(const CorrelatorSet& c) {
    if (c.c02_source != CorrelatorSource::NoMiddleMeasurement) {
        throw InvalidParameter("C02 must come from the protocol without a measurement at t1");
    }
    return 0.25 * (1.0 - c.c01 - c.c12 + c.c02);
}

double k3_correlator_flipped(const CorrelatorSet& c) {
    if (c.c02_source != CorrelatorSource::NoMiddleMeasurement) {
        throw InvalidParameter("C02 must come from the protocol without a measurement at t1");
    }
    return 0.25 * (1.0 + c.c01 + c.c12 + c.c02);
}

double k3_correlator_swapped(const CorrelatorSet& c) {
    return 0.25 * (1.0 - c.c01 - c.c02 + c.c12);
}

EntropicParameter k3_entropic(const EntropyReport& h_w21, const EntropyReport& h_w10, const EntropyReport& h_w20,
                              const EntropyReport& h_e1) {
    if (h_w21.base != h_w10.base || h_w21.base != h_w20.base || h_w21.base != h_e1.base) {
        throw InvalidParameter("entropies must share one logarithm base");
    }
    EntropicParameter k;
    k.weak = 0.5 * (h_w21.value + h_w10.value - h_w20.value);
    k.full = k.weak - 0.5 * h_e1.value;
    return k;
}

double k3_entropic_conditional(const JointDistribution3& measured, const JointDistribution& no_middle,
                               EntropyBase base) {
    const double h21 = conditional_entropy(measured.marginal_21(), base).value;
    const double h10 = conditional_entropy(measured.marginal_10(), base).value;
    const double h20 = conditional_entropy(no_middle, base).value;
    return 0.5 * (h21 + h10 - h20);
}

LeggettGargResult evaluate_leggett_garg(const JointDistribution3& measured, const JointDistribution& no_middle,
                                        const LeggettGargOptions& options) {
    if (no_middle.earlier_dim() != measured.dim() || no_middle.later_dim() != measured.dim()) {
        throw InvalidParameter("no-middle joint has shape " + std::to_string(no_middle.later_dim()) + "x" +
                               std::to_string(no_middle.earlier_dim()) + ", measured joint has dimension " +
                               std::to_string(measured.dim()));
    }
    const JointDistribution p10 = measured.marginal_10();
    const JointDistribution p21 = measured.marginal_21();
    const std::vector<double> p1 = p10.later_marginal();

    LeggettGargResult out;
    const auto h21 = work_entropy(p21, options.view, options.base, options.degeneracy_tolerance);
    const auto h10 = work_entropy(p10, options.view, options.base, options.degeneracy_tolerance);
    const auto h20 = work_entropy(no_middle, options.view, options.base, options.degeneracy_tolerance);
    const auto h1 = shannon_entropy(p1, options.base);
    const auto k = k3_entropic(h21, h10, h20, h1);
    out.k_en = k.full;
    out.k_en_weak = k.weak;
    out.en_violated = out.k_en < -options.violation_tolerance;

    if (options.mapping) {
        const auto& q = *options.mapping;
        CorrelatorSet c;
        c.c01 = dichotomic_correlator(p10, q);
        c.c12 = dichotomic_correlator(p21, q);
        c.c02 = dichotomic_correlator(no_middle, q);
        c.c02_source = CorrelatorSource::NoMiddleMeasurement;
        out.correlators = c;
        out.k_cor = k3_correlator(c);
        out.k_cor_flipped = k3_correlator_flipped(c);
        out.cor_violated = *out.k_cor < -options.violation_tolerance;
        out.cor_flipped_violated = *out.k_cor_flipped < -options.violation_tolerance;
    }
    return out;
}

}  // namespace workreal
