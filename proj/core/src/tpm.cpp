#include "workreal/tpm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace workreal {

namespace {

void require_square(const Eigen::MatrixXd& m, std::size_t dim, const char* what) {
    if (static_cast<std::size_t>(m.rows()) != dim || static_cast<std::size_t>(m.cols()) != dim) {
        throw InvalidParameter(std::string(what) + ": expected " + std::to_string(dim) + "x" +
                               std::to_string(dim) + ", got " + std::to_string(m.rows()) + "x" +
                               std::to_string(m.cols()));
    }
}

void require_dim(std::size_t got, std::size_t want, const char* what) {
    if (got != want) {
        throw InvalidParameter(std::string(what) + ": dimension " + std::to_string(got) +
                               " does not match " + std::to_string(want));
    }
}

// Maps 64 random bits to a double in [0, 1) without going through the
// implementation-defined std::uniform_real_distribution.
double unit_interval(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

std::size_t draw(const std::vector<double>& cdf, double u) {
    const double target = u * cdf.back();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
    if (it == cdf.end()) --it;
    // Skip zero-width bins that upper_bound could land on after clamping.
    while (it != cdf.begin() && *it == *(it - 1)) --it;
    return static_cast<std::size_t>(it - cdf.begin());
}

std::vector<std::vector<double>> column_cdfs(const Eigen::MatrixXd& t) {
    std::vector<std::vector<double>> out(static_cast<std::size_t>(t.cols()));
    for (Eigen::Index c = 0; c < t.cols(); ++c) {
        auto& cdf = out[static_cast<std::size_t>(c)];
        cdf.resize(static_cast<std::size_t>(t.rows()));
        double acc = 0.0;
        for (Eigen::Index r = 0; r < t.rows(); ++r) {
            acc += t(r, c);
            cdf[static_cast<std::size_t>(r)] = acc;
        }
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

JointDistribution::JointDistribution(Eigen::MatrixXd probs, EnergySpectrum earlier, EnergySpectrum later,
                                     double normalization_tolerance)
    : probs_(std::move(probs)), earlier_(std::move(earlier)), later_(std::move(later)) {
    require_dim(static_cast<std::size_t>(probs_.cols()), earlier_.size(), "joint distribution columns");
    require_dim(static_cast<std::size_t>(probs_.rows()), later_.size(), "joint distribution rows");
    if ((probs_.array() < 0.0).any() || !probs_.allFinite()) {
        throw InvalidParameter("joint distribution has negative or non-finite entries");
    }
    const double defect = normalization_defect();
    if (defect > normalization_tolerance) {
        throw InvalidParameter("joint distribution is not normalized: |1 - sum| = " + std::to_string(defect));
    }
}

std::vector<double> JointDistribution::earlier_marginal() const {
    std::vector<double> out(earlier_dim());
    for (Eigen::Index c = 0; c < probs_.cols(); ++c) out[static_cast<std::size_t>(c)] = probs_.col(c).sum();
    return out;
}

std::vector<double> JointDistribution::later_marginal() const {
    std::vector<double> out(later_dim());
    for (Eigen::Index r = 0; r < probs_.rows(); ++r) out[static_cast<std::size_t>(r)] = probs_.row(r).sum();
    return out;
}

// ---------------------------------------------------------------------------

JointDistribution3::JointDistribution3(std::size_t dim, EnergySpectrum s0, EnergySpectrum s1, EnergySpectrum s2)
    : dim_(dim), s0_(std::move(s0)), s1_(std::move(s1)), s2_(std::move(s2)) {
    require_dim(s0_.size(), dim, "spectrum at t0");
    require_dim(s1_.size(), dim, "spectrum at t1");
    require_dim(s2_.size(), dim, "spectrum at t2");
}

JointDistribution3 JointDistribution3::markov(std::vector<double> p0, Eigen::MatrixXd t10, Eigen::MatrixXd t21,
                                              EnergySpectrum s0, EnergySpectrum s1, EnergySpectrum s2,
                                              double normalization_tolerance) {
    const std::size_t d = p0.size();
    require_square(t10, d, "transition t0->t1");
    require_square(t21, d, "transition t1->t2");
    JointDistribution3 out(d, std::move(s0), std::move(s1), std::move(s2));
    out.factorized_ = true;
    out.p0_ = std::move(p0);
    out.t10_ = std::move(t10);
    out.t21_ = std::move(t21);
    out.normalization_tolerance_ = normalization_tolerance;
    const double defect = std::abs(1.0 - out.total());
    if (defect > normalization_tolerance) {
        throw InvalidParameter("three-time joint is not normalized: |1 - sum| = " + std::to_string(defect));
    }
    return out;
}

JointDistribution3 JointDistribution3::dense(std::vector<double> probs, std::size_t dim, EnergySpectrum s0,
                                             EnergySpectrum s1, EnergySpectrum s2,
                                             std::optional<std::uint64_t> sample_count) {
    require_dim(probs.size(), dim * dim * dim, "dense three-time joint");
    JointDistribution3 out(dim, std::move(s0), std::move(s1), std::move(s2));
    out.dense_ = std::move(probs);
    out.sample_count_ = sample_count;
    for (double p : out.dense_) {
        if (!(p >= 0.0)) throw InvalidParameter("three-time joint has negative entries");
    }
    const double defect = std::abs(1.0 - out.total());
    if (defect > kNormalizationTolerance) {
        throw InvalidParameter("three-time joint is not normalized: |1 - sum| = " + std::to_string(defect));
    }
    return out;
}

double JointDistribution3::operator()(std::size_t k2, std::size_t k1, std::size_t k0) const {
    if (factorized_) {
        const auto i1 = static_cast<Eigen::Index>(k1);
        return t21_(static_cast<Eigen::Index>(k2), i1) * (t10_(i1, static_cast<Eigen::Index>(k0)) * p0_[k0]);
    }
    return dense_[(k2 * dim_ + k1) * dim_ + k0];
}

const EnergySpectrum& JointDistribution3::spectrum(int time) const {
    switch (time) {
        case 0: return s0_;
        case 1: return s1_;
        case 2: return s2_;
        default: throw InvalidParameter("time index must be 0, 1 or 2");
    }
}

JointDistribution JointDistribution3::marginal_10() const {
    const auto n = static_cast<Eigen::Index>(dim_);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    if (factorized_) {
        for (Eigen::Index k0 = 0; k0 < n; ++k0) m.col(k0) = t10_.col(k0) * p0_[static_cast<std::size_t>(k0)];
    } else {
        for (std::size_t k2 = 0; k2 < dim_; ++k2)
            for (std::size_t k1 = 0; k1 < dim_; ++k1)
                for (std::size_t k0 = 0; k0 < dim_; ++k0)
                    m(static_cast<Eigen::Index>(k1), static_cast<Eigen::Index>(k0)) += (*this)(k2, k1, k0);
    }
    return JointDistribution(std::move(m), s0_, s1_, normalization_tolerance_);
}

std::vector<double> JointDistribution3::marginal_1() const {
    return marginal_10().later_marginal();
}

JointDistribution JointDistribution3::marginal_21() const {
    const auto n = static_cast<Eigen::Index>(dim_);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    if (factorized_) {
        const std::vector<double> p1 = marginal_1();
        for (Eigen::Index k1 = 0; k1 < n; ++k1) m.col(k1) = t21_.col(k1) * p1[static_cast<std::size_t>(k1)];
    } else {
        for (std::size_t k2 = 0; k2 < dim_; ++k2)
            for (std::size_t k1 = 0; k1 < dim_; ++k1)
                for (std::size_t k0 = 0; k0 < dim_; ++k0)
                    m(static_cast<Eigen::Index>(k2), static_cast<Eigen::Index>(k1)) += (*this)(k2, k1, k0);
    }
    return JointDistribution(std::move(m), s1_, s2_, normalization_tolerance_);
}

JointDistribution JointDistribution3::marginal_20() const {
    const auto n = static_cast<Eigen::Index>(dim_);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    if (factorized_) {
        // Classical chain: T21 * T10 * diag(p0).
        const Eigen::MatrixXd t20 = t21_ * t10_;
        for (Eigen::Index k0 = 0; k0 < n; ++k0) m.col(k0) = t20.col(k0) * p0_[static_cast<std::size_t>(k0)];
    } else {
        for (std::size_t k2 = 0; k2 < dim_; ++k2)
            for (std::size_t k1 = 0; k1 < dim_; ++k1)
                for (std::size_t k0 = 0; k0 < dim_; ++k0)
                    m(static_cast<Eigen::Index>(k2), static_cast<Eigen::Index>(k0)) += (*this)(k2, k1, k0);
    }
    return JointDistribution(std::move(m), s0_, s2_, normalization_tolerance_);
}

double JointDistribution3::total() const {
    if (factorized_) {
        // sum_{k2,k1} T21 T10 p0, evaluated as column sums.
        const Eigen::VectorXd p0 = Eigen::Map<const Eigen::VectorXd>(p0_.data(), static_cast<Eigen::Index>(dim_));
        const Eigen::VectorXd p1 = t10_ * p0;
        return (t21_ * p1).sum();
    }
    return std::accumulate(dense_.begin(), dense_.end(), 0.0);
}

// ---------------------------------------------------------------------------

double WorkDistribution::total() const {
    double s = 0.0;
    for (const auto& e : entries_) s += e.probability;
    return s;
}

std::vector<double> WorkDistribution::probabilities() const {
    std::vector<double> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.probability);
    return out;
}

double WorkDistribution::mean() const {
    double s = 0.0;
    for (const auto& e : entries_) s += e.work * e.probability;
    return s;
}

WorkDistribution WorkDistribution::grouped(double tolerance) const {
    std::vector<const WorkEntry*> order;
    order.reserve(entries_.size());
    for (const auto& e : entries_) order.push_back(&e);
    std::stable_sort(order.begin(), order.end(),
                     [](const WorkEntry* a, const WorkEntry* b) { return a->work < b->work; });
    std::vector<WorkEntry> out;
    double anchor = 0.0;
    for (const WorkEntry* e : order) {
        if (out.empty() || e->work - anchor >= tolerance) {
            anchor = e->work;
            out.push_back(WorkEntry{e->work, 0.0, {}});
        }
        out.back().probability += e->probability;
        out.back().sources.insert(out.back().sources.end(), e->sources.begin(), e->sources.end());
    }
    return WorkDistribution(std::move(out), WorkView::ValueGrouped);
}

// ---------------------------------------------------------------------------

JointDistribution two_time_joint(const DiagonalDensity& rho0, const Eigen::MatrixXd& transitions,
                                 const EnergySpectrum& earlier, const EnergySpectrum& later,
                                 double normalization_tolerance) {
    require_dim(rho0.size(), static_cast<std::size_t>(transitions.cols()), "initial state vs propagator");
    Eigen::MatrixXd probs(transitions.rows(), transitions.cols());
    for (Eigen::Index k0 = 0; k0 < transitions.cols(); ++k0) {
        probs.col(k0) = transitions.col(k0) * rho0[static_cast<std::size_t>(k0)];
    }
    return JointDistribution(std::move(probs), earlier, later, normalization_tolerance);
}

JointDistribution two_time_joint(const DiagonalDensity& rho0, const UnitaryPropagator& u,
                                 const EnergySpectrum& earlier, const EnergySpectrum& later) {
    return two_time_joint(rho0, u.transition_probabilities(), earlier, later,
                          std::max(kNormalizationTolerance, u.tolerance()));
}

JointDistribution3 three_time_joint(const DiagonalDensity& rho0, const Eigen::MatrixXd& t10,
                                    const Eigen::MatrixXd& t21, const EnergySpectrum& s0,
                                    const EnergySpectrum& s1, const EnergySpectrum& s2,
                                    double normalization_tolerance) {
    std::vector<double> p0(rho0.populations().begin(), rho0.populations().end());
    return JointDistribution3::markov(std::move(p0), t10, t21, s0, s1, s2, normalization_tolerance);
}

JointDistribution3 three_time_joint(const DiagonalDensity& rho0, const UnitaryPropagator& u10,
                                    const UnitaryPropagator& u21, const EnergySpectrum& s0,
                                    const EnergySpectrum& s1, const EnergySpectrum& s2) {
    require_dim(rho0.size(), u10.dim(), "initial state vs propagator t0->t1");
    require_dim(u10.dim(), u21.dim(), "propagator t1->t2");
    return three_time_joint(rho0, u10.transition_probabilities(), u21.transition_probabilities(), s0, s1, s2,
                            std::max(kNormalizationTolerance, u10.tolerance() + u21.tolerance()));
}

JointDistribution two_time_joint_skipping_middle(const DiagonalDensity& rho0, const UnitaryPropagator& u10,
                                                 const UnitaryPropagator& u21, const EnergySpectrum& s0,
                                                 const EnergySpectrum& s2) {
    require_dim(rho0.size(), u10.dim(), "initial state vs propagator t0->t1");
    return two_time_joint(rho0, compose_propagators(u10, u21), s0, s2);
}

WorkDistribution work_distribution(const JointDistribution& joint, WorkView view, double degeneracy_tolerance) {
    std::vector<WorkEntry> entries;
    const auto& earlier = joint.earlier_spectrum();
    const auto& later = joint.later_spectrum();
    for (std::size_t ki = 0; ki < joint.earlier_dim(); ++ki) {
        for (std::size_t kj = 0; kj < joint.later_dim(); ++kj) {
            const double p = joint(kj, ki);
            if (p > 0.0) entries.push_back(WorkEntry{later[kj] - earlier[ki], p, {IndexPair{kj, ki}}});
        }
    }
    WorkDistribution fine(std::move(entries), WorkView::FineGrained);
    return view == WorkView::FineGrained ? fine : fine.grouped(degeneracy_tolerance);
}

WorkDistribution total_work_distribution(const JointDistribution3& joint3, WorkView view,
                                         double degeneracy_tolerance) {
    return work_distribution(joint3.marginal_20(), view, degeneracy_tolerance);
}

std::vector<WorkPair> work_pair_distribution(const JointDistribution3& joint3) {
    const auto& s0 = joint3.spectrum(0);
    const auto& s1 = joint3.spectrum(1);
    const auto& s2 = joint3.spectrum(2);
    std::vector<WorkPair> out;
    const std::size_t d = joint3.dim();
    for (std::size_t k0 = 0; k0 < d; ++k0)
        for (std::size_t k1 = 0; k1 < d; ++k1)
            for (std::size_t k2 = 0; k2 < d; ++k2) {
                const double p = joint3(k2, k1, k0);
                if (p > 0.0) out.push_back(WorkPair{s1[k1] - s0[k0], s2[k2] - s1[k1], p, k2, k1, k0});
            }
    return out;
}

double jarzynski_deviation(const WorkDistribution& work, double beta, double delta_free_energy) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidParameter("beta must be positive and finite");
    double max_a = -std::numeric_limits<double>::infinity();
    for (const auto& e : work.entries()) {
        if (e.probability > 0.0) max_a = std::max(max_a, std::log(e.probability) - beta * e.work);
    }
    if (!std::isfinite(max_a)) throw InvalidParameter("work distribution has no support");
    double s = 0.0;
    for (const auto& e : work.entries()) {
        if (e.probability > 0.0) s += std::exp(std::log(e.probability) - beta * e.work - max_a);
    }
    const double log_avg = max_a + std::log(s);
    return std::abs(std::exp(log_avg) - std::exp(-beta * delta_free_energy));
}

double total_variation(const JointDistribution& a, const JointDistribution& b) {
    if (a.probs().rows() != b.probs().rows() || a.probs().cols() != b.probs().cols()) {
        throw InvalidParameter("total variation needs joints of equal shape");
    }
    return 0.5 * (a.probs() - b.probs()).cwiseAbs().sum();
}

JointDistribution3 sample_trajectories(const DiagonalDensity& rho0, const UnitaryPropagator& u10,
                                       const UnitaryPropagator& u21, std::uint64_t n_samples,
                                       std::uint64_t seed, const EnergySpectrum& s0,
                                       const EnergySpectrum& s1, const EnergySpectrum& s2) {
    constexpr std::size_t kMaxDenseDim = 160;
    if (n_samples == 0) throw InvalidParameter("n_samples must be >= 1");
    const std::size_t d = rho0.size();
    require_dim(u10.dim(), d, "propagator t0->t1");
    require_dim(u21.dim(), d, "propagator t1->t2");
    if (d > kMaxDenseDim) {
        throw InvalidParameter("trajectory sampling keeps a dense d^3 table; dimension " + std::to_string(d) +
                               " exceeds " + std::to_string(kMaxDenseDim));
    }

    std::vector<double> cdf0(d);
    std::partial_sum(rho0.populations().begin(), rho0.populations().end(), cdf0.begin());
    const auto cdf10 = column_cdfs(u10.transition_probabilities());
    const auto cdf21 = column_cdfs(u21.transition_probabilities());

    std::vector<std::uint64_t> counts(d * d * d, 0);
    std::mt19937_64 gen(seed);
    for (std::uint64_t i = 0; i < n_samples; ++i) {
        const std::size_t k0 = draw(cdf0, unit_interval(gen));
        const std::size_t k1 = draw(cdf10[k0], unit_interval(gen));
        const std::size_t k2 = draw(cdf21[k1], unit_interval(gen));
        ++counts[(k2 * d + k1) * d + k0];
    }
    std::vector<double> probs(counts.size());
    const double inv = 1.0 / static_cast<double>(n_samples);
    for (std::size_t i = 0; i < counts.size(); ++i) probs[i] = static_cast<double>(counts[i]) * inv;
    return JointDistribution3::dense(std::move(probs), d, s0, s1, s2, n_samples);
}

}  // namespace workreal
