#include "workreal/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace workreal {

namespace {

void require_beta(double beta, bool allow_infinite) {
    if (std::isnan(beta) || beta <= 0.0 || (!allow_infinite && std::isinf(beta))) {
        throw InvalidParameter("inverse temperature must be positive and finite, got " +
                               std::to_string(beta));
    }
}

// log sum_k exp(-beta (E_k - E_min)); the shift keeps every exponent <= 0.
double shifted_log_partition(std::span<const double> levels, double beta) {
    const double e_min = levels.front();
    double sum = 0.0;
    for (double e : levels) sum += std::exp(-beta * (e - e_min));
    return std::log(sum);
}

}  // namespace

EnergySpectrum::EnergySpectrum(std::vector<double> levels, int time_index)
    : levels_(std::move(levels)), time_index_(time_index) {
    if (levels_.empty()) throw InvalidParameter("energy spectrum is empty");
    for (double e : levels_) {
        if (!std::isfinite(e)) throw InvalidParameter("energy spectrum contains a non-finite level");
    }
    if (!std::is_sorted(levels_.begin(), levels_.end())) {
        throw InvalidParameter("energy levels must be sorted non-decreasing");
    }
}

EnergySpectrum EnergySpectrum::shifted(double c) const {
    std::vector<double> out(levels_);
    for (double& e : out) e += c;
    return EnergySpectrum(std::move(out), time_index_);
}

EnergySpectrum EnergySpectrum::harmonic(std::size_t n_max, int time_index) {
    std::vector<double> levels(n_max + 1);
    for (std::size_t k = 0; k <= n_max; ++k) levels[k] = static_cast<double>(k) + 0.5;
    return EnergySpectrum(std::move(levels), time_index);
}

EnergySpectrum EnergySpectrum::two_level(double gap, int time_index) {
    return EnergySpectrum({0.0, gap}, time_index);
}

DiagonalDensity::DiagonalDensity(std::vector<double> populations, std::optional<double> beta)
    : populations_(std::move(populations)), beta_(beta) {
    if (populations_.empty()) throw InvalidParameter("density has no populations");
    double total = 0.0;
    for (double p : populations_) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidParameter("populations must be finite and non-negative");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw InvalidParameter("populations sum to " + std::to_string(total) + ", expected 1");
    }
}

DiagonalDensity DiagonalDensity::uniform(std::size_t dim) {
    if (dim == 0) throw InvalidParameter("uniform density needs dim >= 1");
    return DiagonalDensity(std::vector<double>(dim, 1.0 / static_cast<double>(dim)));
}

DiagonalDensity build_thermal_state(const EnergySpectrum& spectrum, double beta) {
    require_beta(beta, /*allow_infinite=*/true);
    const auto levels = spectrum.levels();
    std::vector<double> p(levels.size(), 0.0);
    if (std::isinf(beta)) {
        // Degenerate ground levels share the weight.
        const double e0 = levels.front();
        std::size_t g = 0;
        while (g < levels.size() && levels[g] == e0) ++g;
        for (std::size_t k = 0; k < g; ++k) p[k] = 1.0 / static_cast<double>(g);
        return DiagonalDensity(std::move(p), beta);
    }
    const double e_min = levels.front();
    double z = 0.0;
    for (std::size_t k = 0; k < levels.size(); ++k) {
        p[k] = std::exp(-beta * (levels[k] - e_min));
        z += p[k];
    }
    for (double& x : p) x /= z;
    return DiagonalDensity(std::move(p), beta);
}

ThermodynamicPotentials thermodynamic_potentials(const EnergySpectrum& spectrum, double beta) {
    require_beta(beta, /*allow_infinite=*/false);
    const auto levels = spectrum.levels();
    const double log_z = shifted_log_partition(levels, beta) - beta * levels.front();
    return ThermodynamicPotentials{std::exp(log_z), log_z, -log_z / beta};
}

std::vector<double> column_norm_defects(const Eigen::MatrixXcd& u) {
    std::vector<double> out(static_cast<std::size_t>(u.cols()));
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
        out[static_cast<std::size_t>(c)] = std::abs(1.0 - u.col(c).squaredNorm());
    }
    return out;
}

UnitarityReport validate_unitary(const Eigen::MatrixXcd& u, double tolerance,
                                 std::optional<std::size_t> columns) {
    if (u.rows() != u.cols()) throw InvalidParameter("unitarity check needs a square matrix");
    const Eigen::Index n =
        columns ? std::min<Eigen::Index>(static_cast<Eigen::Index>(*columns), u.cols()) : u.cols();
    UnitarityReport report;
    if (n == 0) return report;
    const auto band = u.leftCols(n);
    Eigen::MatrixXcd gram = band.adjoint() * band;
    gram.diagonal().array() -= 1.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double d = std::abs(gram(i, j));
            if (d > report.max_deviation) report.max_deviation = d;
        }
    }
    double worst = -1.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double d = std::abs(gram(j, j).real());
        if (d > worst) {
            worst = d;
            report.worst_column = static_cast<std::size_t>(j);
        }
    }
    report.within_tolerance = report.max_deviation <= tolerance;
    return report;
}

UnitarityReport validate_unitary(const UnitaryPropagator& u, double tolerance) {
    return validate_unitary(u.matrix(), tolerance, u.trusted_columns());
}

UnitaryPropagator::UnitaryPropagator(Eigen::MatrixXcd matrix, std::size_t trusted, double tolerance, bool)
    : matrix_(std::move(matrix)), trusted_columns_(trusted), tolerance_(tolerance), defect_(0.0) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
        throw InvalidParameter("propagator must be a non-empty square matrix");
    }
    if (trusted_columns_ == kAllColumns) trusted_columns_ = static_cast<std::size_t>(matrix_.cols());
    if (trusted_columns_ > static_cast<std::size_t>(matrix_.cols())) {
        throw InvalidParameter("trusted band exceeds propagator dimension");
    }
    const auto report = validate_unitary(matrix_, tolerance_, trusted_columns_);
    defect_ = report.max_deviation;
    if (!report.within_tolerance) {
        throw InvalidParameter("propagator is not unitary: deviation " + std::to_string(defect_) +
                               " exceeds " + std::to_string(tolerance_) + " (worst column " +
                               std::to_string(report.worst_column) + ")");
    }
}

UnitaryPropagator::UnitaryPropagator(Eigen::MatrixXcd matrix, double tolerance)
    : UnitaryPropagator(std::move(matrix), kAllColumns, tolerance, true) {}

UnitaryPropagator UnitaryPropagator::truncated(Eigen::MatrixXcd matrix, std::size_t trusted_columns,
                                               double budget) {
    return UnitaryPropagator(std::move(matrix), trusted_columns, budget, true);
}

UnitaryPropagator UnitaryPropagator::identity(std::size_t dim) {
    const auto n = static_cast<Eigen::Index>(dim);
    return UnitaryPropagator(Eigen::MatrixXcd::Identity(n, n));
}

UnitaryPropagator compose_propagators(const UnitaryPropagator& u10, const UnitaryPropagator& u21) {
    if (u10.dim() != u21.dim()) {
        throw InvalidParameter("cannot compose propagators of dimension " + std::to_string(u10.dim()) +
                               " and " + std::to_string(u21.dim()));
    }
    Eigen::MatrixXcd product = u21.matrix() * u10.matrix();
    // Defects of the factors add to first order.
    const double tol = std::max(UnitaryPropagator::kDefaultTolerance, u10.tolerance() + u21.tolerance());
    // A trusted column of u10 can still spread onto rows where u21 is untrusted,
    // so keep only the leading columns whose image stays normalized.
    const std::size_t limit = std::min(u10.trusted_columns(), u21.trusted_columns());
    std::size_t trusted = 0;
    while (trusted < limit && std::abs(product.col(static_cast<Eigen::Index>(trusted)).squaredNorm() - 1.0) <= tol)
        ++trusted;
    return UnitaryPropagator::truncated(std::move(product), trusted, tol);
}

}  // namespace workreal
