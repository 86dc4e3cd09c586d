#pragma once

// Number-state matrix elements G_mn(r) = <m| U_r |n> of the squeezing
// propagator U_r = exp[(r/2)(a^dagger^2 - a^2)], which acts on the lowering
// operator as U^dagger a U = cosh(r) a + sinh(r) a^dagger.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <shared_mutex>
#include <utility>
#include <vector>

#include "workreal/hilbert.hpp"

namespace workreal {

/// Bogoliubov coefficients mu = cosh r, nu = sinh r e^{-i phi}. Only phi = 0
/// is used by the matrix builders.
struct SqueezeParams {
    double r = 0.0;
    double phi = 0.0;

    std::complex<double> mu() const;
    std::complex<double> nu() const;
    /// |mu|^2 - |nu|^2 - 1
    double bogoliubov_defect() const;
};

/// Truncated (n_max + 1)^2 block of G(r).
struct SqueezeMatrix {
    double r = 0.0;
    std::size_t n_max = 0;
    Eigen::MatrixXd g;
    /// |1 - sum_{m <= n_max} G_mn^2| per column n.
    std::vector<double> column_defects;

    std::size_t dim() const noexcept { return n_max + 1; }
    /// Length of the leading run of columns whose defect is below `budget`.
    std::size_t trusted_columns(double budget) const;
    /// G^2 elementwise.
    Eigen::MatrixXd transition_probabilities() const { return g.cwiseAbs2(); }
    UnitaryPropagator propagator(double budget) const;
};

/// How each element of the closed form was evaluated.
struct SqueezePrecisionStats {
    std::size_t double_elements = 0;
    std::size_t quad_elements = 0;
    std::size_t multiprecision_elements = 0;
};

/// Single closed-form element. The alternating series is summed from the
/// innermost term outward and re-run in quad, then 50-, 100-, 200- or
/// 400-digit arithmetic whenever the cancellation estimate exceeds 1e-14.
/// Throws InvalidParameter if even 400 digits cannot reach that.
double squeeze_element(std::size_t m, std::size_t n, double r, SqueezePrecisionStats* stats = nullptr);

/// Rows 0..m_max of column n, closed form.
std::vector<double> squeeze_column(std::size_t n, std::size_t m_max, double r);

/// Closed-form truncated matrix; G_mn with m + n odd is exactly zero.
SqueezeMatrix squeeze_matrix_closed_form(double r, std::size_t n_max, std::size_t threads = 1,
                                         SqueezePrecisionStats* stats = nullptr);

/// Independent reference: exponentiates the truncated generator
/// (r/2)(a^dagger^2 - a^2) on n_max + 1 number states by scaling and squaring
/// with a Taylor series, on `padding` extra states that are cropped from the
/// result. Accurate far below the truncation edge only.
SqueezeMatrix squeeze_matrix_exponential_oracle(double r, std::size_t n_max, std::size_t padding = 0);

/// Variant of the closed form summing from i = 1 with a 1/cosh prefactor and
/// "2 i!" in the even branch. Does not agree with the propagator (G_00 = 0).
double squeeze_element_variant(std::size_t m, std::size_t n, double r);

/// Read-mostly cache of closed-form matrices keyed by (r, n_max).
class SqueezeMatrixCache {
public:
    explicit SqueezeMatrixCache(std::size_t threads = 1) : threads_(threads) {}

    std::shared_ptr<const SqueezeMatrix> get(double r, std::size_t n_max);
    std::size_t size() const;
    void clear();

private:
    using Key = std::pair<double, std::size_t>;
    mutable std::shared_mutex mutex_;
    std::map<Key, std::shared_ptr<const SqueezeMatrix>> entries_;
    std::size_t threads_;
};

}  // namespace workreal
