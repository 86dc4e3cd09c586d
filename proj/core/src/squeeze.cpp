#include "workreal/squeeze.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <type_traits>
#include <mutex>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "workreal/parallel.hpp"

namespace workreal {

namespace {

using quad = __float128;
template <unsigned Digits>
using mp_float =
    boost::multiprecision::number<boost::multiprecision::cpp_bin_float<Digits>, boost::multiprecision::et_off>;

// Target absolute accuracy of a single matrix element.
constexpr double kElementTolerance = 1e-14;

template <class F>
double to_double(const F& x) {
    if constexpr (std::is_same_v<F, double> || std::is_same_v<F, quad>) {
        return static_cast<double>(x);
    } else {
        return x.template convert_to<double>();
    }
}

template <class F>
F magnitude(const F& x) {
    return x < F(0) ? F(-x) : x;
}

// sinh(r) by its Taylor series, evaluated entirely in F.
template <class F>
F sinh_series(double r) {
    const F x = r;
    const F x2 = x * x;
    F term = x;
    F sum = x;
    for (int k = 1; k < 4000; ++k) {
        term = term * x2 / F(static_cast<double>((2 * k) * (2 * k + 1)));
        if (sum + term == sum) break;
        sum += term;
    }
    return sum;
}

template <class F>
struct Series {
    F sum;
    F abs_sum;
    std::size_t terms;
};

// Closed form with summation index l = number of quanta that survive the
// annihilation stage (l = 2i or 2i + 1):
//   G_mn = sqrt(m! n!) / sqrt(cosh r) * sum_l (-1)^{(n-l)/2} (tanh r / 2)^{(m+n)/2 - l}
//          cosh(r)^{-l} / [((m-l)/2)! ((n-l)/2)! l!]
// The terms are taken relative to the l = min(m, n) term; successive ratios
// are -(sinh r / 2)^2 l (l-1) / [((m-l)/2 + 1) ((n-l)/2 + 1)].
// The ratios shrink as l decreases, so once a ratio is below 1/2 the
// remaining tail is bounded by the current term; the loop stops when that
// bound drops below `stop` relative to the accumulated magnitude.
template <class F>
Series<F> relative_series(std::size_t m, std::size_t n, const F& q, const F& stop) {
    const std::size_t top = std::min(m, n);
    const std::size_t bottom = top % 2;
    F term = 1;
    F sum = 1;
    F abs_sum = 1;
    std::size_t terms = 1;
    for (std::size_t l = top; l >= bottom + 2; l -= 2) {
        const std::size_t a = (m - l) / 2 + 1;
        const std::size_t b = (n - l) / 2 + 1;
        const F previous = magnitude(term);
        term *= q;
        term *= static_cast<std::uint64_t>(l * (l - 1));
        term /= static_cast<std::uint64_t>(a * b);
        term = -term;
        sum += term;
        const F size = magnitude(term);
        abs_sum += size;
        ++terms;
        if (size + size <= previous && size <= abs_sum * stop) break;
    }
    return {sum, abs_sum, terms};
}

// log of sum |term| relative to the innermost term, for when the double
// accumulation overflows.
double log_abs_series(std::size_t m, std::size_t n, double log_q) {
    const std::size_t top = std::min(m, n);
    const std::size_t bottom = top % 2;
    double log_term = 0.0;
    double log_sum = 0.0;
    for (std::size_t l = top; l >= bottom + 2; l -= 2) {
        const double a = static_cast<double>((m - l) / 2 + 1);
        const double b = static_cast<double>((n - l) / 2 + 1);
        log_term += log_q + std::log(static_cast<double>(l)) + std::log(static_cast<double>(l - 1)) - std::log(a) -
                    std::log(b);
        const double hi = std::max(log_sum, log_term);
        log_sum = hi + std::log(std::exp(log_sum - hi) + std::exp(log_term - hi));
    }
    return log_sum;
}

double log_factorial_ratio(std::size_t hi, std::size_t lo) {
    // log(hi! / lo!)
    if (hi - lo <= 64) {
        double s = 0.0;
        for (std::size_t k = lo + 1; k <= hi; ++k) s += std::log(static_cast<double>(k));
        return s;
    }
    return std::lgamma(static_cast<double>(hi) + 1.0) - std::lgamma(static_cast<double>(lo) + 1.0);
}

struct Prefactor {
    double log_magnitude;
    int sign;
};

// The l = min(m, n) term: sqrt(max!/min!) / (|m-n|/2)! (tanh r / 2)^{|m-n|/2}
// cosh(r)^{-min - 1/2}, signed (-1)^{(n - min)/2}.
Prefactor innermost_term(std::size_t m, std::size_t n, double log_half_tanh, double log_cosh) {
    const std::size_t lo = std::min(m, n);
    const std::size_t hi = std::max(m, n);
    const std::size_t half_gap = (hi - lo) / 2;
    double lm = 0.5 * log_factorial_ratio(hi, lo) - std::lgamma(static_cast<double>(half_gap) + 1.0) -
                (static_cast<double>(lo) + 0.5) * log_cosh;
    if (half_gap > 0) lm += static_cast<double>(half_gap) * log_half_tanh;
    const int sign = (((n - lo) / 2) % 2 == 0) ? 1 : -1;
    return {lm, sign};
}

// Working precision for one retry of the series.
template <class F>
struct Tier {
    F q;
    F stop;
    double log_eps;  ///< log of the unit roundoff

    Tier() = default;
    Tier(double r, double log_eps_, const F& stop_) : stop(stop_), log_eps(log_eps_) {
        const F s = sinh_series<F>(r);
        q = s * s / 4;
    }
};

template <unsigned Digits>
Tier<mp_float<Digits>> mp_tier(double r) {
    using F = mp_float<Digits>;
    return Tier<F>(r, -static_cast<double>(Digits - 1) * std::log(10.0), F("1e-" + std::to_string(Digits + 2)));
}

struct ElementContext {
    double r;
    double log_half_tanh;
    double log_cosh;
    double q_double;
    double log_q;
    Tier<quad> t_quad;
    Tier<mp_float<50>> t50;
    Tier<mp_float<100>> t100;
    Tier<mp_float<200>> t200;
    Tier<mp_float<400>> t400;

    explicit ElementContext(double radius) : r(radius) {
        log_half_tanh = std::log(0.5 * std::tanh(r));
        log_cosh = std::log(std::cosh(r));
        const double s = std::sinh(r);
        q_double = 0.25 * s * s;
        log_q = std::log(q_double);
        if (r == 0.0) return;
        t_quad = Tier<quad>(r, std::log(1.93e-34), quad(1e-36));
        t50 = mp_tier<50>(r);
        t100 = mp_tier<100>(r);
        t200 = mp_tier<200>(r);
        t400 = mp_tier<400>(r);
    }
};

double element(std::size_t m, std::size_t n, const ElementContext& ctx, SqueezePrecisionStats* stats) {
    if ((m + n) % 2 != 0) return 0.0;
    if (ctx.r == 0.0) return m == n ? 1.0 : 0.0;

    const Prefactor pre = innermost_term(m, n, ctx.log_half_tanh, ctx.log_cosh);
    const auto d = relative_series<double>(m, n, ctx.q_double, 1e-18);
    const double log_abs = std::isfinite(d.abs_sum) ? std::log(d.abs_sum) : log_abs_series(m, n, ctx.log_q);
    // Rounding in the partial terms is bounded by eps * sum|term| per step.
    const double log_error = std::log(4.0 * static_cast<double>(std::min(m, n) / 2 + 1)) + log_abs + pre.log_magnitude;
    const double log_tolerance = std::log(kElementTolerance);
    const auto fits = [&](double log_eps) { return log_error + log_eps <= log_tolerance; };
    const auto combine = [&](double sum) {
        if (sum == 0.0) return 0.0;
        const double v = std::exp(pre.log_magnitude + std::log(std::abs(sum)));
        return (sum < 0.0 ? -pre.sign : pre.sign) * v;
    };
    const auto rerun = [&](const auto& tier) {
        if (stats) ++(stats->*(std::is_same_v<std::decay_t<decltype(tier.q)>, quad>
                                   ? &SqueezePrecisionStats::quad_elements
                                   : &SqueezePrecisionStats::multiprecision_elements));
        return combine(to_double(relative_series(m, n, tier.q, tier.stop).sum));
    };

    if (fits(std::log(std::numeric_limits<double>::epsilon())) && std::isfinite(d.sum)) {
        if (stats) ++stats->double_elements;
        return combine(d.sum);
    }
    if (fits(ctx.t_quad.log_eps)) return rerun(ctx.t_quad);
    if (fits(ctx.t50.log_eps)) return rerun(ctx.t50);
    if (fits(ctx.t100.log_eps)) return rerun(ctx.t100);
    if (fits(ctx.t200.log_eps)) return rerun(ctx.t200);
    if (fits(ctx.t400.log_eps)) return rerun(ctx.t400);
    throw InvalidParameter("squeeze matrix element (" + std::to_string(m) + ", " + std::to_string(n) +
                           ") at r = " + std::to_string(ctx.r) + " exceeds the available working precision");
}

std::vector<double> defects_of(const Eigen::MatrixXd& g) {
    std::vector<double> out(static_cast<std::size_t>(g.cols()));
    for (Eigen::Index c = 0; c < g.cols(); ++c) out[static_cast<std::size_t>(c)] = std::abs(1.0 - g.col(c).squaredNorm());
    return out;
}

void require_squeeze_args(double r, std::size_t n_max) {
    if (!std::isfinite(r) || r < 0.0) {
        throw InvalidParameter("squeeze amplitude must be finite and >= 0, got " + std::to_string(r));
    }
    if (n_max < 1) throw InvalidParameter("n_max must be >= 1");
}

}  // namespace

std::complex<double> SqueezeParams::mu() const { return {std::cosh(r), 0.0}; }

std::complex<double> SqueezeParams::nu() const { return std::sinh(r) * std::polar(1.0, -phi); }

double SqueezeParams::bogoliubov_defect() const { return std::norm(mu()) - std::norm(nu()) - 1.0; }

std::size_t SqueezeMatrix::trusted_columns(double budget) const {
    std::size_t n = 0;
    while (n < column_defects.size() && column_defects[n] < budget) ++n;
    return n;
}

UnitaryPropagator SqueezeMatrix::propagator(double budget) const {
    return UnitaryPropagator::truncated(g.cast<std::complex<double>>(), trusted_columns(budget), budget);
}

double squeeze_element(std::size_t m, std::size_t n, double r, SqueezePrecisionStats* stats) {
    require_squeeze_args(r, 1);
    const ElementContext ctx(r);
    return element(m, n, ctx, stats);
}

std::vector<double> squeeze_column(std::size_t n, std::size_t m_max, double r) {
    require_squeeze_args(r, 1);
    const ElementContext ctx(r);
    std::vector<double> col(m_max + 1, 0.0);
    for (std::size_t m = n % 2; m <= m_max; m += 2) col[m] = element(m, n, ctx, nullptr);
    return col;
}

SqueezeMatrix squeeze_matrix_closed_form(double r, std::size_t n_max, std::size_t threads,
                                         SqueezePrecisionStats* stats) {
    require_squeeze_args(r, n_max);
    const ElementContext ctx(r);
    const std::size_t dim = n_max + 1;
    SqueezeMatrix out;
    out.r = r;
    out.n_max = n_max;
    out.g = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    std::vector<SqueezePrecisionStats> per_column(dim);
    parallel_for(dim, threads, [&](std::size_t n) {
        for (std::size_t m = n % 2; m < dim; m += 2) {
            out.g(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) = element(m, n, ctx, &per_column[n]);
        }
    });
    if (stats) {
        for (const auto& s : per_column) {
            stats->double_elements += s.double_elements;
            stats->quad_elements += s.quad_elements;
            stats->multiprecision_elements += s.multiprecision_elements;
        }
    }
    out.column_defects = defects_of(out.g);
    return out;
}

SqueezeMatrix squeeze_matrix_exponential_oracle(double r, std::size_t n_max, std::size_t padding) {
    require_squeeze_args(r, n_max);
    const auto dim = static_cast<Eigen::Index>(n_max + 1 + padding);
    // Generator K = (r/2)(a^dagger^2 - a^2): <m+2|K|m> = (r/2) sqrt((m+1)(m+2)), antisymmetric.
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index m = 0; m + 2 < dim; ++m) {
        const double v = 0.5 * r * std::sqrt(static_cast<double>((m + 1) * (m + 2)));
        k(m + 2, m) = v;
        k(m, m + 2) = -v;
    }
    const double norm1 = k.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    double scaled = norm1;
    while (scaled > 0.5) {
        scaled *= 0.5;
        ++squarings;
    }
    k *= std::ldexp(1.0, -squarings);

    Eigen::MatrixXd result = Eigen::MatrixXd::Identity(dim, dim);
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(dim, dim);
    for (int order = 1; order <= 40; ++order) {
        term = (term * k) / static_cast<double>(order);
        result += term;
        if (term.cwiseAbs().maxCoeff() < 1e-20) break;
    }
    for (int i = 0; i < squarings; ++i) result = result * result;

    SqueezeMatrix out;
    out.r = r;
    out.n_max = n_max;
    out.g = result.topLeftCorner(static_cast<Eigen::Index>(n_max + 1), static_cast<Eigen::Index>(n_max + 1));
    out.column_defects = defects_of(out.g);
    return out;
}

double squeeze_element_variant(std::size_t m, std::size_t n, double r) {
    require_squeeze_args(r, 1);
    if ((m + n) % 2 != 0) return 0.0;
    const double sh = std::sinh(r);
    const double ch = std::cosh(r);
    const double pref = std::exp(0.5 * (std::lgamma(m + 1.0) + std::lgamma(n + 1.0))) / ch;
    const double half_sum = 0.5 * static_cast<double>(m + n);
    double sum = 0.0;
    if (m % 2 == 0) {
        const std::size_t top = std::min(m / 2, n / 2);
        for (std::size_t i = 1; i <= top; ++i) {
            const double num = std::pow(-4.0, static_cast<double>(i)) * std::pow(sh, half_sum - 2.0 * i) *
                               std::pow(2.0 * ch, -half_sum);
            const double den = 2.0 * std::tgamma(i + 1.0) * std::tgamma(m / 2.0 - i + 1.0) *
                               std::tgamma(n / 2.0 - i + 1.0);
            sum += num / den;
        }
        return ((m / 2) % 2 == 0 ? 1.0 : -1.0) * pref * sum;
    }
    const std::size_t top = std::min((m - 1) / 2, (n - 1) / 2);
    for (std::size_t i = 1; i <= top; ++i) {
        const double num = std::pow(-4.0, static_cast<double>(i)) * std::pow(sh, half_sum - 2.0 * i - 1.0) *
                           std::pow(2.0 * ch, -half_sum - 1.0);
        const double den = std::tgamma(2.0 * i + 2.0) * std::tgamma((m - 1) / 2.0 - i + 1.0) *
                           std::tgamma((n - 1) / 2.0 - i + 1.0);
        sum += num / den;
    }
    return (((m - 1) / 2) % 2 == 0 ? 1.0 : -1.0) * pref * sum;
}

std::shared_ptr<const SqueezeMatrix> SqueezeMatrixCache::get(double r, std::size_t n_max) {
    const Key key{r, n_max};
    {
        std::shared_lock lock(mutex_);
        if (auto it = entries_.find(key); it != entries_.end()) return it->second;
    }
    auto built = std::make_shared<const SqueezeMatrix>(squeeze_matrix_closed_form(r, n_max, threads_));
    std::unique_lock lock(mutex_);
    auto [it, inserted] = entries_.emplace(key, std::move(built));
    return it->second;
}

std::size_t SqueezeMatrixCache::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

void SqueezeMatrixCache::clear() {
    std::unique_lock lock(mutex_);
    entries_.clear();
}

}  // namespace workreal
