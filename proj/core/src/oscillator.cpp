#include "workreal/oscillator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>

#include "workreal/parallel.hpp"

namespace workreal {

namespace {

// Worst-case rounding for sums over (n_max + 1)^2 joint cells.
double rounding_allowance(std::size_t n_max) {
    const double cells = static_cast<double>(n_max + 1) * static_cast<double>(n_max + 1);
    return cells * std::numeric_limits<double>::epsilon();
}

void require_oscillator_beta(double beta) {
    if (std::isnan(beta) || beta <= 0.0) {
        throw InvalidParameter("oscillator inverse temperature must be positive, got " + std::to_string(beta));
    }
}

std::size_t levels_for_tail(double beta, double tail) {
    // exp(-beta (n + 1)) <= tail
    if (std::isinf(beta)) return 0;
    const double n = std::ceil(std::log(1.0 / tail) / beta - 1.0);
    return static_cast<std::size_t>(std::max(0.0, n));
}

std::size_t round_up(std::size_t n_max, std::size_t granularity) {
    if (granularity <= 1) return n_max;
    const std::size_t dim = n_max + 1;
    return (dim + granularity - 1) / granularity * granularity - 1;
}

// Smallest row cutoff N with 1 - sum_{m <= N} G_mc(r)^2 < defect.
std::size_t rows_needed(std::size_t column, double r, double defect, std::size_t max_n) {
    if (r == 0.0) return column;
    std::size_t m_max = std::max<std::size_t>(2 * column + 64, 128);
    while (true) {
        const auto col = squeeze_column(column, m_max, r);
        double cum = 0.0;
        for (std::size_t m = 0; m <= m_max; ++m) {
            cum += col[m] * col[m];
            if (m >= column && 1.0 - cum < defect) return m;
        }
        if (m_max >= max_n) {
            throw TruncationError("column " + std::to_string(column) + " of G(" + std::to_string(r) +
                                      ") does not converge below n_max = " + std::to_string(max_n),
                                  1.0 - cum, 0.0, r);
        }
        m_max = std::min(max_n, 2 * m_max);
    }
}

// Raw -sum p log p and sum p over a joint built as T(k2,k1) * p(k1), using the
// per-column entropies and masses of T.
struct ColumnSummary {
    std::vector<double> entropy;  // -sum_k2 T log T
    std::vector<double> mass;     // sum_k2 T
};

ColumnSummary summarize_columns(const Eigen::MatrixXd& t) {
    ColumnSummary s;
    s.entropy.resize(static_cast<std::size_t>(t.cols()));
    s.mass.resize(static_cast<std::size_t>(t.cols()));
    for (Eigen::Index c = 0; c < t.cols(); ++c) {
        double h = 0.0;
        double w = 0.0;
        for (Eigen::Index r = 0; r < t.rows(); ++r) {
            const double p = t(r, c);
            if (p > 0.0) h -= p * std::log(p);
            w += p;
        }
        s.entropy[static_cast<std::size_t>(c)] = h;
        s.mass[static_cast<std::size_t>(c)] = w;
    }
    return s;
}

// Same normalization handling as shannon_entropy: rescale defects above
// 1e-14, reject above 1e-8.
double finish_entropy(double raw, double total, EntropyBase base) {
    const double defect = std::abs(1.0 - total);
    if (defect > 1e-8) throw InvalidParameter("entropy input sums to " + std::to_string(total));
    double h = defect > 1e-14 ? raw / total + std::log(total) : raw;
    h = std::max(h, 0.0);
    return base == EntropyBase::Natural ? h : h / std::log(2.0);
}

double joint_entropy_of_chain(const ColumnSummary& t, std::span<const double> p, EntropyBase base) {
    double raw = 0.0;
    double total = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[k] <= 0.0) continue;
        raw += p[k] * t.entropy[k] - p[k] * std::log(p[k]) * t.mass[k];
        total += p[k] * t.mass[k];
    }
    return finish_entropy(raw, total, base);
}

}  // namespace

double oscillator_thermal_tail(double beta, std::size_t n_max) {
    require_oscillator_beta(beta);
    if (std::isinf(beta)) return 0.0;
    return std::exp(-beta * (static_cast<double>(n_max) + 1.0));
}

OscillatorTruncation select_truncation(double beta, double r_max, const TruncationPolicy& policy) {
    require_oscillator_beta(beta);
    if (!(r_max >= 0.0) || !std::isfinite(r_max)) throw InvalidParameter("r_max must be finite and >= 0");
    OscillatorTruncation out;
    const std::size_t thermal = std::max<std::size_t>(1, levels_for_tail(beta, policy.thermal_tail));
    const std::size_t support = levels_for_tail(beta, policy.support_mass);
    std::size_t needed = std::max(thermal, support);
    // The highest support column of each parity spreads furthest.
    for (std::size_t c : {support, support > 0 ? support - 1 : support}) {
        needed = std::max(needed, rows_needed(c, r_max, policy.column_defect, policy.max_n));
    }
    out.n_max = round_up(needed, policy.granularity);
    if (out.n_max > policy.max_n) {
        throw TruncationError("beta = " + std::to_string(beta) + ", r = " + std::to_string(r_max) + " needs n_max = " +
                                  std::to_string(out.n_max) + " > " + std::to_string(policy.max_n),
                              oscillator_thermal_tail(beta, policy.max_n), beta, r_max);
    }
    out.support_columns = std::min(support, out.n_max) + 1;
    out.thermal_tail_mass = oscillator_thermal_tail(beta, out.n_max);
    return out;
}

namespace {

OscillatorJoints three_time(double beta, double r1, double r2, double r12, std::size_t n_max,
                            SqueezeMatrixCache* cache, const TruncationPolicy& policy) {
    require_oscillator_beta(beta);
    OscillatorTruncation trunc;
    if (n_max == 0) {
        trunc = select_truncation(beta, r12, policy);
    } else {
        trunc.n_max = n_max;
        trunc.support_columns = std::min(levels_for_tail(beta, policy.support_mass), n_max) + 1;
        trunc.thermal_tail_mass = oscillator_thermal_tail(beta, n_max);
    }
    if (trunc.thermal_tail_mass > policy.thermal_tail) {
        throw TruncationError("thermal weight above n_max = " + std::to_string(trunc.n_max) + " is " +
                                  std::to_string(trunc.thermal_tail_mass) + " at beta = " + std::to_string(beta),
                              trunc.thermal_tail_mass, beta, r1 + r2);
    }

    SqueezeMatrixCache local;
    SqueezeMatrixCache& store = cache ? *cache : local;
    const auto g10 = store.get(r1, trunc.n_max);
    const auto g21 = store.get(r2, trunc.n_max);
    const auto g20 = store.get(r12, trunc.n_max);

    const EnergySpectrum s0 = EnergySpectrum::harmonic(trunc.n_max, 0);
    const EnergySpectrum s1 = EnergySpectrum::harmonic(trunc.n_max, 1);
    const EnergySpectrum s2 = EnergySpectrum::harmonic(trunc.n_max, 2);
    const DiagonalDensity rho0 = build_thermal_state(s0, beta);

    const Eigen::MatrixXd t10 = g10->transition_probabilities();
    const Eigen::MatrixXd t21 = g21->transition_probabilities();
    const Eigen::MatrixXd t20 = g20->transition_probabilities();

    const Eigen::VectorXd p0 =
        Eigen::Map<const Eigen::VectorXd>(rho0.populations().data(), static_cast<Eigen::Index>(rho0.size()));
    const Eigen::VectorXd p1 = t10 * p0;
    const double leak10 = std::abs(1.0 - p1.sum());
    const double leak21 = std::abs(1.0 - (t21 * p1).sum());
    const double leak20 = std::abs(1.0 - (t20 * p0).sum());
    const double budget =
        std::max({leak10, leak21, leak20}) + trunc.thermal_tail_mass + rounding_allowance(trunc.n_max);
    if (budget > policy.max_budget) {
        throw TruncationError("truncation budget " + std::to_string(budget) + " exceeded at beta = " +
                                  std::to_string(beta) + ", r1 = " + std::to_string(r1) + ", r2 = " +
                                  std::to_string(r2) + " (n_max = " + std::to_string(trunc.n_max) + ")",
                              budget, beta, r1 + r2);
    }
    const double tolerance = budget + 1e-12;
    return OscillatorJoints{three_time_joint(rho0, t10, t21, s0, s1, s2, tolerance),
                            two_time_joint(rho0, t20, s0, s2, tolerance), trunc, budget};
}

OscillatorPoint k_en_point(double beta, double r1, double r2, double r12, const OscillatorOptions& options,
                           SqueezeMatrixCache* cache) {
    const auto joints = three_time(beta, r1, r2, r12, options.n_max, cache, options.policy);
    LeggettGargOptions lg;
    lg.view = options.view;
    lg.base = options.base;
    const auto result = evaluate_leggett_garg(joints.measured, joints.no_middle, lg);
    return OscillatorPoint{result.k_en, result.k_en_weak, joints.truncation.n_max, joints.budget};
}

}  // namespace

OscillatorJoints oscillator_three_time(double beta, double r1, double r2, std::size_t n_max, SqueezeMatrixCache* cache,
                                       const TruncationPolicy& policy) {
    return three_time(beta, r1, r2, r1 + r2, n_max, cache, policy);
}

OscillatorPoint oscillator_k_en(double beta, double r1, double r2, const OscillatorOptions& options,
                                SqueezeMatrixCache* cache) {
    return k_en_point(beta, r1, r2, r1 + r2, options, cache);
}

// ---------------------------------------------------------------------------

SqueezeGrid squeeze_grid_sweep(double beta, std::span<const double> r1_grid, std::span<const double> r2_grid,
                               const OscillatorOptions& options, bool auto_extend) {
    require_oscillator_beta(beta);
    if (r1_grid.empty() || r2_grid.empty()) throw InvalidParameter("squeeze grids must be non-empty");
    for (double r : r1_grid)
        if (!(r >= 0.0) || !std::isfinite(r)) throw InvalidParameter("squeeze grid values must be finite and >= 0");
    for (double r : r2_grid)
        if (!(r >= 0.0) || !std::isfinite(r)) throw InvalidParameter("squeeze grid values must be finite and >= 0");

    SqueezeGrid grid;
    grid.beta = beta;
    grid.r1.assign(r1_grid.begin(), r1_grid.end());
    grid.r2.assign(r2_grid.begin(), r2_grid.end());

    for (int attempt = 0;; ++attempt) {
        const double r_max = *std::max_element(grid.r1.begin(), grid.r1.end()) +
                             *std::max_element(grid.r2.begin(), grid.r2.end());
        const std::size_t n_max =
            options.n_max ? options.n_max : select_truncation(beta, r_max, options.policy).n_max;

        // Every matrix the cells need, built up front (one per distinct r).
        // Sums equal up to rounding share one key.
        std::set<double> needed(grid.r1.begin(), grid.r1.end());
        needed.insert(grid.r2.begin(), grid.r2.end());
        const auto n1 = grid.r1.size();
        const auto n2 = grid.r2.size();
        std::vector<double> sum_key(n1 * n2);
        for (std::size_t i = 0; i < n1; ++i) {
            for (std::size_t j = 0; j < n2; ++j) {
                const double s = grid.r1[i] + grid.r2[j];
                const double slack = 1e-12 * std::max(1.0, s);
                const auto it = needed.lower_bound(s - slack);
                sum_key[i * n2 + j] = (it != needed.end() && *it <= s + slack) ? *it : *needed.insert(s).first;
            }
        }
        const std::vector<double> radii(needed.begin(), needed.end());
        SqueezeMatrixCache cache(1);
        parallel_for(radii.size(), options.threads, [&](std::size_t i) { (void)cache.get(radii[i], n_max); });

        grid.k_en.resize(static_cast<Eigen::Index>(n1), static_cast<Eigen::Index>(n2));
        grid.n_max = n_max;
        std::vector<double> budgets(n1 * n2, 0.0);

        if (options.view == WorkView::FineGrained) {
            // K3_en only needs per-column summaries of each transition matrix.
            std::map<double, ColumnSummary> summaries;
            for (double r : radii) summaries.emplace(r, summarize_columns(cache.get(r, n_max)->transition_probabilities()));
            const EnergySpectrum s0 = EnergySpectrum::harmonic(n_max);
            const DiagonalDensity rho0 = build_thermal_state(s0, beta);
            const double tail = oscillator_thermal_tail(beta, n_max);
            const double rounding = rounding_allowance(n_max);
            if (tail > options.policy.thermal_tail) {
                throw TruncationError("thermal weight above n_max too large", tail, beta, r_max);
            }
            const std::span<const double> p0 = rho0.populations();
            parallel_for(n1, options.threads, [&](std::size_t i) {
                const Eigen::MatrixXd t10 = cache.get(grid.r1[i], n_max)->transition_probabilities();
                const Eigen::VectorXd p1 = t10 * Eigen::Map<const Eigen::VectorXd>(p0.data(), static_cast<Eigen::Index>(p0.size()));
                const std::span<const double> p1s(p1.data(), static_cast<std::size_t>(p1.size()));
                const double h10 = joint_entropy_of_chain(summaries.at(grid.r1[i]), p0, options.base);
                const double h1 = shannon_entropy(p1s, options.base).value;
                const double leak10 = std::abs(1.0 - p1.sum());
                for (std::size_t j = 0; j < n2; ++j) {
                    const auto& s21 = summaries.at(grid.r2[j]);
                    const auto& s20 = summaries.at(sum_key[i * n2 + j]);
                    const double h21 = joint_entropy_of_chain(s21, p1s, options.base);
                    const double h20 = joint_entropy_of_chain(s20, p0, options.base);
                    double m21 = 0.0, m20 = 0.0;
                    for (std::size_t k = 0; k < p0.size(); ++k) {
                        m21 += p1s[k] * s21.mass[k];
                        m20 += p0[k] * s20.mass[k];
                    }
                    const double budget = std::max({leak10, std::abs(1.0 - m21), std::abs(1.0 - m20)}) + tail + rounding;
                    if (budget > options.policy.max_budget) {
                        throw TruncationError("truncation budget exceeded at beta = " + std::to_string(beta) +
                                                  ", r1 = " + std::to_string(grid.r1[i]) +
                                                  ", r2 = " + std::to_string(grid.r2[j]),
                                              budget, beta, grid.r1[i] + grid.r2[j]);
                    }
                    budgets[i * n2 + j] = budget;
                    grid.k_en(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                        0.5 * (h21 + h10 - h20 - h1);
                }
            });
        } else {
            OscillatorOptions cell = options;
            cell.n_max = n_max;
            parallel_for(n1 * n2, options.threads, [&](std::size_t idx) {
                const std::size_t i = idx / n2;
                const std::size_t j = idx % n2;
                const auto pt = k_en_point(beta, grid.r1[i], grid.r2[j], sum_key[idx], cell, &cache);
                budgets[idx] = pt.budget;
                grid.k_en(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = pt.k_en;
            });
        }
        grid.budget = *std::max_element(budgets.begin(), budgets.end());

        const std::size_t diag = std::min(n1, n2) - 1;
        const bool bracketed = grid.k_en(static_cast<Eigen::Index>(diag), static_cast<Eigen::Index>(diag)) > 0.0;
        if (!auto_extend || bracketed || attempt >= 3) break;
        for (double& r : grid.r1) r *= 2.0;
        for (double& r : grid.r2) r *= 2.0;
        grid.extended = true;
    }
    return grid;
}

std::vector<ContourPoint> contour_points(const SqueezeGrid& grid, double level) {
    std::vector<ContourPoint> out;
    const auto& k = grid.k_en;
    const auto crosses = [level](double a, double b) {
        return (a - level) * (b - level) < 0.0 || (a == level && b != level);
    };
    const auto lerp = [level](double x0, double x1, double a, double b) {
        return x0 + (level - a) / (b - a) * (x1 - x0);
    };
    for (Eigen::Index i = 0; i < k.rows(); ++i) {
        for (Eigen::Index j = 0; j < k.cols(); ++j) {
            const double here = k(i, j);
            if (j + 1 < k.cols() && crosses(here, k(i, j + 1))) {
                out.push_back({grid.r1[static_cast<std::size_t>(i)],
                               lerp(grid.r2[static_cast<std::size_t>(j)], grid.r2[static_cast<std::size_t>(j + 1)],
                                    here, k(i, j + 1))});
            }
            if (i + 1 < k.rows() && crosses(here, k(i + 1, j))) {
                out.push_back({lerp(grid.r1[static_cast<std::size_t>(i)], grid.r1[static_cast<std::size_t>(i + 1)],
                                    here, k(i + 1, j)),
                               grid.r2[static_cast<std::size_t>(j)]});
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

GoldenResult golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                                     double tolerance) {
    if (!(hi > lo)) throw InvalidParameter("golden-section bracket must satisfy lo < hi");
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    std::size_t evals = 2;
    while (b - a > tolerance) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        ++evals;
    }
    return fc < fd ? GoldenResult{c, fc, evals} : GoldenResult{d, fd, evals};
}

std::vector<double> default_beta_sweep_r_grid() {
    std::vector<double> grid;
    const double lo = 0.002, hi = 1.6;
    const std::size_t n = 40;
    for (std::size_t i = 0; i < n; ++i) {
        grid.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1)));
    }
    return grid;
}

BetaSweep beta_sweep_min_k(std::span<const double> beta_grid, std::span<const double> r_grid,
                           const OscillatorOptions& options, double r_tolerance) {
    if (beta_grid.empty() || r_grid.size() < 2) throw InvalidParameter("beta sweep needs betas and >= 2 radii");
    if (!std::is_sorted(r_grid.begin(), r_grid.end()) || r_grid.front() <= 0.0) {
        throw InvalidParameter("beta sweep radii must be positive and ascending");
    }
    BetaSweep sweep;
    sweep.rows.resize(beta_grid.size());
    parallel_for(beta_grid.size(), options.threads, [&](std::size_t b) {
        const double beta = beta_grid[b];
        require_oscillator_beta(beta);
        SqueezeMatrixCache cache(1);
        OscillatorOptions single = options;
        single.threads = 1;
        BetaSweepRow row;
        row.beta = beta;
        const auto eval = [&](double r) {
            const auto pt = oscillator_k_en(beta, r, r, single, &cache);
            row.n_max = std::max(row.n_max, pt.n_max);
            row.budget = std::max(row.budget, pt.budget);
            ++row.evaluations;
            cache.clear();
            return pt.k_en;
        };
        std::vector<double> values;
        std::size_t rises = 0;
        for (std::size_t i = 0; i < r_grid.size(); ++i) {
            values.push_back(eval(r_grid[i]));
            rises = i >= 1 && values[i] > values[i - 1] ? rises + 1 : 0;
            if (rises > 0 && (values[i] > 0.0 || rises >= 2)) break;
        }
        const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
        const double lo = best == 0 ? 0.5 * r_grid[0] : r_grid[best - 1];
        const double hi = best + 1 < r_grid.size() ? r_grid[best + 1] : r_grid[best];
        if (hi > lo) {
            const auto g = golden_section_minimize(eval, lo, hi, r_tolerance);
            if (g.fx <= values[best]) {
                row.min_k_en = g.fx;
                row.argmin_r = g.x;
            } else {
                row.min_k_en = values[best];
                row.argmin_r = r_grid[best];
            }
        } else {
            row.min_k_en = values[best];
            row.argmin_r = r_grid[best];
        }
        sweep.rows[b] = row;
    });

    std::vector<std::size_t> order(sweep.rows.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return sweep.rows[a].beta < sweep.rows[b].beta; });
    const auto& coldest = sweep.rows[order.back()];
    const auto& hottest = sweep.rows[order.front()];
    sweep.depth_shrinks_with_beta = std::abs(coldest.min_k_en) < std::abs(hottest.min_k_en);
    if (order.size() >= 3) {
        std::size_t peak = 0;
        for (std::size_t i = 1; i < order.size(); ++i) {
            if (sweep.rows[order[i]].argmin_r > sweep.rows[order[peak]].argmin_r) peak = i;
        }
        if (peak > 0 && peak + 1 < order.size()) sweep.argmin_peak = order[peak];
    }
    return sweep;
}

}  // namespace workreal
