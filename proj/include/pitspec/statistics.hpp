#pragma once

// Exact Cramer-von Mises and Kolmogorov-Smirnov functionals of the PIT
// empirical processes, plus their lag aggregates.
//
// CvM integrals use the pairwise closed form obtained by expanding the square
// and integrating indicators coordinate by coordinate:
//   int I(a <= r) I(b <= r) dr = 1 - max(a, b),   int I(a <= r) r dr = (1 - a^2) / 2.
// KS suprema are found by enumerating the corners of the rank grid: inside a
// grid cell the count is constant and the product of coordinates is monotone.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pitspec/sequence.hpp"

namespace pitspec {

enum class Norm { CvM, KS };

enum class Scope { Marginal, Lag, PWise, ADJ, MDJ, ADJ0, MDJ0 };

/// Largest supported dimension for the p-wise statistics.
inline constexpr std::size_t kMaxPWise = 4;

/// Upper bound on rank-grid cells held in memory by the p-wise KS sweep.
inline constexpr std::size_t kMaxGridCells = std::size_t{1} << 24;

/// Identifies one functional Gamma of the PIT processes.
struct StatisticSpec {
    Scope scope = Scope::Marginal;
    Norm norm = Norm::CvM;
    std::size_t order = 0;  ///< j for Lag, p for PWise, k for aggregates, unused for Marginal

    static StatisticSpec marginal(Norm n) { return {Scope::Marginal, n, 0}; }
    static StatisticSpec lag(Norm n, std::size_t j) { return {Scope::Lag, n, j}; }
    static StatisticSpec pwise(Norm n, std::size_t p) { return {Scope::PWise, n, p}; }
    static StatisticSpec adj(std::size_t k) { return {Scope::ADJ, Norm::CvM, k}; }
    static StatisticSpec mdj(std::size_t k) { return {Scope::MDJ, Norm::KS, k}; }
    static StatisticSpec adj0(std::size_t k) { return {Scope::ADJ0, Norm::CvM, k}; }
    static StatisticSpec mdj0(std::size_t k) { return {Scope::MDJ0, Norm::KS, k}; }

    /// Smallest sample size the statistic is defined for.
    [[nodiscard]] std::size_t min_sample() const noexcept {
        switch (scope) {
            case Scope::Marginal: return 2;
            case Scope::PWise: return std::max<std::size_t>(order, 2);
            default: return order + 1;
        }
    }

    [[nodiscard]] std::string name() const {
        const char* norm_tag = norm == Norm::CvM ? "CvM" : "KS";
        switch (scope) {
            case Scope::Marginal: return std::string("D1") + norm_tag;
            case Scope::Lag: return std::string("D2") + norm_tag + "_" + std::to_string(order);
            case Scope::PWise: return std::string("Dp") + norm_tag + "_" + std::to_string(order);
            case Scope::ADJ: return "ADJ_" + std::to_string(order);
            case Scope::MDJ: return "MDJ_" + std::to_string(order);
            case Scope::ADJ0: return "ADJ0_" + std::to_string(order);
            case Scope::MDJ0: return "MDJ0_" + std::to_string(order);
        }
        return {};
    }

    /// Parses the names produced by name(), e.g. "D1CvM", "D2KS_3", "ADJ0_5".
    static StatisticSpec parse(std::string_view text) {
        if (text == "D1CvM") return marginal(Norm::CvM);
        if (text == "D1KS") return marginal(Norm::KS);
        const auto us = text.find('_');
        if (us == std::string_view::npos) {
            throw std::invalid_argument("unknown statistic '" + std::string(text) + "'");
        }
        const auto head = text.substr(0, us);
        const auto tail = text.substr(us + 1);
        std::size_t order = 0;
        const auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), order);
        if (ec != std::errc{} || ptr != tail.data() + tail.size() || order == 0) {
            throw std::invalid_argument("bad order in statistic '" + std::string(text) + "'");
        }
        if (head == "D2CvM") return lag(Norm::CvM, order);
        if (head == "D2KS") return lag(Norm::KS, order);
        if (head == "DpCvM") return pwise(Norm::CvM, order);
        if (head == "DpKS") return pwise(Norm::KS, order);
        if (head == "ADJ") return adj(order);
        if (head == "MDJ") return mdj(order);
        if (head == "ADJ0") return adj0(order);
        if (head == "MDJ0") return mdj0(order);
        throw std::invalid_argument("unknown statistic '" + std::string(text) + "'");
    }

    friend bool operator==(const StatisticSpec&, const StatisticSpec&) = default;
};

/// A computed statistic; value is always nonnegative.
struct StatisticValue {
    StatisticSpec spec;
    double value = 0.0;

    [[nodiscard]] Norm kind() const noexcept { return spec.norm; }
};

namespace detail {

/// Neumaier compensated accumulator.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline void require_marginal(const UniformSequence& u) {
    if (u.size() < 2) {
        throw std::invalid_argument("degenerate sample");
    }
}

inline void require_lag_stat(const UniformSequence& u, std::size_t j) {
    if (j < 1) {
        throw std::invalid_argument("lag must be at least 1");
    }
    if (j >= u.size()) {
        throw std::invalid_argument("insufficient sample for lag");
    }
}

inline void require_pwise(const UniformSequence& u, std::size_t p) {
    if (p < 2 || p > kMaxPWise) {
        throw std::invalid_argument("p-wise statistics support 2 <= p <= 4");
    }
    if (p > u.size()) {
        throw std::invalid_argument("insufficient sample for p-wise process");
    }
}

/// Windows w_t = (u_t, u_{t-1}, ..., u_{t-p+1}) for t = p..n, stored row-major.
inline std::vector<double> windows(const UniformSequence& u, std::size_t p) {
    const std::size_t m = u.size() - p + 1;
    std::vector<double> w(m * p);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t t = i + p - 1;
        for (std::size_t d = 0; d < p; ++d) {
            w[i * p + d] = u[t - d];
        }
    }
    return w;
}

/// Lag-j pairs (u_t, u_{t-j}) stored row-major.
inline std::vector<double> lag_pairs(const UniformSequence& u, std::size_t j) {
    const std::size_t m = u.size() - j;
    std::vector<double> w(2 * m);
    for (std::size_t i = 0; i < m; ++i) {
        w[2 * i] = u[i + j];
        w[2 * i + 1] = u[i];
    }
    return w;
}

/// Exact int_{[0,1]^p} V(r)^2 dr for V(r) = m^{-1/2} sum_t [prod_d I(c_td <= r_d) - prod_d r_d].
inline double cvm_points(std::span<const double> pts, std::size_t p) {
    const std::size_t m = pts.size() / p;
    CompensatedSum pair_sum;
    CompensatedSum cross_sum;
    for (std::size_t t = 0; t < m; ++t) {
        const double* a = pts.data() + t * p;
        double diag = 1.0;
        double cross = 1.0;
        for (std::size_t d = 0; d < p; ++d) {
            diag *= 1.0 - a[d];
            cross *= 0.5 * (1.0 - a[d] * a[d]);
        }
        pair_sum.add(diag);
        cross_sum.add(cross);
        for (std::size_t s = t + 1; s < m; ++s) {
            const double* b = pts.data() + s * p;
            double prod = 1.0;
            for (std::size_t d = 0; d < p; ++d) {
                prod *= 1.0 - std::max(a[d], b[d]);
            }
            pair_sum.add(2.0 * prod);
        }
    }
    const double md = static_cast<double>(m);
    const double cube = std::pow(1.0 / 3.0, static_cast<double>(p));
    CompensatedSum total;
    total.add(pair_sum.value());
    total.add(-2.0 * md * cross_sum.value());
    total.add(md * md * cube);
    return std::max(0.0, total.value() / md);
}

/// Sorted unique coordinate values framed by 0 and 1, plus each point's grid index.
struct AxisGrid {
    std::vector<double> knots;       // 0, sorted unique values, 1
    std::vector<std::uint32_t> rank; // per point, index into knots
};

inline AxisGrid axis_grid(std::span<const double> pts, std::size_t p, std::size_t d) {
    const std::size_t m = pts.size() / p;
    AxisGrid g;
    g.knots.reserve(m + 2);
    g.knots.push_back(0.0);
    for (std::size_t t = 0; t < m; ++t) {
        g.knots.push_back(pts[t * p + d]);
    }
    std::sort(g.knots.begin() + 1, g.knots.end());
    g.knots.erase(std::unique(g.knots.begin() + 1, g.knots.end()), g.knots.end());
    if (g.knots.back() < 1.0) {
        g.knots.push_back(1.0);
    }
    g.rank.resize(m);
    for (std::size_t t = 0; t < m; ++t) {
        const auto it = std::lower_bound(g.knots.begin() + 1, g.knots.end(), pts[t * p + d]);
        g.rank[t] = static_cast<std::uint32_t>(it - g.knots.begin());
    }
    return g;
}

/// Largest |C - m * prod| over the closed lower corner and the left-limit upper corner of a cell.
inline double corner_extreme(double count, double md, double lower_prod, double upper_prod) noexcept {
    return std::max(std::abs(count - md * lower_prod), std::abs(count - md * upper_prod));
}

/// Exact sup |V(r)| for p = 1.
inline double ks_points_1d(std::span<const double> pts) {
    const std::size_t m = pts.size();
    const AxisGrid gx = axis_grid(pts, 1, 0);
    const std::size_t nx = gx.knots.size();
    std::vector<std::uint32_t> hist(nx, 0);
    for (auto r : gx.rank) {
        ++hist[r];
    }
    const double md = static_cast<double>(m);
    double best = 0.0;
    double count = 0.0;
    for (std::size_t i = 0; i < nx; ++i) {
        count += hist[i];
        const double x_hi = gx.knots[std::min(i + 1, nx - 1)];
        best = std::max(best, corner_extreme(count, md, gx.knots[i], x_hi));
    }
    return best / std::sqrt(md);
}

/// Exact sup |V(r)| for p = 2 by a row sweep over the rank grid: O(m^2) time, O(m) memory.
inline double ks_points_2d(std::span<const double> pts) {
    const std::size_t m = pts.size() / 2;
    const AxisGrid gx = axis_grid(pts, 2, 0);
    const AxisGrid gy = axis_grid(pts, 2, 1);
    const std::size_t nx = gx.knots.size();
    const std::size_t ny = gy.knots.size();

    std::vector<std::vector<std::uint32_t>> rows(nx);
    for (std::size_t t = 0; t < m; ++t) {
        rows[gx.rank[t]].push_back(gy.rank[t]);
    }
    const double md = static_cast<double>(m);
    std::vector<std::uint32_t> col_hist(ny, 0);
    double best = 0.0;
    for (std::size_t i = 0; i < nx; ++i) {
        for (auto k : rows[i]) {
            ++col_hist[k];
        }
        const double x_lo = gx.knots[i];
        const double x_hi = gx.knots[std::min(i + 1, nx - 1)];
        double count = 0.0;
        for (std::size_t k = 0; k < ny; ++k) {
            count += col_hist[k];
            const double y_hi = gy.knots[std::min(k + 1, ny - 1)];
            best = std::max(best, corner_extreme(count, md, x_lo * gy.knots[k], x_hi * y_hi));
        }
    }
    return best / std::sqrt(md);
}

/// Exact sup |V(r)| for general p via a dense p-dimensional cumulative count table.
inline double ks_points_nd(std::span<const double> pts, std::size_t p) {
    const std::size_t m = pts.size() / p;
    std::vector<AxisGrid> grids;
    grids.reserve(p);
    std::size_t cells = 1;
    for (std::size_t d = 0; d < p; ++d) {
        grids.push_back(axis_grid(pts, p, d));
        cells *= grids.back().knots.size();
        if (cells > kMaxGridCells) {
            throw std::length_error("rank grid too large for exact KS; reduce n or p");
        }
    }
    std::vector<std::size_t> stride(p, 1);
    for (std::size_t d = p - 1; d-- > 0;) {
        stride[d] = stride[d + 1] * grids[d + 1].knots.size();
    }
    std::vector<std::uint32_t> table(cells, 0);
    for (std::size_t t = 0; t < m; ++t) {
        std::size_t idx = 0;
        for (std::size_t d = 0; d < p; ++d) {
            idx += grids[d].rank[t] * stride[d];
        }
        ++table[idx];
    }
    // Cumulative sums along each axis turn the histogram into C(i) = #{points <= knots(i)}.
    for (std::size_t d = 0; d < p; ++d) {
        const std::size_t len = grids[d].knots.size();
        for (std::size_t idx = 0; idx < cells; ++idx) {
            const std::size_t coord = (idx / stride[d]) % len;
            if (coord > 0) {
                table[idx] += table[idx - stride[d]];
            }
        }
    }
    const double md = static_cast<double>(m);
    double best = 0.0;
    std::vector<std::size_t> coord(p, 0);
    for (std::size_t idx = 0; idx < cells; ++idx) {
        double lo = 1.0;
        double hi = 1.0;
        for (std::size_t d = 0; d < p; ++d) {
            const auto& knots = grids[d].knots;
            lo *= knots[coord[d]];
            hi *= knots[std::min(coord[d] + 1, knots.size() - 1)];
        }
        best = std::max(best, corner_extreme(static_cast<double>(table[idx]), md, lo, hi));
        for (std::size_t d = p; d-- > 0;) {
            if (++coord[d] < grids[d].knots.size()) {
                break;
            }
            coord[d] = 0;
        }
    }
    return best / std::sqrt(md);
}

}  // namespace detail

/// D_{1n}^{CvM} over the full sample t = 1..n.
[[nodiscard]] inline StatisticValue cvm_marginal(const UniformSequence& u) {
    detail::require_marginal(u);
    std::vector<double> sorted(u.begin(), u.end());
    std::sort(sorted.begin(), sorted.end());
    // In ascending order the i-th value is the max of exactly 2i+1 ordered pairs.
    detail::CompensatedSum pair_sum;
    detail::CompensatedSum cross_sum;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        pair_sum.add(static_cast<double>(2 * i + 1) * (1.0 - sorted[i]));
        cross_sum.add(0.5 * (1.0 - sorted[i] * sorted[i]));
    }
    const double n = static_cast<double>(sorted.size());
    detail::CompensatedSum total;
    total.add(pair_sum.value());
    total.add(-2.0 * n * cross_sum.value());
    total.add(n * n / 3.0);
    return {StatisticSpec::marginal(Norm::CvM), std::max(0.0, total.value() / n)};
}

/// D_{1n}^{KS} over the full sample t = 1..n.
[[nodiscard]] inline StatisticValue ks_marginal(const UniformSequence& u) {
    detail::require_marginal(u);
    return {StatisticSpec::marginal(Norm::KS), detail::ks_points_1d(u.values())};
}

[[nodiscard]] inline StatisticValue cvm_lag(const UniformSequence& u, std::size_t j) {
    detail::require_lag_stat(u, j);
    const auto pts = detail::lag_pairs(u, j);
    return {StatisticSpec::lag(Norm::CvM, j), detail::cvm_points(pts, 2)};
}

[[nodiscard]] inline StatisticValue ks_lag(const UniformSequence& u, std::size_t j) {
    detail::require_lag_stat(u, j);
    const auto pts = detail::lag_pairs(u, j);
    return {StatisticSpec::lag(Norm::KS, j), detail::ks_points_2d(pts)};
}

[[nodiscard]] inline StatisticValue cvm_pwise(const UniformSequence& u, std::size_t p) {
    detail::require_pwise(u, p);
    const auto pts = detail::windows(u, p);
    return {StatisticSpec::pwise(Norm::CvM, p), detail::cvm_points(pts, p)};
}

[[nodiscard]] inline StatisticValue ks_pwise(const UniformSequence& u, std::size_t p) {
    detail::require_pwise(u, p);
    const auto pts = detail::windows(u, p);
    const double v = p == 2 ? detail::ks_points_2d(pts) : detail::ks_points_nd(pts, p);
    return {StatisticSpec::pwise(Norm::KS, p), v};
}

/**
 * @brief Evaluates several statistics on one sequence, sharing per-lag work.
 *
 * Aggregates such as ADJ_5 and MDJ_1 reuse the same D_{2n,j} values, which is
 * what makes the Table-style batch of statistics cheap inside a bootstrap.
 */
class StatisticEvaluator {
public:
    explicit StatisticEvaluator(const UniformSequence& u) : u_(u) {}

    double lag(Norm norm, std::size_t j) {
        const auto key = std::make_pair(norm, j);
        if (auto it = lag_cache_.find(key); it != lag_cache_.end()) {
            return it->second;
        }
        const double v = norm == Norm::CvM ? cvm_lag(u_, j).value : ks_lag(u_, j).value;
        lag_cache_.emplace(key, v);
        return v;
    }

    double marginal(Norm norm) {
        auto& slot = norm == Norm::CvM ? marginal_cvm_ : marginal_ks_;
        if (!slot.second) {
            slot = {norm == Norm::CvM ? cvm_marginal(u_).value : ks_marginal(u_).value, true};
        }
        return slot.first;
    }

    StatisticValue evaluate(const StatisticSpec& spec) {
        if (spec.scope != Scope::Marginal && spec.order == 0) {
            throw std::invalid_argument("statistic order must be positive");
        }
        switch (spec.scope) {
            case Scope::Marginal: return {spec, marginal(spec.norm)};
            case Scope::Lag: return {spec, lag(spec.norm, spec.order)};
            case Scope::PWise:
                return spec.norm == Norm::CvM ? cvm_pwise(u_, spec.order) : ks_pwise(u_, spec.order);
            case Scope::ADJ:
            case Scope::ADJ0: {
                detail::require_lag_stat(u_, spec.order);
                double sum = 0.0;
                for (std::size_t j = 1; j <= spec.order; ++j) {
                    sum += lag(Norm::CvM, j);
                }
                if (spec.scope == Scope::ADJ0) {
                    sum = marginal(Norm::CvM) + sum;
                }
                return {spec, sum};
            }
            case Scope::MDJ:
            case Scope::MDJ0: {
                detail::require_lag_stat(u_, spec.order);
                double mx = 0.0;
                for (std::size_t j = 1; j <= spec.order; ++j) {
                    mx = std::max(mx, lag(Norm::KS, j));
                }
                if (spec.scope == Scope::MDJ0) {
                    mx = std::max(marginal(Norm::KS), mx);
                }
                return {spec, mx};
            }
        }
        throw std::invalid_argument("unknown statistic scope");
    }

    std::vector<double> evaluate(std::span<const StatisticSpec> specs) {
        std::vector<double> out;
        out.reserve(specs.size());
        for (const auto& s : specs) {
            out.push_back(evaluate(s).value);
        }
        return out;
    }

private:
    const UniformSequence& u_;
    std::map<std::pair<Norm, std::size_t>, double> lag_cache_;
    std::pair<double, bool> marginal_cvm_{0.0, false};
    std::pair<double, bool> marginal_ks_{0.0, false};
};

[[nodiscard]] inline StatisticValue compute(const StatisticSpec& spec, const UniformSequence& u) {
    StatisticEvaluator ev(u);
    return ev.evaluate(spec);
}

/// ADJ / MDJ / ADJ0 / MDJ0 at k lags.
[[nodiscard]] inline StatisticValue aggregate(const UniformSequence& u, std::size_t k, Scope kind) {
    switch (kind) {
        case Scope::ADJ: return compute(StatisticSpec::adj(k), u);
        case Scope::MDJ: return compute(StatisticSpec::mdj(k), u);
        case Scope::ADJ0: return compute(StatisticSpec::adj0(k), u);
        case Scope::MDJ0: return compute(StatisticSpec::mdj0(k), u);
        default: throw std::invalid_argument("aggregate kind must be ADJ, MDJ, ADJ0 or MDJ0");
    }
}

}  // namespace pitspec
