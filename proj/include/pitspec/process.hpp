#pragma once

// Empirical processes of contemporaneous and lagged PIT values.
//
// All time indices in this header follow the 1-based convention t = 1..n used
// when the processes are written as sums; the code maps them to 0-based storage.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "pitspec/sequence.hpp"

namespace pitspec {

namespace detail {

inline void require_lag(const UniformSequence& u, std::size_t j) {
    if (j < 1) {
        throw std::invalid_argument("lag must be at least 1");
    }
    if (j >= u.size()) {
        throw std::invalid_argument("insufficient sample for lag");
    }
}

[[nodiscard]] inline double ind(double u, double r) noexcept { return u <= r ? 1.0 : 0.0; }

}  // namespace detail

/**
 * @brief Marginal process (1/sqrt(m)) * sum_{t >= index_start} [I(u_t <= r1) - r1].
 *
 * index_start = 1 gives the full-sample convention (m = n), index_start = 2 drops
 * the first observation (m = n - 1), which is the range shared with the lag-1
 * bivariate process.
 */
[[nodiscard]] inline double eval_v1(const UniformSequence& u, double r1, std::size_t index_start = 1) {
    if (index_start != 1 && index_start != 2) {
        throw std::invalid_argument("index_start must be 1 or 2");
    }
    if (!(r1 >= 0.0 && r1 <= 1.0)) {
        throw std::invalid_argument("r1 outside [0,1]");
    }
    if (u.size() < index_start) {
        throw std::invalid_argument("degenerate sample");
    }
    const std::size_t m = u.size() - (index_start - 1);
    double acc = 0.0;
    for (std::size_t t = index_start - 1; t < u.size(); ++t) {
        acc += detail::ind(u[t], r1) - r1;
    }
    return acc / std::sqrt(static_cast<double>(m));
}

/// Lag-j bivariate process V_{2n,j}(r1, r2); r1 indexes u_t and r2 indexes u_{t-j}.
[[nodiscard]] inline double eval_v2_lag(const UniformSequence& u, std::size_t j, const EvalPoint& r) {
    if (r.dim() != 2) {
        throw std::invalid_argument("lag process needs a 2-dimensional point");
    }
    detail::require_lag(u, j);
    const double r1 = r[0];
    const double r2 = r[1];
    const std::size_t n = u.size();
    double acc = 0.0;
    for (std::size_t t = j; t < n; ++t) {
        acc += detail::ind(u[t], r1) * detail::ind(u[t - j], r2) - r1 * r2;
    }
    return acc / std::sqrt(static_cast<double>(n - j));
}

/// Product-of-centred-indicators part of the lag-1 process, summed over t = 2..n.
[[nodiscard]] inline double eval_v2_centered(const UniformSequence& u, const EvalPoint& r) {
    if (r.dim() != 2) {
        throw std::invalid_argument("lag process needs a 2-dimensional point");
    }
    detail::require_lag(u, 1);
    const double r1 = r[0];
    const double r2 = r[1];
    double acc = 0.0;
    for (std::size_t t = 1; t < u.size(); ++t) {
        acc += (detail::ind(u[t], r1) - r1) * (detail::ind(u[t - 1], r2) - r2);
    }
    return acc / std::sqrt(static_cast<double>(u.size() - 1));
}

/**
 * @brief p-wise process over the windows (u_t, u_{t-1}, ..., u_{t-p+1}), t = p..n.
 *
 * Coordinate r_j pairs with u_{t-j+1}, so p = 2 is exactly the lag-1 process.
 */
[[nodiscard]] inline double eval_vp(const UniformSequence& u, std::size_t p, const EvalPoint& r) {
    if (p < 2) {
        throw std::invalid_argument("p-wise process needs p >= 2");
    }
    if (r.dim() != p) {
        throw std::invalid_argument("evaluation point dimension must equal p");
    }
    if (p > u.size()) {
        throw std::invalid_argument("insufficient sample for p-wise process");
    }
    double r_prod = 1.0;
    for (std::size_t d = 0; d < p; ++d) {
        r_prod *= r[d];
    }
    const std::size_t n = u.size();
    double acc = 0.0;
    for (std::size_t t = p - 1; t < n; ++t) {
        double prod = 1.0;
        for (std::size_t d = 0; d < p && prod != 0.0; ++d) {
            prod *= detail::ind(u[t - d], r[d]);
        }
        acc += prod - r_prod;
    }
    return acc / std::sqrt(static_cast<double>(n - p + 1));
}

/// Covariance kernel of the limiting Gaussian process of V_{2n} under iid uniforms.
[[nodiscard]] inline double limit_covariance(const EvalPoint& r, const EvalPoint& s) {
    if (r.dim() != 2 || s.dim() != 2) {
        throw std::invalid_argument("limit covariance is defined on [0,1]^2");
    }
    const double r1 = r[0], r2 = r[1], s1 = s[0], s2 = s[1];
    return std::min(r1, s1) * std::min(r2, s2) + std::min(r1, s2) * r2 * s1 +
           std::min(r2, s1) * r1 * s2 - 3.0 * r1 * r2 * s1 * s2;
}

}  // namespace pitspec
