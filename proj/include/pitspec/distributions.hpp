#pragma once

// Innovation laws for location-scale models: standard normal and Student-t,
// the latter optionally rescaled to unit variance.

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pitspec {

[[nodiscard]] inline double normal_cdf(double x) noexcept {
    return 0.5 * std::erfc(-x * (std::numbers::sqrt2 / 2.0));
}

[[nodiscard]] inline double normal_log_pdf(double x) noexcept {
    return -0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi);
}

/// Standard normal quantile: Acklam's rational approximation refined by one Halley step.
[[nodiscard]] inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("normal quantile needs p in (0,1)");
    }
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Halley refinement; the error is measured on whichever tail is smaller.
    const double e = x < 0.0 ? normal_cdf(x) - p : (1.0 - p) - normal_cdf(-x);
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

namespace detail {

/// Continued fraction for the regularized incomplete beta (modified Lentz).
inline double beta_continued_fraction(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 1000; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) {
            return h;
        }
    }
    throw std::runtime_error("incomplete beta continued fraction did not converge");
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b); log_beta = log B(a, b) supplied by the caller.
[[nodiscard]] inline double incomplete_beta(double a, double b, double x, double log_beta) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * detail::beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

[[nodiscard]] inline double incomplete_beta(double a, double b, double x) {
    return incomplete_beta(a, b, x, std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

/// Student-t law with fixed degrees of freedom (unscaled).
class StudentT {
public:
    explicit StudentT(double df) : df_(df) {
        if (!(df > 0.0) || !std::isfinite(df)) {
            throw std::invalid_argument("Student-t degrees of freedom must be positive");
        }
        log_beta_ = std::lgamma(0.5 * df) + std::lgamma(0.5) - std::lgamma(0.5 * df + 0.5);
        log_norm_ = -0.5 * std::log(df) - log_beta_;
    }

    [[nodiscard]] double df() const noexcept { return df_; }

    [[nodiscard]] double cdf(double x) const {
        if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
        const double tail = 0.5 * incomplete_beta(0.5 * df_, 0.5, df_ / (df_ + x * x), log_beta_);
        return x > 0.0 ? 1.0 - tail : tail;
    }

    /// P(T > x), accurate in the upper tail.
    [[nodiscard]] double sf(double x) const { return cdf(-x); }

    [[nodiscard]] double log_pdf(double x) const noexcept {
        return log_norm_ - 0.5 * (df_ + 1.0) * std::log1p(x * x / df_);
    }

    [[nodiscard]] double quantile(double p) const {
        if (!(p > 0.0 && p < 1.0)) {
            throw std::domain_error("Student-t quantile needs p in (0,1)");
        }
        if (p == 0.5) return 0.0;
        // Work in the lower tail and reflect, so the target probability is never tiny-minus-one.
        const bool upper = p > 0.5;
        const double q = upper ? 1.0 - p : p;
        double lo = -1.0;
        while (cdf(lo) > q) lo *= 2.0;
        double hi = 0.0;
        double x = std::max(lo, std::min(hi, normal_quantile(q)));
        for (int it = 0; it < 200; ++it) {
            const double f = cdf(x) - q;
            if (f > 0.0) hi = x; else lo = x;
            const double step = f / std::exp(log_pdf(x));
            double next = x - step;
            if (!(next > lo && next < hi)) {
                next = 0.5 * (lo + hi);
            }
            if (std::abs(next - x) <= 1e-14 * (1.0 + std::abs(x))) {
                x = next;
                break;
            }
            x = next;
        }
        return upper ? -x : x;
    }

private:
    double df_;
    double log_beta_ = 0.0;
    double log_norm_ = 0.0;
};

enum class InnovationKind { Gaussian, StudentT };

/**
 * @brief Zero-mean innovation law F_eps used to build the PIT.
 *
 * Student-t innovations are rescaled by sqrt((df-2)/df) to unit variance unless
 * `standardized` is false, in which case the raw t(df) law is used.
 */
class Innovation {
public:
    static Innovation gaussian() { return Innovation(); }

    static Innovation student_t(double df, bool standardized = true) {
        if (standardized && !(df > 2.0)) {
            throw std::invalid_argument("variance-standardized Student-t needs df > 2");
        }
        Innovation inn;
        inn.kind_ = InnovationKind::StudentT;
        inn.t_ = StudentT(df);
        inn.standardized_ = standardized;
        inn.scale_ = standardized ? std::sqrt((df - 2.0) / df) : 1.0;
        return inn;
    }

    [[nodiscard]] InnovationKind kind() const noexcept { return kind_; }
    [[nodiscard]] double df() const noexcept { return t_.df(); }
    [[nodiscard]] bool standardized() const noexcept { return standardized_; }

    [[nodiscard]] double cdf(double z) const {
        return kind_ == InnovationKind::Gaussian ? normal_cdf(z) : t_.cdf(z / scale_);
    }

    [[nodiscard]] double quantile(double p) const {
        return kind_ == InnovationKind::Gaussian ? normal_quantile(p) : scale_ * t_.quantile(p);
    }

    [[nodiscard]] double log_pdf(double z) const {
        return kind_ == InnovationKind::Gaussian ? normal_log_pdf(z)
                                                 : t_.log_pdf(z / scale_) - std::log(scale_);
    }

    [[nodiscard]] std::string name() const {
        if (kind_ == InnovationKind::Gaussian) return "n";
        return "t" + std::to_string(static_cast<int>(t_.df())) + (standardized_ ? "" : "raw");
    }

private:
    Innovation() = default;

    InnovationKind kind_ = InnovationKind::Gaussian;
    StudentT t_{5.0};
    bool standardized_ = true;
    double scale_ = 1.0;
};

}  // namespace pitspec
