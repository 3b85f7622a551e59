#pragma once

// Location-scale conditional models Y_t = mu_t + sqrt(h2_t) * eps_t with
// GARCH(1,1) variance and either a constant or AR(1) conditional mean.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pitspec/distributions.hpp"
#include "pitspec/rng.hpp"
#include "pitspec/sequence.hpp"

namespace pitspec {

enum class Constraint { Free, Positive, Nonnegative, Stationary };

struct ParamInfo {
    std::string name;
    Constraint constraint;
};

/// Model parameters. `ar1` is present exactly when the model has an AR(1) mean.
struct ParamVector {
    double mean_const = 0.0;
    std::optional<double> ar1;
    double omega = 0.1;
    double alpha = 0.1;
    double beta = 0.8;

    [[nodiscard]] double persistence() const noexcept { return alpha + beta; }

    [[nodiscard]] double unconditional_variance() const { return omega / (1.0 - alpha - beta); }

    [[nodiscard]] double unconditional_mean() const {
        return ar1 ? mean_const / (1.0 - *ar1) : mean_const;
    }

    /// Throws std::domain_error("stationarity violated") when constraints fail.
    void validate() const {
        if (!(omega > 0.0) || !(alpha >= 0.0) || !(beta >= 0.0) || !std::isfinite(mean_const)) {
            throw std::domain_error("stationarity violated: need omega > 0, alpha >= 0, beta >= 0");
        }
        if (!(alpha + beta < 1.0)) {
            throw std::domain_error("stationarity violated: alpha + beta must be < 1");
        }
        if (ar1 && !(std::abs(*ar1) < 1.0)) {
            throw std::domain_error("stationarity violated: |ar1| must be < 1");
        }
    }

    friend bool operator==(const ParamVector&, const ParamVector&) = default;
};

/// Filtered conditional moments. Entries before `first_usable` only seed the recursion.
struct SeriesState {
    std::vector<double> y;
    std::vector<double> mu;
    std::vector<double> h2;
    std::size_t first_usable = 0;

    [[nodiscard]] std::size_t usable() const noexcept { return y.size() - first_usable; }
};

/**
 * @brief Parametric conditional model F_t(y | past, theta) = F_eps((y - mu_t) / sigma_t).
 *
 * mean_order 0 is a constant mean (GARCH(1,1)); mean_order 1 adds an AR(1) term.
 */
class ConditionalModel {
public:
    ConditionalModel(int mean_order, Innovation innovation)
        : mean_order_(mean_order), innovation_(std::move(innovation)) {
        if (mean_order != 0 && mean_order != 1) {
            throw std::invalid_argument("mean order must be 0 or 1");
        }
    }

    /// Accepts garch11-n, garch11-t5, ar1-garch11-n, ar1-garch11-t5 (and a "t5raw" variant).
    static ConditionalModel from_id(std::string_view id) {
        int order = 0;
        std::string_view rest = id;
        if (rest.starts_with("ar1-")) {
            order = 1;
            rest.remove_prefix(4);
        }
        if (rest == "garch11-n") return {order, Innovation::gaussian()};
        if (rest == "garch11-t5") return {order, Innovation::student_t(5.0, true)};
        if (rest == "garch11-t5raw") return {order, Innovation::student_t(5.0, false)};
        throw std::invalid_argument("unknown model '" + std::string(id) + "'");
    }

    [[nodiscard]] std::string id() const {
        return std::string(mean_order_ == 1 ? "ar1-" : "") + "garch11-" + innovation_.name();
    }

    [[nodiscard]] int mean_order() const noexcept { return mean_order_; }
    [[nodiscard]] const Innovation& innovation() const noexcept { return innovation_; }

    /// Parameter layout in the order used by to_vector / from_vector.
    [[nodiscard]] std::vector<ParamInfo> layout() const {
        std::vector<ParamInfo> out{{"mean_const", Constraint::Free}};
        if (mean_order_ == 1) out.push_back({"ar1", Constraint::Stationary});
        out.push_back({"omega", Constraint::Positive});
        out.push_back({"alpha", Constraint::Stationary});
        out.push_back({"beta", Constraint::Stationary});
        return out;
    }

    [[nodiscard]] std::size_t num_params() const noexcept { return mean_order_ == 1 ? 5 : 4; }

    [[nodiscard]] std::vector<double> to_vector(const ParamVector& p) const {
        check_layout(p);
        std::vector<double> v{p.mean_const};
        if (mean_order_ == 1) v.push_back(*p.ar1);
        v.insert(v.end(), {p.omega, p.alpha, p.beta});
        return v;
    }

    [[nodiscard]] ParamVector from_vector(std::span<const double> v) const {
        if (v.size() != num_params()) {
            throw std::invalid_argument("parameter vector has wrong length for " + id());
        }
        ParamVector p;
        std::size_t i = 0;
        p.mean_const = v[i++];
        if (mean_order_ == 1) p.ar1 = v[i++];
        p.omega = v[i++];
        p.alpha = v[i++];
        p.beta = v[i++];
        return p;
    }

    void check_layout(const ParamVector& p) const {
        if (p.ar1.has_value() != (mean_order_ == 1)) {
            throw std::invalid_argument("parameter vector does not match the mean order of " + id());
        }
    }

    /**
     * @brief Recursive conditional means and variances on the observed sample.
     *
     * h2 starts at the unconditional variance. With an AR(1) mean the first
     * observation has no lag: its mean is set to the unconditional mean, and its
     * residual only seeds the variance recursion (first_usable = 1).
     */
    [[nodiscard]] SeriesState filter(const ParamVector& p, std::span<const double> y) const {
        check_layout(p);
        p.validate();
        const std::size_t first = static_cast<std::size_t>(mean_order_);
        if (y.size() < first + 1) {
            throw std::invalid_argument("series too short for model " + id());
        }
        SeriesState st;
        st.first_usable = first;
        st.y.assign(y.begin(), y.end());
        st.mu.resize(y.size());
        st.h2.resize(y.size());
        const double phi = p.ar1.value_or(0.0);
        for (std::size_t t = 0; t < y.size(); ++t) {
            if (!std::isfinite(y[t])) {
                throw std::invalid_argument("series contains a non-finite value");
            }
            if (t == 0) {
                st.mu[0] = p.unconditional_mean();
                st.h2[0] = p.unconditional_variance();
            } else {
                st.mu[t] = p.mean_const + phi * y[t - 1];
                const double e = y[t - 1] - st.mu[t - 1];
                st.h2[t] = p.omega + p.alpha * e * e + p.beta * st.h2[t - 1];
            }
        }
        return st;
    }

    /// Standardized residuals (y_t - mu_t) / sqrt(h2_t) over the usable range.
    [[nodiscard]] std::vector<double> residuals(const SeriesState& st) const {
        std::vector<double> z;
        z.reserve(st.usable());
        for (std::size_t t = st.first_usable; t < st.y.size(); ++t) {
            z.push_back((st.y[t] - st.mu[t]) / std::sqrt(st.h2[t]));
        }
        return z;
    }

    /// Generalized residuals U_t = F_eps((y_t - mu_t) / sqrt(h2_t)).
    [[nodiscard]] UniformSequence pit(const ParamVector& p, std::span<const double> y) const {
        const SeriesState st = filter(p, y);
        std::vector<double> u;
        u.reserve(st.usable());
        for (double z : residuals(st)) {
            u.push_back(innovation_.cdf(z));
        }
        return UniformSequence(std::move(u));
    }

    /// Inverts the PIT along a filtered path: y_t = mu_t + sqrt(h2_t) F_eps^{-1}(U_t).
    [[nodiscard]] std::vector<double> invert_pit(const SeriesState& st, const UniformSequence& u) const {
        if (u.size() != st.usable()) {
            throw std::invalid_argument("uniform sequence length does not match the filtered range");
        }
        std::vector<double> y;
        y.reserve(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) {
            const std::size_t t = st.first_usable + i;
            y.push_back(st.mu[t] + std::sqrt(st.h2[t]) * innovation_.quantile(u[i]));
        }
        return y;
    }

    /// Gaussian or Student-t log-likelihood summed over the usable range.
    [[nodiscard]] double loglik(const ParamVector& p, std::span<const double> y) const {
        const SeriesState st = filter(p, y);
        double ll = 0.0;
        for (std::size_t t = st.first_usable; t < st.y.size(); ++t) {
            const double z = (st.y[t] - st.mu[t]) / std::sqrt(st.h2[t]);
            ll += innovation_.log_pdf(z) - 0.5 * std::log(st.h2[t]);
        }
        if (!std::isfinite(ll)) {
            throw std::overflow_error("likelihood overflow");
        }
        return ll;
    }

    /**
     * @brief Simulates n observations recursively from the model.
     *
     * The recursion starts at the unconditional mean and variance and runs
     * `burnin` discarded steps first. Innovations are inverse-CDF transforms of a
     * seeded uniform stream, so the output depends only on (params, n, seed, burnin).
     */
    [[nodiscard]] std::vector<double> simulate(const ParamVector& p, std::size_t n, std::uint64_t seed,
                                               std::size_t burnin = 500) const {
        check_layout(p);
        p.validate();
        if (n < 1) {
            throw std::invalid_argument("simulation length must be positive");
        }
        UniformStream uniform(seed);
        const double phi = p.ar1.value_or(0.0);
        double y_prev = p.unconditional_mean();
        double mu_prev = y_prev;
        double h2_prev = p.unconditional_variance();
        std::vector<double> out;
        out.reserve(n);
        for (std::size_t t = 0; t < burnin + n; ++t) {
            double mu = p.mean_const + phi * y_prev;
            double h2 = h2_prev;
            if (t > 0) {
                const double e = y_prev - mu_prev;
                h2 = p.omega + p.alpha * e * e + p.beta * h2_prev;
            } else {
                mu = p.unconditional_mean();
            }
            const double y = mu + std::sqrt(h2) * innovation_.quantile(uniform());
            if (t >= burnin) {
                out.push_back(y);
            }
            y_prev = y;
            mu_prev = mu;
            h2_prev = h2;
        }
        return out;
    }

private:
    int mean_order_;
    Innovation innovation_;
};

}  // namespace pitspec
