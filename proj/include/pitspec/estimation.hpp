#pragma once

// Maximum-likelihood fitting of the shipped conditional models.
//
// The optimizer works on an unconstrained scale: omega = exp(s), and
// (alpha, beta) = (e^a, e^b) / (1 + e^a + e^b), which maps R^2 onto the open
// simplex alpha, beta > 0, alpha + beta < 1. Mean terms are left free.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "pitspec/errors.hpp"
#include "pitspec/models.hpp"
#include "pitspec/optimize.hpp"
#include "pitspec/rng.hpp"

namespace pitspec {

/// Practical lower bound on the sample length accepted by fit_ml.
inline constexpr std::size_t kMinFitLength = 30;

struct FitResult {
    ParamVector params;
    double loglik_at_opt = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
    std::optional<std::vector<double>> std_errors;  ///< same layout as ConditionalModel::layout()
};

struct FitOptions {
    std::size_t restarts = 3;
    std::uint64_t seed = 0x5eed;
    bool std_errors = true;
    NelderMeadOptions nelder_mead{};
};

/// Maps between model parameters and the unconstrained optimizer scale.
class Reparameterization {
public:
    explicit Reparameterization(const ConditionalModel& model) : model_(model) {}

    [[nodiscard]] std::vector<double> to_free(const ParamVector& p) const {
        model_.check_layout(p);
        if (!(p.omega > 0.0) || !(p.alpha > 0.0) || !(p.beta > 0.0) || !(p.alpha + p.beta < 1.0)) {
            throw std::domain_error("parameters outside the open constraint set");
        }
        std::vector<double> th{p.mean_const};
        if (p.ar1) th.push_back(*p.ar1);
        const double slack = 1.0 - p.alpha - p.beta;
        th.push_back(std::log(p.omega));
        th.push_back(std::log(p.alpha / slack));
        th.push_back(std::log(p.beta / slack));
        return th;
    }

    [[nodiscard]] ParamVector from_free(std::span<const double> th) const {
        if (th.size() != model_.num_params()) {
            throw std::invalid_argument("free parameter vector has wrong length");
        }
        ParamVector p;
        std::size_t i = 0;
        p.mean_const = th[i++];
        if (model_.mean_order() == 1) p.ar1 = th[i++];
        p.omega = std::exp(th[i++]);
        const double a = th[i++];
        const double b = th[i++];
        // Softmax with the implicit third logit fixed at 0, shifted for stability.
        const double top = std::max({a, b, 0.0});
        const double ea = std::exp(a - top);
        const double eb = std::exp(b - top);
        const double e0 = std::exp(-top);
        const double denom = e0 + ea + eb;
        p.alpha = ea / denom;
        p.beta = eb / denom;
        return p;
    }

    /// d params / d free, evaluated at free point th (rows follow the model layout).
    [[nodiscard]] Eigen::MatrixXd jacobian(std::span<const double> th) const {
        const ParamVector p = from_free(th);
        const std::size_t k = model_.num_params();
        Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
        Eigen::Index i = 0;
        jac(i, i) = 1.0;
        ++i;
        if (model_.mean_order() == 1) {
            jac(i, i) = 1.0;
            ++i;
        }
        jac(i, i) = p.omega;
        const Eigen::Index ia = i + 1;
        const Eigen::Index ib = i + 2;
        jac(ia, ia) = p.alpha * (1.0 - p.alpha);
        jac(ia, ib) = -p.alpha * p.beta;
        jac(ib, ia) = -p.alpha * p.beta;
        jac(ib, ib) = p.beta * (1.0 - p.beta);
        return jac;
    }

private:
    const ConditionalModel& model_;
};

namespace detail {

inline double sample_variance(std::span<const double> y) {
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    double ss = 0.0;
    for (double v : y) ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(y.size());
}

}  // namespace detail

/// Least-squares mean terms with (omega, alpha, beta) = (0.05 var(y), 0.1, 0.8).
[[nodiscard]] inline ParamVector default_init(const ConditionalModel& model, std::span<const double> y) {
    ParamVector p;
    const double n = static_cast<double>(y.size());
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
    p.mean_const = mean;
    if (model.mean_order() == 1) {
        const std::size_t m = y.size() - 1;
        double mx = 0.0, my = 0.0;
        for (std::size_t t = 1; t < y.size(); ++t) {
            mx += y[t - 1];
            my += y[t];
        }
        mx /= static_cast<double>(m);
        my /= static_cast<double>(m);
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t t = 1; t < y.size(); ++t) {
            sxy += (y[t - 1] - mx) * (y[t] - my);
            sxx += (y[t - 1] - mx) * (y[t - 1] - mx);
        }
        const double phi = sxx > 0.0 ? std::clamp(sxy / sxx, -0.95, 0.95) : 0.0;
        p.ar1 = phi;
        p.mean_const = my - phi * mx;
    }
    p.alpha = 0.1;
    p.beta = 0.8;
    p.omega = (1.0 - p.alpha - p.beta) * detail::sample_variance(y);
    return p;
}

/// Central finite-difference Hessian of f at x with step 1e-4 * (1 + |x_i|).
template <class F>
Eigen::MatrixXd numeric_hessian(F&& f, std::span<const double> x) {
    const std::size_t k = x.size();
    Eigen::MatrixXd hess(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    std::vector<double> h(k);
    for (std::size_t i = 0; i < k; ++i) h[i] = 1e-4 * (1.0 + std::abs(x[i]));
    std::vector<double> pt(x.begin(), x.end());
    const double f0 = f(std::span<const double>(pt));
    auto at = [&](std::size_t i, double di, std::size_t j, double dj) {
        pt.assign(x.begin(), x.end());
        pt[i] += di;
        pt[j] += dj;
        return f(std::span<const double>(pt));
    };
    for (std::size_t i = 0; i < k; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        hess(ii, ii) = (at(i, h[i], i, 0.0) - 2.0 * f0 + at(i, -h[i], i, 0.0)) / (h[i] * h[i]);
        for (std::size_t j = 0; j < i; ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            const double v = (at(i, h[i], j, h[j]) - at(i, h[i], j, -h[j]) - at(i, -h[i], j, h[j]) +
                              at(i, -h[i], j, -h[j])) /
                             (4.0 * h[i] * h[j]);
            hess(ii, jj) = v;
            hess(jj, ii) = v;
        }
    }
    return hess;
}

/**
 * @brief Maximum-likelihood estimate by Nelder-Mead on the unconstrained scale.
 *
 * The first search starts from `init`; without one, both default_init and a
 * high-persistence start are tried and the better kept. Each seeded restart
 * re-opens a randomly scaled simplex around the best point so far. The result
 * is never worse than the starting point. Standard errors come from the
 * finite-difference Hessian on the free scale, mapped by the delta method.
 */
[[nodiscard]] inline FitResult fit_ml(const ConditionalModel& model, std::span<const double> y,
                                      const std::optional<ParamVector>& init = std::nullopt,
                                      const FitOptions& opts = {}) {
    if (y.size() < kMinFitLength) {
        throw std::invalid_argument("series too short for estimation (need at least 30 observations)");
    }
    const double var = detail::sample_variance(y);
    const double level = std::abs(y[0]);
    if (!std::isfinite(var) || var <= 1e-300 + 1e-20 * level * level) {
        throw FitError("degenerate data: zero or non-finite sample variance");
    }
    const Reparameterization rep(model);
    std::vector<ParamVector> starts;
    if (init) {
        starts.push_back(*init);
    } else {
        starts.push_back(default_init(model, y));
        ParamVector persistent = starts.front();
        persistent.alpha = 0.05;
        persistent.beta = 0.9;
        persistent.omega = 0.05 * var;
        starts.push_back(persistent);
    }
    for (const auto& s : starts) s.validate();

    auto neg_loglik = [&](std::span<const double> th) {
        try {
            return -model.loglik(rep.from_free(th), y);
        } catch (const std::exception&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    std::vector<double> base_step(model.num_params(), 0.5);
    base_step[0] = 0.25 * std::sqrt(var);
    if (model.mean_order() == 1) base_step[1] = 0.1;

    NelderMeadResult best = nelder_mead(neg_loglik, rep.to_free(starts.front()), base_step, opts.nelder_mead);
    std::size_t iterations = best.iterations;
    for (std::size_t i = 1; i < starts.size(); ++i) {
        NelderMeadResult run = nelder_mead(neg_loglik, rep.to_free(starts[i]), base_step, opts.nelder_mead);
        iterations += run.iterations;
        if (run.f < best.f) best = std::move(run);
    }
    if (!std::isfinite(best.f)) {
        throw FitError("log-likelihood is not finite at any explored point");
    }
    bool converged = best.converged;

    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> scale(0.5, 1.5);
    std::bernoulli_distribution flip(0.5);
    for (std::size_t r = 0; r < opts.restarts; ++r) {
        std::vector<double> step(base_step.size());
        for (std::size_t i = 0; i < step.size(); ++i) {
            step[i] = base_step[i] * scale(rng) * (flip(rng) ? -1.0 : 1.0);
        }
        NelderMeadResult run = nelder_mead(neg_loglik, best.x, step, opts.nelder_mead);
        iterations += run.iterations;
        if (run.f <= best.f) {
            best = std::move(run);
            converged = best.converged;
        }
    }

    FitResult out;
    out.params = rep.from_free(best.x);
    out.loglik_at_opt = -best.f;
    out.iterations = iterations;
    out.converged = converged;
    try {
        out.params.validate();
    } catch (const std::domain_error&) {
        out.converged = false;
    }
    if (opts.std_errors) {
        const Eigen::MatrixXd hess = numeric_hessian(neg_loglik, best.x);
        Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
        if (hess.allFinite() && ldlt.info() == Eigen::Success && ldlt.isPositive() &&
            ldlt.vectorD().minCoeff() > 0.0) {
            const Eigen::MatrixXd cov_free =
                ldlt.solve(Eigen::MatrixXd::Identity(hess.rows(), hess.cols()));
            const Eigen::MatrixXd jac = rep.jacobian(best.x);
            const Eigen::MatrixXd cov = jac * cov_free * jac.transpose();
            std::vector<double> se(model.num_params());
            bool ok = true;
            for (Eigen::Index i = 0; i < cov.rows(); ++i) {
                ok = ok && cov(i, i) > 0.0;
                se[static_cast<std::size_t>(i)] = std::sqrt(std::max(0.0, cov(i, i)));
            }
            if (ok) out.std_errors = std::move(se);
        }
    }
    return out;
}

}  // namespace pitspec
