#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace pitspec {

struct NelderMeadOptions {
    double f_tol = 1e-8;  ///< max - min of f over the simplex
    double x_tol = 1e-7;  ///< max coordinate distance from the best vertex
    std::size_t max_evals = 20000;
};

struct NelderMeadResult {
    std::vector<double> x;
    double f = std::numeric_limits<double>::infinity();
    bool converged = false;
    std::size_t iterations = 0;
    std::size_t evals = 0;
};

/**
 * @brief Derivative-free minimization with the Nelder-Mead simplex.
 *
 * The initial simplex is x0 plus one vertex per coordinate displaced by step[i].
 * Non-finite objective values are treated as +inf, which lets the caller encode
 * infeasible points by throwing away the value.
 */
template <class Objective>
NelderMeadResult nelder_mead(Objective&& objective, std::span<const double> x0, std::span<const double> step,
                             const NelderMeadOptions& opts = {}) {
    const std::size_t dim = x0.size();
    if (dim == 0 || step.size() != dim) {
        throw std::invalid_argument("nelder_mead: dimension mismatch");
    }
    NelderMeadResult res;
    auto eval = [&](const std::vector<double>& x) {
        ++res.evals;
        const double v = objective(std::span<const double>(x));
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    std::vector<std::vector<double>> simplex(dim + 1, std::vector<double>(x0.begin(), x0.end()));
    std::vector<double> fv(dim + 1);
    for (std::size_t i = 0; i < dim; ++i) {
        simplex[i + 1][i] += step[i];
    }
    for (std::size_t i = 0; i <= dim; ++i) {
        fv[i] = eval(simplex[i]);
    }

    std::vector<std::size_t> order(dim + 1);
    std::vector<double> centroid(dim), trial(dim), trial2(dim);
    auto point = [&](double coef, const std::vector<double>& worst, std::vector<double>& out) {
        for (std::size_t k = 0; k < dim; ++k) {
            out[k] = centroid[k] + coef * (worst[k] - centroid[k]);
        }
    };

    while (true) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[dim - 1];

        double x_spread = 0.0;
        for (std::size_t i = 0; i <= dim; ++i) {
            for (std::size_t k = 0; k < dim; ++k) {
                x_spread = std::max(x_spread, std::abs(simplex[i][k] - simplex[best][k]));
            }
        }
        if (std::isfinite(fv[worst]) && fv[worst] - fv[best] < opts.f_tol && x_spread < opts.x_tol) {
            res.converged = true;
            break;
        }
        if (res.evals >= opts.max_evals) {
            break;
        }
        ++res.iterations;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= dim; ++i) {
            if (i == worst) continue;
            for (std::size_t k = 0; k < dim; ++k) centroid[k] += simplex[i][k];
        }
        for (auto& c : centroid) c /= static_cast<double>(dim);

        point(-1.0, simplex[worst], trial);
        const double f_reflect = eval(trial);
        if (f_reflect < fv[best]) {
            point(-2.0, simplex[worst], trial2);
            const double f_expand = eval(trial2);
            if (f_expand < f_reflect) {
                simplex[worst] = trial2;
                fv[worst] = f_expand;
            } else {
                simplex[worst] = trial;
                fv[worst] = f_reflect;
            }
            continue;
        }
        if (f_reflect < fv[second]) {
            simplex[worst] = trial;
            fv[worst] = f_reflect;
            continue;
        }
        const bool outside = f_reflect < fv[worst];
        point(outside ? -0.5 : 0.5, simplex[worst], trial2);
        const double f_contract = eval(trial2);
        if (f_contract < (outside ? f_reflect : fv[worst])) {
            simplex[worst] = trial2;
            fv[worst] = f_contract;
            continue;
        }
        for (std::size_t i = 0; i <= dim; ++i) {
            if (i == best) continue;
            for (std::size_t k = 0; k < dim; ++k) {
                simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
            }
            fv[i] = eval(simplex[i]);
        }
    }

    const auto best_it = std::min_element(fv.begin(), fv.end());
    res.x = simplex[static_cast<std::size_t>(best_it - fv.begin())];
    res.f = *best_it;
    return res;
}

}  // namespace pitspec
