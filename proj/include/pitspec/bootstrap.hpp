#pragma once

// Parametric bootstrap for PIT-process statistics:
//   1. fit theta_hat on the data and compute the observed statistic;
//   2. simulate a sample of the same length from the fitted model;
//   3. refit on the simulated sample and recompute the statistic;
//   4. repeat B times;
//   5. compare the observed statistic with the upper percentiles.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pitspec/errors.hpp"
#include "pitspec/estimation.hpp"
#include "pitspec/models.hpp"
#include "pitspec/parallel.hpp"
#include "pitspec/rng.hpp"
#include "pitspec/statistics.hpp"

namespace pitspec {

/// Significance levels for which critical values are reported.
inline constexpr std::array<double, 3> kLevels{0.10, 0.05, 0.01};

struct BootstrapOptions {
    std::size_t workers = 1;
    std::size_t burnin = 500;
    double max_failure_rate = 0.2;
    FitOptions fit{};    ///< fit on the original data
    FitOptions refit{};  ///< refits on simulated samples (seed is replaced per replicate)
};

struct BootstrapReport {
    StatisticValue observed;
    std::vector<double> replicates;  ///< in replicate-index order, failed refits removed
    double p_value = 1.0;
    std::map<double, double> critical_values;
    std::size_t B = 0;
    std::uint64_t seed = 0;
    std::size_t dropped = 0;
};

/// All statistics of one bootstrap run share the fit and the simulated replicates.
struct BootstrapRun {
    FitResult fit;
    std::vector<BootstrapReport> reports;
};

/**
 * @brief Empirical upper critical value at `level`.
 *
 * Returns the floor(level * (R + 1))-th largest replicate, so that
 * observed > critical value exactly when (1 + #{replicates >= observed}) / (R + 1) <= level
 * for untied values. When R is too small for the level, no value can reject and
 * +infinity is returned.
 */
[[nodiscard]] inline double upper_critical_value(std::span<const double> replicates, double level) {
    if (!(level > 0.0 && level < 1.0)) {
        throw std::invalid_argument("level must be in (0,1)");
    }
    const auto rank = static_cast<std::size_t>(std::floor(level * static_cast<double>(replicates.size() + 1) + 1e-9));
    if (rank == 0) {
        return std::numeric_limits<double>::infinity();
    }
    std::vector<double> sorted(replicates.begin(), replicates.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    return sorted[std::min(rank, sorted.size()) - 1];
}

/// (1 + #{replicates >= observed}) / (R + 1).
[[nodiscard]] inline double bootstrap_p_value(double observed, std::span<const double> replicates) {
    const auto exceed = std::count_if(replicates.begin(), replicates.end(), [&](double r) { return r >= observed; });
    return (1.0 + static_cast<double>(exceed)) / (static_cast<double>(replicates.size()) + 1.0);
}

[[nodiscard]] inline BootstrapReport make_report(StatisticValue observed, std::vector<double> replicates,
                                                 std::size_t B, std::uint64_t seed, std::size_t dropped) {
    BootstrapReport rep;
    rep.observed = observed;
    rep.p_value = bootstrap_p_value(observed.value, replicates);
    for (double level : kLevels) {
        rep.critical_values[level] = upper_critical_value(replicates, level);
    }
    rep.replicates = std::move(replicates);
    rep.B = B;
    rep.seed = seed;
    rep.dropped = dropped;
    return rep;
}

/// Reject H0 at `level` (one of 0.10, 0.05, 0.01) when observed exceeds the critical value.
[[nodiscard]] inline bool decision(const BootstrapReport& report, double level) {
    for (double l : kLevels) {
        if (std::abs(l - level) < 1e-12) {
            return report.observed.value > report.critical_values.at(l);
        }
    }
    throw std::invalid_argument("unsupported significance level " + std::to_string(level));
}

/// Significance stars at 1/5/10%: "***", "**", "*" or "".
[[nodiscard]] inline std::string significance_stars(double p_value) {
    if (p_value <= 0.01) return "***";
    if (p_value <= 0.05) return "**";
    if (p_value <= 0.10) return "*";
    return "";
}

/**
 * @brief One bootstrap replicate: simulate at `theta`, refit from `theta`, evaluate.
 *
 * Returns nullopt when the refit throws or does not converge.
 */
[[nodiscard]] inline std::optional<std::vector<double>> bootstrap_replicate(
    const ConditionalModel& model, const ParamVector& theta, std::size_t n, std::span<const StatisticSpec> specs,
    std::uint64_t replicate_seed, const BootstrapOptions& opts = {}) {
    try {
        const auto y = model.simulate(theta, n, stream_seed(replicate_seed, 0), opts.burnin);
        FitOptions fo = opts.refit;
        fo.seed = stream_seed(replicate_seed, 1);
        fo.std_errors = false;
        const FitResult fit = fit_ml(model, y, theta, fo);
        if (!fit.converged) {
            return std::nullopt;
        }
        const UniformSequence u = model.pit(fit.params, y);
        StatisticEvaluator ev(u);
        return ev.evaluate(specs);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

/// Bootstrap reports for several statistics from one shared set of B replicates.
[[nodiscard]] inline BootstrapRun parametric_bootstrap(const ConditionalModel& model, std::span<const double> y,
                                                       std::span<const StatisticSpec> specs, std::size_t B,
                                                       std::uint64_t seed, const BootstrapOptions& opts = {}) {
    if (B < 1) {
        throw std::invalid_argument("bootstrap needs B >= 1");
    }
    if (specs.empty()) {
        throw std::invalid_argument("no statistics requested");
    }
    const std::size_t need = model.mean_order() + std::max_element(specs.begin(), specs.end(), [](auto& a, auto& b) {
                                                      return a.min_sample() < b.min_sample();
                                                  })->min_sample();
    if (y.size() < std::max(need, kMinFitLength)) {
        throw std::invalid_argument("series too short for the requested statistics");
    }

    BootstrapRun run;
    FitOptions fo = opts.fit;
    fo.seed = stream_seed(seed, std::numeric_limits<std::uint64_t>::max());
    try {
        run.fit = fit_ml(model, y, std::nullopt, fo);
    } catch (const FitError&) {
        throw;
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception& e) {
        throw FitError(std::string("fit failed on the original data: ") + e.what());
    }
    if (!run.fit.converged) {
        throw FitError("fit did not converge on the original data");
    }
    const UniformSequence u = model.pit(run.fit.params, y);
    StatisticEvaluator ev(u);
    std::vector<StatisticValue> observed;
    for (const auto& s : specs) observed.push_back(ev.evaluate(s));

    std::vector<std::optional<std::vector<double>>> slots(B);
    parallel_for(B, opts.workers, [&](std::size_t b) {
        slots[b] = bootstrap_replicate(model, run.fit.params, y.size(), specs, stream_seed(seed, b), opts);
    });

    std::size_t dropped = 0;
    std::vector<std::vector<double>> per_stat(specs.size());
    for (const auto& slot : slots) {
        if (!slot) {
            ++dropped;
            continue;
        }
        for (std::size_t s = 0; s < specs.size(); ++s) per_stat[s].push_back((*slot)[s]);
    }
    if (static_cast<double>(dropped) > opts.max_failure_rate * static_cast<double>(B)) {
        throw BootstrapError("unstable bootstrap: " + std::to_string(dropped) + " of " + std::to_string(B) +
                             " refits failed");
    }
    for (std::size_t s = 0; s < specs.size(); ++s) {
        run.reports.push_back(make_report(observed[s], std::move(per_stat[s]), B, seed, dropped));
    }
    return run;
}

[[nodiscard]] inline BootstrapReport parametric_bootstrap(const ConditionalModel& model, std::span<const double> y,
                                                          const StatisticSpec& spec, std::size_t B, std::uint64_t seed,
                                                          const BootstrapOptions& opts = {}) {
    return parametric_bootstrap(model, y, std::span<const StatisticSpec>(&spec, 1), B, seed, opts).reports.front();
}

}  // namespace pitspec
