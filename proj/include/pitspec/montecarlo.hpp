#pragma once

// Size/power experiments: GARCH-type null models tested on samples from an
// AR(1)-GARCH(1,1) data-generating process
//   Y_t = c + a1 Y_{t-1} + h_t eps_t,  h_t^2 = omega + alpha (Y_{t-1} - c - a1 Y_{t-2})^2 + beta h_{t-1}^2
// over a grid of a1 values and sample sizes.

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pitspec/bootstrap.hpp"
#include "pitspec/errors.hpp"
#include "pitspec/models.hpp"
#include "pitspec/parallel.hpp"
#include "pitspec/rng.hpp"
#include "pitspec/statistics.hpp"

namespace pitspec {

enum class BootstrapMethod { Warp, Full };

[[nodiscard]] inline std::string to_string(BootstrapMethod m) { return m == BootstrapMethod::Warp ? "warp" : "full"; }

struct ExperimentPlan {
    ConditionalModel null_model = ConditionalModel::from_id("garch11-n");
    ConditionalModel dgp_model = ConditionalModel::from_id("ar1-garch11-n");
    ParamVector dgp_params{0.0, 0.0, 0.1, 0.1, 0.8};  ///< ar1 is replaced by each grid value
    std::vector<double> alpha1_grid{-0.8, -0.6, -0.4, -0.2, 0.0, 0.2, 0.4, 0.6, 0.8};
    std::vector<std::size_t> sample_sizes{100, 300};
    std::size_t reps = 500;
    BootstrapMethod method = BootstrapMethod::Warp;
    std::size_t B = 199;  ///< only used by the full method
    std::vector<StatisticSpec> statistics{StatisticSpec::marginal(Norm::CvM), StatisticSpec::adj0(1)};
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    std::size_t burnin = 500;

    void validate() const {
        if (reps < 1) throw ConfigError("reps must be >= 1");
        if (alpha1_grid.empty() || sample_sizes.empty()) throw ConfigError("experiment grid is empty");
        if (statistics.empty()) throw ConfigError("no statistics in plan");
        if (dgp_model.mean_order() != 1) throw ConfigError("dgp_model must have an AR(1) mean");
        if (method == BootstrapMethod::Full && B < 1) throw ConfigError("full bootstrap needs B >= 1");
    }
};

struct PowerRow {
    double alpha1 = 0.0;
    std::size_t n = 0;
    std::string statistic;
    double level = 0.05;
    double rate = 0.0;
    std::size_t reps = 0;
    BootstrapMethod method = BootstrapMethod::Warp;
    std::size_t failures = 0;
};

struct PowerTable {
    std::vector<PowerRow> rows;

    /// Rejection rate for one cell; throws std::out_of_range if absent.
    [[nodiscard]] double rate(double alpha1, std::size_t n, const StatisticSpec& stat, double level) const {
        const std::string name = stat.name();
        for (const auto& r : rows) {
            if (r.n == n && r.statistic == name && std::abs(r.alpha1 - alpha1) < 1e-12 &&
                std::abs(r.level - level) < 1e-12) {
                return r.rate;
            }
        }
        throw std::out_of_range("no power-table row for " + name);
    }
};

namespace detail {

/// Outcome of one Monte Carlo repetition.
struct RepOutcome {
    bool ok = false;
    std::vector<double> observed;
    std::vector<double> replicate;               // warp method
    std::vector<std::array<bool, 3>> rejected;   // full method, per statistic and level
};

inline std::uint64_t cell_seed(std::uint64_t seed, double alpha1, std::size_t n) {
    return stream_seed(seed, std::bit_cast<std::uint64_t>(alpha1 + 0.0), n);
}

inline RepOutcome run_rep(const ExperimentPlan& plan, const ParamVector& dgp, std::size_t n, std::uint64_t rep_seed) {
    RepOutcome out;
    try {
        const auto y = plan.dgp_model.simulate(dgp, n, stream_seed(rep_seed, 0), plan.burnin);
        BootstrapOptions bo;
        bo.burnin = plan.burnin;
        if (plan.method == BootstrapMethod::Full) {
            const auto run = parametric_bootstrap(plan.null_model, y, plan.statistics, plan.B, stream_seed(rep_seed, 1), bo);
            for (const auto& rep : run.reports) {
                out.observed.push_back(rep.observed.value);
                out.rejected.push_back({decision(rep, kLevels[0]), decision(rep, kLevels[1]), decision(rep, kLevels[2])});
            }
            out.ok = true;
            return out;
        }
        FitOptions fo;
        fo.seed = stream_seed(rep_seed, 2);
        fo.std_errors = false;
        const FitResult fit = fit_ml(plan.null_model, y, std::nullopt, fo);
        if (!fit.converged) return out;
        const UniformSequence u = plan.null_model.pit(fit.params, y);
        StatisticEvaluator ev(u);
        out.observed = ev.evaluate(plan.statistics);
        auto rep = bootstrap_replicate(plan.null_model, fit.params, n, plan.statistics, stream_seed(rep_seed, 3), bo);
        if (!rep) return out;
        out.replicate = std::move(*rep);
        out.ok = true;
    } catch (const std::exception&) {
        out.ok = false;
    }
    return out;
}

}  // namespace detail

/**
 * @brief Rejection frequencies over the plan's (a1, n) grid.
 *
 * Warp method: each repetition contributes one bootstrap replicate; the pooled
 * replicates of a cell give one upper critical value per level, against which
 * every repetition's observed statistic is compared. Full method: each
 * repetition runs its own B-replicate bootstrap. Repetitions with failed fits
 * are excluded from the rate and counted in `failures`.
 */
[[nodiscard]] inline PowerTable run_experiment(const ExperimentPlan& plan) {
    plan.validate();
    PowerTable table;
    for (double a1 : plan.alpha1_grid) {
        ParamVector dgp = plan.dgp_params;
        dgp.ar1 = a1;
        for (std::size_t n : plan.sample_sizes) {
            const std::uint64_t cseed = detail::cell_seed(plan.seed, a1, n);
            std::vector<detail::RepOutcome> outcomes(plan.reps);
            parallel_for(plan.reps, plan.workers, [&](std::size_t r) {
                outcomes[r] = detail::run_rep(plan, dgp, n, stream_seed(cseed, r));
            });
            std::size_t failures = 0;
            for (const auto& o : outcomes) failures += o.ok ? 0 : 1;
            const std::size_t used = plan.reps - failures;

            for (std::size_t s = 0; s < plan.statistics.size(); ++s) {
                std::vector<double> pool;
                if (plan.method == BootstrapMethod::Warp) {
                    for (const auto& o : outcomes) {
                        if (o.ok) pool.push_back(o.replicate[s]);
                    }
                }
                for (std::size_t li = 0; li < kLevels.size(); ++li) {
                    const double level = kLevels[li];
                    std::size_t rejections = 0;
                    if (plan.method == BootstrapMethod::Warp) {
                        const double cv = upper_critical_value(pool, level);
                        for (const auto& o : outcomes) {
                            if (o.ok && o.observed[s] > cv) ++rejections;
                        }
                    } else {
                        for (const auto& o : outcomes) {
                            if (o.ok && o.rejected[s][li]) ++rejections;
                        }
                    }
                    PowerRow row;
                    row.alpha1 = a1;
                    row.n = n;
                    row.statistic = plan.statistics[s].name();
                    row.level = level;
                    row.rate = used > 0 ? static_cast<double>(rejections) / static_cast<double>(used) : 0.0;
                    row.reps = plan.reps;
                    row.method = plan.method;
                    row.failures = failures;
                    table.rows.push_back(std::move(row));
                }
            }
        }
    }
    return table;
}

inline void write_power_csv(std::ostream& os, const PowerTable& table) {
    os << "alpha1,n,statistic,level,rate,reps,method,failures\n";
    for (const auto& r : table.rows) {
        std::ostringstream line;
        line.precision(6);
        line << r.alpha1 << ',' << r.n << ',' << r.statistic << ',' << r.level << ',' << r.rate << ',' << r.reps
             << ',' << to_string(r.method) << ',' << r.failures << '\n';
        os << line.str();
    }
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    while (true) {
        const auto c = s.find(',');
        const auto item = trim(s.substr(0, c));
        if (!item.empty()) out.emplace_back(item);
        if (c == std::string_view::npos) break;
        s.remove_prefix(c + 1);
    }
    return out;
}

template <class T>
T parse_number(const std::string& key, std::string_view text) {
    T v{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ConfigError("bad value for '" + key + "': '" + std::string(text) + "'");
    }
    return v;
}

}  // namespace detail

/**
 * @brief Reads a flat key=value experiment plan.
 *
 * Required keys: null_model, dgp_model, alpha1, n, reps, method, statistics, seed.
 * Optional: B (required for method=full), mean_const, omega, alpha, beta, burnin,
 * workers. Lists are comma separated; '#' starts a comment.
 */
[[nodiscard]] inline ExperimentPlan parse_plan(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv = line;
        if (const auto hash = sv.find('#'); hash != std::string_view::npos) sv = sv.substr(0, hash);
        sv = detail::trim(sv);
        if (sv.empty()) continue;
        const auto eq = sv.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
        }
        kv[std::string(detail::trim(sv.substr(0, eq)))] = std::string(detail::trim(sv.substr(eq + 1)));
    }
    auto required = [&](const char* key) -> const std::string& {
        const auto it = kv.find(key);
        if (it == kv.end() || it->second.empty()) throw ConfigError(std::string("missing plan field '") + key + "'");
        return it->second;
    };

    ExperimentPlan plan;
    try {
        plan.null_model = ConditionalModel::from_id(required("null_model"));
        plan.dgp_model = ConditionalModel::from_id(required("dgp_model"));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    plan.alpha1_grid.clear();
    for (const auto& s : detail::split_list(required("alpha1"))) plan.alpha1_grid.push_back(detail::parse_number<double>("alpha1", s));
    plan.sample_sizes.clear();
    for (const auto& s : detail::split_list(required("n"))) plan.sample_sizes.push_back(detail::parse_number<std::size_t>("n", s));
    plan.reps = detail::parse_number<std::size_t>("reps", required("reps"));
    const auto& method = required("method");
    if (method == "warp") {
        plan.method = BootstrapMethod::Warp;
    } else if (method == "full") {
        plan.method = BootstrapMethod::Full;
        plan.B = detail::parse_number<std::size_t>("B", required("B"));
    } else {
        throw ConfigError("method must be 'warp' or 'full'");
    }
    plan.statistics.clear();
    for (const auto& s : detail::split_list(required("statistics"))) {
        try {
            plan.statistics.push_back(StatisticSpec::parse(s));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    plan.seed = detail::parse_number<std::uint64_t>("seed", required("seed"));
    auto optional_double = [&](const char* key, double& dst) {
        if (auto it = kv.find(key); it != kv.end()) dst = detail::parse_number<double>(key, it->second);
    };
    optional_double("mean_const", plan.dgp_params.mean_const);
    optional_double("omega", plan.dgp_params.omega);
    optional_double("alpha", plan.dgp_params.alpha);
    optional_double("beta", plan.dgp_params.beta);
    if (auto it = kv.find("burnin"); it != kv.end()) plan.burnin = detail::parse_number<std::size_t>("burnin", it->second);
    if (auto it = kv.find("workers"); it != kv.end()) plan.workers = detail::parse_number<std::size_t>("workers", it->second);
    if (plan.sample_sizes.end() != std::find(plan.sample_sizes.begin(), plan.sample_sizes.end(), std::size_t{0})) {
        throw ConfigError("sample sizes must be positive");
    }
    plan.validate();
    try {
        ParamVector probe = plan.dgp_params;
        for (double a1 : plan.alpha1_grid) {
            probe.ar1 = a1;
            probe.validate();
        }
    } catch (const std::domain_error& e) {
        throw ConfigError(e.what());
    }
    return plan;
}

}  // namespace pitspec
