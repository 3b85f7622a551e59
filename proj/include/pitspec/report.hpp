#pragma once

// Data ingestion and report emission: returns CSV, JSON test reports,
// fixed-width tables, and the generalized autocorrelogram (CSV + SVG).

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pitspec/bootstrap.hpp"
#include "pitspec/errors.hpp"
#include "pitspec/estimation.hpp"
#include "pitspec/models.hpp"
#include "pitspec/statistics.hpp"

namespace pitspec {

inline constexpr const char* kTestReportSchema = "pitspec.test/1";
inline constexpr const char* kEstimateReportSchema = "pitspec.estimate/1";

namespace detail {

inline bool parse_double(std::string_view s, double& out) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '"')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '"' || s.back() == '\r')) s.remove_suffix(1);
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

inline std::string fmt(double v, int prec = 4) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

inline std::string level_key(double level) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.2f", level);
    return buf;
}

inline nlohmann::json finite_or_null(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace detail

/**
 * @brief Reads a returns series: one numeric column, optional header line,
 * optional leading date column (the last field of each row is the return).
 */
[[nodiscard]] inline std::vector<double> read_returns_csv(std::istream& in) {
    std::vector<double> out;
    std::string line;
    std::size_t lineno = 0;
    bool seen_content = false;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv = line;
        if (sv.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        const auto sep = sv.find_last_of(",;\t");
        const std::string_view field = sep == std::string_view::npos ? sv : sv.substr(sep + 1);
        double v = 0.0;
        if (detail::parse_double(field, v)) {
            out.push_back(v);
        } else if (!seen_content) {
            // header line
        } else {
            throw InputError("line " + std::to_string(lineno) + ": not a number");
        }
        seen_content = true;
    }
    if (out.empty()) {
        throw InputError("empty input: no numeric observations");
    }
    return out;
}

inline void write_series_csv(std::ostream& os, std::span<const double> y) {
    os << "y\n";
    char buf[32];
    for (double v : y) {
        std::snprintf(buf, sizeof buf, "%.17g\n", v);
        os << buf;
    }
}

/// Parses "mean=0,ar1=0.2,omega=0.1,alpha=0.1,beta=0.8"; unspecified fields keep defaults.
[[nodiscard]] inline ParamVector parse_params(const ConditionalModel& model, std::string_view text) {
    ParamVector p;
    p.mean_const = 0.0;
    if (model.mean_order() == 1) p.ar1 = 0.0;
    while (!text.empty()) {
        const auto comma = text.find(',');
        const auto item = text.substr(0, comma);
        text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
        if (item.empty()) continue;
        const auto eq = item.find('=');
        double v = 0.0;
        if (eq == std::string_view::npos || !detail::parse_double(item.substr(eq + 1), v)) {
            throw InputError("bad parameter assignment '" + std::string(item) + "'");
        }
        const auto key = item.substr(0, eq);
        if (key == "mean" || key == "mean_const") p.mean_const = v;
        else if (key == "ar1" && model.mean_order() == 1) p.ar1 = v;
        else if (key == "omega") p.omega = v;
        else if (key == "alpha") p.alpha = v;
        else if (key == "beta") p.beta = v;
        else throw InputError("unknown parameter '" + std::string(key) + "' for " + model.id());
    }
    return p;
}

[[nodiscard]] inline nlohmann::json fit_to_json(const ConditionalModel& model, const FitResult& fit) {
    nlohmann::json params = nlohmann::json::object();
    nlohmann::json se = nlohmann::json::object();
    const auto layout = model.layout();
    const auto values = model.to_vector(fit.params);
    for (std::size_t i = 0; i < layout.size(); ++i) {
        params[layout[i].name] = values[i];
        se[layout[i].name] = fit.std_errors ? nlohmann::json((*fit.std_errors)[i]) : nlohmann::json(nullptr);
    }
    return {{"model", model.id()},
            {"params", params},
            {"std_errors", se},
            {"loglik", fit.loglik_at_opt},
            {"converged", fit.converged},
            {"iterations", fit.iterations}};
}

[[nodiscard]] inline nlohmann::json estimate_report_json(const ConditionalModel& model, const FitResult& fit,
                                                         std::size_t n) {
    nlohmann::json j = fit_to_json(model, fit);
    j["schema"] = kEstimateReportSchema;
    j["n"] = n;
    return j;
}

[[nodiscard]] inline nlohmann::json test_report_json(const ConditionalModel& model, const BootstrapRun& run,
                                                     std::size_t n, std::size_t B, std::uint64_t seed) {
    nlohmann::json stats = nlohmann::json::array();
    for (const auto& rep : run.reports) {
        nlohmann::json cv = nlohmann::json::object();
        for (const auto& [level, value] : rep.critical_values) cv[detail::level_key(level)] = detail::finite_or_null(value);
        stats.push_back({{"name", rep.observed.spec.name()},
                         {"value", rep.observed.value},
                         {"p_value", rep.p_value},
                         {"stars", significance_stars(rep.p_value)},
                         {"critical_values", cv},
                         {"replicates_used", rep.replicates.size()},
                         {"dropped", rep.dropped}});
    }
    return {{"schema", kTestReportSchema},
            {"model", model.id()},
            {"n", n},
            {"B", B},
            {"seed", seed},
            {"fit", fit_to_json(model, run.fit)},
            {"statistics", stats}};
}

/// Estimate block: one column per parameter, standard errors in brackets below.
inline void write_estimate_table(std::ostream& os, const ConditionalModel& model, const FitResult& fit) {
    const auto layout = model.layout();
    const auto values = model.to_vector(fit.params);
    os << model.id() << "  (loglik " << detail::fmt(fit.loglik_at_opt, 4) << (fit.converged ? "" : ", NOT converged")
       << ")\n";
    std::string head, val, err;
    for (std::size_t i = 0; i < layout.size(); ++i) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%14s", layout[i].name.c_str());
        head += buf;
        std::snprintf(buf, sizeof buf, "%14.4f", values[i]);
        val += buf;
        if (fit.std_errors) {
            std::snprintf(buf, sizeof buf, "%14s", ("(" + detail::fmt((*fit.std_errors)[i], 5) + ")").c_str());
        } else {
            std::snprintf(buf, sizeof buf, "%14s", "(n/a)");
        }
        err += buf;
    }
    os << head << '\n' << val << '\n' << err << '\n';
}

/// P-value row: p-values with significance stars, one column per statistic.
inline void write_pvalue_table(std::ostream& os, const ConditionalModel& model, const BootstrapRun& run) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-22s", "model");
    os << buf;
    for (const auto& rep : run.reports) {
        std::snprintf(buf, sizeof buf, "%12s", rep.observed.spec.name().c_str());
        os << buf;
    }
    os << '\n';
    std::snprintf(buf, sizeof buf, "%-22s", model.id().c_str());
    os << buf;
    for (const auto& rep : run.reports) {
        std::snprintf(buf, sizeof buf, "%12s", (detail::fmt(rep.p_value, 3) + significance_stars(rep.p_value)).c_str());
        os << buf;
    }
    os << "\n*** p<=0.01, ** p<=0.05, * p<=0.10\n";
}

/// One bar of the generalized autocorrelogram; lag 0 is the marginal statistic.
struct AutocorrelogramBar {
    std::size_t lag = 0;
    double value = 0.0;
    double p_value = 1.0;
    double cv10 = 0.0;
    double cv05 = 0.0;
    double cv01 = 0.0;
};

struct AutocorrelogramData {
    Norm norm = Norm::CvM;
    std::string model;
    std::vector<AutocorrelogramBar> bars;
};

/// Statistics for lags 0..k of one norm.
[[nodiscard]] inline std::vector<StatisticSpec> autocorrelogram_specs(Norm norm, std::size_t k) {
    std::vector<StatisticSpec> specs{StatisticSpec::marginal(norm)};
    for (std::size_t j = 1; j <= k; ++j) specs.push_back(StatisticSpec::lag(norm, j));
    return specs;
}

[[nodiscard]] inline AutocorrelogramData make_autocorrelogram(const ConditionalModel& model, const BootstrapRun& run,
                                                              Norm norm) {
    AutocorrelogramData data;
    data.norm = norm;
    data.model = model.id();
    for (std::size_t i = 0; i < run.reports.size(); ++i) {
        const auto& rep = run.reports[i];
        data.bars.push_back({i, rep.observed.value, rep.p_value, rep.critical_values.at(0.10),
                             rep.critical_values.at(0.05), rep.critical_values.at(0.01)});
    }
    return data;
}

inline void write_autocorrelogram_csv(std::ostream& os, const AutocorrelogramData& data) {
    os << "lag,norm,value,p_value,cv10,cv05,cv01\n";
    char buf[256];
    for (const auto& b : data.bars) {
        std::snprintf(buf, sizeof buf, "%zu,%s,%.10g,%.6g,%.10g,%.10g,%.10g\n", b.lag,
                      data.norm == Norm::CvM ? "CvM" : "KS", b.value, b.p_value, b.cv10, b.cv05, b.cv01);
        os << buf;
    }
}

/// Self-contained SVG bar chart; critical values drawn as X (10%), V (5%), I (1%).
inline void write_autocorrelogram_svg(std::ostream& os, const AutocorrelogramData& data) {
    constexpr double width = 640, height = 400, left = 60, right = 20, top = 40, bottom = 50;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;
    double ymax = 0.0;
    for (const auto& b : data.bars) {
        ymax = std::max(ymax, b.value);
        for (double c : {b.cv10, b.cv05, b.cv01}) {
            if (std::isfinite(c)) ymax = std::max(ymax, c);
        }
    }
    if (!(ymax > 0.0)) ymax = 1.0;
    ymax *= 1.1;
    const double slot = plot_w / static_cast<double>(std::max<std::size_t>(data.bars.size(), 1));
    auto ypos = [&](double v) { return top + plot_h * (1.0 - v / ymax); };
    auto num = [](double v) { return detail::fmt(v, 2); };

    os << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << num(width) << R"(" height=")" << num(height)
       << R"(" font-family="sans-serif" font-size="12">)" << '\n';
    os << R"(<rect x="0" y="0" width=")" << num(width) << R"(" height=")" << num(height) << R"(" fill="white"/>)" << '\n';
    os << R"(<text x=")" << num(width / 2) << R"(" y="20" text-anchor="middle" font-size="14">)" << data.model << ' '
       << (data.norm == Norm::CvM ? "CvM" : "KS") << " generalized autocorrelogram</text>\n";
    os << R"(<line x1=")" << num(left) << R"(" y1=")" << num(top + plot_h) << R"(" x2=")" << num(left + plot_w)
       << R"(" y2=")" << num(top + plot_h) << R"(" stroke="black"/>)" << '\n';
    os << R"(<line x1=")" << num(left) << R"(" y1=")" << num(top) << R"(" x2=")" << num(left) << R"(" y2=")"
       << num(top + plot_h) << R"(" stroke="black"/>)" << '\n';
    for (int t = 0; t <= 4; ++t) {
        const double v = ymax * t / 4.0;
        os << R"(<text x=")" << num(left - 6) << R"(" y=")" << num(ypos(v) + 4) << R"(" text-anchor="end">)"
           << detail::fmt(v, 3) << "</text>\n";
    }
    for (std::size_t i = 0; i < data.bars.size(); ++i) {
        const auto& b = data.bars[i];
        const double cx = left + slot * (static_cast<double>(i) + 0.5);
        const double bw = slot * 0.5;
        os << R"(<rect x=")" << num(cx - bw / 2) << R"(" y=")" << num(ypos(b.value)) << R"(" width=")" << num(bw)
           << R"(" height=")" << num(top + plot_h - ypos(b.value)) << R"(" fill="#4a78b5"/>)" << '\n';
        const std::pair<double, const char*> marks[] = {{b.cv10, "X"}, {b.cv05, "V"}, {b.cv01, "I"}};
        for (const auto& [cv, glyph] : marks) {
            if (!std::isfinite(cv)) continue;
            os << R"(<text x=")" << num(cx) << R"(" y=")" << num(ypos(cv) + 4)
               << R"(" text-anchor="middle" font-weight="bold" fill="#b52a2a">)" << glyph << "</text>\n";
        }
        os << R"(<text x=")" << num(cx) << R"(" y=")" << num(top + plot_h + 16) << R"(" text-anchor="middle">)"
           << b.lag << "</text>\n";
    }
    os << R"(<text x=")" << num(left + plot_w / 2) << R"(" y=")" << num(height - 12)
       << R"(" text-anchor="middle">lag (0 = marginal)   critical values: 10% - X, 5% - V, 1% - I</text>)" << '\n';
    os << "</svg>\n";
}

}  // namespace pitspec
