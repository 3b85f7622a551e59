#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace pitspec {

/// PIT values closer than this to 0 or 1 are clamped into the open interval.
inline constexpr double kPitClamp = 1e-12;

[[nodiscard]] constexpr double clamp_unit(double v) noexcept {
    return std::clamp(v, kPitClamp, 1.0 - kPitClamp);
}

/**
 * @brief Ordered generalized residuals U_t, each strictly inside (0,1).
 *
 * Values are clamped on construction so the indicator corner logic used by the
 * exact statistics never sees 0 or 1. The length matches the series the values
 * were produced from; it may be shorter than 2 (statistics then reject it).
 */
class UniformSequence {
public:
    UniformSequence() = default;

    explicit UniformSequence(std::vector<double> values) : values_(std::move(values)) {
        for (auto& v : values_) {
            if (!(v >= 0.0 && v <= 1.0)) {
                throw std::invalid_argument("uniform sequence value outside [0,1]");
            }
            v = clamp_unit(v);
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] bool empty() const noexcept { return values_.empty(); }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] auto begin() const noexcept { return values_.begin(); }
    [[nodiscard]] auto end() const noexcept { return values_.end(); }

private:
    std::vector<double> values_;
};

/// Evaluation point r in [0,1]^p.
class EvalPoint {
public:
    EvalPoint(std::initializer_list<double> r) : EvalPoint(std::vector<double>(r)) {}

    explicit EvalPoint(std::vector<double> r) : r_(std::move(r)) {
        if (r_.empty()) {
            throw std::invalid_argument("evaluation point needs at least one coordinate");
        }
        for (double v : r_) {
            if (!(v >= 0.0 && v <= 1.0)) {
                throw std::invalid_argument("evaluation point coordinate outside [0,1]");
            }
        }
    }

    [[nodiscard]] std::size_t dim() const noexcept { return r_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return r_[i]; }
    [[nodiscard]] std::span<const double> coords() const noexcept { return r_; }

private:
    std::vector<double> r_;
};

}  // namespace pitspec
