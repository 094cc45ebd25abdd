#include "pwest/step_function.hpp"

#include <algorithm>
#include <cmath>

#include "pwest/error.hpp"

namespace pwest {

StepFunction::StepFunction(std::vector<double> breaks, std::vector<double> values)
    : breaks_(std::move(breaks)), values_(std::move(values)) {
    if (breaks_.empty() && values_.empty()) return;
    require(breaks_.size() == values_.size() + 1, ErrorKind::invalid_argument,
            "step function needs one more breakpoint than values");
    for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
        require(std::isfinite(breaks_[i]) && breaks_[i] < breaks_[i + 1],
                ErrorKind::invalid_argument, "step function breakpoints must increase");
    }
    for (double v : values_) {
        require(std::isfinite(v), ErrorKind::invalid_argument, "step function values must be finite");
    }
}

StepFunction StepFunction::indicator(double a, double b, double height) {
    return StepFunction({a, b}, {height});
}

double StepFunction::operator()(double x) const noexcept {
    if (empty() || x < breaks_.front() || x >= breaks_.back()) return 0.0;
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
    return values_[static_cast<std::size_t>(it - breaks_.begin()) - 1];
}

double StepFunction::sup_norm() const noexcept {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double StepFunction::inf_abs_on_support() const noexcept {
    double m = 0.0;
    for (double v : values_) {
        if (v != 0.0) m = (m == 0.0) ? std::abs(v) : std::min(m, std::abs(v));
    }
    return m;
}

double StepFunction::integral(double a, double b) const noexcept {
    double total = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        double lo = std::max(a, breaks_[i]);
        double hi = std::min(b, breaks_[i + 1]);
        if (hi > lo) total += values_[i] * (hi - lo);
    }
    return total;
}

double StepFunction::moment(int m) const noexcept {
    double total = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        double a = breaks_[i];
        double b = breaks_[i + 1];
        total += values_[i] * (std::pow(b, m + 1) - std::pow(a, m + 1)) / (m + 1);
    }
    return total;
}

StepFunction StepFunction::scaled(double factor) const {
    auto v = values_;
    for (double& x : v) x *= factor;
    return StepFunction(breaks_, std::move(v));
}

StepFunction StepFunction::squared() const {
    auto v = values_;
    for (double& x : v) x *= x;
    return StepFunction(breaks_, std::move(v));
}

StepFunction StepFunction::dilated(int j, long long k, double amplitude) const {
    auto b = breaks_;
    for (double& x : b) x = std::ldexp(x + static_cast<double>(k), -j);
    auto v = values_;
    for (double& x : v) x *= amplitude;
    return StepFunction(std::move(b), std::move(v));
}

}  // namespace pwest
