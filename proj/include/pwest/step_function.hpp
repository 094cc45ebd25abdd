#pragma once

#include <span>
#include <vector>

namespace pwest {

/// Compactly supported piecewise-constant function. Value `values[i]` holds on
/// the half-open cell [breaks[i], breaks[i+1]); the function is zero outside
/// [breaks.front(), breaks.back()).
class StepFunction {
public:
    StepFunction() = default;
    StepFunction(std::vector<double> breaks, std::vector<double> values);

    static StepFunction indicator(double a, double b, double height = 1.0);

    double operator()(double x) const noexcept;

    std::span<const double> breaks() const noexcept { return breaks_; }
    std::span<const double> values() const noexcept { return values_; }
    bool empty() const noexcept { return values_.empty(); }
    std::size_t cells() const noexcept { return values_.size(); }

    double support_lo() const noexcept { return empty() ? 0.0 : breaks_.front(); }
    double support_hi() const noexcept { return empty() ? 0.0 : breaks_.back(); }

    double sup_norm() const noexcept;
    /// Smallest |value| over cells with nonzero value (0 if none).
    double inf_abs_on_support() const noexcept;

    /// Exact integral of the function over [a, b].
    double integral(double a, double b) const noexcept;
    /// Exact moment ∫ g(x) x^m dx.
    double moment(int m) const noexcept;

    StepFunction scaled(double factor) const;
    StepFunction squared() const;
    /// x -> g(2^j x - k) * amplitude; exact for the dyadic breakpoints used here.
    StepFunction dilated(int j, long long k, double amplitude) const;

private:
    std::vector<double> breaks_;
    std::vector<double> values_;
};

}  // namespace pwest
