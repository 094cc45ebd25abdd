#pragma once

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "pwest/step_function.hpp"

namespace pwest {

/// c * x^exponent. Integer exponents are ordinary polynomial terms; a
/// non-integer exponent is only allowed on segments with a >= 0.
struct PowerTerm {
    double coef = 0.0;
    double exponent = 0.0;
};

/// f restricted to [a, b) as a finite sum of power terms.
struct Segment {
    double a = 0.0;
    double b = 0.0;
    std::vector<PowerTerm> terms;

    double operator()(double x) const noexcept;
    /// ∫_lo^hi of this segment's expression (lo, hi inside [a, b]).
    double integral(double lo, double hi) const noexcept;
};

/// Polynomial on [a, b) with coefficients in ascending degree.
struct PolynomialPiece {
    double a = 0.0;
    double b = 0.0;
    std::vector<double> coeffs;
};

enum class IntensityKind { piecewise_polynomial, power_spike, mixture };

/// Symbolic intensity f = dμ/(n dx): finitely many disjoint segments, each
/// carrying an exactly integrable expression. Immutable once built.
class Intensity {
public:
    static Intensity piecewise(std::vector<PolynomialPiece> pieces);
    /// x^{-beta} on [0, 1), 0 < beta < 1/2.
    static Intensity power_spike(double beta);
    /// Nonnegative combination of other intensities; breakpoints are merged.
    static Intensity mixture(std::span<const double> weights, std::span<const Intensity> parts);

    IntensityKind kind() const noexcept { return kind_; }
    std::optional<double> spike_exponent() const noexcept { return spike_beta_; }
    std::span<const Segment> segments() const noexcept { return segments_; }

    double support_lo() const noexcept { return segments_.front().a; }
    double support_hi() const noexcept { return segments_.back().b; }

    /// f(x); +infinity at a singular point of a power term.
    double operator()(double x) const noexcept;

    double total_mass() const noexcept { return mass_; }
    double l2_norm_squared() const;
    /// +infinity when f is unbounded.
    double sup_norm() const;

    /// ∫_a^b f.
    double integrate(double a, double b) const noexcept;
    /// ∫_a^b w(x) f(x) dx, exact on every cell of the merged partition.
    double integrate(double a, double b, const StepFunction& weight) const noexcept;
    /// ∫_a^b f².
    double integrate_squared(double a, double b) const noexcept;

    double cdf(double x) const noexcept;
    double inverse_cdf(double u) const;

private:
    Intensity() = default;
    void finalize();

    IntensityKind kind_ = IntensityKind::piecewise_polynomial;
    std::optional<double> spike_beta_;
    std::vector<Segment> segments_;
    std::vector<double> cumulative_;  // mass to the left of each segment
    double mass_ = 0.0;
};

/// ∫_a^b x^p dx computed without cancellation for a, b >= 0.
double power_integral(double p, double a, double b) noexcept;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace pwest
