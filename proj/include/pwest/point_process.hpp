#pragma once

#include <cstdint>

#include "pwest/intensity.hpp"
#include "pwest/point_sample.hpp"
#include "pwest/step_function.hpp"
#include "pwest/wavelet_basis.hpp"

namespace pwest {

/// Draws N_R ~ Poisson(n ‖f‖₁), then N_R i.i.d. points with density f/‖f‖₁
/// by inversion. The generator is a 64-bit Mersenne Twister seeded through
/// SplitMix64; uniforms take the top 53 bits of each draw.
PointSample simulate(const Intensity& f, std::int64_t n, std::uint64_t seed);

/// Σ_{T in sample} g(T).
double empirical_integral(const PointSample& sample, const StepFunction& g) noexcept;

struct CampbellResult {
    double mean = 0.0;
    double variance = 0.0;
    double target_mean = 0.0;  // n ∫ g f
    double target_var = 0.0;   // n ∫ g² f
    double mean_se = 0.0;
    double variance_se = 0.0;  // from the fourth central moment
    std::int64_t replicates = 0;
};

CampbellResult campbell_check(const Intensity& f, std::int64_t n, const StepFunction& g, std::int64_t replicates,
                              std::uint64_t seed, unsigned threads = 1);

struct ExceedanceResult {
    double frequency = 0.0;
    double bound = 0.0;
    double se = 0.0;  // binomial standard error sqrt(b(1-b)/R) at the bound
    std::int64_t exceedances = 0;
    std::int64_t replicates = 0;

    bool within_bound(double n_se = 3.0) const noexcept { return frequency <= bound + n_se * se; }
};

/// Frequency of ∫g(dN - dμ) >= sqrt(2u ∫g² dμ) + ‖g‖_∞ u / 3 (bound e^{-u});
/// with `two_sided` the left side is |∫g(dN - dμ)| and the bound is 2e^{-u}.
ExceedanceResult deviation_check(const Intensity& f, std::int64_t n, const StepFunction& g, double u,
                                 bool two_sided, std::int64_t replicates, std::uint64_t seed,
                                 unsigned threads = 1);

/// Deviation of the empirical coefficient: frequency of
/// |β̂_λ - β_λ| >= sqrt(2u V_{λ,n}) + ‖φ_λ‖_∞ u / (3n), compared with 2e^{-u}.
ExceedanceResult tail_check(const Intensity& f, std::int64_t n, const WaveletBasis& basis, LambdaIndex lambda,
                            double u, std::int64_t replicates, std::uint64_t seed, unsigned threads = 1);

}  // namespace pwest
