#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pwest/point_sample.hpp"
#include "pwest/wavelet_basis.hpp"

namespace pwest {

struct EstimatorConfig {
    double gamma = 1.5;     // threshold multiplier
    double c = 1.0;         // cutoff exponent on n
    double c_prime = -1.0;  // cutoff exponent on log n
    int j_grid = 14;        // reconstruction grid level

    /// γ > c: the regime in which the oracle inequality is stated.
    bool oracle_regime() const noexcept { return gamma > c; }
    void validate() const;
};

struct CoefficientRecord {
    LambdaIndex lambda;
    double beta_hat = 0.0;
    double v_hat = 0.0;
    double v_tilde = 0.0;
    double eta = 0.0;
    bool kept = false;
};

/// Sparse thresholded estimate: one record per λ with j <= j0 whose empirical
/// coefficient is nonzero, ordered by (j, k).
struct ThresholdedEstimate {
    std::vector<CoefficientRecord> records;
    EstimatorConfig config;
    std::int64_t n = 0;
    int j0 = 0;

    std::vector<CoefficientRecord> kept_records() const;
};

/// The integer j0 with 2^j0 <= n^c (log n)^c' < 2^(j0+1).
int level_cutoff(std::int64_t n, double c, double c_prime);

/// β̂_λ = (1/n) Σ_T φ_λ(T).
double empirical_coefficient(const PointSample& sample, LambdaIndex lambda, const WaveletBasis& basis);
/// V̂_{λ,n} = (1/n²) Σ_T φ_λ(T)².
double empirical_variance(const PointSample& sample, LambdaIndex lambda, const WaveletBasis& basis);

/// Ṽ = V̂ + sqrt(2γ log n V̂ ‖φ_λ‖²_∞ / n²) + 3γ log n ‖φ_λ‖²_∞ / n².
double adjusted_variance(double v_hat, LambdaIndex lambda, double gamma, std::int64_t n,
                         const WaveletBasis& basis);
/// η = sqrt(2γ Ṽ log n) + γ log n ‖φ_λ‖_∞ / (3n).
double threshold(double v_tilde, LambdaIndex lambda, double gamma, std::int64_t n, const WaveletBasis& basis);

/// Records (β̂, V̂, Ṽ, η, kept) of every λ at level j with nonzero β̂.
std::vector<CoefficientRecord> level_records(const PointSample& sample, int j, double gamma,
                                             const WaveletBasis& basis);

ThresholdedEstimate estimate(const PointSample& sample, const EstimatorConfig& cfg, const WaveletBasis& basis);

/// Points lo + i 2^-resolution, i < count.
struct DyadicGrid {
    double lo = 0.0;
    int resolution = 0;
    std::size_t count = 0;

    double at(std::size_t i) const noexcept;
};

/// Σ_{kept} β̂_λ φ̃_λ(x) at every grid point.
std::vector<std::pair<double, double>> reconstruct(const ThresholdedEstimate& est, const WaveletBasis& basis,
                                                   const DyadicGrid& grid);

/// Exhaustive minimizer of Crit(m) = Σ_{λ∈m} (η_λ² - β̂_λ²) over all subsets of
/// `records`, evaluated in exact arithmetic; ties go to the larger subset.
/// Returns the selected positions in increasing order.
std::vector<std::size_t> bruteforce_select(std::span<const CoefficientRecord> records);

inline constexpr std::size_t kMaxBruteforceRecords = 20;

}  // namespace pwest
