#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "pwest/estimator.hpp"
#include "pwest/intensity.hpp"
#include "pwest/wavelet_basis.hpp"

namespace pwest {

/// Sparse coefficient map λ -> β_λ (true or estimated).
using CoefficientMap = std::map<LambdaIndex, double>;

struct AnalysisRecord {
    LambdaIndex lambda;
    double beta = 0.0;      // ∫ φ_λ f
    double sigma_sq = 0.0;  // ∫ φ_λ² f
    double v_n = 0.0;       // σ² / n
    double f_mass = 0.0;    // ∫_{supp φ_λ} f
};

double true_coefficient(const Intensity& f, LambdaIndex lambda, const WaveletBasis& basis);
double sigma_sq(const Intensity& f, LambdaIndex lambda, const WaveletBasis& basis);
double support_mass(const Intensity& f, LambdaIndex lambda, const WaveletBasis& basis);
AnalysisRecord analysis_record(const Intensity& f, LambdaIndex lambda, std::int64_t n, const WaveletBasis& basis);

/// Inclusive translate range at level j whose analysis support meets supp(f).
std::pair<std::int64_t, std::int64_t> level_translates(const Intensity& f, int j, const WaveletBasis& basis);

/// β_{j,k} and σ²_{j,k} of one whole level, in translate order.
struct LevelCoefficients {
    int j = 0;
    std::int64_t k_first = 0;
    std::vector<double> beta;
    std::vector<double> sigma_sq;
};
LevelCoefficients level_coefficients(const Intensity& f, int j, const WaveletBasis& basis);

/// Σ_{j0 < j <= tail_J} Σ_k β², plus the remainder beyond tail_J. For Haar the
/// remainder is exact by Parseval (‖f‖² minus the energy of the projection on
/// level tail_J + 1); otherwise it is a geometric extrapolation of the last
/// two explicit levels.
struct TailSum {
    double explicit_sum = 0.0;
    double remainder = 0.0;
    bool remainder_exact = false;
    int tail_j = 0;

    double total() const noexcept { return explicit_sum + remainder; }
};

struct OracleTerms {
    double oracle_sum = 0.0;      // Σ_{Γn} min(β², V)
    double log_oracle_sum = 0.0;  // Σ_{Γn} min(β², V log n)
    double energy_in = 0.0;       // Σ_{Γn} β²
    TailSum tail;
    int j0 = 0;
};

OracleTerms oracle_terms(const Intensity& f, std::int64_t n, int j0, const WaveletBasis& basis, int tail_j);

/// Σ_{Γn} min(β², V log n) + Σ_{λ∉Γn} β².
double theorem1_bound(const Intensity& f, std::int64_t n, const EstimatorConfig& cfg, const WaveletBasis& basis,
                      int tail_j);

/// Sequence Besov norm: ‖(α_k)‖_p + [Σ_j 2^{jq(α+1/2-1/p)} ‖(β_{j,k})_k‖_p^q]^{1/q}
/// (sup over j when q = ∞). p, q may be +infinity.
double besov_norm(const CoefficientMap& coeffs, double alpha, double p, double q);

struct WeakBesovResult {
    double radius = 0.0;     // exact sup_t t^{-4s} Σ β² 1{|β| <= σ t}
    double argmax_t = 0.0;
    double grid_sup = 0.0;   // same functional maximized over the supplied grid only
};

/// Exact sup over the breakpoints t = |β_λ|/σ_λ; `t_grid` is a sanity check.
WeakBesovResult weak_besov_radius(std::span<const double> betas, std::span<const double> sigmas, double s,
                                  std::span<const double> t_grid = {});

/// Kullback-Leibler divergence between Poisson processes with intensities
/// s = n f and s' = n' f' (with respect to Lebesgue measure).
double kl_divergence(const Intensity& f, double n, const Intensity& f_prime, double n_prime);

struct RiskReport {
    std::int64_t n = 0;
    std::int64_t replicates = 0;
    double mc_risk = 0.0;
    double mc_se = 0.0;
    double oracle_sum = 0.0;
    double bound_main = 0.0;
    double ratio = 0.0;
    // Functional L2 risk bracket c1 * risk <= E‖f̃ - f‖² <= c2 * risk.
    double l2_lower = 0.0;
    double l2_upper = 0.0;

    bool operator==(const RiskReport&) const = default;
};

struct MonteCarloOptions {
    std::int64_t replicates = 500;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    int tail_j = -1;          // -1: j0 + 6
    int frame_max_level = 8;  // only used for the filter family
};

RiskReport mc_risk(const Intensity& f, std::int64_t n, const EstimatorConfig& cfg, const WaveletBasis& basis,
                   const MonteCarloOptions& opts);

struct RatePoint {
    std::int64_t n = 0;
    double mc_risk = 0.0;
    double mc_se = 0.0;
    double bound_main = 0.0;
};

struct RateStudy {
    std::vector<RatePoint> points;
    double slope = 0.0;         // least squares slope of log risk vs log(n / log n)
    double slope_stderr = 0.0;
    double bound_slope = 0.0;   // same fit applied to bound_main
};

RateStudy rate_study(const Intensity& f, std::span<const std::int64_t> n_list, const EstimatorConfig& cfg,
                     const WaveletBasis& basis, const MonteCarloOptions& opts);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};
LineFit least_squares(std::span<const double> x, std::span<const double> y);

/// Violations of the deterministic two-case comparison between F_λ, β_λ, σ_λ
/// and ‖φ_λ‖_∞ over every λ in Γn meeting supp(f).
struct DichotomyReport {
    std::int64_t checked = 0;
    std::int64_t small_mass = 0;
    std::int64_t violations = 0;
};
DichotomyReport dichotomy_check(const Intensity& f, std::int64_t n, int j0, const WaveletBasis& basis);

}  // namespace pwest
