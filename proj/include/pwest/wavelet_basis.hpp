#pragma once

#include <compare>
#include <cstdint>
#include <utility>
#include <vector>

#include "pwest/point_sample.hpp"
#include "pwest/step_function.hpp"

namespace pwest {

/// λ = (j, k). Level j = -1 is the scaling row φ_k = 1_{[k, k+1)}.
struct LambdaIndex {
    int j = -1;
    std::int64_t k = 0;

    auto operator<=>(const LambdaIndex&) const = default;
    bool is_scaling() const noexcept { return j < 0; }
};

enum class Side { analysis, reconstruction };
enum class BasisFamily { haar, filter_biorthogonal };

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Filter-defined biorthogonal family. The analysis wavelet ψ is given as a
/// step-function table; the dual scaling function φ̃ solves
/// φ̃(x) = Σ_k h̃_k φ̃(2x - k) with taps starting at `dual_lowpass_offset`.
/// Since φ is the unit box, the dual high-pass filter is fixed to {1, -1}.
struct FilterSpec {
    StepFunction psi;
    std::vector<double> dual_lowpass;
    int dual_lowpass_offset = 0;
    int declared_moments = -1;  // r; checked when >= 0
    int grid_level = 14;        // reconstruction grid resolution 2^-grid_level
};

struct FrameConstants {
    double lower = 1.0;
    double upper = 1.0;
    bool exact = true;
};

class WaveletBasis {
public:
    static WaveletBasis haar();
    static WaveletBasis filter(FilterSpec spec);
    /// Box-spline family with three vanishing moments on ψ (r = 2):
    /// h̃ = {-1/8, 1/8, 1, 1, 1/8, -1/8} starting at index -2.
    static FilterSpec bior13_spec(int grid_level = 14);

    BasisFamily family() const noexcept { return family_; }
    int grid_level() const noexcept { return grid_level_; }
    const StepFunction& psi() const noexcept { return psi_; }

    /// φ_λ(x) on the analysis side, or φ̃_λ(x) on the reconstruction side.
    /// Filter-family reconstruction values exist only on the dyadic grid.
    double eval(LambdaIndex lambda, double x, Side side = Side::analysis) const;

    /// Support of the analysis function φ_λ.
    Interval support(LambdaIndex lambda) const noexcept;
    Interval reconstruction_support(LambdaIndex lambda) const noexcept;

    /// φ_λ as an explicit step function.
    StepFunction analysis_function(LambdaIndex lambda) const;

    /// ‖φ_λ‖_∞.
    double sup_norm(LambdaIndex lambda) const noexcept;

    int vanishing_moments() const noexcept { return moments_; }
    double s_phi() const noexcept { return s_phi_; }
    double i_phi() const noexcept { return i_phi_; }
    double theta_phi() const noexcept { return s_phi_ * s_phi_ / (i_phi_ * i_phi_); }
    double mu_psi() const noexcept { return psi_.inf_abs_on_support(); }

    /// c1(Φ), c2(Φ). Exact for Haar; for the filter family the extreme
    /// eigenvalues of the Gram matrix of {φ̃_k, ψ̃_{j,k} : j <= max_level}
    /// over translates meeting [-2, 3] (a numerical estimate).
    FrameConstants frame_constants(int max_level = 8) const;

    /// Inclusive translate range at level j whose analysis support meets (lo, hi).
    std::pair<std::int64_t, std::int64_t> translates_overlapping(int j, double lo, double hi) const noexcept;
    /// Inclusive translate range at level j whose analysis support contains t.
    std::pair<std::int64_t, std::int64_t> translates_containing(int j, double t) const noexcept;

    /// Largest deviation from the biorthogonality relations at level 0,
    /// measured on the reconstruction grid.
    double biorthogonality_defect() const;

private:
    WaveletBasis() = default;
    double table_value(const std::vector<double>& table, std::int64_t start, std::int64_t index) const noexcept;

    BasisFamily family_ = BasisFamily::haar;
    StepFunction psi_;
    int moments_ = 0;
    double s_phi_ = 1.0;
    double i_phi_ = 1.0;

    int grid_level_ = 0;
    std::vector<double> dual_lowpass_;
    int dual_offset_ = 0;
    std::int64_t phi_tilde_start_ = 0;
    std::vector<double> phi_tilde_;
    std::int64_t psi_tilde_start_ = 0;
    std::vector<double> psi_tilde_;
};

/// Translates k at level j whose analysis support contains at least one event.
std::vector<std::int64_t> active_indices(const PointSample& sample, int j, const WaveletBasis& basis);

/// Largest m such that ∫ψ x^i dx vanishes (to `tol`) for every i <= m; -1 if ∫ψ != 0.
int count_vanishing_moments(const StepFunction& psi, double tol = 1e-10);

}  // namespace pwest
