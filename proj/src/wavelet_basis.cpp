#include "pwest/wavelet_basis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pwest/error.hpp"

namespace pwest {
namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

double level_amplitude(int j) noexcept { return j < 0 ? 1.0 : std::ldexp(1.0, j / 2) * ((j % 2) ? kSqrt2 : 1.0); }

// Cascade stage tables: φ^{(i)} = Σ_m a_m 1_{[0,1)}(2^i x - m).
struct CascadeTable {
    std::int64_t start = 0;
    std::vector<double> cells;
};

CascadeTable cascade_step(const CascadeTable& prev, int stage, std::span<const double> taps, int offset) {
    const std::int64_t stride = std::int64_t{1} << stage;
    const auto len = static_cast<std::int64_t>(prev.cells.size());
    const auto ntaps = static_cast<std::int64_t>(taps.size());
    CascadeTable next;
    next.start = prev.start + stride * offset;
    next.cells.assign(static_cast<std::size_t>(len + stride * (ntaps - 1)), 0.0);
    for (std::int64_t k = 0; k < ntaps; ++k) {
        const double h = taps[static_cast<std::size_t>(k)];
        if (h == 0.0) continue;
        for (std::int64_t m = 0; m < len; ++m) {
            next.cells[static_cast<std::size_t>(m + stride * k)] += h * prev.cells[static_cast<std::size_t>(m)];
        }
    }
    return next;
}

// ∫ g(x - shift) T(x) dx for a step function g and a grid table T.
double pair_with_table(const StepFunction& g, double shift, const std::vector<double>& table,
                       std::int64_t start, int grid_level) {
    const double h = std::ldexp(1.0, -grid_level);
    double total = 0.0;
    for (std::size_t c = 0; c < table.size(); ++c) {
        if (table[c] == 0.0) continue;
        double lo = std::ldexp(static_cast<double>(start + static_cast<std::int64_t>(c)), -grid_level);
        total += table[c] * g.integral(lo - shift, lo + h - shift);
    }
    return total;
}

}  // namespace

int count_vanishing_moments(const StepFunction& psi, double tol) {
    double reach = std::max({1.0, std::abs(psi.support_lo()), std::abs(psi.support_hi())});
    double width = psi.support_hi() - psi.support_lo();
    int m = -1;
    for (int i = 0; i <= 16; ++i) {
        double scale = psi.sup_norm() * width * std::pow(reach, i);
        if (std::abs(psi.moment(i)) > tol * std::max(1.0, scale)) break;
        m = i;
    }
    return m;
}

WaveletBasis WaveletBasis::haar() {
    WaveletBasis b;
    b.family_ = BasisFamily::haar;
    b.psi_ = StepFunction({0.0, 0.5, 1.0}, {1.0, -1.0});
    b.moments_ = count_vanishing_moments(b.psi_);
    b.s_phi_ = 1.0;
    b.i_phi_ = 1.0;
    return b;
}

FilterSpec WaveletBasis::bior13_spec(int grid_level) {
    FilterSpec spec;
    spec.dual_lowpass = {-0.125, 0.125, 1.0, 1.0, 0.125, -0.125};
    spec.dual_lowpass_offset = -2;
    // ψ = Σ_k g_k φ(2x - k), g_k = (-1)^k h̃_{1-k}
    spec.psi = StepFunction({-1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0},
                            {-0.125, -0.125, 1.0, -1.0, 0.125, 0.125});
    spec.declared_moments = 2;
    spec.grid_level = grid_level;
    return spec;
}

WaveletBasis WaveletBasis::filter(FilterSpec spec) {
    require(!spec.psi.empty(), ErrorKind::invalid_model, "filter basis needs a ψ table");
    for (double v : spec.psi.values()) {
        require(v != 0.0, ErrorKind::invalid_model, "ψ must be nonzero on every cell of its support");
    }
    require(spec.grid_level >= 2 && spec.grid_level <= 20, ErrorKind::invalid_argument,
            "reconstruction grid level must lie in [2, 20]");
    require(spec.dual_lowpass.size() >= 2, ErrorKind::invalid_model, "dual low-pass filter too short");
    // Pair sums h̃_{2m} + h̃_{2m+1} = 2 δ_m (biorthogonality against the box).
    for (std::size_t i = 0; i < spec.dual_lowpass.size(); ++i) {
        int idx = spec.dual_lowpass_offset + static_cast<int>(i);
        if (idx % 2 != 0) continue;
        double pair = spec.dual_lowpass[i] + (i + 1 < spec.dual_lowpass.size() ? spec.dual_lowpass[i + 1] : 0.0);
        require(std::abs(pair - (idx == 0 ? 2.0 : 0.0)) < 1e-12, ErrorKind::invalid_model,
                "dual low-pass taps violate h̃_{2m} + h̃_{2m+1} = 2δ_m");
    }
    if (std::abs(spec.dual_lowpass_offset) % 2 == 1) {
        require(std::abs(spec.dual_lowpass.front()) < 1e-12, ErrorKind::invalid_model,
                "dual low-pass taps violate h̃_{2m} + h̃_{2m+1} = 2δ_m");
    }

    WaveletBasis b;
    b.family_ = BasisFamily::filter_biorthogonal;
    b.psi_ = std::move(spec.psi);
    b.moments_ = count_vanishing_moments(b.psi_);
    require(b.moments_ >= 0, ErrorKind::invalid_model, "ψ must integrate to zero");
    if (spec.declared_moments >= 0) {
        require(b.moments_ >= spec.declared_moments, ErrorKind::invalid_model,
                "ψ has fewer vanishing moments than declared");
    }
    b.s_phi_ = std::max(1.0, b.psi_.sup_norm());
    b.i_phi_ = std::min(1.0, b.psi_.inf_abs_on_support());
    b.grid_level_ = spec.grid_level;
    b.dual_lowpass_ = spec.dual_lowpass;
    b.dual_offset_ = spec.dual_lowpass_offset;

    CascadeTable stage{0, {1.0}};
    CascadeTable before_last;
    for (int i = 0; i < b.grid_level_; ++i) {
        if (i == b.grid_level_ - 1) before_last = stage;
        stage = cascade_step(stage, i, b.dual_lowpass_, b.dual_offset_);
    }
    b.phi_tilde_start_ = stage.start;
    b.phi_tilde_ = std::move(stage.cells);

    // ψ̃(x) = φ̃(2x) - φ̃(2x - 1), built from the previous cascade stage so
    // that both tables live on the same 2^-grid_level grid.
    const std::int64_t half = std::int64_t{1} << (b.grid_level_ - 1);
    const auto prev_len = static_cast<std::int64_t>(before_last.cells.size());
    b.psi_tilde_start_ = before_last.start;
    b.psi_tilde_.assign(static_cast<std::size_t>(prev_len + half), 0.0);
    for (std::int64_t m = 0; m < prev_len; ++m) {
        b.psi_tilde_[static_cast<std::size_t>(m)] += before_last.cells[static_cast<std::size_t>(m)];
        b.psi_tilde_[static_cast<std::size_t>(m + half)] -= before_last.cells[static_cast<std::size_t>(m)];
    }

    double defect = b.biorthogonality_defect();
    require(defect < 1e-8, ErrorKind::invalid_model,
            "filter family is not biorthogonal (defect " + std::to_string(defect) + ")");
    return b;
}

double WaveletBasis::table_value(const std::vector<double>& table, std::int64_t start,
                                 std::int64_t index) const noexcept {
    std::int64_t i = index - start;
    if (i < 0 || i >= static_cast<std::int64_t>(table.size())) return 0.0;
    return table[static_cast<std::size_t>(i)];
}

double WaveletBasis::eval(LambdaIndex lambda, double x, Side side) const {
    const bool analytic = side == Side::analysis || family_ == BasisFamily::haar;
    if (analytic) {
        if (lambda.is_scaling()) {
            double y = x - static_cast<double>(lambda.k);
            return (y >= 0.0 && y < 1.0) ? 1.0 : 0.0;
        }
        double y = std::ldexp(x, lambda.j) - static_cast<double>(lambda.k);
        return level_amplitude(lambda.j) * psi_(y);
    }
    const int g = grid_level_;
    double scaled = std::ldexp(x, g);
    require(scaled == std::floor(scaled) && std::abs(scaled) < 0x1p52, ErrorKind::grid_resolution,
            "reconstruction point is off the 2^-" + std::to_string(g) + " grid");
    const std::int64_t unit = std::int64_t{1} << g;
    if (lambda.is_scaling()) {
        auto idx = static_cast<std::int64_t>(scaled) - lambda.k * unit;
        return table_value(phi_tilde_, phi_tilde_start_, idx);
    }
    require(lambda.j <= 30, ErrorKind::grid_resolution, "reconstruction level too fine");
    auto idx = static_cast<std::int64_t>(std::ldexp(x, g + lambda.j)) - lambda.k * unit;
    return level_amplitude(lambda.j) * table_value(psi_tilde_, psi_tilde_start_, idx);
}

Interval WaveletBasis::support(LambdaIndex lambda) const noexcept {
    if (lambda.is_scaling()) {
        auto k = static_cast<double>(lambda.k);
        return {k, k + 1.0};
    }
    auto k = static_cast<double>(lambda.k);
    return {std::ldexp(k + psi_.support_lo(), -lambda.j), std::ldexp(k + psi_.support_hi(), -lambda.j)};
}

Interval WaveletBasis::reconstruction_support(LambdaIndex lambda) const noexcept {
    if (family_ == BasisFamily::haar) return support(lambda);
    auto k = static_cast<double>(lambda.k);
    const int g = grid_level_;
    if (lambda.is_scaling()) {
        double lo = std::ldexp(static_cast<double>(phi_tilde_start_), -g);
        double hi = std::ldexp(static_cast<double>(phi_tilde_start_ + static_cast<std::int64_t>(phi_tilde_.size())), -g);
        return {lo + k, hi + k};
    }
    double lo = std::ldexp(static_cast<double>(psi_tilde_start_), -g);
    double hi = std::ldexp(static_cast<double>(psi_tilde_start_ + static_cast<std::int64_t>(psi_tilde_.size())), -g);
    return {std::ldexp(lo + k, -lambda.j), std::ldexp(hi + k, -lambda.j)};
}

StepFunction WaveletBasis::analysis_function(LambdaIndex lambda) const {
    if (lambda.is_scaling()) {
        auto k = static_cast<double>(lambda.k);
        return StepFunction::indicator(k, k + 1.0);
    }
    return psi_.dilated(lambda.j, lambda.k, level_amplitude(lambda.j));
}

double WaveletBasis::sup_norm(LambdaIndex lambda) const noexcept {
    if (lambda.is_scaling()) return 1.0;
    return level_amplitude(lambda.j) * psi_.sup_norm();
}

std::pair<std::int64_t, std::int64_t> WaveletBasis::translates_overlapping(int j, double lo,
                                                                           double hi) const noexcept {
    double s0 = j < 0 ? 0.0 : psi_.support_lo();
    double s1 = j < 0 ? 1.0 : psi_.support_hi();
    double ylo = j < 0 ? lo : std::ldexp(lo, j);
    double yhi = j < 0 ? hi : std::ldexp(hi, j);
    auto kmin = static_cast<std::int64_t>(std::floor(ylo - s1)) + 1;
    auto kmax = static_cast<std::int64_t>(std::ceil(yhi - s0)) - 1;
    return {kmin, kmax};
}

std::pair<std::int64_t, std::int64_t> WaveletBasis::translates_containing(int j, double t) const noexcept {
    double s0 = j < 0 ? 0.0 : psi_.support_lo();
    double s1 = j < 0 ? 1.0 : psi_.support_hi();
    double y = j < 0 ? t : std::ldexp(t, j);
    auto kmin = static_cast<std::int64_t>(std::floor(y - s1)) + 1;
    auto kmax = static_cast<std::int64_t>(std::floor(y - s0));
    return {kmin, kmax};
}

double WaveletBasis::biorthogonality_defect() const {
    if (family_ == BasisFamily::haar) return 0.0;
    const StepFunction box = StepFunction::indicator(0.0, 1.0);
    const int g = grid_level_;
    auto reach = static_cast<int>(std::ceil(std::ldexp(static_cast<double>(phi_tilde_.size() + psi_tilde_.size()), -g))) +
                 static_cast<int>(std::ceil(psi_.support_hi() - psi_.support_lo())) + 2;
    double worst = 0.0;
    for (int k = -reach; k <= reach; ++k) {
        const double shift = k;
        double pp = pair_with_table(box, shift, phi_tilde_, phi_tilde_start_, g);
        double sp = pair_with_table(psi_, shift, phi_tilde_, phi_tilde_start_, g);
        double ps = pair_with_table(box, shift, psi_tilde_, psi_tilde_start_, g);
        double ss = pair_with_table(psi_, shift, psi_tilde_, psi_tilde_start_, g);
        double want = k == 0 ? 1.0 : 0.0;
        worst = std::max({worst, std::abs(pp - want), std::abs(sp), std::abs(ps), std::abs(ss - want)});
    }
    return worst;
}

FrameConstants WaveletBasis::frame_constants(int max_level) const {
    if (family_ == BasisFamily::haar) return {1.0, 1.0, true};
    require(max_level >= 0 && max_level <= 10, ErrorKind::invalid_argument,
            "frame-constant estimate supports levels 0..10");
    const int g = grid_level_;
    const std::int64_t unit = std::int64_t{1} << g;
    const auto ntaps = static_cast<std::int64_t>(dual_lowpass_.size());

    // Autocorrelation a_d = <φ̃, φ̃(· - d)> from the cascade table.
    std::vector<double> autocorr(static_cast<std::size_t>(2 * ntaps - 1), 0.0);
    const auto len = static_cast<std::int64_t>(phi_tilde_.size());
    for (std::int64_t d = -(ntaps - 1); d <= ntaps - 1; ++d) {
        double s = 0.0;
        for (std::int64_t p = 0; p < len; ++p) {
            std::int64_t q = p - d * unit;
            if (q >= 0 && q < len) s += phi_tilde_[static_cast<std::size_t>(p)] * phi_tilde_[static_cast<std::size_t>(q)];
        }
        autocorr[static_cast<std::size_t>(d + ntaps - 1)] = std::ldexp(s, -g);
    }

    // Every function is expanded in normalized level-L dual scaling functions.
    const int finest = max_level + 1;
    struct Expansion {
        std::int64_t start = 0;
        std::vector<double> coeffs;
    };
    const double inv_sqrt2 = 1.0 / kSqrt2;
    auto refine = [&](const Expansion& e, std::span<const double> taps, int offset) {
        Expansion out;
        out.start = 2 * e.start + offset;
        out.coeffs.assign(2 * e.coeffs.size() + taps.size() - 2, 0.0);
        for (std::size_t m = 0; m < e.coeffs.size(); ++m) {
            for (std::size_t l = 0; l < taps.size(); ++l) out.coeffs[2 * m + l] += inv_sqrt2 * taps[l] * e.coeffs[m];
        }
        return out;
    };
    const std::vector<double> high = {1.0, -1.0};

    std::vector<Expansion> functions;
    auto add_function = [&](int level, std::int64_t k, bool scaling) {
        Expansion e{k, {1.0}};
        if (scaling) {
            for (int l = level; l < finest; ++l) e = refine(e, dual_lowpass_, dual_offset_);
        } else {
            e = refine(e, high, 0);
            for (int l = level + 1; l < finest; ++l) e = refine(e, dual_lowpass_, dual_offset_);
        }
        functions.push_back(std::move(e));
    };
    const double box_lo = -2.0;
    const double box_hi = 3.0;
    for (std::int64_t k = -static_cast<std::int64_t>(ntaps) - 2; k <= 3 + ntaps; ++k) {
        Interval s = reconstruction_support({-1, k});
        if (s.hi > box_lo && s.lo < box_hi) add_function(0, k, true);
    }
    for (int j = 0; j <= max_level; ++j) {
        const std::int64_t span_k = (std::int64_t{1} << j) * 6 + 2 * ntaps;
        for (std::int64_t k = -span_k; k <= span_k; ++k) {
            Interval s = reconstruction_support({j, k});
            if (s.hi > box_lo && s.lo < box_hi) add_function(j, k, false);
        }
    }

    const auto count = static_cast<Eigen::Index>(functions.size());
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(count, count);
    for (Eigen::Index a = 0; a < count; ++a) {
        const auto& fa = functions[static_cast<std::size_t>(a)];
        // A * c_a: convolve with the autocorrelation
        Expansion conv;
        conv.start = fa.start - (ntaps - 1);
        conv.coeffs.assign(fa.coeffs.size() + autocorr.size() - 1, 0.0);
        for (std::size_t m = 0; m < fa.coeffs.size(); ++m) {
            for (std::size_t d = 0; d < autocorr.size(); ++d) conv.coeffs[m + d] += fa.coeffs[m] * autocorr[d];
        }
        for (Eigen::Index b = a; b < count; ++b) {
            const auto& fb = functions[static_cast<std::size_t>(b)];
            std::int64_t lo = std::max(conv.start, fb.start);
            std::int64_t hi = std::min(conv.start + static_cast<std::int64_t>(conv.coeffs.size()),
                                       fb.start + static_cast<std::int64_t>(fb.coeffs.size()));
            double s = 0.0;
            for (std::int64_t m = lo; m < hi; ++m) {
                s += conv.coeffs[static_cast<std::size_t>(m - conv.start)] * fb.coeffs[static_cast<std::size_t>(m - fb.start)];
            }
            gram(a, b) = s;
            gram(b, a) = s;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram, Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    return {ev.minCoeff(), ev.maxCoeff(), false};
}

std::vector<std::int64_t> active_indices(const PointSample& sample, int j, const WaveletBasis& basis) {
    require(j >= -1, ErrorKind::invalid_argument, "level must be >= -1");
    std::vector<std::int64_t> out;
    for (double t : sample.times) {
        auto [kmin, kmax] = basis.translates_containing(j, t);
        std::int64_t from = out.empty() ? kmin : std::max(kmin, out.back() + 1);
        for (std::int64_t k = from; k <= kmax; ++k) out.push_back(k);
    }
    return out;
}

}  // namespace pwest
