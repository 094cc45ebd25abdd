#include "pwest/analysis.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "pwest/error.hpp"
#include "pwest/monte_carlo.hpp"
#include "pwest/point_process.hpp"

namespace pwest {
namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

double amplitude(int j) noexcept { return std::ldexp(1.0, j / 2) * ((j % 2) ? kSqrt2 : 1.0); }

// Neumaier compensated sum.
class CompensatedSum {
public:
    void add(double x) noexcept {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// β_λ and σ²_λ by exact integration over each cell of φ_λ.
std::pair<double, double> coefficient_pair(const Intensity& f, LambdaIndex lambda, const WaveletBasis& basis) {
    if (lambda.is_scaling()) {
        auto k = static_cast<double>(lambda.k);
        double m = f.integrate(k, k + 1.0);
        return {m, m};
    }
    const auto br = basis.psi().breaks();
    const auto vals = basis.psi().values();
    const double amp = amplitude(lambda.j);
    const auto k = static_cast<double>(lambda.k);
    double beta = 0.0;
    double sigma = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        double lo = std::ldexp(k + br[i], -lambda.j);
        double hi = std::ldexp(k + br[i + 1], -lambda.j);
        double m = f.integrate(lo, hi);
        beta += vals[i] * m;
        sigma += vals[i] * vals[i] * m;
    }
    return {amp * beta, amp * amp * sigma};
}

double level_energy(const Intensity& f, int j, const WaveletBasis& basis) {
    LevelCoefficients lc = level_coefficients(f, j, basis);
    CompensatedSum s;
    for (double b : lc.beta) s.add(b * b);
    return s.value();
}

// ‖f‖² minus the energy of its projection on the step functions of width
// 2^-level, accumulated cell by cell as local variances.
double haar_remainder(const Intensity& f, int level) {
    CompensatedSum s;
    const double h = std::ldexp(1.0, -level);
    auto [kmin, kmax] = std::pair<std::int64_t, std::int64_t>{
        static_cast<std::int64_t>(std::floor(std::ldexp(f.support_lo(), level))),
        static_cast<std::int64_t>(std::ceil(std::ldexp(f.support_hi(), level)))};
    for (std::int64_t k = kmin; k < kmax; ++k) {
        double lo = std::ldexp(static_cast<double>(k), -level);
        double hi = lo + h;
        double m = f.integrate(lo, hi);
        double sq = f.integrate_squared(lo, hi);
        s.add(std::max(0.0, sq - m * m / h));
    }
    return s.value();
}

}  // namespace

double true_coefficient(const Intensity& f, LambdaIndex lambda, const WaveletBasis& basis) {
    return coefficient_pair(f, lambda, basis).first;
}

double sigma_sq(const Intensity& f, LambdaIndex lambda, const WaveletBasis& basis) {
    return coefficient_pair(f, lambda, basis).second;
}

double support_mass(const Intensity& f, LambdaIndex lambda, const WaveletBasis& basis) {
    Interval s = basis.support(lambda);
    return f.integrate(s.lo, s.hi);
}

AnalysisRecord analysis_record(const Intensity& f, LambdaIndex lambda, std::int64_t n, const WaveletBasis& basis) {
    auto [beta, sig] = coefficient_pair(f, lambda, basis);
    AnalysisRecord r;
    r.lambda = lambda;
    r.beta = beta;
    r.sigma_sq = sig;
    r.v_n = sig / static_cast<double>(n);
    r.f_mass = support_mass(f, lambda, basis);
    return r;
}

std::pair<std::int64_t, std::int64_t> level_translates(const Intensity& f, int j, const WaveletBasis& basis) {
    return basis.translates_overlapping(j, f.support_lo(), f.support_hi());
}

LevelCoefficients level_coefficients(const Intensity& f, int j, const WaveletBasis& basis) {
    auto [kmin, kmax] = level_translates(f, j, basis);
    LevelCoefficients out;
    out.j = j;
    out.k_first = kmin;
    const auto count = static_cast<std::size_t>(std::max<std::int64_t>(0, kmax - kmin + 1));
    out.beta.resize(count);
    out.sigma_sq.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        auto [b, s] = coefficient_pair(f, {j, kmin + static_cast<std::int64_t>(i)}, basis);
        out.beta[i] = b;
        out.sigma_sq[i] = s;
    }
    return out;
}

OracleTerms oracle_terms(const Intensity& f, std::int64_t n, int j0, const WaveletBasis& basis, int tail_j) {
    require(n >= 2, ErrorKind::invalid_argument, "oracle terms need n >= 2");
    require(tail_j > j0, ErrorKind::invalid_argument, "tail level must exceed j0");
    const double nn = static_cast<double>(n);
    const double log_n = std::log(nn);
    CompensatedSum oracle;
    CompensatedSum log_oracle;
    CompensatedSum energy;
    for (int j = -1; j <= j0; ++j) {
        LevelCoefficients lc = level_coefficients(f, j, basis);
        for (std::size_t i = 0; i < lc.beta.size(); ++i) {
            const double b2 = lc.beta[i] * lc.beta[i];
            const double v = lc.sigma_sq[i] / nn;
            oracle.add(std::min(b2, v));
            log_oracle.add(std::min(b2, v * log_n));
            energy.add(b2);
        }
    }
    OracleTerms out;
    out.j0 = j0;
    out.oracle_sum = oracle.value();
    out.log_oracle_sum = log_oracle.value();
    out.energy_in = energy.value();

    CompensatedSum tail;
    double last = 0.0;
    double before_last = 0.0;
    for (int j = j0 + 1; j <= tail_j; ++j) {
        before_last = last;
        last = level_energy(f, j, basis);
        tail.add(last);
    }
    out.tail.tail_j = tail_j;
    out.tail.explicit_sum = tail.value();
    if (basis.family() == BasisFamily::haar) {
        out.tail.remainder = haar_remainder(f, tail_j + 1);
        out.tail.remainder_exact = true;
    } else {
        double ratio = before_last > 0.0 ? last / before_last : 0.0;
        out.tail.remainder = (ratio > 0.0 && ratio < 1.0) ? last * ratio / (1.0 - ratio) : 0.0;
        out.tail.remainder_exact = false;
    }
    return out;
}

double theorem1_bound(const Intensity& f, std::int64_t n, const EstimatorConfig& cfg, const WaveletBasis& basis,
                      int tail_j) {
    const int j0 = level_cutoff(n, cfg.c, cfg.c_prime);
    OracleTerms t = oracle_terms(f, n, j0, basis, tail_j < 0 ? j0 + 6 : tail_j);
    return t.log_oracle_sum + t.tail.total();
}

double besov_norm(const CoefficientMap& coeffs, double alpha, double p, double q) {
    require(p >= 1.0 && q >= 1.0, ErrorKind::invalid_argument, "Besov indices need p, q >= 1");
    require(alpha > 0.0, ErrorKind::invalid_argument, "Besov smoothness must be positive");
    const bool p_inf = std::isinf(p);
    const bool q_inf = std::isinf(q);
    const double inv_p = p_inf ? 0.0 : 1.0 / p;

    std::map<int, double> level_norm;  // ‖(β_{j,k})_k‖_p, raised to p while accumulating
    for (const auto& [lambda, value] : coeffs) {
        double& acc = level_norm[lambda.j];
        if (p_inf) {
            acc = std::max(acc, std::abs(value));
        } else {
            acc += std::pow(std::abs(value), p);
        }
    }
    if (!p_inf) {
        for (auto& [j, acc] : level_norm) acc = std::pow(acc, inv_p);
    }

    double scaling = 0.0;
    double detail = 0.0;
    for (const auto& [j, norm] : level_norm) {
        if (j < 0) {
            scaling = norm;
            continue;
        }
        double weighted = std::exp2(j * (alpha + 0.5 - inv_p)) * norm;
        if (q_inf) {
            detail = std::max(detail, weighted);
        } else {
            detail += std::pow(weighted, q);
        }
    }
    if (!q_inf) detail = std::pow(detail, 1.0 / q);
    return scaling + detail;
}

WeakBesovResult weak_besov_radius(std::span<const double> betas, std::span<const double> sigmas, double s,
                                  std::span<const double> t_grid) {
    require(betas.size() == sigmas.size(), ErrorKind::invalid_argument, "need one σ per coefficient");
    require(s > 0.0 && s < 0.5, ErrorKind::invalid_argument, "weak Besov index s must lie in (0, 1/2)");
    std::vector<std::pair<double, double>> points;  // (breakpoint |β|/σ, β²)
    points.reserve(betas.size());
    for (std::size_t i = 0; i < betas.size(); ++i) {
        if (betas[i] == 0.0 || !(sigmas[i] > 0.0)) continue;
        points.emplace_back(std::abs(betas[i]) / sigmas[i], betas[i] * betas[i]);
    }
    std::sort(points.begin(), points.end());

    const double power = -4.0 * s;
    WeakBesovResult out;
    std::vector<double> prefix(points.size());
    CompensatedSum running;
    for (std::size_t i = 0; i < points.size(); ++i) {
        running.add(points[i].second);
        prefix[i] = running.value();
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (i + 1 < points.size() && points[i + 1].first == points[i].first) continue;
        double value = std::pow(points[i].first, power) * prefix[i];
        if (value > out.radius) {
            out.radius = value;
            out.argmax_t = points[i].first;
        }
    }
    for (double t : t_grid) {
        require(t > 0.0, ErrorKind::invalid_argument, "t grid must be positive");
        auto it = std::upper_bound(points.begin(), points.end(), std::make_pair(t, std::numeric_limits<double>::infinity()));
        if (it == points.begin()) continue;
        double value = std::pow(t, power) * prefix[static_cast<std::size_t>(it - points.begin()) - 1];
        out.grid_sup = std::max(out.grid_sup, value);
    }
    return out;
}

double kl_divergence(const Intensity& f, double n, const Intensity& f_prime, double n_prime) {
    require(n > 0.0 && n_prime > 0.0, ErrorKind::invalid_argument, "intensity scales must be positive");
    std::vector<double> knots;
    for (const auto& s : f.segments()) {
        knots.push_back(s.a);
        knots.push_back(s.b);
    }
    for (const auto& s : f_prime.segments()) {
        knots.push_back(s.a);
        knots.push_back(s.b);
    }
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

    auto covering = [](const Intensity& g, double lo, double hi) -> const Segment* {
        for (const auto& s : g.segments()) {
            if (s.a <= lo && hi <= s.b && !s.terms.empty()) return &s;
        }
        return nullptr;
    };
    auto constant_value = [](const Segment& s) -> std::optional<double> {
        double v = 0.0;
        for (const auto& t : s.terms) {
            if (t.exponent != 0.0) return std::nullopt;
            v += t.coef;
        }
        return v;
    };

    boost::math::quadrature::tanh_sinh<double> integrator(15);
    CompensatedSum total;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double lo = knots[i];
        const double hi = knots[i + 1];
        const Segment* s = covering(f, lo, hi);
        const Segment* sp = covering(f_prime, lo, hi);
        if (s == nullptr) {
            if (sp != nullptr) total.add(n_prime * sp->integral(lo, hi));
            continue;
        }
        require(sp != nullptr, ErrorKind::support_violation,
                "s' vanishes on [" + std::to_string(lo) + ", " + std::to_string(hi) + ") where s > 0");
        auto c = constant_value(*s);
        auto cp = constant_value(*sp);
        if (c && cp) {
            const double a = n * *c;
            const double b = n_prime * *cp;
            require(!(a > 0.0 && b <= 0.0), ErrorKind::support_violation, "s' vanishes where s > 0");
            double integrand = a > 0.0 ? b - a - a * std::log(b / a) : b;
            total.add(integrand * (hi - lo));
            continue;
        }
        auto integrand = [&](double x) {
            const double a = n * (*s)(x);
            const double b = n_prime * (*sp)(x);
            if (a <= 0.0) return b;
            return b - a - a * std::log(b / a);
        };
        total.add(integrator.integrate(integrand, lo, hi, 1e-13));
    }
    return total.value();
}

RiskReport mc_risk(const Intensity& f, std::int64_t n, const EstimatorConfig& cfg, const WaveletBasis& basis,
                   const MonteCarloOptions& opts) {
    require(opts.replicates >= 2, ErrorKind::invalid_argument, "mc_risk needs at least 2 replicates");
    cfg.validate();
    const int j0 = level_cutoff(n, cfg.c, cfg.c_prime);
    const int tail_j = opts.tail_j < 0 ? j0 + 6 : opts.tail_j;
    const OracleTerms terms = oracle_terms(f, n, j0, basis, tail_j);
    const double energy = terms.energy_in + terms.tail.total();

    auto losses = run_indexed<double>(static_cast<std::size_t>(opts.replicates), opts.threads, [&](std::size_t r) {
        PointSample sample = simulate(f, n, replicate_seed(opts.seed, r));
        ThresholdedEstimate est = estimate(sample, cfg, basis);
        CompensatedSum err;
        CompensatedSum kept_energy;
        for (const auto& rec : est.records) {
            if (!rec.kept) continue;
            const double b = true_coefficient(f, rec.lambda, basis);
            err.add((rec.beta_hat - b) * (rec.beta_hat - b));
            kept_energy.add(b * b);
        }
        return err.value() + (energy - kept_energy.value());
    });
    MeanStats st = summarize(losses);

    RiskReport rep;
    rep.n = n;
    rep.replicates = opts.replicates;
    rep.mc_risk = st.mean;
    rep.mc_se = st.se;
    rep.oracle_sum = terms.oracle_sum;
    rep.bound_main = terms.log_oracle_sum + terms.tail.total();
    rep.ratio = rep.mc_risk / rep.bound_main;
    FrameConstants fc = basis.frame_constants(opts.frame_max_level);
    rep.l2_lower = fc.lower * rep.mc_risk;
    rep.l2_upper = fc.upper * rep.mc_risk;
    return rep;
}

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size() && x.size() >= 2, ErrorKind::invalid_argument, "line fit needs >= 2 points");
    const double m = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (x.size() > 2) {
        double ssr = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double r = y[i] - fit.intercept - fit.slope * x[i];
            ssr += r * r;
        }
        fit.slope_stderr = std::sqrt(ssr / (m - 2.0) / sxx);
    }
    return fit;
}

RateStudy rate_study(const Intensity& f, std::span<const std::int64_t> n_list, const EstimatorConfig& cfg,
                     const WaveletBasis& basis, const MonteCarloOptions& opts) {
    require(n_list.size() >= 4, ErrorKind::invalid_argument, "rate study needs at least 4 values of n");
    for (std::size_t i = 1; i < n_list.size(); ++i) {
        require(n_list[i] > n_list[i - 1], ErrorKind::invalid_argument, "n list must be strictly increasing");
    }
    RateStudy study;
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<double> bs;
    for (std::int64_t n : n_list) {
        MonteCarloOptions per_n = opts;
        per_n.seed = replicate_seed(opts.seed, static_cast<std::uint64_t>(n));
        RiskReport rep = mc_risk(f, n, cfg, basis, per_n);
        study.points.push_back({n, rep.mc_risk, rep.mc_se, rep.bound_main});
        const double nn = static_cast<double>(n);
        xs.push_back(std::log(nn / std::log(nn)));
        ys.push_back(std::log(rep.mc_risk));
        bs.push_back(std::log(rep.bound_main));
    }
    LineFit fit = least_squares(xs, ys);
    study.slope = fit.slope;
    study.slope_stderr = fit.slope_stderr;
    study.bound_slope = least_squares(xs, bs).slope;
    return study;
}

DichotomyReport dichotomy_check(const Intensity& f, std::int64_t n, int j0, const WaveletBasis& basis) {
    const double nn = static_cast<double>(n);
    const double rate = std::log(nn) / nn;
    const double theta = basis.theta_phi();
    constexpr double slack = 1.0 + 1e-12;
    DichotomyReport rep;
    for (int j = -1; j <= j0; ++j) {
        auto [kmin, kmax] = level_translates(f, j, basis);
        for (std::int64_t k = kmin; k <= kmax; ++k) {
            AnalysisRecord r = analysis_record(f, {j, k}, n, basis);
            ++rep.checked;
            bool ok = true;
            if (r.f_mass <= theta * rate) {
                ++rep.small_mass;
                ok = r.beta * r.beta <= theta * theta * r.sigma_sq * rate * slack;
            } else {
                ok = basis.sup_norm(r.lambda) * rate <= std::sqrt(r.sigma_sq * rate) * slack;
            }
            if (!ok) ++rep.violations;
        }
    }
    return rep;
}

}  // namespace pwest
