#include "pwest/estimator.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <deque>
#include <string>

#include "pwest/error.hpp"

namespace pwest {
namespace {

struct Accumulator {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::int64_t count = 0;
};

// Streams the events once and hands (k, Σφ, Σφ²) to `emit` in increasing k.
// Translate ranges are nondecreasing along sorted times, so a sliding window
// holds every open accumulator; sums run in event order.
template <class Emit>
void accumulate_level(const PointSample& sample, int j, const WaveletBasis& basis, Emit&& emit) {
    std::deque<Accumulator> window;
    std::int64_t base = 0;
    auto flush_front = [&] {
        if (window.front().count > 0) emit(base, window.front());
        window.pop_front();
        ++base;
    };
    for (double t : sample.times) {
        auto [kmin, kmax] = basis.translates_containing(j, t);
        while (!window.empty() && base < kmin) flush_front();
        if (window.empty()) base = kmin;
        while (base + static_cast<std::int64_t>(window.size()) <= kmax) window.emplace_back();
        for (std::int64_t k = kmin; k <= kmax; ++k) {
            double v = basis.eval({j, k}, t);
            auto& acc = window[static_cast<std::size_t>(k - base)];
            acc.sum += v;
            acc.sum_sq += v * v;
            ++acc.count;
        }
    }
    while (!window.empty()) flush_front();
}

using boost::multiprecision::cpp_int;

// Exact value of a finite double as mantissa * 2^exponent.
struct ExactDouble {
    std::int64_t mantissa = 0;
    int exponent = 0;
};

ExactDouble decompose(double x) {
    int e = 0;
    double m = std::frexp(x, &e);
    return {static_cast<std::int64_t>(std::ldexp(m, 53)), e - 53};
}

}  // namespace

void EstimatorConfig::validate() const {
    require(gamma > 0.0 && std::isfinite(gamma), ErrorKind::invalid_argument, "gamma must be > 0");
    require(c >= 1.0 && std::isfinite(c), ErrorKind::invalid_argument, "cutoff exponent c must be >= 1");
    require(std::isfinite(c_prime), ErrorKind::invalid_argument, "cutoff exponent c' must be finite");
    require(j_grid >= 2 && j_grid <= 20, ErrorKind::invalid_argument, "j_grid must lie in [2, 20]");
}

std::vector<CoefficientRecord> ThresholdedEstimate::kept_records() const {
    std::vector<CoefficientRecord> out;
    std::copy_if(records.begin(), records.end(), std::back_inserter(out),
                 [](const CoefficientRecord& r) { return r.kept; });
    return out;
}

int level_cutoff(std::int64_t n, double c, double c_prime) {
    require(n >= 2, ErrorKind::invalid_cutoff, "level cutoff needs n >= 2");
    const double nn = static_cast<double>(n);
    const double target = std::pow(nn, c) * std::pow(std::log(nn), c_prime);
    require(std::isfinite(target) && target >= 1.0, ErrorKind::invalid_cutoff,
            "n^c (log n)^c' = " + std::to_string(target) + " is below 1");
    int e = 0;
    std::frexp(target, &e);  // target = m 2^e with m in [1/2, 1)
    return e - 1;
}

double empirical_coefficient(const PointSample& sample, LambdaIndex lambda, const WaveletBasis& basis) {
    Interval s = basis.support(lambda);
    auto first = std::lower_bound(sample.times.begin(), sample.times.end(), s.lo);
    auto last = std::lower_bound(first, sample.times.end(), s.hi);
    double total = 0.0;
    for (auto it = first; it != last; ++it) total += basis.eval(lambda, *it);
    return total / static_cast<double>(sample.n);
}

double empirical_variance(const PointSample& sample, LambdaIndex lambda, const WaveletBasis& basis) {
    Interval s = basis.support(lambda);
    auto first = std::lower_bound(sample.times.begin(), sample.times.end(), s.lo);
    auto last = std::lower_bound(first, sample.times.end(), s.hi);
    double total = 0.0;
    for (auto it = first; it != last; ++it) {
        double v = basis.eval(lambda, *it);
        total += v * v;
    }
    const double nn = static_cast<double>(sample.n);
    return total / (nn * nn);
}

double adjusted_variance(double v_hat, LambdaIndex lambda, double gamma, std::int64_t n,
                         const WaveletBasis& basis) {
    require(v_hat >= 0.0, ErrorKind::invalid_argument, "v_hat must be nonnegative");
    require(n >= 2, ErrorKind::invalid_argument, "adjusted variance needs n >= 2");
    const double nn = static_cast<double>(n);
    const double log_n = std::log(nn);
    const double sup = basis.sup_norm(lambda);
    const double scale = sup * sup / (nn * nn);
    return v_hat + std::sqrt(2.0 * gamma * log_n * v_hat * scale) + 3.0 * gamma * log_n * scale;
}

double threshold(double v_tilde, LambdaIndex lambda, double gamma, std::int64_t n, const WaveletBasis& basis) {
    require(v_tilde >= 0.0, ErrorKind::invalid_argument, "v_tilde must be nonnegative");
    require(n >= 2, ErrorKind::invalid_argument, "threshold needs n >= 2");
    const double nn = static_cast<double>(n);
    const double log_n = std::log(nn);
    return std::sqrt(2.0 * gamma * v_tilde * log_n) + gamma * log_n / (3.0 * nn) * basis.sup_norm(lambda);
}

std::vector<CoefficientRecord> level_records(const PointSample& sample, int j, double gamma,
                                             const WaveletBasis& basis) {
    const double nn = static_cast<double>(sample.n);
    std::vector<CoefficientRecord> out;
    accumulate_level(sample, j, basis, [&](std::int64_t k, const Accumulator& acc) {
        if (acc.sum == 0.0) return;
        CoefficientRecord r;
        r.lambda = {j, k};
        r.beta_hat = acc.sum / nn;
        r.v_hat = acc.sum_sq / (nn * nn);
        r.v_tilde = adjusted_variance(r.v_hat, r.lambda, gamma, sample.n, basis);
        r.eta = threshold(r.v_tilde, r.lambda, gamma, sample.n, basis);
        r.kept = std::abs(r.beta_hat) >= r.eta;
        out.push_back(r);
    });
    return out;
}

ThresholdedEstimate estimate(const PointSample& sample, const EstimatorConfig& cfg, const WaveletBasis& basis) {
    cfg.validate();
    require(sample.n >= 2, ErrorKind::invalid_argument, "estimation needs n >= 2");
    ThresholdedEstimate est;
    est.config = cfg;
    est.n = sample.n;
    est.j0 = level_cutoff(sample.n, cfg.c, cfg.c_prime);
    for (int j = -1; j <= est.j0; ++j) {
        auto level = level_records(sample, j, cfg.gamma, basis);
        est.records.insert(est.records.end(), level.begin(), level.end());
    }
    return est;
}

double DyadicGrid::at(std::size_t i) const noexcept {
    return lo + std::ldexp(static_cast<double>(i), -resolution);
}

std::vector<std::pair<double, double>> reconstruct(const ThresholdedEstimate& est, const WaveletBasis& basis,
                                                   const DyadicGrid& grid) {
    if (basis.family() == BasisFamily::filter_biorthogonal) {
        require(grid.resolution <= basis.grid_level(), ErrorKind::grid_resolution,
                "grid finer than the reconstruction tables");
    }
    std::vector<std::pair<double, double>> out(grid.count);
    for (std::size_t i = 0; i < grid.count; ++i) out[i] = {grid.at(i), 0.0};
    if (grid.count == 0) return out;
    for (const auto& r : est.records) {
        if (!r.kept) continue;
        Interval s = basis.reconstruction_support(r.lambda);
        double first = std::ceil(std::ldexp(s.lo - grid.lo, grid.resolution));
        double last = std::floor(std::ldexp(s.hi - grid.lo, grid.resolution));
        auto i0 = static_cast<std::int64_t>(std::max(0.0, first));
        auto i1 = static_cast<std::int64_t>(std::min(static_cast<double>(grid.count - 1), last));
        for (std::int64_t i = i0; i <= i1; ++i) {
            auto idx = static_cast<std::size_t>(i);
            out[idx].second += r.beta_hat * basis.eval(r.lambda, out[idx].first, Side::reconstruction);
        }
    }
    return out;
}

std::vector<std::size_t> bruteforce_select(std::span<const CoefficientRecord> records) {
    const std::size_t m = records.size();
    require(m <= kMaxBruteforceRecords, ErrorKind::too_many_records,
            "exhaustive selection supports at most 20 records, got " + std::to_string(m));

    // Each term η² - β̂² is the exact sum of four doubles (products split by fma),
    // scaled onto a common power-of-two grid as big integers.
    std::vector<std::array<double, 4>> parts(m);
    int min_exp = 0;
    bool any = false;
    for (std::size_t i = 0; i < m; ++i) {
        const double eta = records[i].eta;
        const double b = records[i].beta_hat;
        const double pe = eta * eta;
        const double pb = b * b;
        parts[i] = {pe, std::fma(eta, eta, -pe), -pb, -std::fma(b, b, -pb)};
        for (double v : parts[i]) {
            if (v == 0.0) continue;
            int e = decompose(v).exponent;
            min_exp = any ? std::min(min_exp, e) : e;
            any = true;
        }
    }
    std::vector<cpp_int> terms(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (double v : parts[i]) {
            if (v == 0.0) continue;
            ExactDouble d = decompose(v);
            cpp_int part = d.mantissa;
            part <<= static_cast<unsigned>(d.exponent - min_exp);
            terms[i] += part;
        }
    }

    cpp_int current = 0;
    cpp_int best = 0;
    std::uint32_t mask = 0;
    std::uint32_t best_mask = 0;
    const std::uint64_t total = std::uint64_t{1} << m;
    for (std::uint64_t step = 1; step < total; ++step) {
        const int bit = std::countr_zero(step);  // Gray code: flip one member per step
        const std::uint32_t flag = std::uint32_t{1} << bit;
        mask ^= flag;
        if (mask & flag) {
            current += terms[static_cast<std::size_t>(bit)];
        } else {
            current -= terms[static_cast<std::size_t>(bit)];
        }
        if (current < best || (current == best && std::popcount(mask) > std::popcount(best_mask))) {
            best = current;
            best_mask = mask;
        }
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < m; ++i) {
        if (best_mask & (std::uint32_t{1} << i)) out.push_back(i);
    }
    return out;
}

}  // namespace pwest
