#include "pwest/point_process.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "pwest/error.hpp"
#include "pwest/monte_carlo.hpp"

namespace pwest {

PointSample simulate(const Intensity& f, std::int64_t n, std::uint64_t seed) {
    require(n >= 1, ErrorKind::invalid_argument, "normalization n must be >= 1");
    std::mt19937_64 rng(mix64(seed));
    std::poisson_distribution<long long> count_dist(static_cast<double>(n) * f.total_mass());
    const long long count = count_dist(rng);
    PointSample sample;
    sample.n = n;
    sample.seed = seed;
    sample.times.reserve(static_cast<std::size_t>(count));
    for (long long i = 0; i < count; ++i) {
        double u = static_cast<double>(rng() >> 11) * 0x1p-53;
        sample.times.push_back(f.inverse_cdf(u));
    }
    std::sort(sample.times.begin(), sample.times.end());
    return sample;
}

double empirical_integral(const PointSample& sample, const StepFunction& g) noexcept {
    if (g.empty()) return 0.0;
    auto first = std::lower_bound(sample.times.begin(), sample.times.end(), g.support_lo());
    auto last = std::lower_bound(first, sample.times.end(), g.support_hi());
    double total = 0.0;
    for (auto it = first; it != last; ++it) total += g(*it);
    return total;
}

CampbellResult campbell_check(const Intensity& f, std::int64_t n, const StepFunction& g, std::int64_t replicates,
                              std::uint64_t seed, unsigned threads) {
    require(replicates >= 100, ErrorKind::invalid_argument, "campbell_check needs >= 100 replicates");
    auto values = run_indexed<double>(static_cast<std::size_t>(replicates), threads, [&](std::size_t r) {
        return empirical_integral(simulate(f, n, replicate_seed(seed, r)), g);
    });
    MeanStats st = summarize(values);
    std::vector<double> fourth(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) fourth[i] = std::pow(values[i] - st.mean, 4);
    const double count = static_cast<double>(replicates);
    const double m4 = tree_sum(fourth) / count;

    CampbellResult out;
    out.mean = st.mean;
    out.variance = st.variance;
    out.mean_se = st.se;
    out.variance_se = std::sqrt(std::max(0.0, m4 - st.variance * st.variance) / count);
    const double nn = static_cast<double>(n);
    out.target_mean = nn * f.integrate(g.support_lo(), g.support_hi(), g);
    out.target_var = nn * f.integrate(g.support_lo(), g.support_hi(), g.squared());
    out.replicates = replicates;
    return out;
}

ExceedanceResult deviation_check(const Intensity& f, std::int64_t n, const StepFunction& g, double u,
                                 bool two_sided, std::int64_t replicates, std::uint64_t seed, unsigned threads) {
    require(u > 0.0, ErrorKind::invalid_argument, "deviation level u must be positive");
    require(replicates >= 1, ErrorKind::invalid_argument, "need at least one replicate");
    const double nn = static_cast<double>(n);
    const double drift = nn * f.integrate(g.support_lo(), g.support_hi(), g);
    const double energy = nn * f.integrate(g.support_lo(), g.support_hi(), g.squared());
    const double level = std::sqrt(2.0 * u * energy) + g.sup_norm() * u / 3.0;

    auto hits = run_indexed<int>(static_cast<std::size_t>(replicates), threads, [&](std::size_t r) {
        double dev = empirical_integral(simulate(f, n, replicate_seed(seed, r)), g) - drift;
        if (two_sided) dev = std::abs(dev);
        return dev >= level ? 1 : 0;
    });
    ExceedanceResult out;
    out.replicates = replicates;
    for (int h : hits) out.exceedances += h;
    out.frequency = static_cast<double>(out.exceedances) / static_cast<double>(replicates);
    out.bound = (two_sided ? 2.0 : 1.0) * std::exp(-u);
    const double b = std::min(out.bound, 1.0);
    out.se = std::sqrt(b * (1.0 - b) / static_cast<double>(replicates));
    return out;
}

ExceedanceResult tail_check(const Intensity& f, std::int64_t n, const WaveletBasis& basis, LambdaIndex lambda,
                            double u, std::int64_t replicates, std::uint64_t seed, unsigned threads) {
    require(replicates >= 10000, ErrorKind::invalid_argument, "tail_check needs >= 10^4 replicates");
    // With g = φ_λ / n: ∫g dN = β̂_λ, ∫g dμ = β_λ, ∫g² dμ = V_{λ,n}.
    StepFunction g = basis.analysis_function(lambda).scaled(1.0 / static_cast<double>(n));
    return deviation_check(f, n, g, u, true, replicates, seed, threads);
}

}  // namespace pwest
