#include "pwest/monte_carlo.hpp"

#include <algorithm>

#include "pwest/point_sample.hpp"
#include "pwest/error.hpp"

namespace pwest {

double tree_sum(std::span<const double> values) noexcept {
    if (values.empty()) return 0.0;
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    std::size_t half = values.size() / 2;
    return tree_sum(values.first(half)) + tree_sum(values.subspan(half));
}

MeanStats summarize(std::span<const double> values) {
    MeanStats st;
    if (values.empty()) return st;
    double count = static_cast<double>(values.size());
    st.mean = tree_sum(values) / count;
    if (values.size() < 2) return st;
    std::vector<double> dev(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        double d = values[i] - st.mean;
        dev[i] = d * d;
    }
    st.variance = tree_sum(dev) / (count - 1.0);
    st.se = std::sqrt(st.variance / count);
    return st;
}

unsigned default_threads() noexcept {
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

PointSample make_sample(std::vector<double> times, std::int64_t n, std::uint64_t seed) {
    require(n >= 1, ErrorKind::invalid_argument, "normalization n must be >= 1");
    std::sort(times.begin(), times.end());
    return PointSample{std::move(times), n, seed};
}

}  // namespace pwest
