#pragma once

#include <cstdint>
#include <vector>

namespace pwest {

/// One realization of the process: sorted event times together with the
/// normalization n (mean measure n f dx) and the seed that produced it.
struct PointSample {
    std::vector<double> times;
    std::int64_t n = 1;
    std::uint64_t seed = 0;

    std::size_t size() const noexcept { return times.size(); }
};

/// Sorts the times and validates n >= 1.
PointSample make_sample(std::vector<double> times, std::int64_t n, std::uint64_t seed = 0);

}  // namespace pwest
