#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pwest/estimator.hpp"
#include "pwest/intensity.hpp"
#include "pwest/wavelet_basis.hpp"

namespace pwest {

/// {"kind":"piecewise","pieces":[{"a":0,"b":1,"coeffs":[1]}]},
/// {"kind":"power_spike","beta":0.25} or
/// {"kind":"mixture","weights":[...],"parts":[<intensity>...]}.
Intensity intensity_from_json(const nlohmann::json& j);

/// "haar", "bior13", or {"kind":"filter","psi":{"breaks":[...],"values":[...]},
/// "dual_lowpass":[...],"offset":k,"moments":r,"grid_level":J}. Taps may be
/// numbers or rational strings such as "-1/8".
WaveletBasis basis_from_json(const nlohmann::json& j);

/// Parses "p/q", "p" or a decimal into a double.
double parse_rational(const std::string& text);

/// One experiment, fully reconstructible from a single JSON document.
/// Unknown keys are rejected.
struct ExperimentConfig {
    std::optional<nlohmann::json> intensity;
    std::optional<nlohmann::json> intensity_prime;  // second intensity for `kl`
    std::optional<std::int64_t> n;
    std::optional<double> n_prime;
    std::vector<std::int64_t> n_list;
    EstimatorConfig estimator;
    nlohmann::json basis = "haar";
    std::int64_t replicates = 500;
    std::optional<std::uint64_t> seed;
    int tail_j = -1;
    unsigned threads = 1;
    std::string events;
    std::string out;
    // classcheck
    double alpha = 0.5;
    double p = 2.0;
    double q = 2.0;
    double s = 0.1;
    int level = 20;
    // tailcheck
    std::vector<LambdaIndex> lambdas;
    std::vector<double> u_list;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig read_config(const std::string& path);

inline constexpr const char* kSeedEnvVar = "POISSON_WAVELET_SEED";
inline constexpr std::uint64_t kDefaultSeed = 1;

/// Flag value, then config value, then the environment variable, then the default.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::optional<std::uint64_t> config);

}  // namespace pwest
