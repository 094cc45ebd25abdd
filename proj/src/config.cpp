#include "pwest/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include "pwest/error.hpp"
#include "pwest/io.hpp"

namespace pwest {
namespace {

using nlohmann::json;

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    require(j.is_object(), ErrorKind::config_error, where + " must be a JSON object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& item : j.items()) {
        require(ok.count(item.key()) > 0, ErrorKind::config_error,
                "unknown key '" + item.key() + "' in " + where);
    }
}

const json& member(const json& j, const char* key, const std::string& where) {
    require(j.contains(key), ErrorKind::config_error, where + " is missing '" + key + "'");
    return j.at(key);
}

double number(const json& j, const std::string& where) {
    require(j.is_number(), ErrorKind::config_error, where + " must be a number");
    return j.get<double>();
}

std::int64_t integer(const json& j, const std::string& where) {
    require(j.is_number_integer(), ErrorKind::config_error, where + " must be an integer");
    return j.get<std::int64_t>();
}

std::vector<double> numbers(const json& j, const std::string& where) {
    require(j.is_array(), ErrorKind::config_error, where + " must be an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

double tap(const json& j, const std::string& where) {
    if (j.is_string()) {
        try {
            return parse_rational(j.get<std::string>());
        } catch (const Error& e) {
            throw Error(ErrorKind::config_error, where + ": " + e.what());
        }
    }
    return number(j, where);
}

}  // namespace

double parse_rational(const std::string& text) {
    const auto slash = text.find('/');
    if (slash == std::string::npos) return parse_double(text, "rational");
    const double num = parse_double(text.substr(0, slash), "rational numerator");
    const double den = parse_double(text.substr(slash + 1), "rational denominator");
    require(den != 0.0, ErrorKind::parse_error, "rational '" + text + "' has a zero denominator");
    return num / den;
}

Intensity intensity_from_json(const json& j) {
    require(j.is_object(), ErrorKind::config_error, "intensity must be a JSON object");
    const std::string kind = member(j, "kind", "intensity").is_string() ? j.at("kind").get<std::string>() : "";
    if (kind == "piecewise") {
        check_keys(j, {"kind", "pieces"}, "piecewise intensity");
        const json& pieces = member(j, "pieces", "piecewise intensity");
        require(pieces.is_array(), ErrorKind::config_error, "pieces must be an array");
        std::vector<PolynomialPiece> out;
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            const std::string where = "pieces[" + std::to_string(i) + "]";
            check_keys(pieces[i], {"a", "b", "coeffs"}, where);
            PolynomialPiece p;
            p.a = number(member(pieces[i], "a", where), where + ".a");
            p.b = number(member(pieces[i], "b", where), where + ".b");
            p.coeffs = numbers(member(pieces[i], "coeffs", where), where + ".coeffs");
            out.push_back(std::move(p));
        }
        return Intensity::piecewise(std::move(out));
    }
    if (kind == "power_spike") {
        check_keys(j, {"kind", "beta"}, "power_spike intensity");
        return Intensity::power_spike(number(member(j, "beta", "power_spike intensity"), "beta"));
    }
    if (kind == "mixture") {
        check_keys(j, {"kind", "weights", "parts"}, "mixture intensity");
        std::vector<double> weights = numbers(member(j, "weights", "mixture intensity"), "weights");
        const json& parts = member(j, "parts", "mixture intensity");
        require(parts.is_array(), ErrorKind::config_error, "parts must be an array");
        std::vector<Intensity> components;
        for (const auto& part : parts) components.push_back(intensity_from_json(part));
        return Intensity::mixture(weights, components);
    }
    throw Error(ErrorKind::config_error, "unknown intensity kind '" + kind + "'");
}

WaveletBasis basis_from_json(const json& j) {
    if (j.is_string()) {
        const auto name = j.get<std::string>();
        if (name == "haar") return WaveletBasis::haar();
        if (name == "bior13") return WaveletBasis::filter(WaveletBasis::bior13_spec());
        throw Error(ErrorKind::config_error, "unknown basis '" + name + "'");
    }
    check_keys(j, {"kind", "psi", "dual_lowpass", "offset", "moments", "grid_level"}, "basis");
    require(member(j, "kind", "basis") == "filter", ErrorKind::config_error, "basis kind must be 'filter'");
    const json& psi = member(j, "psi", "basis");
    check_keys(psi, {"breaks", "values"}, "basis.psi");
    FilterSpec spec;
    spec.psi = StepFunction(numbers(member(psi, "breaks", "basis.psi"), "basis.psi.breaks"),
                            numbers(member(psi, "values", "basis.psi"), "basis.psi.values"));
    const json& taps = member(j, "dual_lowpass", "basis");
    require(taps.is_array(), ErrorKind::config_error, "basis.dual_lowpass must be an array");
    for (std::size_t i = 0; i < taps.size(); ++i) {
        spec.dual_lowpass.push_back(tap(taps[i], "basis.dual_lowpass[" + std::to_string(i) + "]"));
    }
    spec.dual_lowpass_offset = static_cast<int>(integer(member(j, "offset", "basis"), "basis.offset"));
    if (j.contains("moments")) spec.declared_moments = static_cast<int>(integer(j.at("moments"), "basis.moments"));
    if (j.contains("grid_level")) spec.grid_level = static_cast<int>(integer(j.at("grid_level"), "basis.grid_level"));
    return WaveletBasis::filter(std::move(spec));
}

ExperimentConfig config_from_json(const json& j) {
    check_keys(j,
               {"intensity", "intensity_prime", "n", "n_prime", "n_list", "gamma", "c", "c_prime", "j_grid", "basis",
                "replicates", "seed", "tail_j", "threads", "events", "out", "alpha", "p", "q", "s", "level",
                "lambdas", "u"},
               "config");
    ExperimentConfig cfg;
    if (j.contains("intensity")) cfg.intensity = j.at("intensity");
    if (j.contains("intensity_prime")) cfg.intensity_prime = j.at("intensity_prime");
    if (j.contains("n")) cfg.n = integer(j.at("n"), "n");
    if (j.contains("n_prime")) cfg.n_prime = number(j.at("n_prime"), "n_prime");
    if (j.contains("n_list")) {
        require(j.at("n_list").is_array(), ErrorKind::config_error, "n_list must be an array");
        for (const auto& v : j.at("n_list")) cfg.n_list.push_back(integer(v, "n_list entry"));
    }
    if (j.contains("gamma")) cfg.estimator.gamma = number(j.at("gamma"), "gamma");
    if (j.contains("c")) cfg.estimator.c = number(j.at("c"), "c");
    if (j.contains("c_prime")) cfg.estimator.c_prime = number(j.at("c_prime"), "c_prime");
    if (j.contains("j_grid")) cfg.estimator.j_grid = static_cast<int>(integer(j.at("j_grid"), "j_grid"));
    if (j.contains("basis")) cfg.basis = j.at("basis");
    if (j.contains("replicates")) cfg.replicates = integer(j.at("replicates"), "replicates");
    if (j.contains("seed")) {
        require(j.at("seed").is_number_unsigned(), ErrorKind::config_error, "seed must be a nonnegative integer");
        cfg.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("tail_j")) cfg.tail_j = static_cast<int>(integer(j.at("tail_j"), "tail_j"));
    if (j.contains("threads")) {
        const auto t = integer(j.at("threads"), "threads");
        require(t >= 1, ErrorKind::config_error, "threads must be >= 1");
        cfg.threads = static_cast<unsigned>(t);
    }
    if (j.contains("events")) {
        require(j.at("events").is_string(), ErrorKind::config_error, "events must be a path string");
        cfg.events = j.at("events").get<std::string>();
    }
    if (j.contains("out")) {
        require(j.at("out").is_string(), ErrorKind::config_error, "out must be a path string");
        cfg.out = j.at("out").get<std::string>();
    }
    if (j.contains("alpha")) cfg.alpha = number(j.at("alpha"), "alpha");
    if (j.contains("p")) cfg.p = number(j.at("p"), "p");
    if (j.contains("q")) cfg.q = number(j.at("q"), "q");
    if (j.contains("s")) cfg.s = number(j.at("s"), "s");
    if (j.contains("level")) cfg.level = static_cast<int>(integer(j.at("level"), "level"));
    if (j.contains("lambdas")) {
        require(j.at("lambdas").is_array(), ErrorKind::config_error, "lambdas must be an array of [j, k] pairs");
        for (const auto& pair : j.at("lambdas")) {
            require(pair.is_array() && pair.size() == 2, ErrorKind::config_error, "each lambda must be [j, k]");
            cfg.lambdas.push_back({static_cast<int>(integer(pair[0], "lambda j")), integer(pair[1], "lambda k")});
        }
    }
    if (j.contains("u")) cfg.u_list = numbers(j.at("u"), "u");
    return cfg;
}

ExperimentConfig read_config(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorKind::config_error, "cannot open config '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::config_error, "config '" + path + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::optional<std::uint64_t> config) {
    if (flag) return *flag;
    if (config) return *config;
    if (const char* env = std::getenv(kSeedEnvVar); env != nullptr && *env != '\0') {
        const auto v = parse_int(env, kSeedEnvVar);
        require(v >= 0, ErrorKind::config_error, std::string(kSeedEnvVar) + " must be nonnegative");
        return static_cast<std::uint64_t>(v);
    }
    return kDefaultSeed;
}

}  // namespace pwest
