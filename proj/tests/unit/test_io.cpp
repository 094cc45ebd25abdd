#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <limits>
#include <random>
#include <sstream>

#include "pwest/config.hpp"
#include "pwest/error.hpp"
#include "pwest/io.hpp"

using namespace pwest;
using nlohmann::json;

namespace {

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::invalid_argument;
}

double random_double(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> mant(-1.0, 1.0);
    std::uniform_int_distribution<int> expo(-300, 300);
    return std::ldexp(mant(rng), expo(rng));
}

}  // namespace

TEST_CASE("parse events") {
    std::istringstream a("0.3\n0.1\n");
    PointSample s = parse_events(a, 4);
    CHECK(s.times == std::vector<double>{0.1, 0.3});
    CHECK(s.n == 4);

    std::istringstream b("# hdr\n");
    CHECK(parse_events(b, 4).times.empty());
    std::istringstream empty("");
    CHECK(parse_events(empty, 4).times.empty());

    std::istringstream bad("0.5\n\nabc\n");
    try {
        parse_events(bad, 4);
        FAIL("malformed line accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::parse_error);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    std::istringstream first("abc\n");
    try {
        parse_events(first, 4);
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    }
    std::istringstream trailing("0.5x\n");
    CHECK(kind_of([&] { parse_events(trailing, 4); }) == ErrorKind::parse_error);
    CHECK(kind_of([] { read_events("/nonexistent/file", 4); }) == ErrorKind::parse_error);
}

TEST_CASE("event files round trip") {
    std::mt19937_64 rng(1);
    std::vector<double> times(100);
    for (double& t : times) t = random_double(rng);
    PointSample s = make_sample(times, 77, 5);
    std::ostringstream out;
    write_events(out, s);
    std::istringstream in(out.str());
    CHECK(parse_events(in, 77).times == s.times);
}

TEST_CASE("coefficient CSV round trip") {
    std::mt19937_64 rng(2);
    std::vector<CoefficientRecord> recs;
    for (int i = 0; i < 50; ++i) {
        CoefficientRecord r;
        r.lambda = {i % 7 - 1, i * 13 - 100};
        r.beta_hat = random_double(rng);
        r.v_hat = std::abs(random_double(rng));
        r.v_tilde = std::abs(random_double(rng));
        r.eta = std::abs(random_double(rng));
        r.kept = i % 3 == 0;
        recs.push_back(r);
    }
    std::ostringstream out;
    write_coefficients(out, recs);
    std::istringstream in(out.str());
    auto back = read_coefficients(in);
    REQUIRE(back.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
        CHECK(back[i].lambda == recs[i].lambda);
        CHECK(back[i].beta_hat == recs[i].beta_hat);
        CHECK(back[i].v_hat == recs[i].v_hat);
        CHECK(back[i].v_tilde == recs[i].v_tilde);
        CHECK(back[i].eta == recs[i].eta);
        CHECK(back[i].kept == recs[i].kept);
    }
    std::ostringstream again;
    write_coefficients(again, back);
    CHECK(again.str() == out.str());

    std::ostringstream none;
    write_coefficients(none, std::vector<CoefficientRecord>{});
    CHECK(none.str() == std::string(kCoefficientHeader) + "\n");
    std::istringstream none_in(none.str());
    CHECK(read_coefficients(none_in).empty());

    std::istringstream corrupt("j,k,beta,v_hat,v_tilde,eta,kept\n");
    CHECK(kind_of([&] { read_coefficients(corrupt); }) == ErrorKind::format_error);
    std::istringstream short_row(std::string(kCoefficientHeader) + "\n1,2,3\n");
    CHECK(kind_of([&] { read_coefficients(short_row); }) == ErrorKind::format_error);
}

TEST_CASE("risk CSV round trip") {
    std::mt19937_64 rng(3);
    std::vector<RiskReport> reps;
    for (int i = 0; i < 10; ++i) {
        RiskReport r;
        r.n = 256 << i;
        r.replicates = 500 + i;
        r.mc_risk = std::abs(random_double(rng));
        r.mc_se = std::abs(random_double(rng));
        r.oracle_sum = std::abs(random_double(rng));
        r.bound_main = std::abs(random_double(rng));
        r.ratio = r.mc_risk / r.bound_main;
        reps.push_back(r);
    }
    std::ostringstream out;
    write_risk_reports(out, reps);
    std::istringstream in(out.str());
    CHECK(read_risk_reports(in) == reps);
    std::istringstream corrupt("n,replicates,risk\n");
    CHECK(kind_of([&] { read_risk_reports(corrupt); }) == ErrorKind::format_error);
}

TEST_CASE("rate CSV round trip") {
    RateStudy st;
    st.points = {{512, 0.1, 0.01, 0.0}, {1024, 0.05, 0.004, 0.0}};
    st.slope = -0.6666666666666666;
    st.slope_stderr = 0.012345678901234567;
    std::ostringstream out;
    write_rate(out, st);
    CHECK(out.str().find("# slope=-0.66666666666666663 stderr=") != std::string::npos);
    std::istringstream in(out.str());
    RateStudy back = read_rate(in);
    CHECK(back.slope == st.slope);
    CHECK(back.slope_stderr == st.slope_stderr);
    REQUIRE(back.points.size() == 2);
    CHECK(back.points[1].n == 1024);
    CHECK(back.points[1].mc_se == 0.004);
    std::istringstream missing(std::string(kRateHeader) + "\n512,1,1\n");
    CHECK(kind_of([&] { read_rate(missing); }) == ErrorKind::format_error);
}

TEST_CASE("format double keeps 17 digits") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1.0) == "1");
    CHECK(parse_double(format_double(std::numeric_limits<double>::denorm_min()), "x") ==
          std::numeric_limits<double>::denorm_min());
}

TEST_CASE("intensity json") {
    Intensity box = intensity_from_json(json::parse(R"({"kind":"piecewise","pieces":[{"a":0,"b":1,"coeffs":[1.0]}]})"));
    CHECK(box.total_mass() == 1.0);
    Intensity spike = intensity_from_json(json::parse(R"({"kind":"power_spike","beta":0.25})"));
    CHECK(spike.spike_exponent().value() == 0.25);
    Intensity mix = intensity_from_json(json::parse(
        R"({"kind":"mixture","weights":[1,2],"parts":[{"kind":"power_spike","beta":0.25},{"kind":"piecewise","pieces":[{"a":0,"b":2,"coeffs":[1]}]}]})"));
    CHECK(mix.total_mass() == doctest::Approx(4.0 / 3.0 + 4.0));
    CHECK(kind_of([] { intensity_from_json(json::parse(R"({"kind":"power_spike","beta":0.25,"x":1})")); }) ==
          ErrorKind::config_error);
    CHECK(kind_of([] { intensity_from_json(json::parse(R"({"kind":"gauss"})")); }) == ErrorKind::config_error);
    CHECK(kind_of([] { intensity_from_json(json::parse(R"({"kind":"power_spike","beta":0.7})")); }) ==
          ErrorKind::invalid_model);
}

TEST_CASE("basis json") {
    CHECK(basis_from_json("haar").family() == BasisFamily::haar);
    CHECK(basis_from_json("bior13").vanishing_moments() == 2);
    const json filter = json::parse(R"({
        "kind": "filter",
        "psi": {"breaks": [-1, -0.5, 0, 0.5, 1, 1.5, 2], "values": ["-1/8", "-1/8", 1, -1, "1/8", "1/8"]},
        "dual_lowpass": ["-1/8", "1/8", 1, 1, "1/8", "-1/8"],
        "offset": -2,
        "moments": 2,
        "grid_level": 10
    })");
    // breaks/values must be numbers; taps may be rational strings
    CHECK(kind_of([&] { basis_from_json(filter); }) == ErrorKind::config_error);
    json ok = filter;
    ok["psi"]["values"] = json::array({-0.125, -0.125, 1, -1, 0.125, 0.125});
    WaveletBasis b = basis_from_json(ok);
    CHECK(b.grid_level() == 10);
    CHECK(b.vanishing_moments() == 2);
    CHECK(kind_of([] { basis_from_json("db4"); }) == ErrorKind::config_error);
    CHECK(parse_rational("-1/8") == -0.125);
    CHECK(parse_rational("3") == 3.0);
}

TEST_CASE("strict experiment config") {
    ExperimentConfig cfg = config_from_json(json::parse(
        R"({"intensity":{"kind":"power_spike","beta":0.25},"n":1024,"gamma":2.0,"c":1.0,"c_prime":-1.0,
            "basis":"haar","replicates":100,"seed":7,"tail_j":12,"n_list":[256,512],"u":[1,2],"lambdas":[[0,0],[3,2]]})"));
    CHECK(cfg.n.value() == 1024);
    CHECK(cfg.estimator.gamma == 2.0);
    CHECK(cfg.seed.value() == 7);
    CHECK(cfg.tail_j == 12);
    CHECK(cfg.n_list == std::vector<std::int64_t>{256, 512});
    CHECK(cfg.lambdas.size() == 2);
    CHECK(kind_of([] { config_from_json(json::parse(R"({"gama":1.0})")); }) == ErrorKind::config_error);
    CHECK(kind_of([] { config_from_json(json::parse(R"({"n":"ten"})")); }) == ErrorKind::config_error);
    CHECK(kind_of([] { read_config("/nonexistent.json"); }) == ErrorKind::config_error);
}

TEST_CASE("seed precedence") {
    ::unsetenv(kSeedEnvVar);
    CHECK(resolve_seed(std::nullopt, std::nullopt) == kDefaultSeed);
    ::setenv(kSeedEnvVar, "99", 1);
    CHECK(resolve_seed(std::nullopt, std::nullopt) == 99);
    CHECK(resolve_seed(std::nullopt, 5) == 5);
    CHECK(resolve_seed(3, 5) == 3);
    ::setenv(kSeedEnvVar, "x", 1);
    CHECK(kind_of([] { resolve_seed(std::nullopt, std::nullopt); }) == ErrorKind::parse_error);
    ::unsetenv(kSeedEnvVar);
}
