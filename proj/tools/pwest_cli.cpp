// pwest: command-line front end for Poisson intensity estimation by wavelet
// thresholding and its analysis harness.

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pwest/analysis.hpp"
#include "pwest/config.hpp"
#include "pwest/error.hpp"
#include "pwest/estimator.hpp"
#include "pwest/io.hpp"
#include "pwest/monte_carlo.hpp"
#include "pwest/point_process.hpp"

namespace {

using nlohmann::json;
using namespace pwest;

struct Flags {
    std::string config;
    std::string events;
    std::string out;
    std::string intensity;
    std::string intensity_prime;
    std::string basis;
    std::string grid_out;
    std::optional<std::int64_t> n;
    std::optional<double> n_prime;
    std::vector<std::int64_t> n_list;
    std::optional<double> gamma;
    std::optional<double> c;
    std::optional<double> c_prime;
    std::optional<std::int64_t> replicates;
    std::optional<std::uint64_t> seed;
    std::optional<int> tail_j;
    std::optional<unsigned> threads;
    std::optional<double> alpha;
    std::optional<double> p;
    std::optional<double> q;
    std::optional<double> s;
    std::optional<int> level;
    std::vector<double> u_list;
    std::vector<std::string> lambdas;
};

// Inline JSON, or "@path" to read it from a file.
json json_argument(const std::string& text, const char* what) {
    std::string body = text;
    if (!text.empty() && text.front() == '@') {
        std::ifstream in(text.substr(1));
        require(static_cast<bool>(in), ErrorKind::config_error, std::string("cannot open ") + what + " file '" +
                                                                    text.substr(1) + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        body = ss.str();
    }
    try {
        return json::parse(body);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::config_error, std::string(what) + " is not valid JSON: " + e.what());
    }
}

json basis_argument(const std::string& text) {
    if (text == "haar" || text == "bior13") return text;
    return json_argument(text, "basis");
}

LambdaIndex parse_lambda(const std::string& text) {
    const auto colon = text.find(':');
    require(colon != std::string::npos, ErrorKind::invalid_argument, "lambda must be written j:k, got '" + text + "'");
    return {static_cast<int>(parse_int(text.substr(0, colon), "lambda j")), parse_int(text.substr(colon + 1), "lambda k")};
}

// Flags override config fields; config overrides built-in defaults.
ExperimentConfig merged_config(const Flags& f) {
    ExperimentConfig cfg = f.config.empty() ? ExperimentConfig{} : read_config(f.config);
    if (!f.events.empty()) cfg.events = f.events;
    if (!f.out.empty()) cfg.out = f.out;
    if (!f.intensity.empty()) cfg.intensity = json_argument(f.intensity, "intensity");
    if (!f.intensity_prime.empty()) cfg.intensity_prime = json_argument(f.intensity_prime, "intensity-prime");
    if (!f.basis.empty()) cfg.basis = basis_argument(f.basis);
    if (f.n) cfg.n = *f.n;
    if (f.n_prime) cfg.n_prime = *f.n_prime;
    if (!f.n_list.empty()) cfg.n_list = f.n_list;
    if (f.gamma) cfg.estimator.gamma = *f.gamma;
    if (f.c) cfg.estimator.c = *f.c;
    if (f.c_prime) cfg.estimator.c_prime = *f.c_prime;
    if (f.replicates) cfg.replicates = *f.replicates;
    if (f.tail_j) cfg.tail_j = *f.tail_j;
    if (f.threads) cfg.threads = *f.threads;
    if (f.alpha) cfg.alpha = *f.alpha;
    if (f.p) cfg.p = *f.p;
    if (f.q) cfg.q = *f.q;
    if (f.s) cfg.s = *f.s;
    if (f.level) cfg.level = *f.level;
    if (!f.u_list.empty()) cfg.u_list = f.u_list;
    if (!f.lambdas.empty()) {
        cfg.lambdas.clear();
        for (const auto& l : f.lambdas) cfg.lambdas.push_back(parse_lambda(l));
    }
    cfg.seed = resolve_seed(f.seed, cfg.seed);
    cfg.estimator.validate();
    return cfg;
}

Intensity need_intensity(const ExperimentConfig& cfg) {
    require(cfg.intensity.has_value(), ErrorKind::config_error, "an intensity is required (--intensity or config)");
    return intensity_from_json(*cfg.intensity);
}

std::int64_t need_n(const ExperimentConfig& cfg) {
    require(cfg.n.has_value(), ErrorKind::config_error, "n is required (--n or config)");
    require(*cfg.n >= 1, ErrorKind::invalid_argument, "n must be >= 1");
    return *cfg.n;
}

std::vector<std::int64_t> n_values(const ExperimentConfig& cfg) {
    if (!cfg.n_list.empty()) return cfg.n_list;
    return {need_n(cfg)};
}

MonteCarloOptions mc_options(const ExperimentConfig& cfg) {
    MonteCarloOptions o;
    o.replicates = cfg.replicates;
    o.seed = *cfg.seed;
    o.threads = cfg.threads;
    o.tail_j = cfg.tail_j;
    return o;
}

PointSample need_events(const ExperimentConfig& cfg) {
    require(!cfg.events.empty(), ErrorKind::config_error, "an events file is required (--events or config)");
    return read_events(cfg.events, need_n(cfg));
}

void cmd_simulate(const ExperimentConfig& cfg) {
    PointSample sample = simulate(need_intensity(cfg), need_n(cfg), *cfg.seed);
    std::ostringstream out;
    write_events(out, sample);
    write_output(cfg.out, out.str());
}

void cmd_coeffs(const ExperimentConfig& cfg, bool kept_only, const std::string& grid_out) {
    const WaveletBasis basis = basis_from_json(cfg.basis);
    ThresholdedEstimate est = estimate(need_events(cfg), cfg.estimator, basis);
    std::ostringstream out;
    if (kept_only) {
        write_coefficients(out, est.kept_records());
    } else {
        write_coefficients(out, est.records);
    }
    write_output(cfg.out, out.str());
    if (!grid_out.empty()) {
        double lo = 0.0;
        double hi = 0.0;
        for (const auto& r : est.records) {
            if (!r.kept) continue;
            Interval s = basis.reconstruction_support(r.lambda);
            lo = std::min(lo, std::floor(s.lo));
            hi = std::max(hi, std::ceil(s.hi));
        }
        DyadicGrid grid{lo, cfg.estimator.j_grid, static_cast<std::size_t>(std::ldexp(hi - lo, cfg.estimator.j_grid))};
        std::ostringstream g;
        g << "x,value\n";
        for (const auto& [x, v] : reconstruct(est, basis, grid)) g << format_double(x) << ',' << format_double(v) << '\n';
        write_output(grid_out, g.str());
    }
}

void cmd_risk(const ExperimentConfig& cfg) {
    const Intensity f = need_intensity(cfg);
    const WaveletBasis basis = basis_from_json(cfg.basis);
    std::vector<RiskReport> reports;
    for (std::int64_t n : n_values(cfg)) {
        MonteCarloOptions o = mc_options(cfg);
        o.seed = replicate_seed(o.seed, static_cast<std::uint64_t>(n));
        reports.push_back(mc_risk(f, n, cfg.estimator, basis, o));
    }
    std::ostringstream out;
    write_risk_reports(out, reports);
    write_output(cfg.out, out.str());
}

void cmd_rate(const ExperimentConfig& cfg) {
    require(cfg.n_list.size() >= 4, ErrorKind::config_error, "rate needs --n-list with at least 4 values");
    RateStudy study = rate_study(need_intensity(cfg), cfg.n_list, cfg.estimator, basis_from_json(cfg.basis),
                                 mc_options(cfg));
    std::ostringstream out;
    write_rate(out, study);
    write_output(cfg.out, out.str());
}

void cmd_classcheck(const ExperimentConfig& cfg) {
    const Intensity f = need_intensity(cfg);
    const WaveletBasis basis = basis_from_json(cfg.basis);
    require(cfg.level >= 0 && cfg.level <= 24, ErrorKind::invalid_argument, "level must lie in [0, 24]");
    CoefficientMap coeffs;
    std::vector<double> betas;
    std::vector<double> sigmas;
    for (int j = -1; j <= cfg.level; ++j) {
        LevelCoefficients lc = level_coefficients(f, j, basis);
        for (std::size_t i = 0; i < lc.beta.size(); ++i) {
            if (lc.beta[i] == 0.0) continue;
            coeffs.emplace(LambdaIndex{j, lc.k_first + static_cast<std::int64_t>(i)}, lc.beta[i]);
            betas.push_back(lc.beta[i]);
            sigmas.push_back(std::sqrt(lc.sigma_sq[i]));
        }
    }
    std::vector<double> grid;
    for (int i = -40; i <= 40; ++i) grid.push_back(std::pow(10.0, i / 10.0));
    WeakBesovResult wb = weak_besov_radius(betas, sigmas, cfg.s, grid);
    std::ostringstream out;
    out << "quantity,value\n";
    out << "level," << cfg.level << '\n';
    out << "besov_norm," << format_double(besov_norm(coeffs, cfg.alpha, cfg.p, cfg.q)) << '\n';
    out << "weak_besov_radius," << format_double(wb.radius) << '\n';
    out << "weak_besov_argmax_t," << format_double(wb.argmax_t) << '\n';
    out << "weak_besov_grid_sup," << format_double(wb.grid_sup) << '\n';
    write_output(cfg.out, out.str());
}

void cmd_kl(const ExperimentConfig& cfg) {
    require(cfg.intensity_prime.has_value(), ErrorKind::config_error,
            "kl needs a second intensity (--intensity-prime or config)");
    const Intensity f = need_intensity(cfg);
    const Intensity fp = intensity_from_json(*cfg.intensity_prime);
    const double n = static_cast<double>(need_n(cfg));
    const double np = cfg.n_prime.value_or(n);
    write_output(cfg.out, format_double(kl_divergence(f, n, fp, np)) + "\n");
}

void cmd_tailcheck(const ExperimentConfig& cfg) {
    const Intensity f = need_intensity(cfg);
    const WaveletBasis basis = basis_from_json(cfg.basis);
    const std::int64_t n = need_n(cfg);
    const std::vector<LambdaIndex> lambdas = cfg.lambdas.empty() ? std::vector<LambdaIndex>{{-1, 0}, {0, 0}}
                                                                 : cfg.lambdas;
    const std::vector<double> us = cfg.u_list.empty() ? std::vector<double>{1.0, 2.0, 3.0} : cfg.u_list;
    std::ostringstream out;
    out << "j,k,u,check,frequency,bound,se,within_3se\n";
    std::uint64_t stream = 0;
    for (const auto& lambda : lambdas) {
        const StepFunction g = basis.analysis_function(lambda);
        for (double u : us) {
            auto emit = [&](const char* name, const ExceedanceResult& r) {
                out << lambda.j << ',' << lambda.k << ',' << format_double(u) << ',' << name << ','
                    << format_double(r.frequency) << ',' << format_double(r.bound) << ',' << format_double(r.se)
                    << ',' << (r.within_bound() ? 1 : 0) << '\n';
            };
            emit("lemma1", tail_check(f, n, basis, lambda, u, cfg.replicates, replicate_seed(*cfg.seed, stream++),
                                      cfg.threads));
            emit("exponential", deviation_check(f, n, g, u, false, cfg.replicates,
                                                replicate_seed(*cfg.seed, stream++), cfg.threads));
        }
    }
    write_output(cfg.out, out.str());
}

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "JSON experiment config");
    cmd->add_option("--out", f.out, "Output path (stdout when omitted)");
    cmd->add_option("--seed", f.seed, "Base seed (overrides config and " + std::string(kSeedEnvVar) + ")");
    cmd->add_option("--basis", f.basis, "haar, bior13, inline filter JSON or @file");
}

void add_model(CLI::App* cmd, Flags& f) {
    cmd->add_option("--intensity", f.intensity, "Intensity JSON, inline or @file");
    cmd->add_option("--n", f.n, "Normalization parameter n");
}

void add_estimator(CLI::App* cmd, Flags& f) {
    cmd->add_option("--gamma", f.gamma, "Threshold multiplier (default 1.5)");
    cmd->add_option("--c", f.c, "Cutoff exponent on n (default 1)");
    cmd->add_option("--cprime", f.c_prime, "Cutoff exponent on log n (default -1)");
}

void add_monte_carlo(CLI::App* cmd, Flags& f) {
    cmd->add_option("--replicates", f.replicates, "Monte Carlo replicates");
    cmd->add_option("--threads", f.threads, "Worker threads (results do not depend on it)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Poisson intensity estimation by wavelet thresholding"};
    app.require_subcommand(1);
    Flags f;

    auto* sim = app.add_subcommand("simulate", "Simulate a Poisson process and write an event file");
    add_common(sim, f);
    add_model(sim, f);

    auto* coeffs = app.add_subcommand("coeffs", "Write every active coefficient record");
    auto* est = app.add_subcommand("estimate", "Write the kept coefficient records");
    for (auto* cmd : {coeffs, est}) {
        add_common(cmd, f);
        cmd->add_option("--events", f.events, "Event file, one time per line");
        cmd->add_option("--n", f.n, "Normalization parameter n");
        add_estimator(cmd, f);
    }
    est->add_option("--grid-out", f.grid_out, "Also write the reconstruction on the dyadic grid");

    auto* risk = app.add_subcommand("risk", "Monte Carlo risk against the oracle bound");
    auto* rate = app.add_subcommand("rate", "Fitted rate slope over a list of n");
    for (auto* cmd : {risk, rate}) {
        add_common(cmd, f);
        add_model(cmd, f);
        add_estimator(cmd, f);
        add_monte_carlo(cmd, f);
        cmd->add_option("--n-list", f.n_list, "Values of n")->delimiter(',');
        cmd->add_option("--tail-j", f.tail_j, "Last explicit level of the tail sum (default j0 + 6)");
    }

    auto* cls = app.add_subcommand("classcheck", "Besov and weak Besov functionals of the true coefficients");
    add_common(cls, f);
    add_model(cls, f);
    cls->add_option("--level", f.level, "Truncation level (default 20)");
    cls->add_option("--alpha", f.alpha, "Besov smoothness");
    cls->add_option("--p", f.p, "Besov p (inf allowed)");
    cls->add_option("--q", f.q, "Besov q (inf allowed)");
    cls->add_option("--s", f.s, "Weak Besov index in (0, 1/2)");

    auto* kl = app.add_subcommand("kl", "Kullback-Leibler divergence between two Poisson processes");
    add_common(kl, f);
    add_model(kl, f);
    kl->add_option("--intensity-prime", f.intensity_prime, "Second intensity JSON, inline or @file");
    kl->add_option("--n-prime", f.n_prime, "Normalization of the second intensity (default n)");

    auto* tail = app.add_subcommand("tailcheck", "Empirical exceedance frequencies against exponential bounds");
    add_common(tail, f);
    add_model(tail, f);
    add_monte_carlo(tail, f);
    tail->add_option("--lambda", f.lambdas, "Index j:k (repeatable)");
    tail->add_option("--u", f.u_list, "Deviation levels")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: usage: " << e.what() << '\n';
        return 2;
    }

    try {
        ExperimentConfig cfg = merged_config(f);
        if (sim->parsed()) {
            cmd_simulate(cfg);
        } else if (coeffs->parsed()) {
            cmd_coeffs(cfg, false, "");
        } else if (est->parsed()) {
            cmd_coeffs(cfg, true, f.grid_out);
        } else if (risk->parsed()) {
            cmd_risk(cfg);
        } else if (rate->parsed()) {
            cmd_rate(cfg);
        } else if (cls->parsed()) {
            cmd_classcheck(cfg);
        } else if (kl->parsed()) {
            cmd_kl(cfg);
        } else if (tail->parsed()) {
            cmd_tailcheck(cfg);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
