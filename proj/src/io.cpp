#include "pwest/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pwest/error.hpp"

namespace pwest {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string strip(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

void expect_header(std::istream& in, const char* header, const char* what) {
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), ErrorKind::format_error,
            std::string(what) + ": missing header");
    require(strip(line) == header, ErrorKind::format_error,
            std::string(what) + ": expected header '" + header + "', got '" + strip(line) + "'");
}

std::vector<std::string> row_fields(const std::string& line, std::size_t expected, std::size_t line_no,
                                    const char* what) {
    auto fields = split_csv(strip(line));
    require(fields.size() == expected, ErrorKind::format_error,
            std::string(what) + ": line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                " fields, expected " + std::to_string(expected));
    return fields;
}

}  // namespace

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double parse_double(const std::string& text, const std::string& what) {
    const std::string s = strip(text);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    require(!s.empty() && ec == std::errc() && ptr == s.data() + s.size(), ErrorKind::parse_error,
            what + ": not a number: '" + s + "'");
    return value;
}

std::int64_t parse_int(const std::string& text, const std::string& what) {
    const std::string s = strip(text);
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    require(!s.empty() && ec == std::errc() && ptr == s.data() + s.size(), ErrorKind::parse_error,
            what + ": not an integer: '" + s + "'");
    return value;
}

PointSample parse_events(std::istream& in, std::int64_t n) {
    std::vector<double> times;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string s = strip(line);
        if (s.empty() || s.front() == '#') continue;
        double t = parse_double(s, "events line " + std::to_string(line_no));
        require(std::isfinite(t), ErrorKind::parse_error,
                "events line " + std::to_string(line_no) + ": event time must be finite");
        times.push_back(t);
    }
    return make_sample(std::move(times), n);
}

PointSample read_events(const std::string& path, std::int64_t n) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorKind::parse_error, "cannot open events file '" + path + "'");
    return parse_events(in, n);
}

void write_events(std::ostream& out, const PointSample& sample) {
    out << "# n=" << sample.n << " seed=" << sample.seed << " count=" << sample.size() << '\n';
    for (double t : sample.times) out << format_double(t) << '\n';
}

void write_coefficients(std::ostream& out, std::span<const CoefficientRecord> records) {
    out << kCoefficientHeader << '\n';
    for (const auto& r : records) {
        out << r.lambda.j << ',' << r.lambda.k << ',' << format_double(r.beta_hat) << ','
            << format_double(r.v_hat) << ',' << format_double(r.v_tilde) << ',' << format_double(r.eta) << ','
            << (r.kept ? 1 : 0) << '\n';
    }
}

std::vector<CoefficientRecord> read_coefficients(std::istream& in) {
    expect_header(in, kCoefficientHeader, "coefficient CSV");
    std::vector<CoefficientRecord> out;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (strip(line).empty()) continue;
        auto f = row_fields(line, 7, line_no, "coefficient CSV");
        const std::string where = "coefficient CSV line " + std::to_string(line_no);
        CoefficientRecord r;
        r.lambda.j = static_cast<int>(parse_int(f[0], where));
        r.lambda.k = parse_int(f[1], where);
        r.beta_hat = parse_double(f[2], where);
        r.v_hat = parse_double(f[3], where);
        r.v_tilde = parse_double(f[4], where);
        r.eta = parse_double(f[5], where);
        const auto kept = parse_int(f[6], where);
        require(kept == 0 || kept == 1, ErrorKind::format_error, where + ": kept must be 0 or 1");
        r.kept = kept == 1;
        out.push_back(r);
    }
    return out;
}

void write_risk_reports(std::ostream& out, std::span<const RiskReport> reports) {
    out << kRiskHeader << '\n';
    for (const auto& r : reports) {
        out << r.n << ',' << r.replicates << ',' << format_double(r.mc_risk) << ',' << format_double(r.mc_se)
            << ',' << format_double(r.oracle_sum) << ',' << format_double(r.bound_main) << ','
            << format_double(r.ratio) << '\n';
    }
}

std::vector<RiskReport> read_risk_reports(std::istream& in) {
    expect_header(in, kRiskHeader, "risk CSV");
    std::vector<RiskReport> out;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (strip(line).empty()) continue;
        auto f = row_fields(line, 7, line_no, "risk CSV");
        const std::string where = "risk CSV line " + std::to_string(line_no);
        RiskReport r;
        r.n = parse_int(f[0], where);
        r.replicates = parse_int(f[1], where);
        r.mc_risk = parse_double(f[2], where);
        r.mc_se = parse_double(f[3], where);
        r.oracle_sum = parse_double(f[4], where);
        r.bound_main = parse_double(f[5], where);
        r.ratio = parse_double(f[6], where);
        out.push_back(r);
    }
    return out;
}

void write_rate(std::ostream& out, const RateStudy& study) {
    out << kRateHeader << '\n';
    for (const auto& p : study.points) {
        out << p.n << ',' << format_double(p.mc_risk) << ',' << format_double(p.mc_se) << '\n';
    }
    out << "# slope=" << format_double(study.slope) << " stderr=" << format_double(study.slope_stderr) << '\n';
}

RateStudy read_rate(std::istream& in) {
    expect_header(in, kRateHeader, "rate CSV");
    RateStudy study;
    bool summary = false;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string s = strip(line);
        if (s.empty()) continue;
        const std::string where = "rate CSV line " + std::to_string(line_no);
        require(!summary, ErrorKind::format_error, where + ": data after the summary line");
        if (s.front() == '#') {
            std::istringstream ss(s.substr(1));
            std::string a;
            std::string b;
            ss >> a >> b;
            require(a.rfind("slope=", 0) == 0 && b.rfind("stderr=", 0) == 0, ErrorKind::format_error,
                    where + ": malformed summary line");
            study.slope = parse_double(a.substr(6), where);
            study.slope_stderr = parse_double(b.substr(7), where);
            summary = true;
            continue;
        }
        auto f = row_fields(s, 3, line_no, "rate CSV");
        RatePoint p;
        p.n = parse_int(f[0], where);
        p.mc_risk = parse_double(f[1], where);
        p.mc_se = parse_double(f[2], where);
        study.points.push_back(p);
    }
    require(summary, ErrorKind::format_error, "rate CSV: missing summary line");
    return study;
}

void write_output(const std::string& path, const std::string& contents) {
    if (path.empty() || path == "-") {
        std::cout << contents;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorKind::invalid_argument, "cannot open output file '" + path + "'");
    out << contents;
    require(static_cast<bool>(out), ErrorKind::invalid_argument, "failed writing '" + path + "'");
}

}  // namespace pwest
