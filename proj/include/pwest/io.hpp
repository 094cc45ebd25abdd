#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pwest/analysis.hpp"
#include "pwest/estimator.hpp"
#include "pwest/point_sample.hpp"

namespace pwest {

inline constexpr const char* kCoefficientHeader = "j,k,beta_hat,v_hat,v_tilde,eta,kept";
inline constexpr const char* kRiskHeader = "n,replicates,mc_risk,mc_se,oracle_sum,bound_main,ratio";
inline constexpr const char* kRateHeader = "n,mc_risk,mc_se";

/// Shortest-safe round-trip text for a double (17 significant digits).
std::string format_double(double x);
/// Whole-string decimal parse; throws parse_error naming `what` otherwise.
double parse_double(const std::string& text, const std::string& what);
std::int64_t parse_int(const std::string& text, const std::string& what);

/// One event time per line; blank lines and lines starting with '#' are
/// skipped. Times are sorted; n is supplied by the caller.
PointSample parse_events(std::istream& in, std::int64_t n);
PointSample read_events(const std::string& path, std::int64_t n);
void write_events(std::ostream& out, const PointSample& sample);

void write_coefficients(std::ostream& out, std::span<const CoefficientRecord> records);
std::vector<CoefficientRecord> read_coefficients(std::istream& in);

void write_risk_reports(std::ostream& out, std::span<const RiskReport> reports);
/// The L2 bracket columns are not part of the schema and read back as zero.
std::vector<RiskReport> read_risk_reports(std::istream& in);

/// Per-n rows followed by `# slope=<v> stderr=<v>`.
void write_rate(std::ostream& out, const RateStudy& study);
/// Reads rows and the summary line; bound columns are not part of the schema.
RateStudy read_rate(std::istream& in);

/// Writes `contents` to `path`, or to stdout when `path` is empty or "-".
void write_output(const std::string& path, const std::string& contents);

}  // namespace pwest
