#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pwest {

/// Error categories surfaced by the library. The CLI prints the kind name
/// verbatim so scripts can dispatch on it.
enum class ErrorKind {
    invalid_argument,
    invalid_model,
    invalid_cutoff,
    grid_resolution,
    too_many_records,
    support_violation,
    parse_error,
    format_error,
    config_error,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::invalid_argument: return "invalid_argument";
        case ErrorKind::invalid_model: return "invalid_model";
        case ErrorKind::invalid_cutoff: return "invalid_cutoff";
        case ErrorKind::grid_resolution: return "grid_resolution";
        case ErrorKind::too_many_records: return "too_many_records";
        case ErrorKind::support_violation: return "support_violation";
        case ErrorKind::parse_error: return "parse_error";
        case ErrorKind::format_error: return "format_error";
        case ErrorKind::config_error: return "config_error";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& message) {
    if (!condition) throw Error(kind, message);
}

}  // namespace pwest
