#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fdilag {

enum class ErrorCode {
    // ingestion / validation
    MissingColumn,
    NonNumericValue,
    DuplicateCountryYear,
    GapInsideWindow,
    UnmappedCountry,
    ZeroVarianceSeries,
    InvalidArgument,
    // correlation
    LengthMismatch,
    TooShort,
    ZeroVariance,
    LagTooLarge,
    TooFewPairs,
    // rank-size fit
    EmptyInput,
    DomainError,
    SingularJacobian,
    NoConvergence,
    DegenerateData,
    // trends
    EmptyCluster,
    // network
    HttpError,
    PaginationInconsistency,
    RateLimited,
    SchemaMismatch,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::MissingColumn: return "MissingColumn";
        case ErrorCode::NonNumericValue: return "NonNumericValue";
        case ErrorCode::DuplicateCountryYear: return "DuplicateCountryYear";
        case ErrorCode::GapInsideWindow: return "GapInsideWindow";
        case ErrorCode::UnmappedCountry: return "UnmappedCountry";
        case ErrorCode::ZeroVarianceSeries: return "ZeroVarianceSeries";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::TooShort: return "TooShort";
        case ErrorCode::ZeroVariance: return "ZeroVariance";
        case ErrorCode::LagTooLarge: return "LagTooLarge";
        case ErrorCode::TooFewPairs: return "TooFewPairs";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::SingularJacobian: return "SingularJacobian";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::DegenerateData: return "DegenerateData";
        case ErrorCode::EmptyCluster: return "EmptyCluster";
        case ErrorCode::HttpError: return "HttpError";
        case ErrorCode::PaginationInconsistency: return "PaginationInconsistency";
        case ErrorCode::RateLimited: return "RateLimited";
        case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    }
    return "Unknown";
}

/// Coarse classification used by the CLI to pick an exit code.
enum class ErrorKind { Validation, Numerical, Network };

constexpr ErrorKind kind_of(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::SingularJacobian:
        case ErrorCode::NoConvergence:
        case ErrorCode::DegenerateData:
            return ErrorKind::Numerical;
        case ErrorCode::HttpError:
        case ErrorCode::PaginationInconsistency:
        case ErrorCode::RateLimited:
        case ErrorCode::SchemaMismatch:
            return ErrorKind::Network;
        default:
            return ErrorKind::Validation;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace fdilag
