#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace geohub {

enum class ErrorCode {
    kInvalidArgument,
    kNonConvergence,
    kEmptyInput,
    kAntimeridianStraddle,
    kFatalFormat,
    kInvalidBBox,
    kGeocodeConflict,
    kKTooLarge,
    kInvalidThreshold,
    kTooFewYears,
    kKMismatch,
    kInvalidGrid,
};

std::string_view to_string(ErrorCode code);

/// Error raised by every geohub operation; `code()` identifies the failure kind.
class GeoError : public std::runtime_error {
public:
    GeoError(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace geohub
