#pragma once

#include <stdexcept>
#include <string>

namespace nbv {

enum class ErrorCode {
    InvalidArgument,
    DegenerateDirection,
    InvalidLayout,
    LayoutMismatch,
    NoCameras,
    OriginOccupied,
    NoValidCandidates,
    FreeBoxNotFree,
    Parse,
    Io,
};

const char* to_string(ErrorCode code);

/// All library failures are reported through this exception; `code()` lets
/// callers (the CLI in particular) map failures onto exit statuses.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace nbv
