#include "nbv/error.hpp"

namespace nbv {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::DegenerateDirection: return "DegenerateDirection";
        case ErrorCode::InvalidLayout: return "InvalidLayout";
        case ErrorCode::LayoutMismatch: return "LayoutMismatch";
        case ErrorCode::NoCameras: return "NoCameras";
        case ErrorCode::OriginOccupied: return "OriginOccupied";
        case ErrorCode::NoValidCandidates: return "NoValidCandidates";
        case ErrorCode::FreeBoxNotFree: return "FreeBoxNotFree";
        case ErrorCode::Parse: return "Parse";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace nbv
