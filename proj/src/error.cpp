#include "seamforge/error.hpp"

namespace seamforge {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::InvalidParameter: return "InvalidParameter";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::InsufficientPoints: return "InsufficientPoints";
        case ErrorCode::DegenerateNeighborhood: return "DegenerateNeighborhood";
        case ErrorCode::DegenerateSystem: return "DegenerateSystem";
        case ErrorCode::DegenerateFrame: return "DegenerateFrame";
        case ErrorCode::NoOverlap: return "NoOverlap";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::DataError: return "DataError";
        case ErrorCode::InvalidPose: return "InvalidPose";
        case ErrorCode::EmptyView: return "EmptyView";
        case ErrorCode::AmbiguousRotation: return "AmbiguousRotation";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

}  // namespace seamforge
