#include "camforge/error.hpp"

namespace camforge {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::TruncatedFile: return "TruncatedFile";
        case ErrorCode::NonFiniteCoordinate: return "NonFiniteCoordinate";
        case ErrorCode::EmptyMesh: return "EmptyMesh";
        case ErrorCode::MalformedStl: return "MalformedStl";
        case ErrorCode::InvalidMesh: return "InvalidMesh";
        case ErrorCode::OpenChains: return "OpenChains";
        case ErrorCode::DegenerateInput: return "DegenerateInput";
        case ErrorCode::NotClosed: return "NotClosed";
        case ErrorCode::CrossingContours: return "CrossingContours";
        case ErrorCode::DegeneratePoint: return "DegeneratePoint";
        case ErrorCode::LayerHeightOutOfRange: return "LayerHeightOutOfRange";
        case ErrorCode::DuplicateId: return "DuplicateId";
        case ErrorCode::UnknownWorkflow: return "UnknownWorkflow";
        case ErrorCode::ParamOutOfRange: return "ParamOutOfRange";
        case ErrorCode::BlockDegenerate: return "BlockDegenerate";
        case ErrorCode::PartTooLarge: return "PartTooLarge";
        case ErrorCode::InvariantViolation: return "InvariantViolation";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::UnknownModel: return "UnknownModel";
    }
    return "Unknown";
}

}  // namespace camforge
