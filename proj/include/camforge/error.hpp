#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace camforge {

enum class ErrorCode {
    TruncatedFile,
    NonFiniteCoordinate,
    EmptyMesh,
    MalformedStl,
    InvalidMesh,
    OpenChains,
    DegenerateInput,
    NotClosed,
    CrossingContours,
    DegeneratePoint,
    LayerHeightOutOfRange,
    DuplicateId,
    UnknownWorkflow,
    ParamOutOfRange,
    BlockDegenerate,
    PartTooLarge,
    InvariantViolation,
    ParseError,
    UnknownModel,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace camforge
