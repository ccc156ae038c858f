/*
 * SPDX-License-Identifier: Apache-2.0
 */

#include "streamflow/error.hpp"

namespace streamflow {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnknownLayerKind: return "UnknownLayerKind";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::NonPositiveDimension: return "NonPositiveDimension";
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::FoldingOutOfRange: return "FoldingOutOfRange";
    case ErrorCode::InvalidCutPoint: return "InvalidCutPoint";
    case ErrorCode::ModeMismatch: return "ModeMismatch";
    case ErrorCode::SpaceTooLarge: return "SpaceTooLarge";
    case ErrorCode::NoFeasibleDesign: return "NoFeasibleDesign";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InvalidWorkload: return "InvalidWorkload";
    case ErrorCode::ShareSumExceedsOne: return "ShareSumExceedsOne";
    case ErrorCode::BandwidthInfeasible: return "BandwidthInfeasible";
    case ErrorCode::NoFeasibleMapping: return "NoFeasibleMapping";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

namespace {

std::string format_message(ErrorCode code, const std::string& detail,
                           std::optional<std::size_t> line) {
  std::string msg(to_string(code));
  if (line) msg += " " + std::to_string(*line);
  if (!detail.empty()) msg += ": " + detail;
  return msg;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& detail,
             std::optional<std::size_t> line)
    : std::runtime_error(format_message(code, detail, line)),
      code_(code),
      line_(line),
      detail_(detail) {}

}  // namespace streamflow
