/*
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace streamflow {

enum class ErrorCode {
  // network / device parsing
  UnknownLayerKind,
  MissingField,
  NonPositiveDimension,
  DuplicateName,
  MalformedLine,
  // design points
  FoldingOutOfRange,
  InvalidCutPoint,
  ModeMismatch,
  // exploration
  SpaceTooLarge,
  NoFeasibleDesign,
  EmptyInput,
  // multi-CNN
  InvalidWorkload,
  ShareSumExceedsOne,
  BandwidthInfeasible,
  NoFeasibleMapping,
  // generic
  InvalidArgument,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library. The code is stable and is what
/// callers (and the CLI exit-code mapping) dispatch on; the message is for
/// humans and always starts with the code name.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail,
        std::optional<std::size_t> line = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  /// 1-based source line for parse errors.
  std::optional<std::size_t> line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> line_;
  std::string detail_;
};

}  // namespace streamflow
