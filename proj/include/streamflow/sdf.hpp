/*
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <vector>

#include "streamflow/design.hpp"
#include "streamflow/model_ir.hpp"

namespace streamflow {

using Rational = boost::multiprecision::cpp_rational;

/// One actor per layer. Tokens are tensor elements per network input and
/// `cycles` is the number of active cycles the stage needs per input.
struct SdfStage {
  std::size_t layer = 0;
  StageConfig config;
  std::uint64_t tokens_in = 0;
  std::uint64_t tokens_out = 0;
  std::uint64_t cycles = 0;
};

struct SdfArc {
  std::size_t producer = 0;
  std::size_t consumer = 0;
  std::uint64_t tokens = 0;  // per network input, as produced
};

/// Chain of stages fed and drained by the host. `source_tokens` and
/// `sink_tokens` are what the host writes into the first stage and reads
/// from the last stage per input; they close the chain into a cycle for the
/// consistency analysis.
struct SdfGraph {
  std::vector<SdfStage> stages;
  std::vector<SdfArc> arcs;
  std::uint64_t source_tokens = 0;
  std::uint64_t sink_tokens = 0;

  /// Topology matrix (arcs x stages) in tokens per cycle: +tokens_out/cycles
  /// in the producer column, -tokens_in/cycles in the consumer column.
  std::vector<std::vector<Rational>> rate_matrix() const;
};

struct ConsistencyReport {
  bool conserving = false;
  /// Strictly positive t with rate_matrix() * t = 0, closed through the
  /// host, scaled so t[0] = stages[0].cycles.
  std::optional<std::vector<Rational>> balance_vector;
};

/// Whole-chain graph: one stage per layer and an arc between consecutive
/// layers. Throws FoldingOutOfRange when a stage config violates its caps.
SdfGraph build_sdf(const NetworkGraph& net, const DesignPoint& design);

/// Graph for one partition only.
SdfGraph build_sdf(const NetworkGraph& net, const DesignPoint& design, std::size_t partition);

ConsistencyReport check_consistency(const SdfGraph& graph);

/// Steady-state cycles between consecutive inputs: the slowest stage.
std::uint64_t initiation_interval(const SdfGraph& graph);

/// Rank and one null-space basis vector (if the null space is
/// one-dimensional) of a dense rational matrix, by exact Gauss-Jordan
/// elimination.
struct NullSpace {
  std::size_t rank = 0;
  std::optional<std::vector<Rational>> vector;
};
NullSpace rational_null_space(std::vector<std::vector<Rational>> matrix, std::size_t columns);

}  // namespace streamflow
