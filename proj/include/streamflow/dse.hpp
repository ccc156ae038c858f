/*
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "streamflow/design.hpp"
#include "streamflow/model_ir.hpp"
#include "streamflow/perf_model.hpp"
#include "streamflow/util.hpp"

namespace streamflow {

struct Objective {
  enum class Kind { MaxThroughput, MinLatency };

  Kind kind = Kind::MinLatency;
  std::uint64_t batch = 1;  // MaxThroughput only

  static Objective max_throughput(std::uint64_t batch);
  static Objective min_latency() { return {}; }

  /// Minimisation cost: -throughput at `batch`, or single-input latency.
  double cost(const PerfReport& report) const;
  /// Batch at which designs are evaluated for this objective.
  std::uint64_t eval_batch() const noexcept {
    return kind == Kind::MaxThroughput ? batch : 1;
  }
  /// Mode a single-partition design is reported in. Both modes have the
  /// same single-input latency there; only throughput-mode pipelines
  /// consecutive inputs.
  Mode single_partition_mode() const noexcept {
    return kind == Kind::MinLatency ? Mode::Latency : Mode::Throughput;
  }

  std::string to_string() const;
};

/// "latency" or "throughput:<B>". Throws InvalidArgument otherwise.
Objective parse_objective(std::string_view text);

/// Probabilities of the three neighbourhood move kinds.
struct MoveWeights {
  double folding = 0.7;
  double partition = 0.2;
  double mode = 0.1;
};

struct OptimizerConfig {
  std::uint64_t seed = 1;
  double initial_temperature = 1.0;
  double cooling_rate = 0.95;
  std::uint64_t iterations_per_temperature = 100;
  double temperature_floor = 1e-3;
  MoveWeights moves;
  std::size_t max_partitions = 0;  // 0: one per layer at most
};

void validate(const OptimizerConfig& cfg);

/// key=value lines mirroring the OptimizerConfig field names; the move
/// weights are move_folding, move_partition and move_mode.
OptimizerConfig parse_optimizer_config(std::string_view text,
                                       OptimizerConfig defaults = {});

struct TraceEntry {
  std::uint64_t iteration = 0;
  double candidate_cost = 0.0;  // +inf for rejected infeasible candidates
  bool accepted = false;
  double best_cost = 0.0;
};

struct DseTrace {
  std::vector<TraceEntry> entries;
};

struct EvaluatedDesign {
  DesignPoint design;
  PerfReport report;
};

struct OptimizeResult {
  DesignPoint design;
  PerfReport report;
  double cost = 0.0;
  DseTrace trace;
};

/// Folding values the explorer visits per layer: the divisors of each cap.
struct FoldingSpace {
  std::vector<std::vector<std::int64_t>> coarse;
  std::vector<std::vector<std::int64_t>> fine;

  static FoldingSpace of(const NetworkGraph& net);
  std::uint64_t combinations() const;  // saturates at UINT64_MAX
};

/// Moves one folding parameter of one layer to the adjacent value of its
/// option list. Returns nullopt when no layer has a choice.
std::optional<DesignPoint> propose_folding_move(const DesignPoint& design,
                                                const FoldingSpace& space, Rng& rng);

/// Adds, removes or shifts one cut point. A design collapsing to one
/// partition takes `single_mode`.
std::optional<DesignPoint> propose_partition_move(const DesignPoint& design,
                                                  std::size_t max_partitions, Mode single_mode,
                                                  Rng& rng);

/// Simulated annealing over folding, cut points and mode. Infeasible
/// candidates are rejected outright; the result is the best feasible
/// design visited (ties broken by smaller encoding). Deterministic in
/// (inputs, cfg.seed). Throws NoFeasibleDesign when even the all-serial
/// designs do not fit.
OptimizeResult optimize_sa(const NetworkGraph& net, const DeviceDescriptor& device,
                           const Objective& objective, const OptimizerConfig& cfg = {});

/// All-serial starting point: maximal partitioning first, then a single
/// partition, then the fewest-partition throughput-mode cut set that fits,
/// then (chains of at most 13 layers) every latency-mode cut set. The first
/// feasible one is used.
std::optional<EvaluatedDesign> initial_design(const NetworkGraph& net,
                                              const DeviceDescriptor& device,
                                              const Objective& objective,
                                              std::size_t max_partitions);

struct EnumerationLimits {
  std::uint64_t max_points = 1'000'000;
  std::size_t max_partitions = 0;  // 0: one per layer at most
  std::uint64_t batch = 1;
  Mode single_partition_mode = Mode::Throughput;
};

/// Number of design points enumerate_designs would visit (saturating).
std::uint64_t design_space_size(const NetworkGraph& net, const EnumerationLimits& limits);

/// Every feasible design point in deterministic order: cut sets by size
/// then lexicographically, throughput mode before latency mode for
/// multi-partition sets, then folding as an odometer with layer 0 most
/// significant. Throws SpaceTooLarge above limits.max_points.
std::vector<EvaluatedDesign> enumerate_designs(const NetworkGraph& net,
                                               const DeviceDescriptor& device,
                                               const EnumerationLimits& limits = {});

/// Exhaustive argmin of the objective over enumerate_designs with the
/// objective's batch and single-partition mode.
std::optional<EvaluatedDesign> exhaustive_optimum(const NetworkGraph& net,
                                                  const DeviceDescriptor& device,
                                                  const Objective& objective,
                                                  EnumerationLimits limits = {});

enum class ParetoMetric { Latency, Throughput };
enum class ResourceAxis { Dsp, Bram, Lut };

struct ParetoAxes {
  ParetoMetric metric = ParetoMetric::Latency;
  ResourceAxis resource = ResourceAxis::Dsp;
};

double metric_value(const PerfReport& report, ParetoMetric metric);
std::uint64_t resource_value(const PerfReport& report, ResourceAxis axis);
/// a dominates b: no worse on both axes and strictly better on one.
bool dominates(const PerfReport& a, const PerfReport& b, const ParetoAxes& axes);

/// Indices of the non-dominated reports, best metric first, ties by
/// resource then input order. Throws EmptyInput.
std::vector<std::size_t> pareto_front(std::span<const PerfReport> reports,
                                      const ParetoAxes& axes = {});

struct GapResult {
  double ratio = 1.0;
  OptimizeResult latency_optimal;
  OptimizeResult throughput_optimal;
  double throughput_design_latency = 0.0;  // batch-1 latency of throughput_optimal
};

/// latency(throughput-optimal design at batch 1) / latency(latency-optimal
/// design), from two annealing runs.
GapResult latency_throughput_gap(const NetworkGraph& net, const DeviceDescriptor& device,
                                 const OptimizerConfig& cfg = {}, std::uint64_t batch = 256);

}  // namespace streamflow
