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
#include "streamflow/dse.hpp"
#include "streamflow/model_ir.hpp"
#include "streamflow/perf_model.hpp"

namespace streamflow {

struct WorkloadEntry {
  std::string name;
  NetworkGraph network;
  double weight = 1.0;            // importance
  double target_latency_s = 0.0;  // per-input deadline
};

/// Two or more CNNs sharing one device. Weights are normalised to sum to 1
/// on construction.
class MultiCnnWorkload {
 public:
  explicit MultiCnnWorkload(std::vector<WorkloadEntry> entries);

  std::span<const WorkloadEntry> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  const WorkloadEntry& operator[](std::size_t i) const { return entries_.at(i); }

 private:
  std::vector<WorkloadEntry> entries_;
};

/// One `cnn file=<path> weight=<num> target_ms=<num>` line.
struct WorkloadFileEntry {
  std::string file;
  double weight = 1.0;
  double target_ms = 0.0;
};

std::vector<WorkloadFileEntry> parse_workload_file(std::string_view text);

/// Per-CNN device budgets: each capacity scaled by the share and floored.
/// Clock, bandwidth, reconfiguration time and model constants are
/// inherited; bandwidth is arbitrated by the transfer schedule.
std::vector<DeviceDescriptor> allocate_resources(const MultiCnnWorkload& workload,
                                                 const DeviceDescriptor& device,
                                                 std::span<const double> shares);

/// Off-chip traffic one CNN needs per input, and the cycles it takes to
/// execute that input (which doubles as its transfer deadline).
struct TransferDemand {
  std::uint64_t bits = 0;
  std::uint64_t exec_cycles = 0;
};

struct TransferSlot {
  std::size_t cnn = 0;
  std::uint64_t start = 0;
  std::uint64_t duration = 0;
  std::uint64_t bits = 0;

  bool operator==(const TransferSlot&) const = default;
};

/// Periodic time-division schedule of the shared memory bus, in cycles.
struct MemoryTransferSchedule {
  std::uint64_t period = 0;
  std::vector<TransferSlot> slots;
};

/// Bus bits per clock cycle on `device`.
double bits_per_cycle(const DeviceDescriptor& device);

/// Traffic of single-partition designs: input and output tensors, plus the
/// weights of every partition after the first when a design has several.
std::vector<TransferDemand> transfer_demands(const MultiCnnWorkload& workload,
                                             std::span<const DesignPoint> designs,
                                             const DeviceDescriptor& device);

/// period = max exec_cycles; one contiguous slot per CNN with traffic,
/// packed back-to-back in earliest-deadline-first order (ties by index).
/// Throws BandwidthInfeasible when the traffic does not fit in a period.
MemoryTransferSchedule schedule_transfers(std::span<const TransferDemand> demands,
                                          const DeviceDescriptor& device);

MemoryTransferSchedule schedule_transfers(const MultiCnnWorkload& workload,
                                          std::span<const DesignPoint> designs,
                                          const DeviceDescriptor& device);

/// Independent checker. Returns human-readable problems; empty when the
/// schedule has no overlap, no slot beyond the period, no slot faster than
/// the bus, covers every demand and fits the period's bit budget.
std::vector<std::string> validate_schedule(const MemoryTransferSchedule& schedule,
                                           std::span<const TransferDemand> demands,
                                           const DeviceDescriptor& device);

struct CostBreakdown {
  double total = 0.0;
  double deadline_term = 0.0;  // sum w_j * max(0, (lat_j - L_j) / L_j)
  double headroom_term = 0.0;  // lambda * sum w_j * lat_j / L_j
};

CostBreakdown multi_objective_breakdown(std::span<const double> latencies,
                                        std::span<const WorkloadEntry> entries,
                                        double lambda = 0.1);

double multi_objective_cost(std::span<const double> latencies, const MultiCnnWorkload& workload,
                            double lambda = 0.1);

struct MultiConfig {
  double lambda = 0.1;
  std::uint32_t share_steps = 20;  // shares move in 1/share_steps increments
  double share_move_probability = 0.3;
};

struct MultiCnnMapping {
  std::vector<std::uint32_t> share_units;  // in 1/share_steps
  std::vector<double> shares;
  std::vector<DeviceDescriptor> budgets;
  std::vector<DesignPoint> designs;
  std::vector<PerfReport> reports;  // evaluated against each budget
  std::vector<double> latencies;
  MemoryTransferSchedule schedule;
  CostBreakdown cost;
};

/// Evaluates one joint candidate; nullopt if a design does not fit its
/// budget or the transfer schedule is infeasible. Entries' weights are
/// used as given.
std::optional<MultiCnnMapping> evaluate_mapping(std::span<const WorkloadEntry> entries,
                                                const DeviceDescriptor& device,
                                                std::span<const std::uint32_t> share_units,
                                                std::span<const DesignPoint> designs,
                                                const MultiConfig& config = {});

/// Annealing over share vectors and per-CNN single-partition folding.
/// Deterministic in (inputs, cfg.seed). Throws NoFeasibleMapping when the
/// all-serial designs cannot co-fit at any share split.
MultiCnnMapping optimize_multi(const MultiCnnWorkload& workload, const DeviceDescriptor& device,
                               const OptimizerConfig& cfg = {}, const MultiConfig& config = {});

/// Brute force over every share vector and every folding combination.
/// Works for a single entry too (it then gets the whole device). Throws
/// SpaceTooLarge above max_points and NoFeasibleMapping if nothing fits.
MultiCnnMapping optimize_multi_exhaustive(std::span<const WorkloadEntry> entries,
                                          const DeviceDescriptor& device,
                                          const MultiConfig& config = {},
                                          std::uint64_t max_points = 5'000'000);

}  // namespace streamflow
