/*
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "streamflow/design.hpp"
#include "streamflow/model_ir.hpp"

namespace streamflow {

/// Target device. BRAM is counted in 18 Kbit blocks.
struct DeviceDescriptor {
  std::string name;
  std::int64_t dsp = 0;
  std::int64_t bram = 0;
  std::int64_t lut = 0;
  double clock_mhz = 100.0;
  double bandwidth_gbps = 1.0;
  double reconfig_ms = 0.0;
  int word_bits = 16;
  // Per-stage LUT model: alpha + beta * coarse * fine. Uncalibrated.
  double lut_alpha = 300.0;
  double lut_beta = 40.0;

  double clock_hz() const noexcept { return clock_mhz * 1e6; }
  double bandwidth_bps() const noexcept { return bandwidth_gbps * 1e9; }
  double reconfig_s() const noexcept { return reconfig_ms * 1e-3; }

  bool operator==(const DeviceDescriptor&) const = default;
};

inline constexpr std::uint64_t kBramBlockBits = 18432;

/// Parses the device format: `device name=<id>`, `dsp <int>`, `bram <int>`,
/// `lut <int>`, `clock_mhz <num>`, `bandwidth_gbps <num>`, `reconfig_ms <num>`,
/// `word_bits <int>`, and optionally `lut_alpha <num>`, `lut_beta <num>`.
DeviceDescriptor parse_device(std::string_view text);
std::string serialize_device(const DeviceDescriptor& device);
void validate_device(const DeviceDescriptor& device);

struct ResourceVector {
  std::uint64_t dsp = 0;
  std::uint64_t bram = 0;
  std::uint64_t lut = 0;

  ResourceVector& operator+=(const ResourceVector& o) noexcept {
    dsp += o.dsp;
    bram += o.bram;
    lut += o.lut;
    return *this;
  }
  bool operator==(const ResourceVector&) const = default;
};

ResourceVector max(const ResourceVector& a, const ResourceVector& b) noexcept;

struct FitVerdict {
  bool feasible = true;
  std::vector<std::string> violations;  // e.g. "dsp 221 > 220"
};

struct PerfReport {
  std::uint64_t batch = 1;
  double throughput = 0.0;      // inputs/s at `batch`
  double latency_single = 0.0;  // seconds, batch 1
  ResourceVector resources;
  double bandwidth_demand_gbps = 0.0;
  bool feasible = false;
  std::vector<std::string> violations;
};

/// Active cycles per input: ceil(ops / (coarse * fine)) for Conv/FC and
/// ceil(ops / coarse) for Pool/ReLU.
std::uint64_t stage_cycles(const LayerDescriptor& layer, const TensorShape& in,
                           const TensorShape& out, const StageConfig& config);

std::vector<std::uint64_t> design_cycles(const NetworkGraph& net, const DesignPoint& design);

/// Resources of one stage built for `config`. DSP: coarse*fine for Conv/FC.
/// BRAM: line buffer (k-1)*W_in*C_in*word_bits for Conv/Pool plus resident
/// weights, each rounded up to whole blocks separately. LUT:
/// ceil(alpha + beta*coarse*fine).
ResourceVector stage_resources(const LayerDescriptor& layer, const TensorShape& in,
                               const StageConfig& config, const DeviceDescriptor& device);

/// Throughput mode: componentwise max over partitions of each partition's
/// stage sum. Latency mode: one envelope architecture whose stage at
/// position i is the componentwise max over partitions of their i-th stage.
ResourceVector estimate_resources(const DesignPoint& design, const NetworkGraph& net,
                                  const DeviceDescriptor& device);

/// Single-input latency in seconds. Weight reloads (latency mode) or device
/// reconfigurations (throughput mode) are charged between partitions.
double estimate_latency(const DesignPoint& design, const NetworkGraph& net,
                        const DeviceDescriptor& device);

/// Inputs per second for a batch of `batch` >= 1 inputs.
double estimate_throughput(const DesignPoint& design, const NetworkGraph& net,
                           const DeviceDescriptor& device, std::uint64_t batch);

/// Peak off-chip feature-map traffic over partitions, in Gbit/s.
double estimate_bandwidth(const DesignPoint& design, const NetworkGraph& net,
                          const DeviceDescriptor& device);

/// Bits streamed from memory when switching into partition p (latency mode).
std::uint64_t partition_weight_bits(const DesignPoint& design, const NetworkGraph& net,
                                    std::size_t partition, int word_bits);

FitVerdict check_fit(const ResourceVector& resources, const DeviceDescriptor& device);

/// Everything above in one report. feasible <=> resources fit and the
/// bandwidth demand is within the device bandwidth.
PerfReport evaluate(const DesignPoint& design, const NetworkGraph& net,
                    const DeviceDescriptor& device, std::uint64_t batch = 1);

/// Discrete-event simulation of a linear pipeline with deterministic
/// service times, one-slot buffers between stages and blocking hand-off.
/// Returns the makespan of `batch` inputs in cycles.
std::uint64_t simulate_pipeline(std::span<const std::uint64_t> service_cycles,
                                std::uint64_t batch);

/// Same, for a single-partition design. batch must be in [1, 10^4].
std::uint64_t simulate_pipeline(const DesignPoint& design, const NetworkGraph& net,
                                std::uint64_t batch);

/// Sum T_i + (batch - 1) * max T_i.
std::uint64_t analytic_makespan(std::span<const std::uint64_t> service_cycles,
                                std::uint64_t batch);

}  // namespace streamflow
