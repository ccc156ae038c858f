/*
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "streamflow/model_ir.hpp"

namespace streamflow {

/// Folding of one pipeline stage. `coarse` replicates the processing unit
/// across output channels; `fine` unrolls the dot product inside one unit.
struct StageConfig {
  std::int64_t coarse = 1;
  std::int64_t fine = 1;

  bool operator==(const StageConfig&) const = default;
};

/// Throughput: each partition is a standalone accelerator and the device is
/// reconfigured between partitions, batch by batch. Latency: one run-time
/// configurable architecture runs all partitions back-to-back per input,
/// streaming the next partition's weights instead of reconfiguring.
enum class Mode { Throughput, Latency };

std::string_view to_string(Mode mode) noexcept;

/// Half-open layer range [begin, end).
struct LayerRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  bool operator==(const LayerRange&) const = default;
};

struct DesignPoint {
  std::vector<StageConfig> stages;
  Mode mode = Mode::Throughput;
  std::vector<LayerRange> partitions;

  std::size_t partition_count() const noexcept { return partitions.size(); }
  /// Layer indices at which a new partition starts, excluding 0.
  std::vector<std::size_t> cut_points() const;

  bool operator==(const DesignPoint&) const = default;
};

/// Kind-specific folding caps. Coarse: C_out for Conv/FC, C for Pool/ReLU.
/// Fine: C_in*k^2 for Conv, C_in_flat for FC, 1 for Pool/ReLU.
std::int64_t coarse_cap(const NetworkGraph& net, std::size_t layer);
std::int64_t fine_cap(const NetworkGraph& net, std::size_t layer);

/// All-serial design (coarse = fine = 1) with a single partition.
DesignPoint serial_design(const NetworkGraph& net, Mode mode = Mode::Throughput);

/// Throws InvalidCutPoint unless cuts are strictly increasing interior
/// indices of an n-layer chain.
std::vector<LayerRange> partitions_from_cuts(std::size_t layer_count,
                                             std::span<const std::size_t> cuts);

/// Checks folding caps (FoldingOutOfRange) and the partition cover
/// (InvalidCutPoint) of a design against a network.
void validate_design(const NetworkGraph& net, const DesignPoint& design);

DesignPoint set_coarse_folding(const DesignPoint& design, const NetworkGraph& net,
                               std::size_t layer, std::int64_t coarse);
DesignPoint set_fine_folding(const DesignPoint& design, const NetworkGraph& net,
                             std::size_t layer, std::int64_t fine);

/// Re-derives partitions from cut points for device reconfiguration.
/// Requires Throughput mode (ModeMismatch otherwise).
DesignPoint partition_graph(const DesignPoint& design, std::span<const std::size_t> cuts);

/// Re-derives partitions from cut points and switches to Latency mode.
DesignPoint weights_reloading(const DesignPoint& design, std::span<const std::size_t> cuts);

/// Flat encoding used as the total order for tie-breaking:
/// (mode, partition count, cuts..., coarse_0, fine_0, coarse_1, ...).
std::vector<std::int64_t> encode(const DesignPoint& design);
bool encoding_less(const DesignPoint& a, const DesignPoint& b);

/// Sorted divisors of n (n itself included).
std::vector<std::int64_t> divisors(std::int64_t n);

}  // namespace streamflow
