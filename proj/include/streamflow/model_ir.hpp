/*
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace streamflow {

enum class LayerKind { Conv, Pool, ReLU, FC };
enum class PoolKind { Max, Avg };

std::string_view to_string(LayerKind kind) noexcept;
std::string_view to_string(PoolKind kind) noexcept;

/// One layer of a linear CNN chain. Kernels are square and padding is
/// symmetric. ReLU and FC carry kernel=1, stride=1, padding=0; out_channels
/// is meaningful for Conv and FC only and pool_kind for Pool only.
struct LayerDescriptor {
  std::string name;
  LayerKind kind = LayerKind::ReLU;
  std::int64_t kernel = 1;
  std::int64_t stride = 1;
  std::int64_t padding = 0;
  std::int64_t out_channels = 0;
  PoolKind pool_kind = PoolKind::Max;

  bool operator==(const LayerDescriptor&) const = default;
};

struct TensorShape {
  std::int64_t channels = 0;
  std::int64_t height = 0;
  std::int64_t width = 0;

  std::uint64_t elements() const noexcept {
    return static_cast<std::uint64_t>(channels) *
           static_cast<std::uint64_t>(height) *
           static_cast<std::uint64_t>(width);
  }

  bool operator==(const TensorShape&) const = default;
};

/// Ordered chain of layers with inferred per-layer output shapes.
/// shapes[i] is the output of layers[i]; the input of layer i is
/// input_shape(i).
struct NetworkGraph {
  TensorShape input_shape;
  std::vector<LayerDescriptor> layers;
  std::vector<TensorShape> shapes;

  std::size_t size() const noexcept { return layers.size(); }
  const TensorShape& input_of(std::size_t layer) const {
    return layer == 0 ? input_shape : shapes.at(layer - 1);
  }
  const TensorShape& output_of(std::size_t layer) const {
    return shapes.at(layer);
  }
  const TensorShape& output_shape() const {
    return shapes.empty() ? input_shape : shapes.back();
  }

  /// Semantic equality: input shape and layer list. Shapes are derived.
  bool operator==(const NetworkGraph& other) const {
    return input_shape == other.input_shape && layers == other.layers;
  }
};

/// Parses the line-oriented network format:
///
///   input <channels> <height> <width>
///   conv name=<id> k=<int> s=<int> p=<int> out=<int>
///   pool name=<id> k=<int> s=<int> type=max|avg
///   relu name=<id>
///   fc name=<id> out=<int>
///
/// Lines starting with '#' and blank lines are skipped. Unknown keys are
/// rejected. Shapes are inferred before returning; failures carry the
/// 1-based line number of the offending line.
NetworkGraph parse_network(std::string_view text);

/// Inverse of parse_network on semantic content.
std::string serialize_network(const NetworkGraph& graph);

/// Validates the chain and fills graph.shapes. Throws NonPositiveDimension
/// (detail names the layer) when an inferred dimension would be < 1.
NetworkGraph infer_shapes(NetworkGraph graph);

/// Operation count of one layer, counting one MAC as one op. Conv:
/// H_out*W_out*C_out*C_in*k^2; FC: C_in_flat*C_out; Pool: H_out*W_out*C*k^2;
/// ReLU: C*H*W.
std::uint64_t layer_ops(const LayerDescriptor& layer, const TensorShape& in,
                        const TensorShape& out);

/// Resident parameter count. Pool and ReLU have none.
std::uint64_t layer_weights(const LayerDescriptor& layer,
                            const TensorShape& in);

std::uint64_t total_ops(const NetworkGraph& graph);
std::uint64_t total_weights(const NetworkGraph& graph);

}  // namespace streamflow
