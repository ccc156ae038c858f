/*
 * SPDX-License-Identifier: Apache-2.0
 */

#include "streamflow/design.hpp"

#include <algorithm>
#include <string>

#include "streamflow/error.hpp"

namespace streamflow {

std::string_view to_string(Mode mode) noexcept {
  return mode == Mode::Throughput ? "throughput" : "latency";
}

std::vector<std::size_t> DesignPoint::cut_points() const {
  std::vector<std::size_t> cuts;
  for (std::size_t p = 1; p < partitions.size(); ++p) cuts.push_back(partitions[p].begin);
  return cuts;
}

std::int64_t coarse_cap(const NetworkGraph& net, std::size_t layer) {
  const auto& l = net.layers.at(layer);
  switch (l.kind) {
    case LayerKind::Conv:
    case LayerKind::FC:
      return l.out_channels;
    case LayerKind::Pool:
    case LayerKind::ReLU:
      return net.input_of(layer).channels;
  }
  return 1;
}

std::int64_t fine_cap(const NetworkGraph& net, std::size_t layer) {
  const auto& l = net.layers.at(layer);
  const auto& in = net.input_of(layer);
  switch (l.kind) {
    case LayerKind::Conv:
      return in.channels * l.kernel * l.kernel;
    case LayerKind::FC:
      return static_cast<std::int64_t>(in.elements());
    case LayerKind::Pool:
    case LayerKind::ReLU:
      return 1;
  }
  return 1;
}

DesignPoint serial_design(const NetworkGraph& net, Mode mode) {
  DesignPoint d;
  d.stages.assign(net.size(), StageConfig{});
  d.mode = mode;
  d.partitions = {LayerRange{0, net.size()}};
  return d;
}

std::vector<LayerRange> partitions_from_cuts(std::size_t layer_count,
                                             std::span<const std::size_t> cuts) {
  std::vector<LayerRange> parts;
  std::size_t begin = 0;
  for (auto cut : cuts) {
    if (cut <= begin || cut >= layer_count)
      throw Error(ErrorCode::InvalidCutPoint,
                  "cut point " + std::to_string(cut) +
                      " must be strictly increasing and inside (0, " +
                      std::to_string(layer_count) + ")");
    parts.push_back({begin, cut});
    begin = cut;
  }
  parts.push_back({begin, layer_count});
  return parts;
}

namespace {

void check_layer(const DesignPoint& design, std::size_t layer) {
  if (layer >= design.stages.size())
    throw Error(ErrorCode::InvalidArgument,
                "layer index " + std::to_string(layer) + " out of range");
}

void check_folding(const NetworkGraph& net, std::size_t layer, const StageConfig& cfg) {
  const auto cc = coarse_cap(net, layer);
  const auto fc = fine_cap(net, layer);
  const auto& name = net.layers[layer].name;
  if (cfg.coarse < 1 || cfg.coarse > cc)
    throw Error(ErrorCode::FoldingOutOfRange,
                "layer '" + name + "' coarse " + std::to_string(cfg.coarse) +
                    " outside [1, " + std::to_string(cc) + "]");
  if (cfg.fine < 1 || cfg.fine > fc)
    throw Error(ErrorCode::FoldingOutOfRange,
                "layer '" + name + "' fine " + std::to_string(cfg.fine) +
                    " outside [1, " + std::to_string(fc) + "]");
}

}  // namespace

void validate_design(const NetworkGraph& net, const DesignPoint& design) {
  if (design.stages.size() != net.size())
    throw Error(ErrorCode::InvalidArgument,
                "design has " + std::to_string(design.stages.size()) +
                    " stage configs for a " + std::to_string(net.size()) + "-layer network");
  for (std::size_t i = 0; i < net.size(); ++i) check_folding(net, i, design.stages[i]);
  std::size_t expect = 0;
  for (const auto& p : design.partitions) {
    if (p.begin != expect || p.end <= p.begin)
      throw Error(ErrorCode::InvalidCutPoint, "partitions must be contiguous and non-empty");
    expect = p.end;
  }
  if (expect != net.size() || design.partitions.empty())
    throw Error(ErrorCode::InvalidCutPoint, "partitions must cover every layer");
}

DesignPoint set_coarse_folding(const DesignPoint& design, const NetworkGraph& net,
                               std::size_t layer, std::int64_t coarse) {
  check_layer(design, layer);
  DesignPoint out = design;
  out.stages[layer].coarse = coarse;
  check_folding(net, layer, out.stages[layer]);
  return out;
}

DesignPoint set_fine_folding(const DesignPoint& design, const NetworkGraph& net,
                             std::size_t layer, std::int64_t fine) {
  check_layer(design, layer);
  DesignPoint out = design;
  out.stages[layer].fine = fine;
  check_folding(net, layer, out.stages[layer]);
  return out;
}

DesignPoint partition_graph(const DesignPoint& design, std::span<const std::size_t> cuts) {
  if (design.mode != Mode::Throughput)
    throw Error(ErrorCode::ModeMismatch,
                "graph partitioning with reconfiguration needs a throughput-mode design");
  DesignPoint out = design;
  out.partitions = partitions_from_cuts(design.stages.size(), cuts);
  return out;
}

DesignPoint weights_reloading(const DesignPoint& design, std::span<const std::size_t> cuts) {
  DesignPoint out = design;
  out.partitions = partitions_from_cuts(design.stages.size(), cuts);
  out.mode = Mode::Latency;
  return out;
}

std::vector<std::int64_t> encode(const DesignPoint& design) {
  std::vector<std::int64_t> code;
  code.reserve(2 + design.partitions.size() + 2 * design.stages.size());
  code.push_back(design.mode == Mode::Throughput ? 0 : 1);
  code.push_back(static_cast<std::int64_t>(design.partitions.size()));
  for (auto c : design.cut_points()) code.push_back(static_cast<std::int64_t>(c));
  for (const auto& s : design.stages) {
    code.push_back(s.coarse);
    code.push_back(s.fine);
  }
  return code;
}

bool encoding_less(const DesignPoint& a, const DesignPoint& b) {
  const auto ea = encode(a);
  const auto eb = encode(b);
  return std::lexicographical_compare(ea.begin(), ea.end(), eb.begin(), eb.end());
}

std::vector<std::int64_t> divisors(std::int64_t n) {
  std::vector<std::int64_t> small, large;
  for (std::int64_t d = 1; d * d <= n; ++d) {
    if (n % d != 0) continue;
    small.push_back(d);
    if (d != n / d) large.push_back(n / d);
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}

}  // namespace streamflow
