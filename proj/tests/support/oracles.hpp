/*
 * SPDX-License-Identifier: Apache-2.0
 */

// Independent reference implementations and random generators shared by the
// unit and acceptance tests. Nothing here calls into the code it checks
// beyond constructing inputs.

#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "streamflow/design.hpp"
#include "streamflow/dse.hpp"
#include "streamflow/model_ir.hpp"
#include "streamflow/perf_model.hpp"

namespace streamflow::testing {

using Gen = std::mt19937_64;

inline std::int64_t uniform(Gen& g, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(g);
}

/// Random valid chain: conv/pool/relu body with an optional fc tail.
inline NetworkGraph random_network(Gen& g, std::size_t max_layers = 6) {
  NetworkGraph net;
  net.input_shape = {uniform(g, 1, 6), uniform(g, 4, 16), 0};
  net.input_shape.width = net.input_shape.height;
  const auto layers = static_cast<std::size_t>(uniform(g, 1, static_cast<std::int64_t>(max_layers)));
  TensorShape cur = net.input_shape;
  bool in_fc = false;
  for (std::size_t i = 0; i < layers; ++i) {
    LayerDescriptor l;
    l.name = "l" + std::to_string(i);
    const auto pick = uniform(g, 0, 9);
    if (in_fc || pick >= 8) {
      l.kind = in_fc && pick < 5 ? LayerKind::ReLU : LayerKind::FC;
      if (l.kind == LayerKind::FC) {
        l.out_channels = uniform(g, 1, 16);
        cur = {l.out_channels, 1, 1};
        in_fc = true;
      }
    } else if (pick < 4) {
      l.kind = LayerKind::Conv;
      l.padding = uniform(g, 0, 1);
      l.kernel = uniform(g, 1, std::min<std::int64_t>(5, cur.height + 2 * l.padding));
      l.stride = uniform(g, 1, 2);
      l.out_channels = uniform(g, 1, 8);
      const auto h = (cur.height + 2 * l.padding - l.kernel) / l.stride + 1;
      cur = {l.out_channels, h, h};
    } else if (pick < 6 && cur.height >= 2) {
      l.kind = LayerKind::Pool;
      l.kernel = uniform(g, 1, std::min<std::int64_t>(3, cur.height));
      l.stride = uniform(g, 1, 2);
      l.pool_kind = uniform(g, 0, 1) ? PoolKind::Max : PoolKind::Avg;
      const auto h = (cur.height - l.kernel) / l.stride + 1;
      cur = {cur.channels, h, h};
    } else {
      l.kind = LayerKind::ReLU;
    }
    net.layers.push_back(l);
  }
  return infer_shapes(std::move(net));
}

/// Random in-range folding, random cut set and random mode.
inline DesignPoint random_design(const NetworkGraph& net, Gen& g, bool divisors_only = false) {
  DesignPoint d = serial_design(net, uniform(g, 0, 1) ? Mode::Latency : Mode::Throughput);
  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto c = coarse_cap(net, i), f = fine_cap(net, i);
    if (divisors_only) {
      const auto dc = divisors(c), df = divisors(f);
      d.stages[i] = {dc[static_cast<std::size_t>(uniform(g, 0, std::ssize(dc) - 1))],
                     df[static_cast<std::size_t>(uniform(g, 0, std::ssize(df) - 1))]};
    } else {
      d.stages[i] = {uniform(g, 1, c), uniform(g, 1, f)};
    }
  }
  std::vector<std::size_t> cuts;
  for (std::size_t i = 1; i < net.size(); ++i)
    if (uniform(g, 0, 3) == 0) cuts.push_back(i);
  d.partitions = partitions_from_cuts(net.size(), cuts);
  return d;
}

/// Divisors of n by trial division up to n.
inline std::vector<std::int64_t> naive_divisors(std::int64_t n) {
  std::vector<std::int64_t> out;
  for (std::int64_t k = 1; k <= n; ++k)
    if (n % k == 0) out.push_back(k);
  return out;
}

/// Zero-buffer blocking tandem line: item i may leave stage j only once
/// item i-1 has left stage j+1. The result is the departure of the last
/// item from the last stage.
inline std::uint64_t blocking_makespan(std::span<const std::uint64_t> t, std::uint64_t batch) {
  const std::size_t m = t.size();
  if (m == 0 || batch == 0) return 0;
  std::vector<std::uint64_t> prev(m + 1, 0), cur(m + 1, 0);  // departure times
  for (std::uint64_t i = 0; i < batch; ++i) {
    std::uint64_t arrive = 0;
    for (std::size_t j = 0; j < m; ++j) {
      const std::uint64_t start = std::max(arrive, prev[j]);
      const std::uint64_t done = start + t[j];
      // Blocked until the previous item vacates the next stage.
      cur[j] = j + 1 < m ? std::max(done, prev[j + 1]) : done;
      arrive = cur[j];
    }
    std::swap(prev, cur);
  }
  return prev[m - 1];
}

/// Quadratic Pareto filter over (oriented metric, resource).
inline std::set<std::size_t> pareto_oracle(std::span<const PerfReport> reports,
                                           const ParetoAxes& axes) {
  auto metric = [&](const PerfReport& r) {
    return axes.metric == ParetoMetric::Latency ? r.latency_single : -r.throughput;
  };
  auto resource = [&](const PerfReport& r) {
    switch (axes.resource) {
      case ResourceAxis::Dsp: return r.resources.dsp;
      case ResourceAxis::Bram: return r.resources.bram;
      default: return r.resources.lut;
    }
  };
  std::set<std::size_t> front;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < reports.size() && !dominated; ++j) {
      const double mi = metric(reports[i]), mj = metric(reports[j]);
      const auto ri = resource(reports[i]), rj = resource(reports[j]);
      dominated = mj <= mi && rj <= ri && (mj < mi || rj < ri);
    }
    if (!dominated) front.insert(i);
  }
  return front;
}

}  // namespace streamflow::testing
