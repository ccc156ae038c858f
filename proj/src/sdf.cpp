/*
 * SPDX-License-Identifier: Apache-2.0
 */

#include "streamflow/sdf.hpp"

#include <algorithm>

#include "streamflow/error.hpp"
#include "streamflow/perf_model.hpp"

namespace streamflow {

namespace {

SdfGraph build_range(const NetworkGraph& net, const DesignPoint& design, LayerRange range) {
  validate_design(net, design);
  SdfGraph g;
  for (std::size_t i = range.begin; i < range.end; ++i) {
    SdfStage s;
    s.layer = i;
    s.config = design.stages[i];
    s.tokens_in = net.input_of(i).elements();
    s.tokens_out = net.output_of(i).elements();
    s.cycles = stage_cycles(net.layers[i], net.input_of(i), net.output_of(i), s.config);
    g.stages.push_back(s);
  }
  for (std::size_t k = 1; k < g.stages.size(); ++k)
    g.arcs.push_back({k - 1, k, g.stages[k - 1].tokens_out});
  g.source_tokens = net.input_of(range.begin).elements();
  g.sink_tokens = net.output_of(range.end - 1).elements();
  return g;
}

}  // namespace

std::vector<std::vector<Rational>> SdfGraph::rate_matrix() const {
  std::vector<std::vector<Rational>> m(arcs.size(), std::vector<Rational>(stages.size()));
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    const auto& p = stages[arcs[a].producer];
    const auto& c = stages[arcs[a].consumer];
    m[a][arcs[a].producer] = Rational(p.tokens_out, p.cycles);
    m[a][arcs[a].consumer] = -Rational(c.tokens_in, c.cycles);
  }
  return m;
}

SdfGraph build_sdf(const NetworkGraph& net, const DesignPoint& design) {
  return build_range(net, design, {0, net.size()});
}

SdfGraph build_sdf(const NetworkGraph& net, const DesignPoint& design, std::size_t partition) {
  if (partition >= design.partitions.size())
    throw Error(ErrorCode::InvalidArgument,
                "partition " + std::to_string(partition) + " out of range");
  return build_range(net, design, design.partitions[partition]);
}

NullSpace rational_null_space(std::vector<std::vector<Rational>> m, std::size_t cols) {
  NullSpace out;
  std::vector<std::size_t> pivot_col;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < m.size(); ++col) {
    std::size_t pivot = row;
    while (pivot < m.size() && m[pivot][col] == 0) ++pivot;
    if (pivot == m.size()) continue;
    std::swap(m[row], m[pivot]);
    const Rational inv = 1 / m[row][col];
    for (auto& v : m[row]) v *= inv;
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == row || m[r][col] == 0) continue;
      const Rational f = m[r][col];
      for (std::size_t c = col; c < cols; ++c) m[r][c] -= f * m[row][c];
    }
    pivot_col.push_back(col);
    ++row;
  }
  out.rank = row;
  if (out.rank + 1 != cols) return out;

  std::size_t free_col = cols - 1;
  for (std::size_t c = 0, k = 0; c < cols; ++c) {
    if (k < pivot_col.size() && pivot_col[k] == c) {
      ++k;
    } else {
      free_col = c;
      break;
    }
  }
  std::vector<Rational> v(cols);
  v[free_col] = 1;
  for (std::size_t r = 0; r < pivot_col.size(); ++r) v[pivot_col[r]] = -m[r][free_col];
  out.vector = std::move(v);
  return out;
}

ConsistencyReport check_consistency(const SdfGraph& g) {
  ConsistencyReport report;
  report.conserving = std::all_of(g.arcs.begin(), g.arcs.end(), [&](const SdfArc& a) {
    return g.stages[a.producer].tokens_out == g.stages[a.consumer].tokens_in;
  });
  const std::size_t n = g.stages.size();
  if (n == 0) {
    report.balance_vector = std::vector<Rational>{};
    return report;
  }
  // Close the chain through a host actor (column n) that fires once per
  // input: host -> first stage -> ... -> last stage -> host.
  auto m = g.rate_matrix();
  for (auto& row : m) row.emplace_back(0);
  std::vector<Rational> feed(n + 1), drain(n + 1);
  feed[n] = Rational(g.source_tokens);
  feed[0] = -Rational(g.stages[0].tokens_in, g.stages[0].cycles);
  drain[n - 1] = Rational(g.stages[n - 1].tokens_out, g.stages[n - 1].cycles);
  drain[n] = -Rational(g.sink_tokens);
  m.push_back(std::move(feed));
  m.push_back(std::move(drain));

  auto ns = rational_null_space(std::move(m), n + 1);
  if (!ns.vector) return report;
  auto& t = *ns.vector;
  const bool positive = std::all_of(t.begin(), t.end(), [](const Rational& x) { return x > 0; });
  const bool negative = std::all_of(t.begin(), t.end(), [](const Rational& x) { return x < 0; });
  if (!positive && !negative) return report;
  const Rational scale = Rational(g.stages[0].cycles) / t[0];
  std::vector<Rational> balance(n);
  for (std::size_t i = 0; i < n; ++i) balance[i] = t[i] * scale;
  report.balance_vector = std::move(balance);
  return report;
}

std::uint64_t initiation_interval(const SdfGraph& g) {
  std::uint64_t ii = 0;
  for (const auto& s : g.stages) ii = std::max(ii, s.cycles);
  return ii;
}

}  // namespace streamflow
