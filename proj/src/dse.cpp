/*
 * SPDX-License-Identifier: Apache-2.0
 */

#include "streamflow/dse.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "streamflow/error.hpp"

namespace streamflow {

Objective Objective::max_throughput(std::uint64_t batch) {
  if (batch < 1) throw Error(ErrorCode::InvalidArgument, "throughput batch must be >= 1");
  return {Kind::MaxThroughput, batch};
}

double Objective::cost(const PerfReport& report) const {
  return kind == Kind::MaxThroughput ? -report.throughput : report.latency_single;
}

std::string Objective::to_string() const {
  return kind == Kind::MinLatency ? "latency" : "throughput:" + std::to_string(batch);
}

Objective parse_objective(std::string_view text) {
  if (text == "latency") return Objective::min_latency();
  constexpr std::string_view prefix = "throughput:";
  if (text.starts_with(prefix)) {
    auto num = text.substr(prefix.size());
    std::uint64_t batch = 0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), batch);
    if (ec == std::errc() && ptr == num.data() + num.size() && batch >= 1)
      return Objective::max_throughput(batch);
  }
  throw Error(ErrorCode::InvalidArgument,
              "objective must be 'latency' or 'throughput:<batch>', got '" + std::string(text) +
                  "'");
}

void validate(const OptimizerConfig& cfg) {
  if (!(cfg.initial_temperature > 0))
    throw Error(ErrorCode::InvalidArgument, "initial_temperature must be > 0");
  if (!(cfg.cooling_rate > 0 && cfg.cooling_rate < 1))
    throw Error(ErrorCode::InvalidArgument, "cooling_rate must be in (0, 1)");
  if (cfg.iterations_per_temperature < 1)
    throw Error(ErrorCode::InvalidArgument, "iterations_per_temperature must be >= 1");
  if (!(cfg.temperature_floor > 0))
    throw Error(ErrorCode::InvalidArgument, "temperature_floor must be > 0");
  const auto& w = cfg.moves;
  if (w.folding < 0 || w.partition < 0 || w.mode < 0 ||
      std::abs(w.folding + w.partition + w.mode - 1.0) > 1e-9)
    throw Error(ErrorCode::InvalidArgument, "move weights must be >= 0 and sum to 1");
}

OptimizerConfig parse_optimizer_config(std::string_view text, OptimizerConfig cfg) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::MalformedLine, "expected key=value", line_no);
    auto key = line.substr(0, eq);
    auto value = line.substr(eq + 1);
    auto real = [&]() {
      double v = 0;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc() || ptr != value.data() + value.size())
        throw Error(ErrorCode::MalformedLine, "'" + std::string(key) + "' needs a number", line_no);
      return v;
    };
    auto integer = [&]() {
      std::uint64_t v = 0;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc() || ptr != value.data() + value.size())
        throw Error(ErrorCode::MalformedLine, "'" + std::string(key) + "' needs an integer",
                    line_no);
      return v;
    };
    if (key == "seed") cfg.seed = integer();
    else if (key == "initial_temperature") cfg.initial_temperature = real();
    else if (key == "cooling_rate") cfg.cooling_rate = real();
    else if (key == "iterations_per_temperature") cfg.iterations_per_temperature = integer();
    else if (key == "temperature_floor") cfg.temperature_floor = real();
    else if (key == "move_folding") cfg.moves.folding = real();
    else if (key == "move_partition") cfg.moves.partition = real();
    else if (key == "move_mode") cfg.moves.mode = real();
    else if (key == "max_partitions") cfg.max_partitions = integer();
    else
      throw Error(ErrorCode::MalformedLine, "unknown optimizer key '" + std::string(key) + "'",
                  line_no);
  }
  validate(cfg);
  return cfg;
}

FoldingSpace FoldingSpace::of(const NetworkGraph& net) {
  FoldingSpace s;
  for (std::size_t i = 0; i < net.size(); ++i) {
    s.coarse.push_back(divisors(coarse_cap(net, i)));
    s.fine.push_back(divisors(fine_cap(net, i)));
  }
  return s;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > UINT64_MAX / a) return UINT64_MAX;
  return a * b;
}

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return b > UINT64_MAX - a ? UINT64_MAX : a + b;
}

std::size_t effective_max_partitions(std::size_t requested, std::size_t layers) {
  return requested == 0 ? layers : std::min(requested, layers);
}

std::size_t option_index(const std::vector<std::int64_t>& options, std::int64_t value) {
  auto it = std::lower_bound(options.begin(), options.end(), value);
  if (it == options.end()) return options.size() - 1;
  return static_cast<std::size_t>(it - options.begin());
}

std::size_t step(std::size_t idx, std::size_t count, Rng& rng) {
  const bool up = rng.index(2) == 1;
  if (up) return idx + 1 < count ? idx + 1 : idx - 1;
  return idx > 0 ? idx - 1 : idx + 1;
}

bool better(double cost, const DesignPoint& design, double best_cost, const DesignPoint& best) {
  return cost < best_cost || (cost == best_cost && encoding_less(design, best));
}

std::vector<std::size_t> balanced_cuts(std::size_t layers, std::size_t parts) {
  std::vector<std::size_t> cuts;
  for (std::size_t k = 1; k < parts; ++k) cuts.push_back(k * layers / parts);
  return cuts;
}

constexpr std::size_t kMaxScannedCuts = 12;

// Layers [begin, end) as a standalone chain.
NetworkGraph segment(const NetworkGraph& net, std::size_t begin, std::size_t end) {
  NetworkGraph sub;
  sub.input_shape = net.input_of(begin);
  sub.layers.assign(net.layers.begin() + static_cast<std::ptrdiff_t>(begin),
                    net.layers.begin() + static_cast<std::ptrdiff_t>(end));
  return infer_shapes(std::move(sub));
}

// Cut points of the fewest-partition throughput-mode all-serial design
// that fits, if any.
std::optional<std::vector<std::size_t>> serial_segmentation(const NetworkGraph& net,
                                                            const DeviceDescriptor& device,
                                                            std::size_t max_parts) {
  const std::size_t n = net.size();
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> parts(n + 1, kNone), parent(n + 1, 0);
  parts[0] = 0;
  for (std::size_t end = 1; end <= n; ++end)
    for (std::size_t begin = 0; begin < end; ++begin) {
      if (parts[begin] == kNone || parts[begin] + 1 >= parts[end]) continue;
      const auto sub = segment(net, begin, end);
      if (!evaluate(serial_design(sub), sub, device).feasible) continue;
      parts[end] = parts[begin] + 1;
      parent[end] = begin;
    }
  if (parts[n] == kNone || parts[n] > max_parts) return std::nullopt;
  std::vector<std::size_t> cuts;
  for (std::size_t at = parent[n]; at > 0; at = parent[at]) cuts.push_back(at);
  std::reverse(cuts.begin(), cuts.end());
  return cuts;
}

}  // namespace

std::uint64_t FoldingSpace::combinations() const {
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < coarse.size(); ++i)
    total = sat_mul(total, sat_mul(coarse[i].size(), fine[i].size()));
  return total;
}

std::optional<DesignPoint> propose_folding_move(const DesignPoint& design,
                                                const FoldingSpace& space, Rng& rng) {
  // (layer, axis) pairs with more than one option; axis 0 coarse, 1 fine.
  std::vector<std::pair<std::size_t, int>> choices;
  for (std::size_t i = 0; i < space.coarse.size(); ++i) {
    if (space.coarse[i].size() > 1) choices.emplace_back(i, 0);
    if (space.fine[i].size() > 1) choices.emplace_back(i, 1);
  }
  if (choices.empty()) return std::nullopt;
  const auto [layer, axis] = choices[rng.index(choices.size())];
  DesignPoint out = design;
  const auto& options = axis == 0 ? space.coarse[layer] : space.fine[layer];
  auto& value = axis == 0 ? out.stages[layer].coarse : out.stages[layer].fine;
  value = options[step(option_index(options, value), options.size(), rng)];
  return out;
}

std::optional<DesignPoint> propose_partition_move(const DesignPoint& design,
                                                  std::size_t max_partitions, Mode single_mode,
                                                  Rng& rng) {
  const std::size_t n = design.stages.size();
  auto cuts = design.cut_points();
  const std::size_t parts = cuts.size() + 1;
  const std::size_t max_parts = effective_max_partitions(max_partitions, n);

  std::vector<std::size_t> free_positions;
  for (std::size_t c = 1; c < n; ++c)
    if (!std::binary_search(cuts.begin(), cuts.end(), c)) free_positions.push_back(c);

  std::vector<std::pair<std::size_t, std::size_t>> shifts;  // (cut index, new position)
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    const std::size_t lo = k == 0 ? 0 : cuts[k - 1];
    const std::size_t hi = k + 1 == cuts.size() ? n : cuts[k + 1];
    if (cuts[k] - 1 > lo) shifts.emplace_back(k, cuts[k] - 1);
    if (cuts[k] + 1 < hi) shifts.emplace_back(k, cuts[k] + 1);
  }

  enum Op { Add, Remove, Shift };
  std::vector<Op> ops;
  if (parts < max_parts && !free_positions.empty()) ops.push_back(Add);
  if (parts > 1) ops.push_back(Remove);
  if (!shifts.empty()) ops.push_back(Shift);
  if (ops.empty()) return std::nullopt;

  switch (ops[rng.index(ops.size())]) {
    case Add: {
      const auto c = free_positions[rng.index(free_positions.size())];
      cuts.insert(std::upper_bound(cuts.begin(), cuts.end(), c), c);
      break;
    }
    case Remove:
      cuts.erase(cuts.begin() + static_cast<std::ptrdiff_t>(rng.index(cuts.size())));
      break;
    case Shift: {
      const auto [k, to] = shifts[rng.index(shifts.size())];
      cuts[k] = to;
      break;
    }
  }
  DesignPoint out = design;
  out.partitions = partitions_from_cuts(n, cuts);
  if (out.partitions.size() == 1) out.mode = single_mode;
  return out;
}

namespace {

std::optional<DesignPoint> propose(const DesignPoint& cur, const FoldingSpace& space,
                                   const OptimizerConfig& cfg, std::size_t max_parts,
                                   Mode single_mode, Rng& rng) {
  const std::size_t n = cur.stages.size();
  const bool can_fold = std::any_of(space.coarse.begin(), space.coarse.end(),
                                    [](const auto& v) { return v.size() > 1; }) ||
                        std::any_of(space.fine.begin(), space.fine.end(),
                                    [](const auto& v) { return v.size() > 1; });
  const bool can_partition = n > 1 && max_parts > 1;
  const bool can_flip = cur.partitions.size() > 1;

  const double w_fold = can_fold ? cfg.moves.folding : 0.0;
  const double w_part = can_partition ? cfg.moves.partition : 0.0;
  const double w_mode = can_flip ? cfg.moves.mode : 0.0;
  const double total = w_fold + w_part + w_mode;
  if (!(total > 0)) return std::nullopt;

  const double u = rng.uniform() * total;
  if (u < w_fold) return propose_folding_move(cur, space, rng);
  if (u < w_fold + w_part) return propose_partition_move(cur, max_parts, single_mode, rng);
  DesignPoint out = cur;
  out.mode = cur.mode == Mode::Throughput ? Mode::Latency : Mode::Throughput;
  return out;
}

}  // namespace

std::optional<EvaluatedDesign> initial_design(const NetworkGraph& net,
                                              const DeviceDescriptor& device,
                                              const Objective& objective,
                                              std::size_t max_partitions) {
  const std::size_t n = net.size();
  const std::size_t max_parts = effective_max_partitions(max_partitions, n);
  const Mode preferred = objective.single_partition_mode();
  const Mode other = preferred == Mode::Latency ? Mode::Throughput : Mode::Latency;

  std::vector<DesignPoint> candidates;
  if (max_parts > 1) {
    const auto cuts = balanced_cuts(n, max_parts);
    for (Mode m : {preferred, other}) {
      DesignPoint d = serial_design(net, m);
      d.partitions = partitions_from_cuts(n, cuts);
      candidates.push_back(std::move(d));
    }
  }
  candidates.push_back(serial_design(net, preferred));

  auto first_feasible = [&](std::vector<DesignPoint>& ds) -> std::optional<EvaluatedDesign> {
    for (auto& d : ds) {
      auto report = evaluate(d, net, device, objective.eval_batch());
      if (report.feasible) return EvaluatedDesign{std::move(d), std::move(report)};
    }
    return std::nullopt;
  };
  if (auto found = first_feasible(candidates)) return found;

  // Serial folding minimises every resource and the bandwidth demand, so
  // some all-serial design fits whenever any design does; only the cut set
  // is left to find. In throughput mode each partition fits or not on its
  // own, so the fewest-partition feasible segmentation is a prefix DP.
  candidates.clear();
  if (auto cuts = serial_segmentation(net, device, max_parts)) {
    for (Mode m : {preferred, other}) {
      DesignPoint d = serial_design(net, m);
      d.partitions = partitions_from_cuts(n, *cuts);
      candidates.push_back(std::move(d));
    }
    if (auto found = first_feasible(candidates)) return found;
  }

  // The latency-mode envelope couples partitions; scan every cut set of
  // short chains, fewest partitions first.
  if (n >= 2 && n - 1 <= kMaxScannedCuts) {
    candidates.clear();
    const std::uint32_t positions = static_cast<std::uint32_t>(n - 1);
    for (std::size_t parts = 2; parts <= max_parts; ++parts)
      for (std::uint32_t mask = 0; mask < (1u << positions); ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) + 1 != parts) continue;
        std::vector<std::size_t> cuts;
        for (std::uint32_t b = 0; b < positions; ++b)
          if (mask >> b & 1u) cuts.push_back(b + 1);
        DesignPoint d = serial_design(net, Mode::Latency);
        d.partitions = partitions_from_cuts(n, cuts);
        candidates.push_back(std::move(d));
      }
    if (auto found = first_feasible(candidates)) return found;
  }
  return std::nullopt;
}

OptimizeResult optimize_sa(const NetworkGraph& net, const DeviceDescriptor& device,
                           const Objective& objective, const OptimizerConfig& cfg) {
  validate(cfg);
  const std::size_t max_parts = effective_max_partitions(cfg.max_partitions, net.size());
  auto start = initial_design(net, device, objective, max_parts);
  if (!start)
    throw Error(ErrorCode::NoFeasibleDesign,
                "no all-serial design fits device '" + device.name + "'");

  const auto space = FoldingSpace::of(net);
  const Mode single_mode = objective.single_partition_mode();
  const auto batch = objective.eval_batch();
  Rng rng(cfg.seed);

  OptimizeResult result;
  DesignPoint cur = start->design;
  double cur_cost = objective.cost(start->report);
  const double scale = std::abs(cur_cost);
  result.design = cur;
  result.report = start->report;
  result.cost = cur_cost;

  std::uint64_t iteration = 0;
  for (double temp = cfg.initial_temperature; temp >= cfg.temperature_floor;
       temp *= cfg.cooling_rate) {
    for (std::uint64_t k = 0; k < cfg.iterations_per_temperature; ++k, ++iteration) {
      auto cand = propose(cur, space, cfg, max_parts, single_mode, rng);
      if (!cand) {
        result.trace.entries.push_back({iteration, cur_cost, false, result.cost});
        continue;
      }
      auto report = evaluate(*cand, net, device, batch);
      if (!report.feasible) {
        result.trace.entries.push_back({iteration, kInf, false, result.cost});
        continue;
      }
      const double cost = objective.cost(report);
      const double delta = (cost - cur_cost) / scale;
      const bool accept = delta <= 0 || rng.uniform() < std::exp(-delta / temp);
      if (better(cost, *cand, result.cost, result.design)) {
        result.design = *cand;
        result.report = report;
        result.cost = cost;
      }
      if (accept) {
        cur = std::move(*cand);
        cur_cost = cost;
      }
      result.trace.entries.push_back({iteration, cost, accept, result.cost});
    }
  }
  return result;
}

namespace {

struct Structure {
  std::vector<std::size_t> cuts;
  Mode mode;
};

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // r * (n - k + i) / i stays integral at every step.
    const auto num = n - k + i;
    if (r > UINT64_MAX / num) return UINT64_MAX;
    r = r * num / i;
  }
  return r;
}

std::uint64_t structure_count(std::size_t layers, std::size_t max_parts) {
  std::uint64_t total = 0;
  for (std::size_t k = 0; k + 1 <= max_parts && k < layers; ++k)
    total = sat_add(total, sat_mul(binomial(layers - 1, k), k == 0 ? 1 : 2));
  return total;
}

std::vector<Structure> structures(std::size_t layers, std::size_t max_parts, Mode single) {
  std::vector<Structure> out;
  out.push_back({{}, single});
  for (std::size_t k = 1; k < max_parts && k < layers; ++k) {
    // k-combinations of {1, ..., layers - 1} in lexicographic order.
    std::vector<std::size_t> comb(k);
    std::iota(comb.begin(), comb.end(), std::size_t{1});
    while (true) {
      out.push_back({comb, Mode::Throughput});
      out.push_back({comb, Mode::Latency});
      std::size_t i = k;
      while (i > 0 && comb[i - 1] == layers - 1 - (k - i)) --i;
      if (i == 0) break;
      ++comb[i - 1];
      for (std::size_t j = i; j < k; ++j) comb[j] = comb[j - 1] + 1;
    }
  }
  return out;
}

}  // namespace

std::uint64_t design_space_size(const NetworkGraph& net, const EnumerationLimits& limits) {
  const auto max_parts = effective_max_partitions(limits.max_partitions, net.size());
  return sat_mul(structure_count(net.size(), max_parts), FoldingSpace::of(net).combinations());
}

std::vector<EvaluatedDesign> enumerate_designs(const NetworkGraph& net,
                                               const DeviceDescriptor& device,
                                               const EnumerationLimits& limits) {
  const auto size = design_space_size(net, limits);
  if (size > limits.max_points)
    throw Error(ErrorCode::SpaceTooLarge,
                "design space has " + (size == UINT64_MAX ? std::string("> 2^64")
                                                          : std::to_string(size)) +
                    " points, limit " + std::to_string(limits.max_points));

  const std::size_t n = net.size();
  const auto space = FoldingSpace::of(net);
  const auto shapes =
      structures(n, effective_max_partitions(limits.max_partitions, n), limits.single_partition_mode);
  const std::uint64_t per_structure = space.combinations();

  auto decode = [&](std::uint64_t index) {
    const auto& st = shapes[index / per_structure];
    std::uint64_t f = index % per_structure;
    DesignPoint d;
    d.mode = st.mode;
    d.partitions = partitions_from_cuts(n, st.cuts);
    d.stages.resize(n);
    for (std::size_t i = n; i-- > 0;) {
      const auto nf = space.fine[i].size();
      d.stages[i].fine = space.fine[i][f % nf];
      f /= nf;
      const auto nc = space.coarse[i].size();
      d.stages[i].coarse = space.coarse[i][f % nc];
      f /= nc;
    }
    return d;
  };

  const std::size_t chunks = std::max<std::size_t>(1, std::min<std::uint64_t>(size, 256));
  std::vector<std::vector<EvaluatedDesign>> parts(chunks);
  parallel_chunks(size, chunks, [&](std::size_t begin, std::size_t end, std::size_t chunk) {
    for (std::size_t i = begin; i < end; ++i) {
      auto d = decode(i);
      auto report = evaluate(d, net, device, limits.batch);
      if (report.feasible) parts[chunk].push_back({std::move(d), std::move(report)});
    }
  });
  std::vector<EvaluatedDesign> out;
  for (auto& p : parts) std::move(p.begin(), p.end(), std::back_inserter(out));
  return out;
}

std::optional<EvaluatedDesign> exhaustive_optimum(const NetworkGraph& net,
                                                  const DeviceDescriptor& device,
                                                  const Objective& objective,
                                                  EnumerationLimits limits) {
  limits.batch = objective.eval_batch();
  limits.single_partition_mode = objective.single_partition_mode();
  auto all = enumerate_designs(net, device, limits);
  std::optional<EvaluatedDesign> best;
  double best_cost = kInf;
  for (auto& e : all) {
    const double c = objective.cost(e.report);
    if (!best || better(c, e.design, best_cost, best->design)) {
      best_cost = c;
      best = std::move(e);
    }
  }
  return best;
}

double metric_value(const PerfReport& r, ParetoMetric metric) {
  return metric == ParetoMetric::Latency ? r.latency_single : r.throughput;
}

std::uint64_t resource_value(const PerfReport& r, ResourceAxis axis) {
  switch (axis) {
    case ResourceAxis::Dsp: return r.resources.dsp;
    case ResourceAxis::Bram: return r.resources.bram;
    case ResourceAxis::Lut: return r.resources.lut;
  }
  return 0;
}

namespace {

// Lower is better on both returned axes.
double oriented_metric(const PerfReport& r, ParetoMetric metric) {
  const double v = metric_value(r, metric);
  return metric == ParetoMetric::Latency ? v : -v;
}

}  // namespace

bool dominates(const PerfReport& a, const PerfReport& b, const ParetoAxes& axes) {
  const double ma = oriented_metric(a, axes.metric), mb = oriented_metric(b, axes.metric);
  const auto ra = resource_value(a, axes.resource), rb = resource_value(b, axes.resource);
  return ma <= mb && ra <= rb && (ma < mb || ra < rb);
}

std::vector<std::size_t> pareto_front(std::span<const PerfReport> reports,
                                      const ParetoAxes& axes) {
  if (reports.empty()) throw Error(ErrorCode::EmptyInput, "pareto front of an empty set");
  for (const auto& r : reports)
    if (!r.feasible)
      throw Error(ErrorCode::InvalidArgument, "pareto front input must be feasible");

  std::vector<std::size_t> order(reports.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto key = [&](std::size_t i) {
    return std::pair(oriented_metric(reports[i], axes.metric),
                     resource_value(reports[i], axes.resource));
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return key(a) < key(b); });

  // Sweep in metric order; a point survives iff its resource is below
  // every point with a strictly better metric and minimal within its
  // equal-metric group.
  std::vector<std::size_t> front;
  std::uint64_t best_resource = UINT64_MAX;
  bool have_best = false;
  for (std::size_t g = 0; g < order.size();) {
    std::size_t h = g;
    const double m = key(order[g]).first;
    while (h < order.size() && key(order[h]).first == m) ++h;
    const auto group_min = key(order[g]).second;
    if (!have_best || group_min < best_resource) {
      for (std::size_t i = g; i < h && key(order[i]).second == group_min; ++i)
        front.push_back(order[i]);
      best_resource = group_min;
      have_best = true;
    }
    g = h;
  }
  return front;
}

GapResult latency_throughput_gap(const NetworkGraph& net, const DeviceDescriptor& device,
                                 const OptimizerConfig& cfg, std::uint64_t batch) {
  GapResult gap;
  gap.latency_optimal = optimize_sa(net, device, Objective::min_latency(), cfg);
  gap.throughput_optimal = optimize_sa(net, device, Objective::max_throughput(batch), cfg);
  gap.throughput_design_latency = estimate_latency(gap.throughput_optimal.design, net, device);
  gap.ratio = gap.throughput_design_latency / gap.latency_optimal.report.latency_single;
  return gap;
}

}  // namespace streamflow
