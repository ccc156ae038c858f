/*
 * SPDX-License-Identifier: Apache-2.0
 */

#include "streamflow/multi_cnn.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "streamflow/error.hpp"

namespace streamflow {

MultiCnnWorkload::MultiCnnWorkload(std::vector<WorkloadEntry> entries)
    : entries_(std::move(entries)) {
  if (entries_.size() < 2)
    throw Error(ErrorCode::InvalidWorkload, "a multi-CNN workload needs at least 2 entries, got " +
                                                std::to_string(entries_.size()));
  double sum = 0.0;
  for (const auto& e : entries_) {
    if (!(e.weight > 0) || !std::isfinite(e.weight))
      throw Error(ErrorCode::InvalidWorkload, "entry '" + e.name + "' needs a positive weight");
    if (!(e.target_latency_s > 0) || !std::isfinite(e.target_latency_s))
      throw Error(ErrorCode::InvalidWorkload,
                  "entry '" + e.name + "' needs a positive target latency");
    sum += e.weight;
  }
  for (auto& e : entries_) e.weight /= sum;
}

std::vector<WorkloadFileEntry> parse_workload_file(std::string_view text) {
  std::vector<WorkloadFileEntry> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
      line.remove_suffix(1);
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    if (line.empty() || line.front() == '#') continue;

    std::vector<std::string_view> tokens;
    for (std::size_t i = 0; i < line.size();) {
      auto j = line.find_first_of(" \t", i);
      if (j == std::string_view::npos) j = line.size();
      if (j > i) tokens.push_back(line.substr(i, j - i));
      i = j + 1;
    }
    if (tokens.front() != "cnn")
      throw Error(ErrorCode::MalformedLine, "expected 'cnn file=... weight=... target_ms=...'",
                  line_no);
    std::map<std::string_view, std::string_view> kv;
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      auto eq = tokens[i].find('=');
      if (eq == std::string_view::npos || eq == 0)
        throw Error(ErrorCode::MalformedLine, "expected key=value", line_no);
      auto key = tokens[i].substr(0, eq);
      if (key != "file" && key != "weight" && key != "target_ms")
        throw Error(ErrorCode::MalformedLine, "unknown key '" + std::string(key) + "'", line_no);
      if (!kv.emplace(key, tokens[i].substr(eq + 1)).second)
        throw Error(ErrorCode::MalformedLine, "duplicate key '" + std::string(key) + "'", line_no);
    }
    auto number = [&](std::string_view key) {
      auto it = kv.find(key);
      if (it == kv.end())
        throw Error(ErrorCode::MissingField, "missing '" + std::string(key) + "'", line_no);
      double v = 0;
      auto [ptr, ec] = std::from_chars(it->second.data(), it->second.data() + it->second.size(), v);
      if (ec != std::errc() || ptr != it->second.data() + it->second.size())
        throw Error(ErrorCode::MalformedLine, "'" + std::string(key) + "' needs a number", line_no);
      if (!(v > 0) || !std::isfinite(v))
        throw Error(ErrorCode::InvalidWorkload, "'" + std::string(key) + "' must be > 0", line_no);
      return v;
    };
    WorkloadFileEntry e;
    auto file = kv.find("file");
    if (file == kv.end() || file->second.empty())
      throw Error(ErrorCode::MissingField, "missing 'file'", line_no);
    e.file = std::string(file->second);
    e.weight = number("weight");
    e.target_ms = number("target_ms");
    out.push_back(std::move(e));
  }
  return out;
}

namespace {

DeviceDescriptor scaled_budget(const DeviceDescriptor& device, std::uint64_t num,
                               std::uint64_t den) {
  DeviceDescriptor b = device;
  b.name = device.name + "/" + std::to_string(num) + ":" + std::to_string(den);
  auto scale = [&](std::int64_t cap) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(cap) * num / den);
  };
  b.dsp = scale(device.dsp);
  b.bram = scale(device.bram);
  b.lut = scale(device.lut);
  return b;
}

std::uint64_t slot_duration(std::uint64_t bits, double bpc) {
  auto d = static_cast<std::uint64_t>(std::ceil(static_cast<double>(bits) / bpc));
  while (bpc * static_cast<double>(d) < static_cast<double>(bits)) ++d;
  while (d > 0 && bpc * static_cast<double>(d - 1) >= static_cast<double>(bits)) --d;
  return d;
}

}  // namespace

std::vector<DeviceDescriptor> allocate_resources(const MultiCnnWorkload& workload,
                                                 const DeviceDescriptor& device,
                                                 std::span<const double> shares) {
  if (shares.size() != workload.size())
    throw Error(ErrorCode::InvalidArgument, "need one share per CNN");
  double sum = 0.0;
  for (double s : shares) {
    if (!(s > 0 && s <= 1))
      throw Error(ErrorCode::InvalidArgument, "shares must lie in (0, 1]");
    sum += s;
  }
  if (sum > 1.0 + 1e-9)
    throw Error(ErrorCode::ShareSumExceedsOne, "shares sum to " + std::to_string(sum));
  std::vector<DeviceDescriptor> budgets;
  for (std::size_t j = 0; j < shares.size(); ++j) {
    DeviceDescriptor b = device;
    b.name = device.name + "/" + workload[j].name;
    // The epsilon keeps exact products such as 100 * 0.29 from flooring low.
    auto scale = [&](std::int64_t cap) {
      return static_cast<std::int64_t>(std::floor(static_cast<double>(cap) * shares[j] + 1e-9));
    };
    b.dsp = scale(device.dsp);
    b.bram = scale(device.bram);
    b.lut = scale(device.lut);
    budgets.push_back(std::move(b));
  }
  return budgets;
}

double bits_per_cycle(const DeviceDescriptor& device) {
  return device.bandwidth_bps() / device.clock_hz();
}

namespace {

TransferDemand demand_of(const NetworkGraph& net, const DesignPoint& design,
                         const DeviceDescriptor& device) {
  TransferDemand d;
  d.bits = (net.input_shape.elements() + net.output_shape().elements()) *
           static_cast<std::uint64_t>(device.word_bits);
  for (std::size_t p = 1; p < design.partitions.size(); ++p)
    d.bits += partition_weight_bits(design, net, p, device.word_bits);
  const auto cycles = design_cycles(net, design);
  d.exec_cycles = std::accumulate(cycles.begin(), cycles.end(), std::uint64_t{0});
  return d;
}

}  // namespace

std::vector<TransferDemand> transfer_demands(const MultiCnnWorkload& workload,
                                             std::span<const DesignPoint> designs,
                                             const DeviceDescriptor& device) {
  if (designs.size() != workload.size())
    throw Error(ErrorCode::InvalidArgument, "need one design per CNN");
  std::vector<TransferDemand> out;
  for (std::size_t j = 0; j < designs.size(); ++j)
    out.push_back(demand_of(workload[j].network, designs[j], device));
  return out;
}

MemoryTransferSchedule schedule_transfers(std::span<const TransferDemand> demands,
                                          const DeviceDescriptor& device) {
  MemoryTransferSchedule s;
  for (const auto& d : demands) s.period = std::max(s.period, d.exec_cycles);
  const double bpc = bits_per_cycle(device);

  std::uint64_t total_bits = 0;
  for (const auto& d : demands) total_bits += d.bits;
  const double capacity = bpc * static_cast<double>(s.period);
  auto infeasible = [&]() {
    std::ostringstream os;
    os << "total demand " << total_bits << " bits, capacity " << capacity << " bits per period "
       << s.period;
    return Error(ErrorCode::BandwidthInfeasible, os.str());
  };
  if (static_cast<double>(total_bits) > capacity) throw infeasible();

  std::vector<std::size_t> order(demands.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return demands[a].exec_cycles < demands[b].exec_cycles;
  });
  std::uint64_t cursor = 0;
  for (auto j : order) {
    if (demands[j].bits == 0) continue;
    const auto duration = slot_duration(demands[j].bits, bpc);
    s.slots.push_back({j, cursor, duration, demands[j].bits});
    cursor += duration;
  }
  if (cursor > s.period) throw infeasible();
  return s;
}

MemoryTransferSchedule schedule_transfers(const MultiCnnWorkload& workload,
                                          std::span<const DesignPoint> designs,
                                          const DeviceDescriptor& device) {
  const auto demands = transfer_demands(workload, designs, device);
  return schedule_transfers(demands, device);
}

std::vector<std::string> validate_schedule(const MemoryTransferSchedule& schedule,
                                           std::span<const TransferDemand> demands,
                                           const DeviceDescriptor& device) {
  std::vector<std::string> problems;
  const double bpc = device.bandwidth_bps() / device.clock_hz();
  auto slots = schedule.slots;
  std::sort(slots.begin(), slots.end(),
            [](const TransferSlot& a, const TransferSlot& b) { return a.start < b.start; });
  std::vector<std::uint64_t> delivered(demands.size(), 0);
  std::uint64_t bits_in_period = 0;
  for (std::size_t k = 0; k < slots.size(); ++k) {
    const auto& s = slots[k];
    const std::string tag = "slot " + std::to_string(k) + " (cnn " + std::to_string(s.cnn) + ")";
    if (s.cnn >= demands.size()) {
      problems.push_back(tag + ": unknown cnn");
      continue;
    }
    if (k > 0 && slots[k - 1].start + slots[k - 1].duration > s.start)
      problems.push_back(tag + ": overlaps previous slot");
    if (s.start + s.duration > schedule.period)
      problems.push_back(tag + ": ends after the period");
    if (static_cast<double>(s.bits) > bpc * static_cast<double>(s.duration))
      problems.push_back(tag + ": rate exceeds the bus bandwidth");
    delivered[s.cnn] += s.bits;
    bits_in_period += s.bits;
  }
  for (std::size_t j = 0; j < demands.size(); ++j)
    if (delivered[j] < demands[j].bits)
      problems.push_back("cnn " + std::to_string(j) + ": " + std::to_string(delivered[j]) +
                         " of " + std::to_string(demands[j].bits) + " bits delivered");
  if (static_cast<double>(bits_in_period) > bpc * static_cast<double>(schedule.period))
    problems.push_back("period carries more bits than the bus allows");
  return problems;
}

CostBreakdown multi_objective_breakdown(std::span<const double> latencies,
                                        std::span<const WorkloadEntry> entries, double lambda) {
  if (latencies.size() != entries.size())
    throw Error(ErrorCode::InvalidArgument, "need one latency per CNN");
  CostBreakdown c;
  double headroom = 0.0;
  for (std::size_t j = 0; j < entries.size(); ++j) {
    const double ratio = latencies[j] / entries[j].target_latency_s;
    c.deadline_term += entries[j].weight * std::max(0.0, ratio - 1.0);
    headroom += entries[j].weight * ratio;
  }
  c.headroom_term = lambda * headroom;
  c.total = c.deadline_term + c.headroom_term;
  return c;
}

double multi_objective_cost(std::span<const double> latencies, const MultiCnnWorkload& workload,
                            double lambda) {
  return multi_objective_breakdown(latencies, workload.entries(), lambda).total;
}

std::optional<MultiCnnMapping> evaluate_mapping(std::span<const WorkloadEntry> entries,
                                                const DeviceDescriptor& device,
                                                std::span<const std::uint32_t> share_units,
                                                std::span<const DesignPoint> designs,
                                                const MultiConfig& config) {
  const std::size_t n = entries.size();
  if (share_units.size() != n || designs.size() != n)
    throw Error(ErrorCode::InvalidArgument, "need one share and one design per CNN");
  MultiCnnMapping m;
  m.share_units.assign(share_units.begin(), share_units.end());
  std::vector<TransferDemand> demands;
  for (std::size_t j = 0; j < n; ++j) {
    const auto& net = entries[j].network;
    auto budget = scaled_budget(device, share_units[j], config.share_steps);
    auto report = evaluate(designs[j], net, budget, 1);
    if (!report.feasible) return std::nullopt;
    m.shares.push_back(static_cast<double>(share_units[j]) / config.share_steps);
    m.latencies.push_back(report.latency_single);
    m.budgets.push_back(std::move(budget));
    m.reports.push_back(std::move(report));
    m.designs.push_back(designs[j]);
    demands.push_back(demand_of(net, designs[j], device));
  }
  try {
    m.schedule = schedule_transfers(demands, device);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::BandwidthInfeasible) return std::nullopt;
    throw;
  }
  m.cost = multi_objective_breakdown(m.latencies, entries, config.lambda);
  return m;
}

namespace {

std::vector<std::int64_t> mapping_key(std::span<const std::uint32_t> units,
                                      std::span<const DesignPoint> designs) {
  std::vector<std::int64_t> key(units.begin(), units.end());
  for (const auto& d : designs) {
    auto e = encode(d);
    key.insert(key.end(), e.begin(), e.end());
  }
  return key;
}

bool mapping_better(const MultiCnnMapping& a, const MultiCnnMapping& b) {
  if (a.cost.total != b.cost.total) return a.cost.total < b.cost.total;
  return mapping_key(a.share_units, a.designs) < mapping_key(b.share_units, b.designs);
}

bool fits_alone(const NetworkGraph& net, const DesignPoint& design,
                const DeviceDescriptor& budget) {
  return evaluate(design, net, budget, 1).feasible;
}

void check_config(const MultiConfig& config) {
  if (config.share_steps < 1)
    throw Error(ErrorCode::InvalidArgument, "share_steps must be >= 1");
  if (!(config.lambda >= 0)) throw Error(ErrorCode::InvalidArgument, "lambda must be >= 0");
  if (!(config.share_move_probability >= 0 && config.share_move_probability <= 1))
    throw Error(ErrorCode::InvalidArgument, "share_move_probability must be in [0, 1]");
}

}  // namespace

MultiCnnMapping optimize_multi(const MultiCnnWorkload& workload, const DeviceDescriptor& device,
                               const OptimizerConfig& cfg, const MultiConfig& config) {
  validate(cfg);
  check_config(config);
  const auto entries = workload.entries();
  const std::size_t n = entries.size();
  const std::uint32_t steps = config.share_steps;

  // Smallest share at which each all-serial design fits on its own.
  std::vector<DesignPoint> designs;
  std::vector<std::uint32_t> units(n, 0);
  std::uint32_t used = 0;
  for (std::size_t j = 0; j < n; ++j) {
    designs.push_back(serial_design(entries[j].network, Mode::Latency));
    for (std::uint32_t k = 1; k <= steps; ++k) {
      if (fits_alone(entries[j].network, designs[j], scaled_budget(device, k, steps))) {
        units[j] = k;
        break;
      }
    }
    if (units[j] == 0)
      throw Error(ErrorCode::NoFeasibleMapping,
                  "'" + entries[j].name + "' does not fit even with the whole device");
    used += units[j];
  }
  if (used > steps)
    throw Error(ErrorCode::NoFeasibleMapping,
                "all-serial designs need " + std::to_string(used) + "/" + std::to_string(steps) +
                    " of the device");
  for (std::size_t j = 0; used < steps; j = (j + 1) % n, ++used) ++units[j];

  auto start = evaluate_mapping(entries, device, units, designs, config);
  if (!start)
    throw Error(ErrorCode::NoFeasibleMapping, "all-serial designs exceed the memory bandwidth");

  std::vector<FoldingSpace> spaces;
  for (const auto& e : entries) spaces.push_back(FoldingSpace::of(e.network));
  Rng rng(cfg.seed);

  MultiCnnMapping best = *start;
  MultiCnnMapping cur = *start;
  const double scale = start->cost.total > 0 ? start->cost.total : 1.0;

  for (double temp = cfg.initial_temperature; temp >= cfg.temperature_floor;
       temp *= cfg.cooling_rate) {
    for (std::uint64_t k = 0; k < cfg.iterations_per_temperature; ++k) {
      auto cand_units = cur.share_units;
      auto cand_designs = cur.designs;
      bool moved = false;
      if (rng.uniform() < config.share_move_probability) {
        std::uint32_t slack = steps;
        for (auto u : cand_units) slack -= u;
        // (from, to); from == n takes a unit from the unallocated slack.
        std::vector<std::pair<std::size_t, std::size_t>> transfers;
        for (std::size_t a = 0; a <= n; ++a) {
          if (a < n && cand_units[a] <= 1) continue;
          if (a == n && slack == 0) continue;
          for (std::size_t b = 0; b < n; ++b)
            if (a != b) transfers.emplace_back(a, b);
        }
        if (!transfers.empty()) {
          const auto [from, to] = transfers[rng.index(transfers.size())];
          if (from < n) --cand_units[from];
          ++cand_units[to];
          moved = true;
        }
      } else {
        const auto j = rng.index(n);
        if (auto d = propose_folding_move(cand_designs[j], spaces[j], rng)) {
          cand_designs[j] = std::move(*d);
          moved = true;
        }
      }
      if (!moved) continue;
      auto cand = evaluate_mapping(entries, device, cand_units, cand_designs, config);
      if (!cand) continue;
      const double delta = (cand->cost.total - cur.cost.total) / scale;
      const bool accept = delta <= 0 || rng.uniform() < std::exp(-delta / temp);
      if (mapping_better(*cand, best)) best = *cand;
      if (accept) cur = std::move(*cand);
    }
  }
  return best;
}

MultiCnnMapping optimize_multi_exhaustive(std::span<const WorkloadEntry> input,
                                          const DeviceDescriptor& device,
                                          const MultiConfig& config, std::uint64_t max_points) {
  check_config(config);
  if (input.empty()) throw Error(ErrorCode::InvalidWorkload, "no CNNs given");
  std::vector<WorkloadEntry> entries(input.begin(), input.end());
  double wsum = 0.0;
  for (const auto& e : entries) wsum += e.weight;
  for (auto& e : entries) e.weight /= wsum;
  const std::size_t n = entries.size();
  const std::uint32_t steps = config.share_steps;
  if (n > steps) throw Error(ErrorCode::NoFeasibleMapping, "more CNNs than share steps");

  // Folding combinations of each CNN in odometer order.
  auto all_designs = [](const NetworkGraph& net) {
    const auto space = FoldingSpace::of(net);
    std::vector<DesignPoint> out;
    DesignPoint d = serial_design(net, Mode::Latency);
    const auto total = space.combinations();
    for (std::uint64_t f = 0; f < total; ++f) {
      std::uint64_t r = f;
      for (std::size_t i = net.size(); i-- > 0;) {
        d.stages[i].fine = space.fine[i][r % space.fine[i].size()];
        r /= space.fine[i].size();
        d.stages[i].coarse = space.coarse[i][r % space.coarse[i].size()];
        r /= space.coarse[i].size();
      }
      out.push_back(d);
    }
    return out;
  };

  // Share vectors with every entry >= 1 unit and all units allocated.
  std::vector<std::vector<std::uint32_t>> share_vectors;
  std::vector<std::uint32_t> units(n, 1);
  auto fill = [&](auto&& self, std::size_t j, std::uint32_t remaining) -> void {
    if (j + 1 == n) {
      units[j] = remaining;
      share_vectors.push_back(units);
      return;
    }
    for (std::uint32_t u = 1; u + (n - j - 1) <= remaining; ++u) {
      units[j] = u;
      self(self, j + 1, remaining - u);
    }
  };
  fill(fill, 0, steps);

  std::uint64_t space_size = share_vectors.size();
  std::vector<std::vector<DesignPoint>> designs(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto combos = FoldingSpace::of(entries[j].network).combinations();
    if (combos > max_points || space_size > max_points / combos)
      throw Error(ErrorCode::SpaceTooLarge, "joint mapping space exceeds " +
                                                std::to_string(max_points) + " points");
    space_size *= combos;
    designs[j] = all_designs(entries[j].network);
  }

  // fitting[j][k]: designs of CNN j that fit a k-unit budget on their own.
  std::vector<std::vector<std::vector<std::size_t>>> fitting(n);
  for (std::size_t j = 0; j < n; ++j) {
    fitting[j].resize(steps + 1);
    for (std::uint32_t k = 1; k <= steps; ++k) {
      const auto budget = scaled_budget(device, k, steps);
      for (std::size_t d = 0; d < designs[j].size(); ++d)
        if (fits_alone(entries[j].network, designs[j][d], budget)) fitting[j][k].push_back(d);
    }
  }

  std::optional<MultiCnnMapping> best;
  std::vector<DesignPoint> pick(n);
  for (const auto& sv : share_vectors) {
    std::vector<std::size_t> idx(n, 0);
    bool empty = false;
    for (std::size_t j = 0; j < n; ++j) empty |= fitting[j][sv[j]].empty();
    if (empty) continue;
    while (true) {
      for (std::size_t j = 0; j < n; ++j) pick[j] = designs[j][fitting[j][sv[j]][idx[j]]];
      if (auto m = evaluate_mapping(entries, device, sv, pick, config))
        if (!best || mapping_better(*m, *best)) best = std::move(*m);
      std::size_t j = n;
      while (j > 0) {
        --j;
        if (++idx[j] < fitting[j][sv[j]].size()) break;
        idx[j] = 0;
        if (j == 0) {
          j = n + 1;
          break;
        }
      }
      if (j == n + 1 || n == 0) break;
    }
  }
  if (!best) throw Error(ErrorCode::NoFeasibleMapping, "no share split and folding fits");
  return *best;
}

}  // namespace streamflow
