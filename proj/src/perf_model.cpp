/*
 * SPDX-License-Identifier: Apache-2.0
 */

#include "streamflow/perf_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <sstream>

#include "streamflow/error.hpp"

namespace streamflow {

namespace {

constexpr std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) {
  return (a + b - 1) / b;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t'))
    s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

}  // namespace

DeviceDescriptor parse_device(std::string_view text) {
  DeviceDescriptor dev;
  std::map<std::string, std::size_t> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    auto sp = line.find_first_of(" \t");
    if (sp == std::string_view::npos)
      throw Error(ErrorCode::MalformedLine, "expected '<key> <value>'", line_no);
    std::string key(line.substr(0, sp));
    auto value = trim(line.substr(sp + 1));
    if (!seen.emplace(key, line_no).second)
      throw Error(ErrorCode::MalformedLine, "duplicate key '" + key + "'", line_no);

    auto as_int = [&]() {
      auto v = parse_number<std::int64_t>(value);
      if (!v) throw Error(ErrorCode::MalformedLine, "'" + key + "' needs an integer", line_no);
      return *v;
    };
    auto as_real = [&]() {
      auto v = parse_number<double>(value);
      if (!v || !std::isfinite(*v))
        throw Error(ErrorCode::MalformedLine, "'" + key + "' needs a number", line_no);
      return *v;
    };

    if (key == "device") {
      if (!value.starts_with("name=") || value.size() == 5 ||
          value.find_first_of(" \t") != std::string_view::npos)
        throw Error(ErrorCode::MalformedLine, "expected 'device name=<id>'", line_no);
      dev.name = std::string(value.substr(5));
    } else if (key == "dsp") {
      dev.dsp = as_int();
    } else if (key == "bram") {
      dev.bram = as_int();
    } else if (key == "lut") {
      dev.lut = as_int();
    } else if (key == "clock_mhz") {
      dev.clock_mhz = as_real();
    } else if (key == "bandwidth_gbps") {
      dev.bandwidth_gbps = as_real();
    } else if (key == "reconfig_ms") {
      dev.reconfig_ms = as_real();
    } else if (key == "word_bits") {
      dev.word_bits = static_cast<int>(as_int());
    } else if (key == "lut_alpha") {
      dev.lut_alpha = as_real();
    } else if (key == "lut_beta") {
      dev.lut_beta = as_real();
    } else {
      throw Error(ErrorCode::MalformedLine, "unknown device key '" + key + "'", line_no);
    }
  }
  for (const char* required : {"device", "dsp", "bram", "lut", "clock_mhz", "bandwidth_gbps",
                               "reconfig_ms", "word_bits"}) {
    if (!seen.contains(required))
      throw Error(ErrorCode::MissingField, std::string("device file lacks '") + required + "'");
  }
  validate_device(dev);
  return dev;
}

std::string serialize_device(const DeviceDescriptor& d) {
  std::ostringstream os;
  os.precision(17);
  os << "device name=" << d.name << '\n'
     << "dsp " << d.dsp << '\n'
     << "bram " << d.bram << '\n'
     << "lut " << d.lut << '\n'
     << "clock_mhz " << d.clock_mhz << '\n'
     << "bandwidth_gbps " << d.bandwidth_gbps << '\n'
     << "reconfig_ms " << d.reconfig_ms << '\n'
     << "word_bits " << d.word_bits << '\n'
     << "lut_alpha " << d.lut_alpha << '\n'
     << "lut_beta " << d.lut_beta << '\n';
  return os.str();
}

void validate_device(const DeviceDescriptor& d) {
  if (d.dsp < 0 || d.bram < 0 || d.lut < 0)
    throw Error(ErrorCode::InvalidArgument, "device capacities must be >= 0");
  if (!(d.clock_mhz > 0) || !(d.bandwidth_gbps > 0))
    throw Error(ErrorCode::InvalidArgument, "clock and bandwidth must be > 0");
  if (!(d.reconfig_ms >= 0))
    throw Error(ErrorCode::InvalidArgument, "reconfig_ms must be >= 0");
  if (d.word_bits != 8 && d.word_bits != 16 && d.word_bits != 32)
    throw Error(ErrorCode::InvalidArgument, "word_bits must be 8, 16 or 32");
  if (d.lut_alpha < 0 || d.lut_beta < 0)
    throw Error(ErrorCode::InvalidArgument, "LUT model constants must be >= 0");
}

ResourceVector max(const ResourceVector& a, const ResourceVector& b) noexcept {
  return {std::max(a.dsp, b.dsp), std::max(a.bram, b.bram), std::max(a.lut, b.lut)};
}

std::uint64_t stage_cycles(const LayerDescriptor& layer, const TensorShape& in,
                           const TensorShape& out, const StageConfig& config) {
  const auto ops = layer_ops(layer, in, out);
  const auto coarse = static_cast<std::uint64_t>(config.coarse);
  if (layer.kind == LayerKind::Conv || layer.kind == LayerKind::FC)
    return ceil_div(ops, coarse * static_cast<std::uint64_t>(config.fine));
  return ceil_div(ops, coarse);
}

std::vector<std::uint64_t> design_cycles(const NetworkGraph& net, const DesignPoint& design) {
  std::vector<std::uint64_t> cycles(net.size());
  for (std::size_t i = 0; i < net.size(); ++i)
    cycles[i] = stage_cycles(net.layers[i], net.input_of(i), net.output_of(i), design.stages[i]);
  return cycles;
}

ResourceVector stage_resources(const LayerDescriptor& layer, const TensorShape& in,
                               const StageConfig& config, const DeviceDescriptor& device) {
  ResourceVector r;
  const auto wb = static_cast<std::uint64_t>(device.word_bits);
  const auto parallel = static_cast<std::uint64_t>(config.coarse * config.fine);
  if (layer.kind == LayerKind::Conv || layer.kind == LayerKind::FC) r.dsp = parallel;
  if (layer.kind == LayerKind::Conv || layer.kind == LayerKind::Pool) {
    const auto line_bits = static_cast<std::uint64_t>(layer.kernel - 1) *
                           static_cast<std::uint64_t>(in.width) *
                           static_cast<std::uint64_t>(in.channels) * wb;
    r.bram += ceil_div(line_bits, kBramBlockBits);
  }
  r.bram += ceil_div(layer_weights(layer, in) * wb, kBramBlockBits);
  r.lut = static_cast<std::uint64_t>(
      std::ceil(device.lut_alpha + device.lut_beta * static_cast<double>(parallel)));
  return r;
}

ResourceVector estimate_resources(const DesignPoint& design, const NetworkGraph& net,
                                  const DeviceDescriptor& device) {
  auto stage = [&](std::size_t i) {
    return stage_resources(net.layers[i], net.input_of(i), design.stages[i], device);
  };
  ResourceVector total;
  if (design.mode == Mode::Latency) {
    std::size_t depth = 0;
    for (const auto& p : design.partitions) depth = std::max(depth, p.size());
    for (std::size_t pos = 0; pos < depth; ++pos) {
      ResourceVector envelope;
      for (const auto& p : design.partitions)
        if (pos < p.size()) envelope = max(envelope, stage(p.begin + pos));
      total += envelope;
    }
    return total;
  }
  for (const auto& p : design.partitions) {
    ResourceVector sum;
    for (std::size_t i = p.begin; i < p.end; ++i) sum += stage(i);
    total = max(total, sum);
  }
  return total;
}

std::uint64_t partition_weight_bits(const DesignPoint& design, const NetworkGraph& net,
                                    std::size_t partition, int word_bits) {
  const auto& p = design.partitions.at(partition);
  std::uint64_t w = 0;
  for (std::size_t i = p.begin; i < p.end; ++i) w += layer_weights(net.layers[i], net.input_of(i));
  return w * static_cast<std::uint64_t>(word_bits);
}

namespace {

struct PartitionTiming {
  std::uint64_t sum = 0;
  std::uint64_t max = 0;
};

std::vector<PartitionTiming> partition_timing(const DesignPoint& design,
                                              const NetworkGraph& net) {
  const auto cycles = design_cycles(net, design);
  std::vector<PartitionTiming> out;
  out.reserve(design.partitions.size());
  for (const auto& p : design.partitions) {
    PartitionTiming t;
    for (std::size_t i = p.begin; i < p.end; ++i) {
      t.sum += cycles[i];
      t.max = std::max(t.max, cycles[i]);
    }
    out.push_back(t);
  }
  return out;
}

double reload_seconds(const DesignPoint& design, const NetworkGraph& net,
                      const DeviceDescriptor& device, std::size_t partition) {
  return static_cast<double>(partition_weight_bits(design, net, partition, device.word_bits)) /
         device.bandwidth_bps();
}

}  // namespace

double estimate_latency(const DesignPoint& design, const NetworkGraph& net,
                        const DeviceDescriptor& device) {
  const auto timing = partition_timing(design, net);
  std::uint64_t cycles = 0;
  for (const auto& t : timing) cycles += t.sum;
  double seconds = static_cast<double>(cycles) / device.clock_hz();
  const auto parts = design.partitions.size();
  if (design.mode == Mode::Latency || parts == 1) {
    // The first partition's weights are resident when an input arrives.
    for (std::size_t p = 1; p < parts; ++p) seconds += reload_seconds(design, net, device, p);
  } else {
    seconds += static_cast<double>(parts - 1) * device.reconfig_s();
  }
  return seconds;
}

double estimate_throughput(const DesignPoint& design, const NetworkGraph& net,
                           const DeviceDescriptor& device, std::uint64_t batch) {
  if (batch < 1) throw Error(ErrorCode::InvalidArgument, "batch must be >= 1");
  const auto parts = design.partitions.size();
  double total = 0.0;
  if (design.mode == Mode::Throughput) {
    const auto timing = partition_timing(design, net);
    std::uint64_t cycles = 0;
    for (const auto& t : timing) cycles += t.sum + (batch - 1) * t.max;
    total = static_cast<double>(cycles) / device.clock_hz() +
            static_cast<double>(parts - 1) * device.reconfig_s();
  } else {
    // Inputs run back-to-back; after each input the first partition's
    // weights must be streamed in again before the next one can start.
    total = static_cast<double>(batch) * estimate_latency(design, net, device);
    if (parts > 1)
      total += static_cast<double>(batch - 1) * reload_seconds(design, net, device, 0);
  }
  return static_cast<double>(batch) / total;
}

double estimate_bandwidth(const DesignPoint& design, const NetworkGraph& net,
                          const DeviceDescriptor& device) {
  const auto timing = partition_timing(design, net);
  double peak = 0.0;
  for (std::size_t p = 0; p < design.partitions.size(); ++p) {
    const auto& range = design.partitions[p];
    const auto bits = (net.input_of(range.begin).elements() +
                       net.output_of(range.end - 1).elements()) *
                      static_cast<std::uint64_t>(device.word_bits);
    const auto cycles = design.mode == Mode::Throughput ? timing[p].max : timing[p].sum;
    const double seconds = static_cast<double>(cycles) / device.clock_hz();
    peak = std::max(peak, static_cast<double>(bits) / seconds / 1e9);
  }
  return peak;
}

FitVerdict check_fit(const ResourceVector& r, const DeviceDescriptor& device) {
  FitVerdict v;
  auto check = [&](const char* what, std::uint64_t used, std::int64_t cap) {
    if (cap < 0 || used > static_cast<std::uint64_t>(cap)) {
      v.feasible = false;
      v.violations.push_back(std::string(what) + " " + std::to_string(used) + " > " +
                             std::to_string(cap));
    }
  };
  check("dsp", r.dsp, device.dsp);
  check("bram", r.bram, device.bram);
  check("lut", r.lut, device.lut);
  return v;
}

PerfReport evaluate(const DesignPoint& design, const NetworkGraph& net,
                    const DeviceDescriptor& device, std::uint64_t batch) {
  PerfReport report;
  report.batch = batch;
  report.latency_single = estimate_latency(design, net, device);
  report.throughput = estimate_throughput(design, net, device, batch);
  report.resources = estimate_resources(design, net, device);
  report.bandwidth_demand_gbps = estimate_bandwidth(design, net, device);
  auto fit = check_fit(report.resources, device);
  report.feasible = fit.feasible;
  report.violations = std::move(fit.violations);
  if (report.bandwidth_demand_gbps > device.bandwidth_gbps) {
    report.feasible = false;
    std::ostringstream os;
    os << "bandwidth " << report.bandwidth_demand_gbps << " > " << device.bandwidth_gbps
       << " Gbit/s";
    report.violations.push_back(os.str());
  }
  return report;
}

std::uint64_t analytic_makespan(std::span<const std::uint64_t> service_cycles,
                                std::uint64_t batch) {
  if (service_cycles.empty() || batch == 0) return 0;
  const auto sum = std::accumulate(service_cycles.begin(), service_cycles.end(), std::uint64_t{0});
  const auto slowest = *std::max_element(service_cycles.begin(), service_cycles.end());
  return sum + (batch - 1) * slowest;
}

std::uint64_t simulate_pipeline(std::span<const std::uint64_t> service_cycles,
                                std::uint64_t batch) {
  const std::size_t n = service_cycles.size();
  if (n == 0 || batch == 0) return 0;

  enum class State { Idle, Busy, Blocked };
  std::vector<State> state(n, State::Idle);
  // buffer[i] sits between stage i and stage i + 1.
  std::vector<bool> buffer(n > 0 ? n - 1 : 0, false);
  std::uint64_t injected = 0;
  std::uint64_t completed = 0;
  std::uint64_t now = 0;

  using Event = std::pair<std::uint64_t, std::size_t>;  // (finish time, stage)
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events;

  auto settle = [&]() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = n; i-- > 0;) {
        if (state[i] == State::Blocked && i + 1 < n && !buffer[i]) {
          buffer[i] = true;
          state[i] = State::Idle;
          changed = true;
        }
        if (state[i] != State::Idle) continue;
        bool have_input = false;
        if (i == 0) {
          if (injected < batch) {
            ++injected;
            have_input = true;
          }
        } else if (buffer[i - 1]) {
          buffer[i - 1] = false;
          have_input = true;
        }
        if (have_input) {
          state[i] = State::Busy;
          events.emplace(now + service_cycles[i], i);
          changed = true;
        }
      }
    }
  };

  settle();
  while (!events.empty()) {
    now = events.top().first;
    while (!events.empty() && events.top().first == now) {
      const auto i = events.top().second;
      events.pop();
      if (i + 1 == n) {
        ++completed;
        state[i] = State::Idle;
      } else if (!buffer[i]) {
        buffer[i] = true;
        state[i] = State::Idle;
      } else {
        state[i] = State::Blocked;
      }
    }
    settle();
    if (completed == batch) break;
  }
  return now;
}

std::uint64_t simulate_pipeline(const DesignPoint& design, const NetworkGraph& net,
                                std::uint64_t batch) {
  if (design.partitions.size() != 1)
    throw Error(ErrorCode::InvalidArgument, "pipeline simulation needs a single partition");
  if (batch < 1 || batch > 10'000)
    throw Error(ErrorCode::InvalidArgument, "simulation batch must be in [1, 10000]");
  const auto cycles = design_cycles(net, design);
  return simulate_pipeline(cycles, batch);
}

}  // namespace streamflow
