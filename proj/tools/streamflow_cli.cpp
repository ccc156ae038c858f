/*
 * SPDX-License-Identifier: Apache-2.0
 */

// streamflow: parse, optimize, pareto and multi subcommands.
//
// Exit codes: 0 success, 2 parse or usage error, 3 no feasible design or
// space too large, 4 I/O error. Only the requested artifact goes to stdout.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "streamflow/dse.hpp"
#include "streamflow/error.hpp"
#include "streamflow/model_ir.hpp"
#include "streamflow/multi_cnn.hpp"
#include "streamflow/perf_model.hpp"
#include "streamflow/report.hpp"

namespace fs = std::filesystem;
using namespace streamflow;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitIo = 4;

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoFeasibleDesign:
    case ErrorCode::NoFeasibleMapping:
    case ErrorCode::SpaceTooLarge:
    case ErrorCode::BandwidthInfeasible:
    case ErrorCode::EmptyInput:
      return kExitInfeasible;
    case ErrorCode::Io:
      return kExitIo;
    default:
      return kExitUsage;
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::Io, "cannot read '" + path.string() + "'");
  return os.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out << text;
  out.close();
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
}

// Errors raised while parsing one input file are prefixed with its name.
template <typename F>
auto parse_input(const fs::path& path, const std::string& text, F&& parse) {
  try {
    return parse(text);
  } catch (const Error& e) {
    throw Error(e.code(), path.filename().string() + ": " + e.detail(), e.line());
  }
}

InputDigest digest(std::string role, const fs::path& path, const std::string& text) {
  return {std::move(role), path.filename().string(), sha256_hex(text)};
}

// Writes `doc` to `out` (or stdout when empty) and the wall clock to a
// sidecar next to it, keeping the descriptor itself reproducible.
void emit(const Json& doc, RunManifest manifest, const std::string& out,
          std::chrono::steady_clock::time_point started) {
  const auto text = dump(doc);
  if (out.empty()) {
    std::cout << text;
    return;
  }
  write_file(out, text);
  manifest.wall_clock_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  write_file(out + ".manifest.json", dump(to_json(manifest)));
}

struct SaFlags {
  std::string config_file;
  std::optional<double> initial_temperature;
  std::optional<double> cooling_rate;
  std::optional<std::uint64_t> iterations_per_temperature;
  std::optional<double> temperature_floor;
  std::optional<std::size_t> max_partitions;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--config", config_file, "key=value optimizer config file");
    cmd.add_option("--initial-temperature", initial_temperature);
    cmd.add_option("--cooling-rate", cooling_rate);
    cmd.add_option("--iterations-per-temperature", iterations_per_temperature);
    cmd.add_option("--temperature-floor", temperature_floor);
    cmd.add_option("--max-partitions", max_partitions);
  }

  // Precedence: defaults, then the config file, then inline flags.
  OptimizerConfig resolve(std::optional<std::uint64_t> seed, RunManifest& manifest) const {
    OptimizerConfig cfg;
    if (!config_file.empty()) {
      const auto text = read_file(config_file);
      cfg = parse_input(config_file, text,
                        [](const std::string& t) { return parse_optimizer_config(t); });
      manifest.inputs.push_back(digest("config", config_file, text));
    }
    if (seed) cfg.seed = *seed;
    if (initial_temperature) cfg.initial_temperature = *initial_temperature;
    if (cooling_rate) cfg.cooling_rate = *cooling_rate;
    if (iterations_per_temperature) cfg.iterations_per_temperature = *iterations_per_temperature;
    if (temperature_floor) cfg.temperature_floor = *temperature_floor;
    if (max_partitions) cfg.max_partitions = *max_partitions;
    validate(cfg);
    return cfg;
  }
};

int cmd_parse(const std::string& net_file) {
  const auto text = read_file(net_file);
  const auto net = parse_input(net_file, text, [](const std::string& t) { return parse_network(t); });
  std::cout << shape_table(net);
  return kExitOk;
}

int cmd_optimize(const std::string& net_file, const std::string& device_file,
                 const std::string& objective_text, std::optional<std::uint64_t> seed,
                 const std::string& out, const SaFlags& flags) {
  const auto started = std::chrono::steady_clock::now();
  const auto objective = parse_objective(objective_text);
  RunManifest manifest;
  const auto net_text = read_file(net_file);
  const auto dev_text = read_file(device_file);
  manifest.inputs.push_back(digest("network", net_file, net_text));
  manifest.inputs.push_back(digest("device", device_file, dev_text));
  const auto net =
      parse_input(net_file, net_text, [](const std::string& t) { return parse_network(t); });
  const auto device =
      parse_input(device_file, dev_text, [](const std::string& t) { return parse_device(t); });
  const auto cfg = flags.resolve(seed, manifest);
  manifest.seed = cfg.seed;
  manifest.objective = objective.to_string();

  const auto result = optimize_sa(net, device, objective, cfg);
  auto body = design_body(net, device, result.design, result.report);
  body["objective"] = objective.to_string();
  body["cost"] = result.cost;
  const auto doc = finalize_descriptor("design", std::move(body), manifest);
  emit(doc, manifest, out, started);
  return kExitOk;
}

int cmd_pareto(const std::string& net_file, const std::string& device_file,
               std::uint64_t limit, const std::string& metric, const std::string& resource,
               std::uint64_t batch, std::size_t max_partitions) {
  const auto net_text = read_file(net_file);
  const auto dev_text = read_file(device_file);
  const auto net =
      parse_input(net_file, net_text, [](const std::string& t) { return parse_network(t); });
  const auto device =
      parse_input(device_file, dev_text, [](const std::string& t) { return parse_device(t); });
  ParetoAxes axes;
  axes.metric = metric == "throughput" ? ParetoMetric::Throughput : ParetoMetric::Latency;
  axes.resource = resource == "bram"  ? ResourceAxis::Bram
                  : resource == "lut" ? ResourceAxis::Lut
                                      : ResourceAxis::Dsp;
  EnumerationLimits limits;
  limits.max_points = limit;
  limits.batch = batch;
  limits.max_partitions = max_partitions;
  const auto designs = enumerate_designs(net, device, limits);
  if (designs.empty()) throw Error(ErrorCode::NoFeasibleDesign, "no enumerated design fits");
  std::vector<PerfReport> reports;
  reports.reserve(designs.size());
  for (const auto& d : designs) reports.push_back(d.report);
  const auto front = pareto_front(reports, axes);
  std::cout << pareto_csv(designs, front);
  return kExitOk;
}

int cmd_multi(const std::string& workload_file, const std::string& device_file,
              std::optional<std::uint64_t> seed, const std::string& out, const SaFlags& flags,
              double lambda) {
  const auto started = std::chrono::steady_clock::now();
  RunManifest manifest;
  const auto wl_text = read_file(workload_file);
  const auto dev_text = read_file(device_file);
  manifest.inputs.push_back(digest("workload", workload_file, wl_text));
  manifest.inputs.push_back(digest("device", device_file, dev_text));
  const auto files = parse_input(workload_file, wl_text,
                                 [](const std::string& t) { return parse_workload_file(t); });
  const auto device =
      parse_input(device_file, dev_text, [](const std::string& t) { return parse_device(t); });

  const fs::path base = fs::path(workload_file).parent_path();
  std::vector<WorkloadEntry> entries;
  for (const auto& f : files) {
    const fs::path path = fs::path(f.file).is_absolute() ? fs::path(f.file) : base / f.file;
    const auto text = read_file(path);
    manifest.inputs.push_back(digest("network", path, text));
    WorkloadEntry e;
    e.name = path.stem().string();
    e.network = parse_input(path, text, [](const std::string& t) { return parse_network(t); });
    e.weight = f.weight;
    e.target_latency_s = f.target_ms / 1000.0;
    entries.push_back(std::move(e));
  }
  const MultiCnnWorkload workload(std::move(entries));
  const auto cfg = flags.resolve(seed, manifest);
  manifest.seed = cfg.seed;
  manifest.objective = "multi:lambda=" + Json(lambda).dump();

  MultiConfig mc;
  mc.lambda = lambda;
  const auto mapping = optimize_multi(workload, device, cfg, mc);
  const auto doc = finalize_descriptor("multi_mapping", mapping_body(workload, device, mapping),
                                       manifest);
  emit(doc, manifest, out, started);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Design-space exploration for streaming CNN accelerators"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  std::string net_file, device_file, workload_file, out;
  std::string objective = "latency";
  std::optional<std::uint64_t> seed;
  SaFlags sa;

  auto* parse = app.add_subcommand("parse", "Print the per-layer shape table");
  parse->add_option("net_file", net_file)->required();

  auto* optimize = app.add_subcommand("optimize", "Search for one design and write a descriptor");
  optimize->add_option("net_file", net_file)->required();
  optimize->add_option("device_file", device_file)->required();
  optimize->add_option("--objective", objective, "latency | throughput:<B>");
  optimize->add_option("--seed", seed);
  optimize->add_option("--out", out, "descriptor path (stdout when omitted)");
  sa.add_to(*optimize);

  std::uint64_t limit = 1'000'000;
  std::string metric = "latency", resource = "dsp";
  std::uint64_t batch = 1;
  std::size_t max_partitions = 0;
  auto* pareto = app.add_subcommand("pareto", "Enumerate the space and print the Pareto front");
  pareto->add_option("net_file", net_file)->required();
  pareto->add_option("device_file", device_file)->required();
  pareto->add_option("--limit", limit, "maximum number of enumerated design points");
  pareto->add_option("--metric", metric)->check(CLI::IsMember({"latency", "throughput"}));
  pareto->add_option("--resource", resource)->check(CLI::IsMember({"dsp", "bram", "lut"}));
  pareto->add_option("--batch", batch, "batch for the throughput column")
      ->check(CLI::PositiveNumber);
  pareto->add_option("--max-partitions", max_partitions);

  double lambda = 0.1;
  auto* multi = app.add_subcommand("multi", "Map several CNNs onto one device");
  multi->add_option("workload_file", workload_file)->required();
  multi->add_option("device_file", device_file)->required();
  multi->add_option("--seed", seed);
  multi->add_option("--out", out, "descriptor path (stdout when omitted)");
  multi->add_option("--lambda", lambda, "weight of the headroom term");
  sa.add_to(*multi);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*parse) return cmd_parse(net_file);
    if (*optimize) return cmd_optimize(net_file, device_file, objective, seed, out, sa);
    if (*pareto)
      return cmd_pareto(net_file, device_file, limit, metric, resource, batch, max_partitions);
    if (*multi) return cmd_multi(workload_file, device_file, seed, out, sa, lambda);
  } catch (const Error& e) {
    std::cerr << "streamflow: " << e.what() << '\n';
    if (e.code() == ErrorCode::InvalidArgument) std::cerr << app.help() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "streamflow: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}
