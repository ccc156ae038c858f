/*
 * SPDX-License-Identifier: Apache-2.0
 */

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Everything is seeded; results are reproducible.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "streamflow/dse.hpp"
#include "streamflow/error.hpp"
#include "streamflow/multi_cnn.hpp"
#include "streamflow/perf_model.hpp"
#include "streamflow/sdf.hpp"
#include "support/oracles.hpp"

using namespace streamflow;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// 1. Token conservation and a positive balance vector proportional to cycles.
Outcome sdf_consistency() {
  testing::Gen g(1001);
  int failures = 0;
  for (int n = 0; n < 500; ++n) {
    const auto net = testing::random_network(g, 8);
    const auto design = testing::random_design(net, g);
    const auto sdf = build_sdf(net, design);
    bool ok = true;
    for (const auto& a : sdf.arcs)
      ok = ok && sdf.stages[a.producer].tokens_out == a.tokens &&
           sdf.stages[a.consumer].tokens_in == a.tokens;
    const auto r = check_consistency(sdf);
    ok = ok && r.conserving && r.balance_vector;
    if (ok) {
      const auto cycles = design_cycles(net, design);
      const auto& b = *r.balance_vector;
      for (std::size_t i = 0; i < b.size(); ++i)
        ok = ok && b[i] > 0 && b[i] * Rational(cycles[0]) == b[0] * Rational(cycles[i]);
    }
    failures += ok ? 0 : 1;
  }
  return {failures == 0, "500 pairs, " + std::to_string(failures) + " failures"};
}

// 2. Simulated makespan equals sum T + (B - 1) max T.
Outcome pipeline_oracle() {
  testing::Gen g(1002);
  int mismatches = 0;
  for (int n = 0; n < 200; ++n) {
    std::vector<std::uint64_t> t(static_cast<std::size_t>(testing::uniform(g, 1, 12)));
    for (auto& x : t) x = static_cast<std::uint64_t>(testing::uniform(g, 1, 1000));
    const auto batch = static_cast<std::uint64_t>(testing::uniform(g, 1, 1000));
    std::uint64_t sum = 0, peak = 0;
    for (auto x : t) {
      sum += x;
      peak = std::max(peak, x);
    }
    if (simulate_pipeline(t, batch) != sum + (batch - 1) * peak) ++mismatches;
  }
  return {mismatches == 0, "200 cases, " + std::to_string(mismatches) + " mismatches"};
}

// 3. Cycles never rise and DSPs never fall along either folding axis.
Outcome folding_monotonicity() {
  const auto net = parse_network(
      "input 3 8 8\nconv name=c k=3 s=1 p=1 out=12\npool name=p k=2 s=2 type=max\n"
      "fc name=f out=10");
  const DeviceDescriptor dev{"d", 1, 1, 1};
  std::uint64_t checked = 0, violations = 0;
  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto& l = net.layers[i];
    const auto in = net.input_of(i), out = net.output_of(i);
    const auto cc = coarse_cap(net, i), fc = fine_cap(net, i);
    auto at = [&](std::int64_t c, std::int64_t f) {
      const StageConfig s{c, f};
      return std::pair{stage_cycles(l, in, out, s), stage_resources(l, in, s, dev).dsp};
    };
    for (std::int64_t c = 1; c <= cc; ++c)
      for (std::int64_t f = 1; f <= fc; ++f) {
        const auto here = at(c, f);
        if (c < cc) {
          const auto next = at(c + 1, f);
          ++checked;
          violations += (next.first > here.first || next.second < here.second) ? 1 : 0;
        }
        if (f < fc) {
          const auto next = at(c, f + 1);
          ++checked;
          violations += (next.first > here.first || next.second < here.second) ? 1 : 0;
        }
      }
  }
  return {violations == 0, std::to_string(checked) + " steps, " + std::to_string(violations) +
                               " violations"};
}

struct SaCase {
  std::string name;
  std::string net;
  DeviceDescriptor device;
  Objective objective;
};

std::vector<SaCase> sa_cases() {
  const DeviceDescriptor tight{"tight", 24, 12, 20000, 100, 2, 0.05, 16};
  const DeviceDescriptor roomy{"roomy", 64, 40, 40000, 100, 4, 0.5, 16};
  return {
      {"conv-relu-pool", "input 1 8 8\nconv name=c k=3 s=1 p=1 out=4\nrelu name=r\n"
                         "pool name=p k=2 s=2 type=max",
       tight, Objective::min_latency()},
      {"conv-relu-pool/tp", "input 1 8 8\nconv name=c k=3 s=1 p=1 out=4\nrelu name=r\n"
                            "pool name=p k=2 s=2 type=max",
       tight, Objective::max_throughput(64)},
      {"conv-pool-fc", "input 1 12 12\nconv name=c k=5 s=1 p=0 out=6\n"
                       "pool name=p k=2 s=2 type=max\nfc name=f out=5",
       tight, Objective::min_latency()},
      {"two-conv", "input 1 8 8\nconv name=a k=3 s=1 p=1 out=2\nrelu name=r1\n"
                   "conv name=b k=3 s=1 p=1 out=2\nrelu name=r2",
       tight, Objective::max_throughput(16)},
      {"fc-stack", "input 4 2 2\nfc name=a out=8\nrelu name=r\nfc name=b out=4", roomy,
       Objective::min_latency()},
      {"conv-conv", "input 2 6 6\nconv name=a k=3 s=1 p=1 out=4\nconv name=b k=3 s=1 p=1 out=3",
       roomy, Objective::max_throughput(32)},
  };
}

// 4. Annealing with the default configuration against brute force.
Outcome sa_vs_exhaustive() {
  const auto started = Clock::now();
  int pairs = 0, within = 0;
  std::string sizes, per_case;
  for (const auto& c : sa_cases()) {
    const auto net = parse_network(c.net);
    const auto size = design_space_size(net, {});
    sizes += (sizes.empty() ? "" : ",") + std::to_string(size);
    if (size > 10'000) return {false, c.name + " space " + std::to_string(size) + " > 1e4"};
    const auto best = exhaustive_optimum(net, c.device, c.objective);
    if (!best) return {false, c.name + " has no feasible design"};
    const double opt = c.objective.cost(best->report);
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      OptimizerConfig cfg;
      cfg.seed = seed;
      const auto sa = optimize_sa(net, c.device, c.objective, cfg);
      ++pairs;
      // Costs are latency (positive) or negated throughput.
      const bool ok = opt > 0 ? sa.cost <= opt * 1.05 : sa.cost <= opt * 0.95;
      hits += ok ? 1 : 0;
    }
    within += hits;
    per_case += " " + c.name + "=" + std::to_string(hits);
  }
  const double secs = seconds_since(started);
  const double rate = static_cast<double>(within) / pairs;
  return {rate >= 0.95 && secs < 60.0,
          std::to_string(within) + "/" + std::to_string(pairs) + " within 5% (spaces " + sizes +
              ";" + per_case + "), " + fmt("%.2f s", secs)};
}

// 5. Latency-optimal beats the throughput-optimal design at batch 1, and
// loses to it at batch 256.
Outcome latency_vs_throughput() {
  const auto dir = fs::path(STREAMFLOW_DATA_DIR);
  const auto net = parse_network(read_file(dir / "nets/deep8.net"));
  const auto dev = parse_device(read_file(dir / "devices/small.dev"));
  if (dev.reconfig_ms != 80) return {false, "device reconfig_ms is not 80"};
  for (Mode m : {Mode::Throughput, Mode::Latency})
    if (evaluate(serial_design(net, m), net, dev).feasible)
      return {false, "net fits in one partition"};
  const auto gap = latency_throughput_gap(net, dev, {}, 256);
  const double lat = gap.latency_optimal.report.latency_single;
  const double tp_lat = gap.throughput_design_latency;
  const double tp_best = gap.throughput_optimal.report.throughput;
  const double tp_of_lat = evaluate(gap.latency_optimal.design, net, dev, 256).throughput;
  const bool ok = gap.latency_optimal.design.partitions.size() >= 2 && lat < tp_lat &&
                  tp_best >= tp_of_lat;
  return {ok, "latency " + fmt("%.4g s", lat) + " vs " + fmt("%.4g s", tp_lat) + ", ratio " +
                  fmt("%.3f", gap.ratio) + "; throughput@256 " + fmt("%.4g", tp_best) +
                  " vs " + fmt("%.4g", tp_of_lat)};
}

// 6a. Every schedule optimize_multi produces survives the validator.
Outcome multi_schedules(int& successes, int& attempts) {
  testing::Gen g(1006);
  const DeviceDescriptor dev{"zc7020", 220, 280, 53200, 125, 4.2, 80, 16};
  int problems = 0;
  successes = attempts = 0;
  while (successes < 100 && attempts < 1000) {
    ++attempts;
    const auto n = static_cast<std::size_t>(testing::uniform(g, 2, 3));
    std::vector<WorkloadEntry> entries;
    for (std::size_t j = 0; j < n; ++j)
      entries.push_back({"cnn" + std::to_string(j), testing::random_network(g, 5),
                         static_cast<double>(testing::uniform(g, 1, 9)),
                         static_cast<double>(testing::uniform(g, 1, 100)) * 1e-6});
    const MultiCnnWorkload w(std::move(entries));
    OptimizerConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(attempts);
    cfg.iterations_per_temperature = 20;
    std::optional<MultiCnnMapping> m;
    try {
      m = optimize_multi(w, dev, cfg);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoFeasibleMapping) throw;
      continue;
    }
    ++successes;
    const auto demands = transfer_demands(w, m->designs, dev);
    bool ok = validate_schedule(m->schedule, demands, dev).empty();
    std::int64_t dsp = 0, bram = 0, lut = 0;
    for (const auto& b : m->budgets) {
      dsp += b.dsp;
      bram += b.bram;
      lut += b.lut;
    }
    ok = ok && dsp <= dev.dsp && bram <= dev.bram && lut <= dev.lut;
    problems += ok ? 0 : 1;
  }
  return {problems == 0 && successes == 100, ""};
}

// 6b. Dropping a CNN from a tiny exhaustively-solved pair never slows the
// other one.
bool isolation_monotone(int& checks) {
  const auto a = parse_network("input 1 6 6\nconv name=a k=3 s=1 p=0 out=2");
  const auto b = parse_network("input 2 4 4\nconv name=b k=1 s=1 p=0 out=3\nrelu name=r");
  const DeviceDescriptor dev{"tight", 20, 20, 1'000'000, 100, 2, 0, 16};
  bool ok = true;
  checks = 0;
  for (double target : {1e-6, 2e-6, 5e-6, 2e-5})
    for (double wa : {0.2, 0.5, 0.8}) {
      const std::vector<WorkloadEntry> pair{{"a", a, wa, target}, {"b", b, 1 - wa, target}};
      const auto joint = optimize_multi_exhaustive(pair, dev);
      for (std::size_t j = 0; j < 2; ++j) {
        const auto alone = optimize_multi_exhaustive(std::span(pair).subspan(j, 1), dev);
        ++checks;
        ok = ok && alone.latencies[0] <= joint.latencies[j];
      }
    }
  return ok;
}

Outcome multi_cnn() {
  int successes = 0, attempts = 0, checks = 0;
  const auto sched = multi_schedules(successes, attempts);
  const bool iso = isolation_monotone(checks);
  return {sched.pass && iso, std::to_string(successes) + " valid mappings in " +
                                 std::to_string(attempts) + " workloads; isolation " +
                                 (iso ? "holds" : "violated") + " on " + std::to_string(checks) +
                                 " cases"};
}

// 7. Pareto front equals the quadratic oracle.
Outcome pareto_exact() {
  testing::Gen g(1007);
  int spaces = 0, mismatches = 0;
  const std::vector<ParetoAxes> axes{{ParetoMetric::Latency, ResourceAxis::Dsp},
                                     {ParetoMetric::Latency, ResourceAxis::Bram},
                                     {ParetoMetric::Throughput, ResourceAxis::Dsp},
                                     {ParetoMetric::Throughput, ResourceAxis::Lut}};
  const DeviceDescriptor dev{"roomy", 400, 400, 400000, 100, 50, 0.1, 16};
  auto check = [&](const NetworkGraph& net, std::uint64_t batch) {
    EnumerationLimits limits;
    limits.batch = batch;
    const auto designs = enumerate_designs(net, dev, limits);
    if (designs.empty()) return;
    std::vector<PerfReport> reports;
    for (const auto& d : designs) reports.push_back(d.report);
    for (const auto& ax : axes) {
      ++spaces;
      const auto front = pareto_front(reports, ax);
      const std::set<std::size_t> got(front.begin(), front.end());
      mismatches += (got == testing::pareto_oracle(reports, ax) && got.size() == front.size()) ? 0 : 1;
    }
  };
  for (const auto& c : sa_cases()) check(parse_network(c.net), 8);
  for (int n = 0; n < 40; ++n) {
    const auto net = testing::random_network(g, 3);
    if (design_space_size(net, {}) <= 5'000) check(net, static_cast<std::uint64_t>(testing::uniform(g, 1, 64)));
  }
  return {mismatches == 0 && spaces > 0,
          std::to_string(spaces) + " fronts, " + std::to_string(mismatches) + " mismatches"};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + STREAMFLOW_CLI + "\" " + args;
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// 8. The optimize command is byte-for-byte reproducible.
Outcome cli_determinism() {
  const auto dir = fs::path(STREAMFLOW_DATA_DIR);
  const auto tmp = fs::temp_directory_path() / ("streamflow_accept_" + std::to_string(::getpid()));
  fs::create_directories(tmp);
  const std::string args = "optimize \"" + (dir / "nets/alexnet_small.net").string() + "\" \"" +
                           (dir / "devices/zc7020.dev").string() + "\" --seed 42 --out ";
  const auto started = Clock::now();
  const int a = run_cli(args + "\"" + (tmp / "a.json").string() + "\"");
  const int b = run_cli(args + "\"" + (tmp / "b.json").string() + "\"");
  const double secs = seconds_since(started);
  const auto ta = read_file(tmp / "a.json");
  const bool same = !ta.empty() && ta == read_file(tmp / "b.json");
  fs::remove_all(tmp);
  return {a == 0 && b == 0 && same && secs < 300.0,
          std::string(same ? "identical" : "different") + " descriptors, exit " +
              std::to_string(a) + "/" + std::to_string(b) + ", " + fmt("%.2f s", secs)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"sdf consistency", sdf_consistency},
      {"pipeline oracle", pipeline_oracle},
      {"folding monotonicity", folding_monotonicity},
      {"annealing vs exhaustive", sa_vs_exhaustive},
      {"latency vs throughput", latency_vs_throughput},
      {"multi-cnn schedules", multi_cnn},
      {"pareto front", pareto_exact},
      {"cli determinism", cli_determinism},
  };
  const auto started = Clock::now();
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("criterion %zu %-24s %s  %s\n", i + 1, criteria[i].first.c_str(),
                o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("total %.2f s, %d failed\n", seconds_since(started), failed);
  return failed == 0 ? 0 : 1;
}
