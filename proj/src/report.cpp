/*
 * SPDX-License-Identifier: Apache-2.0
 */

#include "streamflow/report.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <sstream>

#include "streamflow/error.hpp"

namespace streamflow {

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::Io, "SHA-256 digest failed");
  std::string hex;
  hex.reserve(2 * len);
  constexpr char kDigits[] = "0123456789abcdef";
  for (unsigned i = 0; i < len; ++i) {
    hex.push_back(kDigits[md[i] >> 4]);
    hex.push_back(kDigits[md[i] & 0xF]);
  }
  return hex;
}

Json to_json(const RunManifest& m) {
  Json inputs = Json::array();
  for (const auto& in : m.inputs)
    inputs.push_back({{"role", in.role}, {"name", in.name}, {"sha256", in.sha256}});
  Json j = {{"tool_version", m.tool_version},
            {"inputs", std::move(inputs)},
            {"seed", m.seed},
            {"objective", m.objective}};
  if (m.wall_clock_s) j["wall_clock_s"] = *m.wall_clock_s;
  j["result_digest"] = m.result_digest;
  return j;
}

namespace {

Json to_json(const ResourceVector& r) {
  return {{"dsp", r.dsp}, {"bram", r.bram}, {"lut", r.lut}};
}

Json shape_json(const TensorShape& s) { return Json::array({s.channels, s.height, s.width}); }

}  // namespace

Json to_json(const PerfReport& r) {
  return {{"batch", r.batch},
          {"throughput_ips", r.throughput},
          {"latency_s", r.latency_single},
          {"resources", to_json(r.resources)},
          {"bandwidth_demand_gbps", r.bandwidth_demand_gbps},
          {"feasible", r.feasible},
          {"violations", r.violations}};
}

Json design_body(const NetworkGraph& net, const DeviceDescriptor& device,
                 const DesignPoint& design, const PerfReport& report) {
  const auto cycles = design_cycles(net, design);
  Json layers = Json::array();
  Json partitions = Json::array();
  for (std::size_t p = 0; p < design.partitions.size(); ++p) {
    const auto& range = design.partitions[p];
    Json names = Json::array();
    for (std::size_t i = range.begin; i < range.end; ++i) {
      const auto& layer = net.layers[i];
      const auto res = stage_resources(layer, net.input_of(i), design.stages[i], device);
      names.push_back(layer.name);
      layers.push_back({{"name", layer.name},
                        {"kind", to_string(layer.kind)},
                        {"input", shape_json(net.input_of(i))},
                        {"output", shape_json(net.output_of(i))},
                        {"coarse", design.stages[i].coarse},
                        {"fine", design.stages[i].fine},
                        {"cycles", cycles[i]},
                        {"resources", to_json(res)},
                        {"partition", p}});
    }
    partitions.push_back({{"index", p},
                          {"begin", range.begin},
                          {"end", range.end},
                          {"layers", std::move(names)}});
  }
  return {{"device", device.name},
          {"mode", to_string(design.mode)},
          {"cut_points", design.cut_points()},
          {"layers", std::move(layers)},
          {"partitions", std::move(partitions)},
          {"report", to_json(report)}};
}

Json mapping_body(const MultiCnnWorkload& workload, const DeviceDescriptor& device,
                  const MultiCnnMapping& mapping) {
  Json cnns = Json::array();
  for (std::size_t j = 0; j < workload.size(); ++j) {
    const auto& e = workload[j];
    const auto& b = mapping.budgets[j];
    Json design = design_body(e.network, b, mapping.designs[j], mapping.reports[j]);
    design.erase("device");
    cnns.push_back({{"index", j},
                    {"name", e.name},
                    {"weight", e.weight},
                    {"target_latency_s", e.target_latency_s},
                    {"share", mapping.shares[j]},
                    {"budget", {{"dsp", b.dsp}, {"bram", b.bram}, {"lut", b.lut}}},
                    {"latency_s", mapping.latencies[j]},
                    {"design", std::move(design)}});
  }
  Json slots = Json::array();
  for (const auto& s : mapping.schedule.slots)
    slots.push_back({{"cnn", s.cnn},
                     {"start", s.start},
                     {"duration", s.duration},
                     {"bits", s.bits}});
  return {{"device", device.name},
          {"cnns", std::move(cnns)},
          {"schedule", {{"period_cycles", mapping.schedule.period}, {"slots", std::move(slots)}}},
          {"cost",
           {{"total", mapping.cost.total},
            {"deadline_term", mapping.cost.deadline_term},
            {"headroom_term", mapping.cost.headroom_term}}}};
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

Json finalize_descriptor(std::string_view kind, Json body, RunManifest& manifest) {
  Json doc = {{"schema_version", kDescriptorSchemaVersion}, {"kind", kind}};
  for (auto& [k, v] : body.items()) doc[k] = std::move(v);
  manifest.result_digest = sha256_hex(dump(doc));
  auto m = manifest;
  m.wall_clock_s.reset();
  doc["manifest"] = to_json(m);
  return doc;
}

namespace {

std::string fmt_shape(const TensorShape& s) {
  return std::to_string(s.channels) + "x" + std::to_string(s.height) + "x" +
         std::to_string(s.width);
}

// Shortest representation that round-trips.
std::string fmt_double(double v) {
  char buf[32];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

}  // namespace

std::string shape_table(const NetworkGraph& net) {
  std::vector<std::array<std::string, 7>> rows;
  rows.push_back({"index", "name", "kind", "input", "output", "ops", "weights"});
  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto& l = net.layers[i];
    rows.push_back({std::to_string(i), l.name, std::string(to_string(l.kind)),
                    fmt_shape(net.input_of(i)), fmt_shape(net.output_of(i)),
                    std::to_string(layer_ops(l, net.input_of(i), net.output_of(i))),
                    std::to_string(layer_weights(l, net.input_of(i)))});
  }
  std::array<std::size_t, 7> width{};
  for (const auto& r : rows)
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  std::ostringstream os;
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t c = 0; c < r.size(); ++c) {
      line += r[c];
      if (c + 1 < r.size()) line += std::string(width[c] - r[c].size() + 2, ' ');
    }
    os << line << '\n';
  }
  return os.str();
}

std::string pareto_csv(std::span<const EvaluatedDesign> designs,
                       std::span<const std::size_t> front) {
  std::ostringstream os;
  os << "design_id,latency_s,throughput_ips,dsp,bram,lut,mode,partitions\n";
  for (auto id : front) {
    const auto& e = designs[id];
    os << id << ',' << fmt_double(e.report.latency_single) << ','
       << fmt_double(e.report.throughput) << ',' << e.report.resources.dsp << ','
       << e.report.resources.bram << ',' << e.report.resources.lut << ','
       << to_string(e.design.mode) << ',' << e.design.partition_count() << '\n';
  }
  return os.str();
}

}  // namespace streamflow
