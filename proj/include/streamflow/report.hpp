/*
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "streamflow/dse.hpp"
#include "streamflow/model_ir.hpp"
#include "streamflow/multi_cnn.hpp"
#include "streamflow/perf_model.hpp"

namespace streamflow {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr int kDescriptorSchemaVersion = 1;

using Json = nlohmann::ordered_json;

/// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view bytes);

struct InputDigest {
  std::string role;  // "network", "device", "workload", "config", ...
  std::string name;  // file name without directories
  std::string sha256;
};

struct RunManifest {
  std::string tool_version{kToolVersion};
  std::vector<InputDigest> inputs;
  std::uint64_t seed = 0;
  std::string objective;
  std::optional<double> wall_clock_s;  // never part of a digest
  std::string result_digest;
};

Json to_json(const RunManifest& manifest);
Json to_json(const PerfReport& report);

/// Descriptor body: per-layer folding, partitions, mode and the report,
/// without manifest.
Json design_body(const NetworkGraph& net, const DeviceDescriptor& device,
                 const DesignPoint& design, const PerfReport& report);

Json mapping_body(const MultiCnnWorkload& workload, const DeviceDescriptor& device,
                  const MultiCnnMapping& mapping);

/// Fills manifest.result_digest from `body` and returns the full document
/// {schema_version, kind, ..body.., manifest}. The wall clock is omitted
/// from the document; callers may write it to a sidecar instead.
Json finalize_descriptor(std::string_view kind, Json body, RunManifest& manifest);

/// Canonical textual form used for files and digests: two-space indent,
/// trailing newline.
std::string dump(const Json& doc);

/// Whitespace-aligned table, one row per layer.
std::string shape_table(const NetworkGraph& net);

/// Header `design_id,latency_s,throughput_ips,dsp,bram,lut,mode,partitions`
/// followed by one row per index in `front`.
std::string pareto_csv(std::span<const EvaluatedDesign> designs,
                       std::span<const std::size_t> front);

}  // namespace streamflow
