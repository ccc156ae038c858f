/*
 * SPDX-License-Identifier: Apache-2.0
 */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "streamflow/report.hpp"

using namespace streamflow;

namespace {

const NetworkGraph& net() {
  static const auto n = parse_network(
      "input 1 8 8\nconv name=c k=3 s=1 p=1 out=4\nrelu name=r\npool name=p k=2 s=2 type=max");
  return n;
}

const DeviceDescriptor kDev{"d", 220, 280, 53200, 100, 4, 80, 16};

}  // namespace

TEST_CASE("sha256_hex known vectors") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("design body lists every layer and partition") {
  auto d = partition_graph(serial_design(net()), std::vector<std::size_t>{2});
  d.stages[0] = {2, 3};
  const auto report = evaluate(d, net(), kDev, 4);
  const auto body = design_body(net(), kDev, d, report);
  CHECK(body["mode"] == "throughput");
  CHECK(body["cut_points"] == Json::array({2}));
  REQUIRE(body["layers"].size() == 3);
  CHECK(body["layers"][0]["name"] == "c");
  CHECK(body["layers"][0]["coarse"] == 2);
  CHECK(body["layers"][0]["fine"] == 3);
  CHECK(body["layers"][2]["partition"] == 1);
  REQUIRE(body["partitions"].size() == 2);
  CHECK(body["partitions"][1]["begin"] == 2);
  CHECK(body["report"]["batch"] == 4);
  CHECK(body["report"]["feasible"] == report.feasible);
}

TEST_CASE("finalize_descriptor digests the document without the manifest") {
  const auto d = serial_design(net());
  const auto body = design_body(net(), kDev, d, evaluate(d, net(), kDev));
  RunManifest m1;
  m1.seed = 7;
  m1.wall_clock_s = 1.5;
  m1.inputs.push_back({"network", "a.net", sha256_hex("x")});
  auto m2 = m1;
  m2.wall_clock_s = 99.0;
  const auto a = finalize_descriptor("design", body, m1);
  const auto b = finalize_descriptor("design", body, m2);
  CHECK(dump(a) == dump(b));
  CHECK(a["schema_version"] == kDescriptorSchemaVersion);
  CHECK(a["kind"] == "design");
  CHECK_FALSE(a["manifest"].contains("wall_clock_s"));
  CHECK(a["manifest"]["tool_version"] == kToolVersion);
  CHECK(m1.result_digest.size() == 64);

  auto stripped = a;
  stripped.erase("manifest");
  CHECK(a["manifest"]["result_digest"] == sha256_hex(dump(stripped)));

  auto other = body;
  other["layers"][0]["coarse"] = 4;
  RunManifest m3 = m1;
  finalize_descriptor("design", other, m3);
  CHECK(m3.result_digest != m1.result_digest);

  CHECK(to_json(m2)["wall_clock_s"] == 99.0);
  CHECK(dump(a).back() == '\n');
  CHECK(Json::parse(dump(a)) == a);
}

TEST_CASE("shape_table") {
  const auto table = shape_table(net());
  std::istringstream in(table);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 4);  // header plus one row per layer
  CHECK(table.find("4x8x8") != std::string::npos);
  CHECK(table.find("pool") != std::string::npos);
}

TEST_CASE("pareto_csv") {
  const auto d = serial_design(net());
  const std::vector<EvaluatedDesign> designs{{d, evaluate(d, net(), kDev)}};
  const std::vector<std::size_t> front{0};
  const auto csv = pareto_csv(designs, front);
  CHECK(csv.rfind("design_id,latency_s,throughput_ips,dsp,bram,lut,mode,partitions\n", 0) == 0);
  CHECK(csv.find("\n0,") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}
