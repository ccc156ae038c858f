/*
 * SPDX-License-Identifier: Apache-2.0
 */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "streamflow/design.hpp"
#include "streamflow/error.hpp"
#include "streamflow/perf_model.hpp"
#include "support/oracles.hpp"

using namespace streamflow;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Io;
}

const NetworkGraph& conv16() {
  static const auto net = parse_network(
      "input 1 8 8\nconv name=c k=3 s=1 p=1 out=16\npool name=p k=2 s=2 type=max\n"
      "relu name=r\nfc name=f out=10");
  return net;
}

// Reduced-width VGG16 shape: 13 conv in 5 blocks, then 3 fc.
NetworkGraph vgg16_shaped() {
  std::string text = "input 3 32 32\n";
  const int widths[5] = {8, 16, 32, 64, 64};
  const int depth[5] = {2, 2, 3, 3, 3};
  int n = 0;
  for (int b = 0; b < 5; ++b) {
    for (int i = 0; i < depth[b]; ++i, ++n)
      text += "conv name=conv" + std::to_string(n) + " k=3 s=1 p=1 out=" +
              std::to_string(widths[b]) + "\nrelu name=relu" + std::to_string(n) + "\n";
    text += "pool name=pool" + std::to_string(b) + " k=2 s=2 type=max\n";
  }
  text += "fc name=fc0 out=128\nrelu name=relufc0\nfc name=fc1 out=128\nrelu name=relufc1\n"
          "fc name=fc2 out=10\n";
  return parse_network(text);
}

}  // namespace

TEST_CASE("set_coarse_folding: range") {
  const auto& net = conv16();
  const auto base = serial_design(net);
  const auto full = set_coarse_folding(base, net, 0, 16);
  CHECK(full.stages[0].coarse == 16);
  CHECK(full.stages[0].fine == 1);
  CHECK(base.stages[0].coarse == 1);  // input untouched
  CHECK(set_coarse_folding(full, net, 0, 1) == base);
  CHECK(code_of([&] { set_coarse_folding(base, net, 0, 17); }) == ErrorCode::FoldingOutOfRange);
  CHECK(code_of([&] { set_coarse_folding(base, net, 0, 0); }) == ErrorCode::FoldingOutOfRange);
  CHECK(code_of([&] { set_coarse_folding(base, net, 9, 1); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("set_fine_folding: range") {
  const auto& net = conv16();
  const auto base = serial_design(net);
  CHECK(set_fine_folding(base, net, 0, 9).stages[0].fine == 9);
  CHECK(set_fine_folding(base, net, 0, 1) == base);
  CHECK(code_of([&] { set_fine_folding(base, net, 0, 10); }) == ErrorCode::FoldingOutOfRange);
  CHECK(code_of([&] { set_fine_folding(base, net, 1, 2); }) == ErrorCode::FoldingOutOfRange);
  CHECK(set_fine_folding(base, net, 3, 256).stages[3].fine == 256);  // fc C_in_flat = 16*4*4
  CHECK(code_of([&] { set_fine_folding(base, net, 3, 257); }) == ErrorCode::FoldingOutOfRange);
}

TEST_CASE("caps per kind") {
  const auto& net = conv16();
  CHECK(coarse_cap(net, 0) == 16);
  CHECK(fine_cap(net, 0) == 9);
  CHECK(coarse_cap(net, 1) == 16);
  CHECK(fine_cap(net, 1) == 1);
  CHECK(coarse_cap(net, 2) == 16);
  CHECK(coarse_cap(net, 3) == 10);
  CHECK(fine_cap(net, 3) == 256);
}

TEST_CASE("partition_graph") {
  const auto& net = conv16();
  const auto base = serial_design(net);
  const std::vector<std::size_t> cut2{2};
  const auto d = partition_graph(base, cut2);
  REQUIRE(d.partitions.size() == 2);
  CHECK(d.partitions[0] == LayerRange{0, 2});
  CHECK(d.partitions[1] == LayerRange{2, 4});
  CHECK(d.cut_points() == cut2);

  const auto none = partition_graph(d, {});
  CHECK(none.partitions.size() == 1);
  CHECK(none.partitions[0] == LayerRange{0, 4});

  CHECK(code_of([&] { partition_graph(base, std::vector<std::size_t>{0}); }) ==
        ErrorCode::InvalidCutPoint);
  CHECK(code_of([&] { partition_graph(base, std::vector<std::size_t>{4}); }) ==
        ErrorCode::InvalidCutPoint);
  CHECK(code_of([&] { partition_graph(base, std::vector<std::size_t>{2, 2}); }) ==
        ErrorCode::InvalidCutPoint);
  CHECK(code_of([&] { partition_graph(base, std::vector<std::size_t>{3, 1}); }) ==
        ErrorCode::InvalidCutPoint);
  const auto lat = weights_reloading(base, cut2);
  CHECK(code_of([&] { partition_graph(lat, cut2); }) == ErrorCode::ModeMismatch);
}

TEST_CASE("partition_graph with no cuts leaves the estimates unchanged") {
  const auto& net = conv16();
  const DeviceDescriptor dev{"d", 220, 280, 53200, 100, 1, 80, 16};
  testing::Gen g(31);
  for (int n = 0; n < 50; ++n) {
    auto d = testing::random_design(net, g);
    d.mode = Mode::Throughput;
    d.partitions = partitions_from_cuts(net.size(), {});
    const auto a = evaluate(d, net, dev, 7);
    const auto b = evaluate(partition_graph(d, {}), net, dev, 7);
    CHECK(a.throughput == b.throughput);
    CHECK(a.latency_single == b.latency_single);
    CHECK(a.resources == b.resources);
    CHECK(a.bandwidth_demand_gbps == b.bandwidth_demand_gbps);
  }
}

TEST_CASE("weights_reloading") {
  const auto& net = conv16();
  const auto base = serial_design(net);
  const auto d = weights_reloading(base, std::vector<std::size_t>{1, 3});
  CHECK(d.mode == Mode::Latency);
  CHECK(d.partitions.size() == 3);
  CHECK(code_of([&] { weights_reloading(base, std::vector<std::size_t>{1, 1}); }) ==
        ErrorCode::InvalidCutPoint);

  // No cuts: no reload term.
  const DeviceDescriptor dev{"d", 220, 280, 53200, 100, 1, 80, 16};
  const auto single = weights_reloading(base, {});
  const auto cycles = design_cycles(net, single);
  std::uint64_t sum = 0;
  for (auto c : cycles) sum += c;
  CHECK(estimate_latency(single, net, dev) == doctest::Approx(sum / 1e8));
}

TEST_CASE("weights_reloading makes a VGG16-shaped chain fit") {
  const auto net = vgg16_shaped();
  DeviceDescriptor dev{"small", 220, 0, 1'000'000, 100, 8, 80, 16};
  const auto whole = weights_reloading(serial_design(net), {});
  std::vector<std::size_t> cuts;
  for (std::size_t i = 1; i < net.size(); ++i)
    if (net.layers[i].kind == LayerKind::Pool || net.layers[i].kind == LayerKind::FC)
      cuts.push_back(i);
  const auto split = weights_reloading(serial_design(net), cuts);
  const auto whole_bram = estimate_resources(whole, net, dev).bram;
  dev.bram = estimate_resources(split, net, dev).bram;
  CHECK(dev.bram < whole_bram);
  CHECK(check_fit(estimate_resources(split, net, dev), dev).feasible);
  CHECK_FALSE(check_fit(estimate_resources(whole, net, dev), dev).feasible);
  CHECK(evaluate(split, net, dev).feasible);
}

TEST_CASE("property: random transform sequences keep designs valid and inputs intact") {
  testing::Gen g(32);
  for (int n = 0; n < 200; ++n) {
    const auto net = testing::random_network(g, 7);
    DesignPoint d = serial_design(net);
    for (int step = 0; step < 20; ++step) {
      const DesignPoint before = d;
      const auto layer = static_cast<std::size_t>(testing::uniform(g, 0, std::ssize(net.layers) - 1));
      std::vector<std::size_t> cuts;
      for (std::size_t i = 1; i < net.size(); ++i)
        if (testing::uniform(g, 0, 2) == 0) cuts.push_back(i);
      DesignPoint next;
      switch (testing::uniform(g, 0, 3)) {
        case 0: {
          const auto old = d.stages[layer].coarse;
          next = set_coarse_folding(d, net, layer, testing::uniform(g, 1, coarse_cap(net, layer)));
          CHECK(set_coarse_folding(next, net, layer, old) == d);
          break;
        }
        case 1: {
          const auto old = d.stages[layer].fine;
          next = set_fine_folding(d, net, layer, testing::uniform(g, 1, fine_cap(net, layer)));
          CHECK(set_fine_folding(next, net, layer, old) == d);
          break;
        }
        case 2:
          next = d.mode == Mode::Latency ? weights_reloading(d, cuts) : partition_graph(d, cuts);
          break;
        default:
          next = weights_reloading(d, cuts);
          break;
      }
      CHECK(d == before);
      CHECK_NOTHROW(validate_design(net, next));
      REQUIRE(!next.partitions.empty());
      CHECK(next.partitions.front().begin == 0);
      CHECK(next.partitions.back().end == net.size());
      for (std::size_t p = 1; p < next.partitions.size(); ++p)
        CHECK(next.partitions[p].begin == next.partitions[p - 1].end);
      d = next;
    }
  }
}

TEST_CASE("divisors") {
  CHECK(divisors(1) == std::vector<std::int64_t>{1});
  CHECK(divisors(12) == std::vector<std::int64_t>{1, 2, 3, 4, 6, 12});
  for (std::int64_t n = 1; n <= 500; ++n) CHECK(divisors(n) == testing::naive_divisors(n));
}

TEST_CASE("encode orders mode, partitions, cuts, then folding") {
  const auto& net = conv16();
  const auto a = serial_design(net, Mode::Throughput);
  const auto b = serial_design(net, Mode::Latency);
  CHECK(encoding_less(a, b));
  const auto c = set_coarse_folding(a, net, 0, 2);
  CHECK(encoding_less(a, c));
  const auto e = encode(partition_graph(a, std::vector<std::size_t>{2}));
  CHECK(e[0] == 0);
  CHECK(e[1] == 2);
  CHECK(e[2] == 2);
}
