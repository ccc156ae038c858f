/*
 * SPDX-License-Identifier: Apache-2.0
 */

// Python extension. Inputs are file contents; results cross the boundary
// as JSON text and are decoded by the package's __init__.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <tuple>
#include <vector>

#include "streamflow/dse.hpp"
#include "streamflow/error.hpp"
#include "streamflow/model_ir.hpp"
#include "streamflow/multi_cnn.hpp"
#include "streamflow/perf_model.hpp"
#include "streamflow/report.hpp"

namespace py = pybind11;
using namespace streamflow;

namespace {

struct SaOptions {
  std::uint64_t seed = 1;
  double initial_temperature = 1.0;
  double cooling_rate = 0.95;
  std::uint64_t iterations_per_temperature = 100;
  double temperature_floor = 1e-3;
  std::size_t max_partitions = 0;

  OptimizerConfig config() const {
    OptimizerConfig cfg;
    cfg.seed = seed;
    cfg.initial_temperature = initial_temperature;
    cfg.cooling_rate = cooling_rate;
    cfg.iterations_per_temperature = iterations_per_temperature;
    cfg.temperature_floor = temperature_floor;
    cfg.max_partitions = max_partitions;
    validate(cfg);
    return cfg;
  }
};

Json network_json(const NetworkGraph& net) {
  Json layers = Json::array();
  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto& l = net.layers[i];
    const auto in = net.input_of(i), out = net.output_of(i);
    layers.push_back({{"name", l.name},
                      {"kind", to_string(l.kind)},
                      {"input", {in.channels, in.height, in.width}},
                      {"output", {out.channels, out.height, out.width}},
                      {"ops", layer_ops(l, in, out)},
                      {"weights", layer_weights(l, in)}});
  }
  return layers;
}

std::string optimize(const std::string& net_text, const std::string& device_text,
                     const std::string& objective_text, const SaOptions& opts) {
  const auto net = parse_network(net_text);
  const auto device = parse_device(device_text);
  const auto objective = parse_objective(objective_text);
  const auto cfg = opts.config();
  OptimizeResult result;
  {
    py::gil_scoped_release release;
    result = optimize_sa(net, device, objective, cfg);
  }
  auto body = design_body(net, device, result.design, result.report);
  body["objective"] = objective.to_string();
  body["cost"] = result.cost;
  return body.dump();
}

std::string evaluate_design(const std::string& net_text, const std::string& device_text,
                            const std::vector<std::int64_t>& coarse,
                            const std::vector<std::int64_t>& fine,
                            const std::vector<std::size_t>& cuts, const std::string& mode,
                            std::uint64_t batch) {
  const auto net = parse_network(net_text);
  const auto device = parse_device(device_text);
  if (coarse.size() != net.size() || fine.size() != net.size())
    throw Error(ErrorCode::InvalidArgument, "need one coarse and one fine value per layer");
  if (mode != "throughput" && mode != "latency")
    throw Error(ErrorCode::InvalidArgument, "mode must be 'throughput' or 'latency'");
  DesignPoint d = serial_design(net, mode == "latency" ? Mode::Latency : Mode::Throughput);
  for (std::size_t i = 0; i < net.size(); ++i) d.stages[i] = {coarse[i], fine[i]};
  d = d.mode == Mode::Latency ? weights_reloading(d, cuts) : partition_graph(d, cuts);
  validate_design(net, d);
  return to_json(evaluate(d, net, device, batch)).dump();
}

std::string pareto(const std::string& net_text, const std::string& device_text,
                   const std::string& metric, const std::string& resource, std::uint64_t batch,
                   std::uint64_t limit, std::size_t max_partitions) {
  const auto net = parse_network(net_text);
  const auto device = parse_device(device_text);
  ParetoAxes axes;
  if (metric == "throughput")
    axes.metric = ParetoMetric::Throughput;
  else if (metric != "latency")
    throw Error(ErrorCode::InvalidArgument, "metric must be 'latency' or 'throughput'");
  if (resource == "bram")
    axes.resource = ResourceAxis::Bram;
  else if (resource == "lut")
    axes.resource = ResourceAxis::Lut;
  else if (resource != "dsp")
    throw Error(ErrorCode::InvalidArgument, "resource must be 'dsp', 'bram' or 'lut'");
  EnumerationLimits limits;
  limits.batch = batch;
  limits.max_points = limit;
  limits.max_partitions = max_partitions;
  std::vector<EvaluatedDesign> designs;
  {
    py::gil_scoped_release release;
    designs = enumerate_designs(net, device, limits);
  }
  if (designs.empty()) throw Error(ErrorCode::NoFeasibleDesign, "no enumerated design fits");
  std::vector<PerfReport> reports;
  for (const auto& d : designs) reports.push_back(d.report);
  Json out = Json::array();
  for (auto id : pareto_front(reports, axes)) {
    auto body = design_body(net, device, designs[id].design, designs[id].report);
    body["design_id"] = id;
    out.push_back(std::move(body));
  }
  return out.dump();
}

// entries: (name, network text, weight, target latency in seconds).
std::string multi(const std::vector<std::tuple<std::string, std::string, double, double>>& entries,
                  const std::string& device_text, double lambda, const SaOptions& opts) {
  std::vector<WorkloadEntry> list;
  for (const auto& [name, text, weight, target] : entries)
    list.push_back({name, parse_network(text), weight, target});
  const MultiCnnWorkload workload(std::move(list));
  const auto device = parse_device(device_text);
  const auto cfg = opts.config();
  MultiConfig mc;
  mc.lambda = lambda;
  MultiCnnMapping mapping;
  {
    py::gil_scoped_release release;
    mapping = optimize_multi(workload, device, cfg, mc);
  }
  return mapping_body(workload, device, mapping).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Design-space exploration for streaming CNN accelerators.";
  m.attr("__version__") = std::string(kToolVersion);

  static py::exception<Error> error(m, "StreamflowError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object inst = py::reinterpret_borrow<py::object>(error)(e.what());
      inst.attr("code") = std::string(to_string(e.code()));
      inst.attr("line") = e.line() ? py::object(py::int_(*e.line())) : py::none();
      py::set_error(error, inst);
    }
  });

  py::class_<SaOptions>(m, "SaOptions")
      .def(py::init<>())
      .def_readwrite("seed", &SaOptions::seed)
      .def_readwrite("initial_temperature", &SaOptions::initial_temperature)
      .def_readwrite("cooling_rate", &SaOptions::cooling_rate)
      .def_readwrite("iterations_per_temperature", &SaOptions::iterations_per_temperature)
      .def_readwrite("temperature_floor", &SaOptions::temperature_floor)
      .def_readwrite("max_partitions", &SaOptions::max_partitions);

  m.def("network_json",
        [](const std::string& text) { return network_json(parse_network(text)).dump(); });
  m.def("shape_table", [](const std::string& text) { return shape_table(parse_network(text)); });
  m.def("device_text",
        [](const std::string& text) { return serialize_device(parse_device(text)); });
  m.def("optimize", &optimize, py::arg("net"), py::arg("device"), py::arg("objective"),
        py::arg("options"));
  m.def("evaluate", &evaluate_design, py::arg("net"), py::arg("device"), py::arg("coarse"),
        py::arg("fine"), py::arg("cuts"), py::arg("mode"), py::arg("batch"));
  m.def("pareto", &pareto, py::arg("net"), py::arg("device"), py::arg("metric"),
        py::arg("resource"), py::arg("batch"), py::arg("limit"), py::arg("max_partitions"));
  m.def("multi", &multi, py::arg("entries"), py::arg("device"), py::arg("lambda_"),
        py::arg("options"));
}
