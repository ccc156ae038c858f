/*
 * SPDX-License-Identifier: Apache-2.0
 */

#include "streamflow/model_ir.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "streamflow/error.hpp"

namespace streamflow {

std::string_view to_string(LayerKind kind) noexcept {
  switch (kind) {
    case LayerKind::Conv: return "conv";
    case LayerKind::Pool: return "pool";
    case LayerKind::ReLU: return "relu";
    case LayerKind::FC: return "fc";
  }
  return "?";
}

std::string_view to_string(PoolKind kind) noexcept {
  return kind == PoolKind::Max ? "max" : "avg";
}

namespace {

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t'))
    s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

std::optional<std::int64_t> to_int(std::string_view s) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
  });
}

std::int64_t require_int(const std::map<std::string_view, std::string_view>& kv,
                         std::string_view key, std::size_t line) {
  auto it = kv.find(key);
  if (it == kv.end())
    throw Error(ErrorCode::MissingField, "missing '" + std::string(key) + "'", line);
  auto v = to_int(it->second);
  if (!v)
    throw Error(ErrorCode::MalformedLine,
                "'" + std::string(key) + "' is not an integer", line);
  return *v;
}

LayerDescriptor parse_layer(const std::vector<std::string_view>& tokens,
                            std::size_t line) {
  LayerDescriptor layer;
  std::string_view kw = tokens.front();
  std::set<std::string_view> allowed;
  if (kw == "conv") {
    layer.kind = LayerKind::Conv;
    allowed = {"name", "k", "s", "p", "out"};
  } else if (kw == "pool") {
    layer.kind = LayerKind::Pool;
    allowed = {"name", "k", "s", "type"};
  } else if (kw == "relu") {
    layer.kind = LayerKind::ReLU;
    allowed = {"name"};
  } else if (kw == "fc") {
    layer.kind = LayerKind::FC;
    allowed = {"name", "out"};
  } else {
    throw Error(ErrorCode::UnknownLayerKind,
                "unknown layer kind '" + std::string(kw) + "'", line);
  }

  std::map<std::string_view, std::string_view> kv;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    auto eq = tokens[i].find('=');
    if (eq == std::string_view::npos || eq == 0)
      throw Error(ErrorCode::MalformedLine,
                  "expected key=value, got '" + std::string(tokens[i]) + "'", line);
    auto key = tokens[i].substr(0, eq);
    auto value = tokens[i].substr(eq + 1);
    if (!allowed.contains(key))
      throw Error(ErrorCode::MalformedLine,
                  "unknown key '" + std::string(key) + "' for " + std::string(kw), line);
    if (!kv.emplace(key, value).second)
      throw Error(ErrorCode::MalformedLine,
                  "duplicate key '" + std::string(key) + "'", line);
  }

  auto name = kv.find("name");
  if (name == kv.end()) throw Error(ErrorCode::MissingField, "missing 'name'", line);
  if (!is_identifier(name->second))
    throw Error(ErrorCode::MalformedLine,
                "invalid layer name '" + std::string(name->second) + "'", line);
  layer.name = std::string(name->second);

  if (layer.kind == LayerKind::Conv || layer.kind == LayerKind::Pool) {
    layer.kernel = require_int(kv, "k", line);
    layer.stride = require_int(kv, "s", line);
  }
  if (layer.kind == LayerKind::Conv) layer.padding = require_int(kv, "p", line);
  if (layer.kind == LayerKind::Conv || layer.kind == LayerKind::FC)
    layer.out_channels = require_int(kv, "out", line);
  if (layer.kind == LayerKind::Pool) {
    auto type = kv.find("type");
    if (type == kv.end()) throw Error(ErrorCode::MissingField, "missing 'type'", line);
    if (type->second == "max") {
      layer.pool_kind = PoolKind::Max;
    } else if (type->second == "avg") {
      layer.pool_kind = PoolKind::Avg;
    } else {
      throw Error(ErrorCode::MalformedLine,
                  "pool type must be max or avg, got '" + std::string(type->second) + "'",
                  line);
    }
  }
  return layer;
}

// Shape inference with optional source-line attribution for each layer.
NetworkGraph infer_impl(NetworkGraph graph, std::span<const std::size_t> lines) {
  auto where = [&](std::size_t i) -> std::optional<std::size_t> {
    if (i < lines.size()) return lines[i];
    return std::nullopt;
  };
  const auto& in = graph.input_shape;
  if (in.channels < 1 || in.height < 1 || in.width < 1)
    throw Error(ErrorCode::NonPositiveDimension, "input shape must be strictly positive");
  if (graph.layers.empty())
    throw Error(ErrorCode::MissingField, "network has no layers");

  std::set<std::string> names;
  graph.shapes.clear();
  graph.shapes.reserve(graph.layers.size());
  TensorShape cur = in;
  bool flattened = false;
  for (std::size_t i = 0; i < graph.layers.size(); ++i) {
    auto& layer = graph.layers[i];
    const std::string tag = "layer '" + layer.name + "'";
    if (!names.insert(layer.name).second)
      throw Error(ErrorCode::DuplicateName, "duplicate layer name '" + layer.name + "'",
                  where(i));
    if (layer.kind == LayerKind::ReLU || layer.kind == LayerKind::FC) {
      layer.kernel = 1;
      layer.stride = 1;
      layer.padding = 0;
    }
    if (layer.kernel < 1 || layer.stride < 1)
      throw Error(ErrorCode::NonPositiveDimension, tag + ": kernel and stride must be >= 1",
                  where(i));
    if (layer.padding < 0)
      throw Error(ErrorCode::NonPositiveDimension, tag + ": padding must be >= 0", where(i));
    if ((layer.kind == LayerKind::Conv || layer.kind == LayerKind::FC) &&
        layer.out_channels < 1)
      throw Error(ErrorCode::NonPositiveDimension, tag + ": out must be >= 1", where(i));
    if (flattened && (layer.kind == LayerKind::Conv || layer.kind == LayerKind::Pool))
      throw Error(ErrorCode::MalformedLine,
                  tag + ": only relu or fc may follow an fc layer", where(i));

    TensorShape out = cur;
    switch (layer.kind) {
      case LayerKind::Conv:
      case LayerKind::Pool: {
        const auto span_h = cur.height + 2 * layer.padding;
        const auto span_w = cur.width + 2 * layer.padding;
        if (span_h < layer.kernel || span_w < layer.kernel)
          throw Error(ErrorCode::NonPositiveDimension,
                      tag + ": kernel " + std::to_string(layer.kernel) +
                          " exceeds padded input " + std::to_string(span_h) + "x" +
                          std::to_string(span_w),
                      where(i));
        out.height = (span_h - layer.kernel) / layer.stride + 1;
        out.width = (span_w - layer.kernel) / layer.stride + 1;
        if (layer.kind == LayerKind::Conv) out.channels = layer.out_channels;
        break;
      }
      case LayerKind::ReLU:
        break;
      case LayerKind::FC:
        out = TensorShape{layer.out_channels, 1, 1};
        flattened = true;
        break;
    }
    graph.shapes.push_back(out);
    cur = out;
  }
  return graph;
}

}  // namespace

NetworkGraph infer_shapes(NetworkGraph graph) {
  return infer_impl(std::move(graph), {});
}

NetworkGraph parse_network(std::string_view text) {
  NetworkGraph graph;
  std::vector<std::size_t> layer_lines;
  bool have_input = false;
  std::size_t line_no = 0;
  std::size_t input_line = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = trim(text.substr(pos, nl - pos));
    ++line_no;
    pos = nl + 1;
    if (line.empty() || line.front() == '#') continue;

    auto tokens = split_tokens(line);
    if (!have_input) {
      if (tokens.front() != "input")
        throw Error(ErrorCode::MalformedLine, "expected 'input <channels> <height> <width>'",
                    line_no);
      if (tokens.size() != 4)
        throw Error(ErrorCode::MalformedLine, "input line needs exactly 3 dimensions",
                    line_no);
      std::int64_t dims[3];
      for (int d = 0; d < 3; ++d) {
        auto v = to_int(tokens[d + 1]);
        if (!v) throw Error(ErrorCode::MalformedLine, "input dimension is not an integer", line_no);
        if (*v < 1)
          throw Error(ErrorCode::NonPositiveDimension, "input dimensions must be >= 1", line_no);
        dims[d] = *v;
      }
      graph.input_shape = {dims[0], dims[1], dims[2]};
      have_input = true;
      input_line = line_no;
      continue;
    }
    if (tokens.front() == "input")
      throw Error(ErrorCode::MalformedLine, "duplicate input line", line_no);
    graph.layers.push_back(parse_layer(tokens, line_no));
    layer_lines.push_back(line_no);
  }
  if (!have_input)
    throw Error(ErrorCode::MalformedLine, "missing input line", 1);
  if (graph.layers.empty())
    throw Error(ErrorCode::MissingField, "network has no layers", input_line);
  return infer_impl(std::move(graph), layer_lines);
}

std::string serialize_network(const NetworkGraph& graph) {
  std::ostringstream os;
  os << "input " << graph.input_shape.channels << ' ' << graph.input_shape.height << ' '
     << graph.input_shape.width << '\n';
  for (const auto& l : graph.layers) {
    os << to_string(l.kind) << " name=" << l.name;
    switch (l.kind) {
      case LayerKind::Conv:
        os << " k=" << l.kernel << " s=" << l.stride << " p=" << l.padding
           << " out=" << l.out_channels;
        break;
      case LayerKind::Pool:
        os << " k=" << l.kernel << " s=" << l.stride << " type=" << to_string(l.pool_kind);
        break;
      case LayerKind::ReLU:
        break;
      case LayerKind::FC:
        os << " out=" << l.out_channels;
        break;
    }
    os << '\n';
  }
  return os.str();
}

std::uint64_t layer_ops(const LayerDescriptor& layer, const TensorShape& in,
                        const TensorShape& out) {
  const auto k2 = static_cast<std::uint64_t>(layer.kernel * layer.kernel);
  const auto hw_out = static_cast<std::uint64_t>(out.height * out.width);
  switch (layer.kind) {
    case LayerKind::Conv:
      return hw_out * static_cast<std::uint64_t>(out.channels) *
             static_cast<std::uint64_t>(in.channels) * k2;
    case LayerKind::FC:
      return in.elements() * static_cast<std::uint64_t>(layer.out_channels);
    case LayerKind::Pool:
      return hw_out * static_cast<std::uint64_t>(out.channels) * k2;
    case LayerKind::ReLU:
      return in.elements();
  }
  return 0;
}

std::uint64_t layer_weights(const LayerDescriptor& layer, const TensorShape& in) {
  switch (layer.kind) {
    case LayerKind::Conv:
      return static_cast<std::uint64_t>(layer.out_channels) *
             static_cast<std::uint64_t>(in.channels) *
             static_cast<std::uint64_t>(layer.kernel * layer.kernel);
    case LayerKind::FC:
      return in.elements() * static_cast<std::uint64_t>(layer.out_channels);
    case LayerKind::Pool:
    case LayerKind::ReLU:
      return 0;
  }
  return 0;
}

std::uint64_t total_ops(const NetworkGraph& graph) {
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < graph.size(); ++i)
    sum += layer_ops(graph.layers[i], graph.input_of(i), graph.output_of(i));
  return sum;
}

std::uint64_t total_weights(const NetworkGraph& graph) {
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < graph.size(); ++i)
    sum += layer_weights(graph.layers[i], graph.input_of(i));
  return sum;
}

}  // namespace streamflow
