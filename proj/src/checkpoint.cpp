#include "snn/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "snn/text.hpp"

namespace snn {

namespace {

constexpr const char* kMagic = "snnlab-checkpoint 1";

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    const std::size_t next = line.find(' ', pos);
    const std::size_t end = next == std::string_view::npos ? line.size() : next;
    if (end > pos) fields.push_back(line.substr(pos, end - pos));
    pos = end + 1;
  }
  return fields;
}

}  // namespace

std::string checkpoint_text(const Checkpoint& ckpt) {
  const Topology& topo = ckpt.topology;
  std::ostringstream out;
  out << kMagic << '\n';
  out << "model " << ckpt.model << '\n';
  out << "neurons " << topo.neuron_count << '\n';
  out << "exogenous " << topo.exogenous_count << '\n';
  out << "visible";
  for (NodeId i : topo.visible) out << ' ' << i;
  out << '\n';
  for (const auto& layer : topo.layers) {
    out << "layer";
    for (NodeId i : layer) out << ' ' << i;
    out << '\n';
  }
  out << "hyper tau_mem " << format_double(ckpt.hyper.tau_mem) << '\n';
  out << "hyper tau_syn " << format_double(ckpt.hyper.tau_syn) << '\n';
  out << "hyper tau_ref " << format_double(ckpt.hyper.tau_ref) << '\n';
  out << "hyper threshold " << format_double(ckpt.hyper.threshold) << '\n';
  out << "hyper bandwidth " << format_double(ckpt.hyper.bandwidth) << '\n';
  for (NodeId i = 0; i < topo.neuron_count; ++i)
    out << "bias " << i << ' ' << format_double(ckpt.params.bias[i]) << '\n';
  for (NodeId i = 0; i < topo.neuron_count; ++i)
    for (std::size_t k = 0; k < topo.parents[i].size(); ++k)
      out << "edge " << i << ' ' << topo.parents[i][k] << ' '
          << format_double(ckpt.params.weights[i][k]) << '\n';
  return out.str();
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  require_run(out.good(), path + ": cannot open for writing");
  out << checkpoint_text(ckpt);
  require_run(out.good(), path + ": write failed");
}

Checkpoint parse_checkpoint(const std::string& text, const std::string& origin) {
  Checkpoint ckpt;
  TopologySpec spec;
  bool have_header = false, have_neurons = false;
  std::vector<std::pair<NodeId, double>> biases;
  std::vector<std::pair<std::pair<NodeId, NodeId>, double>> edges;

  std::size_t offset = 0;
  long line_no = 0;
  while (offset < text.size()) {
    std::size_t eol = text.find('\n', offset);
    if (eol == std::string::npos) eol = text.size();
    const std::string_view line(text.data() + offset, eol - offset);
    ++line_no;
    const std::string where = origin + ": byte offset " + std::to_string(offset) +
                              " (line " + std::to_string(line_no) + ")";
    if (line_no == 1) {
      require_run(line == kMagic, where + ": not a checkpoint file");
      have_header = true;
      offset = eol + 1;
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.empty()) {
      offset = eol + 1;
      continue;
    }
    const std::string_view key = fields[0];
    if (key == "model") {
      require_run(fields.size() == 2, where + ": model needs one value");
      ckpt.model = std::string(fields[1]);
      require_run(ckpt.model == "srm" || ckpt.model == "glm", where + ": unknown model");
    } else if (key == "neurons") {
      require_run(fields.size() == 2, where + ": neurons needs one value");
      spec.neuron_count = static_cast<NodeId>(parse_long(fields[1], where));
      have_neurons = true;
    } else if (key == "exogenous") {
      require_run(fields.size() == 2, where + ": exogenous needs one value");
      spec.exogenous_count = static_cast<NodeId>(parse_long(fields[1], where));
    } else if (key == "visible") {
      for (std::size_t k = 1; k < fields.size(); ++k)
        spec.visible.push_back(static_cast<NodeId>(parse_long(fields[k], where)));
    } else if (key == "layer") {
      std::vector<NodeId> layer;
      for (std::size_t k = 1; k < fields.size(); ++k)
        layer.push_back(static_cast<NodeId>(parse_long(fields[k], where)));
      require_run(!layer.empty(), where + ": empty layer");
      spec.layers.push_back(std::move(layer));
    } else if (key == "hyper") {
      require_run(fields.size() == 3, where + ": hyper needs name and value");
      const double v = parse_double(fields[2], where);
      if (fields[1] == "tau_mem") ckpt.hyper.tau_mem = v;
      else if (fields[1] == "tau_syn") ckpt.hyper.tau_syn = v;
      else if (fields[1] == "tau_ref") ckpt.hyper.tau_ref = v;
      else if (fields[1] == "threshold") ckpt.hyper.threshold = v;
      else if (fields[1] == "bandwidth") ckpt.hyper.bandwidth = v;
      else throw std::runtime_error(where + ": unknown hyperparameter");
    } else if (key == "bias") {
      require_run(fields.size() == 3, where + ": bias needs neuron and value");
      biases.emplace_back(static_cast<NodeId>(parse_long(fields[1], where)),
                          parse_double(fields[2], where));
    } else if (key == "edge") {
      require_run(fields.size() == 4, where + ": edge needs target, source and weight");
      const NodeId dst = static_cast<NodeId>(parse_long(fields[1], where));
      const NodeId src = static_cast<NodeId>(parse_long(fields[2], where));
      edges.push_back({{src, dst}, parse_double(fields[3], where)});
    } else {
      throw std::runtime_error(where + ": unknown key '" + std::string(key) + "'");
    }
    offset = eol + 1;
  }
  require_run(have_header && have_neurons && !ckpt.model.empty(),
              origin + ": incomplete checkpoint (missing header, model, or neurons)");

  for (const auto& [edge, w] : edges) spec.edges.push_back(edge);
  try {
    ckpt.topology = build_topology(spec);
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(origin + ": " + e.what());
  }
  ckpt.params.weights.resize(ckpt.topology.neuron_count);
  for (NodeId i = 0; i < ckpt.topology.neuron_count; ++i)
    ckpt.params.weights[i].reserve(ckpt.topology.parents[i].size());
  for (const auto& [edge, w] : edges) ckpt.params.weights[edge.second].push_back(w);
  ckpt.params.bias.assign(ckpt.topology.neuron_count, 0.0);
  require_run(biases.size() == ckpt.topology.neuron_count, origin + ": bias count mismatch");
  for (const auto& [i, b] : biases) {
    require_run(i < ckpt.topology.neuron_count, origin + ": bias neuron out of range");
    ckpt.params.bias[i] = b;
  }
  try {
    ckpt.hyper.validate();
    ckpt.params.validate(ckpt.topology);
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(origin + ": " + e.what());
  }
  return ckpt;
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require_run(in.good(), path + ": cannot open");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_checkpoint(buf.str(), path);
}

}  // namespace snn
