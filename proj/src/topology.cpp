#include "snn/topology.hpp"

#include <algorithm>
#include <set>

namespace snn {

std::size_t Topology::edge_count() const {
  std::size_t n = 0;
  for (const auto& p : parents) n += p.size();
  return n;
}

double Topology::mean_in_degree() const {
  if (neuron_count == 0) return 0.0;
  return static_cast<double>(edge_count()) / static_cast<double>(neuron_count);
}

Topology build_topology(const TopologySpec& spec) {
  require_arg(spec.neuron_count > 0, "topology: neuron_count must be positive");

  Topology topo;
  topo.neuron_count = spec.neuron_count;
  topo.exogenous_count = spec.exogenous_count;
  topo.visible_mask.assign(spec.neuron_count, 0);

  for (NodeId i : spec.visible) {
    require_arg(i < spec.neuron_count, "topology: visible index " + std::to_string(i) + " out of range");
    require_arg(topo.visible_mask[i] == 0, "topology: duplicate visible index " + std::to_string(i));
    topo.visible_mask[i] = 1;
  }
  topo.visible = spec.visible;
  for (NodeId i = 0; i < spec.neuron_count; ++i)
    if (!topo.visible_mask[i]) topo.hidden.push_back(i);

  const NodeId channels = topo.channel_count();
  topo.parents.assign(spec.neuron_count, {});
  std::set<std::pair<NodeId, NodeId>> seen;
  for (const auto& [src, dst] : spec.edges) {
    require_arg(dst < spec.neuron_count, "topology: edge target " + std::to_string(dst) + " is not a neuron");
    require_arg(src < channels, "topology: edge source " + std::to_string(src) + " does not exist");
    require_arg(src != dst, "topology: self-loop on neuron " + std::to_string(dst));
    require_arg(seen.emplace(src, dst).second,
                "topology: duplicate edge " + std::to_string(src) + "->" + std::to_string(dst));
    topo.parents[dst].push_back(src);
  }

  if (!spec.layers.empty()) {
    std::vector<std::uint8_t> placed(spec.neuron_count, 0);
    for (const auto& layer : spec.layers) {
      require_arg(!layer.empty(), "topology: empty layer");
      for (NodeId i : layer) {
        require_arg(i < spec.neuron_count, "topology: layer index out of range");
        require_arg(!placed[i], "topology: neuron " + std::to_string(i) + " in two layers");
        placed[i] = 1;
      }
    }
    require_arg(std::all_of(placed.begin(), placed.end(), [](std::uint8_t b) { return b != 0; }),
                "topology: layers must cover every neuron");
    topo.layers = spec.layers;
  }
  return topo;
}

TopologySpec fully_connected_spec(NodeId visible, NodeId hidden, NodeId exogenous) {
  require_arg(visible + hidden > 0, "fully_connected: need at least one neuron");
  TopologySpec spec;
  spec.neuron_count = visible + hidden;
  spec.exogenous_count = exogenous;
  for (NodeId i = 0; i < visible; ++i) spec.visible.push_back(i);
  for (NodeId dst = 0; dst < spec.neuron_count; ++dst) {
    for (NodeId src = 0; src < spec.neuron_count; ++src)
      if (src != dst) spec.edges.emplace_back(src, dst);
    for (NodeId k = 0; k < exogenous; ++k)
      spec.edges.emplace_back(spec.neuron_count + k, dst);
  }
  return spec;
}

TopologySpec layered_spec(const std::vector<NodeId>& layer_sizes, NodeId exogenous) {
  require_arg(!layer_sizes.empty(), "layered: need at least one layer");
  TopologySpec spec;
  spec.exogenous_count = exogenous;
  for (NodeId n : layer_sizes) {
    require_arg(n > 0, "layered: layer sizes must be positive");
    spec.neuron_count += n;
  }

  NodeId base = 0;
  std::vector<NodeId> prev;  // previous layer as channel ids; exogenous first
  for (NodeId k = 0; k < exogenous; ++k) prev.push_back(spec.neuron_count + k);
  for (NodeId n : layer_sizes) {
    std::vector<NodeId> layer;
    for (NodeId i = 0; i < n; ++i) layer.push_back(base + i);
    for (NodeId dst : layer)
      for (NodeId src : prev) spec.edges.emplace_back(src, dst);
    spec.layers.push_back(layer);
    prev = layer;
    base += n;
  }
  spec.visible = spec.layers.back();
  return spec;
}

}  // namespace snn
