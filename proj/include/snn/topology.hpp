#pragma once

#include <utility>
#include <vector>

#include "snn/types.hpp"

namespace snn {

// Declarative graph description consumed by build_topology. Channel ids
// [0, neuron_count) are neurons; [neuron_count, neuron_count + exogenous_count)
// are exogenous input channels. Edges are (source channel, target neuron).
struct TopologySpec {
  NodeId neuron_count = 0;
  NodeId exogenous_count = 0;
  std::vector<NodeId> visible;
  std::vector<std::pair<NodeId, NodeId>> edges;
  // Layer annotation (neuron ids per layer) when the graph is a feedforward
  // stack; empty otherwise.
  std::vector<std::vector<NodeId>> layers;
};

// Validated directed graph with visible/hidden partition. Self-feedback is
// not an edge: it is carried by the refractory trace.
struct Topology {
  NodeId neuron_count = 0;
  NodeId exogenous_count = 0;
  std::vector<NodeId> visible;
  std::vector<NodeId> hidden;
  std::vector<std::vector<NodeId>> parents;  // per neuron, in declaration order
  std::vector<std::vector<NodeId>> layers;
  std::vector<std::uint8_t> visible_mask;

  NodeId channel_count() const { return neuron_count + exogenous_count; }
  bool is_neuron(NodeId ch) const { return ch < neuron_count; }
  NodeId exo_channel(NodeId k) const { return neuron_count + k; }
  bool is_visible(NodeId i) const { return visible_mask[i] != 0; }
  bool layered() const { return !layers.empty(); }
  std::size_t edge_count() const;
  double mean_in_degree() const;
};

Topology build_topology(const TopologySpec& spec);

// All-to-all recurrent graph: every neuron receives every other neuron and
// every exogenous channel. Neurons [0, visible) are the visible set.
TopologySpec fully_connected_spec(NodeId visible, NodeId hidden, NodeId exogenous);

// Feedforward stack: exogenous channels feed the first layer, each layer
// feeds the next, and the last layer is the visible read-out.
TopologySpec layered_spec(const std::vector<NodeId>& layer_sizes, NodeId exogenous);

}  // namespace snn
