#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "snn/topology.hpp"

using namespace snn;

TEST_CASE("fully connected generator matches the visible/hidden split") {
  const Topology topo = build_topology(fully_connected_spec(4, 5, 3));
  CHECK(topo.visible.size() == 4);
  CHECK(topo.hidden.size() == 5);
  CHECK(topo.neuron_count == 9);
  CHECK(topo.exogenous_count == 3);
  // every neuron sees all others plus all exogenous channels
  for (NodeId i = 0; i < topo.neuron_count; ++i) {
    CHECK(topo.parents[i].size() == 8 + 3);
    for (NodeId j : topo.parents[i]) CHECK(j != i);
  }
  CHECK(topo.edge_count() == 9 * 11);
}

TEST_CASE("single neuron with no edges is a valid degenerate graph") {
  TopologySpec spec;
  spec.neuron_count = 1;
  spec.visible = {0};
  const Topology topo = build_topology(spec);
  CHECK(topo.parents[0].empty());
  CHECK(topo.hidden.empty());
}

TEST_CASE("self-loops are rejected") {
  TopologySpec spec;
  spec.neuron_count = 4;
  spec.visible = {0};
  spec.edges = {{3, 3}};
  CHECK_THROWS_AS(build_topology(spec), std::invalid_argument);
}

TEST_CASE("duplicate edges are rejected") {
  TopologySpec spec;
  spec.neuron_count = 2;
  spec.visible = {0};
  spec.edges = {{0, 1}, {0, 1}};
  CHECK_THROWS_AS(build_topology(spec), std::invalid_argument);
}

TEST_CASE("dangling endpoints are rejected") {
  TopologySpec spec;
  spec.neuron_count = 2;
  spec.exogenous_count = 1;
  spec.visible = {0};

  SUBCASE("source beyond channels") {
    spec.edges = {{7, 0}};
    CHECK_THROWS_AS(build_topology(spec), std::invalid_argument);
  }
  SUBCASE("target is an exogenous channel") {
    spec.edges = {{0, 2}};
    CHECK_THROWS_AS(build_topology(spec), std::invalid_argument);
  }
}

TEST_CASE("visible indices must be unique and in range") {
  TopologySpec spec;
  spec.neuron_count = 2;
  spec.visible = {0, 0};
  CHECK_THROWS_AS(build_topology(spec), std::invalid_argument);
  spec.visible = {5};
  CHECK_THROWS_AS(build_topology(spec), std::invalid_argument);
}

TEST_CASE("layered generator wires consecutive layers") {
  const Topology topo = build_topology(layered_spec({3, 2}, 4));
  CHECK(topo.neuron_count == 5);
  CHECK(topo.layered());
  REQUIRE(topo.layers.size() == 2);
  // read-out layer is the visible set
  CHECK(topo.visible == topo.layers.back());
  // first layer sees only exogenous channels
  for (NodeId i : topo.layers[0]) {
    REQUIRE(topo.parents[i].size() == 4);
    for (NodeId j : topo.parents[i]) CHECK(j >= topo.neuron_count);
  }
  // read-out sees only the first layer
  for (NodeId i : topo.layers[1]) {
    REQUIRE(topo.parents[i].size() == 3);
    for (NodeId j : topo.parents[i]) CHECK(j < 3);
  }
}

TEST_CASE("visible and hidden partition the neurons") {
  const Topology topo = build_topology(fully_connected_spec(2, 3, 0));
  std::vector<bool> seen(topo.neuron_count, false);
  for (NodeId i : topo.visible) seen[i] = true;
  for (NodeId i : topo.hidden) {
    CHECK(!seen[i]);
    seen[i] = true;
  }
  for (bool b : seen) CHECK(b);
}
