#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "snn/network.hpp"

using namespace snn;

namespace {

Topology single_channel_topology() {
  // one neuron fed by one exogenous channel
  TopologySpec spec;
  spec.neuron_count = 1;
  spec.exogenous_count = 1;
  spec.visible = {0};
  spec.edges = {{1, 0}};
  return build_topology(spec);
}

}  // namespace

TEST_CASE("zero input is a fixed point of the traces") {
  const Topology topo = single_channel_topology();
  const HyperParams hyper;
  NetworkState state = NetworkState::zero(topo);
  const std::vector<std::uint8_t> none(topo.channel_count(), 0);
  for (int t = 0; t < 10; ++t) step_traces(state, topo, hyper, none);
  CHECK(state.syn_p[1] == 0.0);
  CHECK(state.syn_q[1] == 0.0);
  CHECK(state.ref_r[0] == 0.0);
}

TEST_CASE("single-spike unrolling of the trace recursions") {
  const Topology topo = single_channel_topology();
  const HyperParams hyper;
  const double a = hyper.decay_syn();
  const double b = hyper.decay_mem();

  NetworkState state = NetworkState::zero(topo);
  std::vector<std::uint8_t> spikes(topo.channel_count(), 0);

  spikes[1] = 1;  // spike at step 0
  step_traces(state, topo, hyper, spikes);  // step 1
  CHECK(state.syn_q[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(state.syn_p[1] == doctest::Approx(0.0).epsilon(1e-15));

  spikes[1] = 0;
  step_traces(state, topo, hyper, spikes);  // step 2
  CHECK(state.syn_q[1] == doctest::Approx(a).epsilon(1e-15));
  CHECK(state.syn_p[1] == doctest::Approx(1.0).epsilon(1e-15));

  step_traces(state, topo, hyper, spikes);  // step 3
  CHECK(state.syn_q[1] == doctest::Approx(a * a).epsilon(1e-15));
  CHECK(state.syn_p[1] == doctest::Approx(b + a).epsilon(1e-15));
}

TEST_CASE("impulse response of p equals the direct convolution over 100 steps") {
  const Topology topo = single_channel_topology();
  const HyperParams hyper;
  const int horizon = 100;

  std::vector<std::uint8_t> impulse(horizon, 0);
  impulse[0] = 1;
  const auto expect_p = oracle::convolve_trace(impulse, oracle::kernel_p(hyper.tau_mem, hyper.tau_syn, horizon));

  NetworkState state = NetworkState::zero(topo);
  std::vector<std::uint8_t> spikes(topo.channel_count(), 0);
  for (int n = 1; n <= horizon; ++n) {
    spikes[1] = impulse[n - 1];
    step_traces(state, topo, hyper, spikes);
    CHECK(std::fabs(state.syn_p[1] - expect_p[n]) <= 1e-12);
  }
}

TEST_CASE("random spike trains match the convolution oracle (p, q, r)") {
  const Topology topo = single_channel_topology();
  Rng rng(42);
  for (int trial = 0; trial < 25; ++trial) {
    HyperParams hyper;
    hyper.tau_mem = rng.uniform(5.0, 40.0);
    hyper.tau_syn = rng.uniform(1.0, 4.5);
    hyper.tau_ref = rng.uniform(2.0, 20.0);
    const int horizon = 1 + static_cast<int>(rng.below(200));
    std::vector<std::uint8_t> train(horizon);
    for (auto& s : train) s = rng.bernoulli(0.3);

    const auto expect_p =
        oracle::convolve_trace(train, oracle::kernel_p(hyper.tau_mem, hyper.tau_syn, horizon));
    const auto expect_q = oracle::convolve_trace(train, oracle::kernel_q(hyper.tau_syn, horizon));
    const auto expect_r = oracle::convolve_trace(train, oracle::kernel_r(hyper.tau_ref, horizon));

    NetworkState state = NetworkState::zero(topo);
    std::vector<std::uint8_t> spikes(topo.channel_count(), 0);
    for (int n = 1; n <= horizon; ++n) {
      spikes[0] = train[n - 1];  // the neuron's own spikes drive r
      spikes[1] = train[n - 1];
      step_traces(state, topo, hyper, spikes);
      CHECK(std::fabs(state.syn_p[1] - expect_p[n]) <= 1e-12);
      CHECK(std::fabs(state.syn_q[1] - expect_q[n]) <= 1e-12);
      CHECK(std::fabs(state.ref_r[0] - expect_r[n]) <= 1e-12);
    }
  }
}

TEST_CASE("hyperparameters validate their domains") {
  HyperParams hyper;
  CHECK_NOTHROW(hyper.validate());
  CHECK(hyper.decay_mem() > 0.0);
  CHECK(hyper.decay_mem() < 1.0);

  HyperParams bad_tau = hyper;
  bad_tau.tau_syn = 0.0;
  CHECK_THROWS_AS(bad_tau.validate(), std::invalid_argument);

  HyperParams bad_bw = hyper;
  bad_bw.bandwidth = -1.0;
  CHECK_THROWS_AS(bad_bw.validate(), std::invalid_argument);
}

TEST_CASE("trajectory rejects mismatched exogenous rows") {
  const Topology topo = build_topology(fully_connected_spec(1, 1, 2));
  const HyperParams hyper;
  const Parameters params = init_parameters(topo, 1);
  const SpikeRecord wrong(3, 5);
  CHECK_THROWS_AS(run_trajectory(params, topo, hyper, wrong, SpikeMode::deterministic),
                  std::invalid_argument);
}

TEST_CASE("trace update rejects mismatched spike vectors") {
  const Topology topo = single_channel_topology();
  const HyperParams hyper;
  NetworkState state = NetworkState::zero(topo);
  const std::vector<std::uint8_t> wrong(5, 0);
  CHECK_THROWS_AS(step_traces(state, topo, hyper, wrong), std::invalid_argument);
}

TEST_CASE("traces stay below their geometric bounds") {
  const Topology topo = single_channel_topology();
  const HyperParams hyper;
  const double q_bound = 1.0 / (1.0 - hyper.decay_syn());
  const double r_bound = 1.0 / (1.0 - hyper.decay_ref());

  NetworkState state = NetworkState::zero(topo);
  std::vector<std::uint8_t> spikes(topo.channel_count(), 1);
  for (int t = 0; t < 500; ++t) {
    step_traces(state, topo, hyper, spikes);
    CHECK(state.syn_q[1] <= q_bound);
    CHECK(state.ref_r[0] <= r_bound);
  }
}

TEST_CASE("membrane potential composes weights, feedback and bias") {
  TopologySpec spec;
  spec.neuron_count = 1;
  spec.exogenous_count = 2;
  spec.visible = {0};
  spec.edges = {{1, 0}, {2, 0}};
  const Topology topo = build_topology(spec);

  Parameters params;
  params.weights = {{2.0, 0.0}};
  params.bias = {0.0};
  NetworkState state = NetworkState::zero(topo);

  SUBCASE("one active parent") {
    state.syn_p[1] = 0.5;
    CHECK(membrane_potential(state, params, topo, 0) == doctest::Approx(1.0));
  }
  SUBCASE("refractory feedback enters negatively") {
    params.weights = {{0.0, 0.0}};
    state.ref_r[0] = 1.0;
    CHECK(membrane_potential(state, params, topo, 0) == doctest::Approx(-1.0));
  }
  SUBCASE("cancellation plus bias") {
    params.weights = {{1.0, -1.0}};
    params.bias = {0.7};
    state.syn_p[1] = 0.3;
    state.syn_p[2] = 0.3;
    CHECK(membrane_potential(state, params, topo, 0) == doctest::Approx(0.7));
  }
  SUBCASE("unknown neuron") {
    CHECK_THROWS_AS(membrane_potential(state, params, topo, 5), std::invalid_argument);
  }
}

TEST_CASE("threshold rule spikes on the boundary") {
  CHECK(srm_spike(1.1, 1.0));
  CHECK(!srm_spike(0.9, 1.0));
  CHECK(srm_spike(1.0, 1.0));
}

TEST_CASE("quiet network never spikes") {
  const Topology topo = build_topology(fully_connected_spec(2, 2, 1));
  const HyperParams hyper;  // threshold 1
  const Parameters params = init_parameters(topo, 7);
  const SpikeRecord exo(1, 20);  // all zero
  const Trajectory traj = run_trajectory(params, topo, hyper, exo, SpikeMode::deterministic);
  CHECK(traj.spikes.count_all() == 0);
}

TEST_CASE("output spikes exactly two steps after the input spike") {
  const Topology topo = single_channel_topology();
  HyperParams hyper;
  hyper.threshold = 0.5;
  Parameters params;
  params.weights = {{1.0}};  // p reaches 1.0 two steps after the spike
  params.bias = {0.0};

  SpikeRecord exo(1, 6);
  exo.set(0, 1, 1);  // input at step t=1 (0-based)
  const Trajectory traj = run_trajectory(params, topo, hyper, exo, SpikeMode::deterministic);
  int first_spike = -1;
  for (int t = 0; t < 6 && first_spike < 0; ++t)
    if (traj.spikes.get(0, t)) first_spike = t;
  CHECK(first_spike == 3);
}

TEST_CASE("deterministic mode is reproducible") {
  const Topology topo = build_topology(fully_connected_spec(2, 3, 2));
  HyperParams hyper;
  hyper.threshold = 0.2;
  const Parameters params = init_parameters(topo, 11);
  SpikeRecord exo(2, 40);
  Rng rng(5);
  for (int r = 0; r < 2; ++r)
    for (int t = 0; t < 40; ++t) exo.set(r, t, rng.bernoulli(0.4));

  const Trajectory a = run_trajectory(params, topo, hyper, exo, SpikeMode::deterministic);
  const Trajectory b = run_trajectory(params, topo, hyper, exo, SpikeMode::deterministic);
  CHECK(a.spikes == b.spikes);
  CHECK(a.potentials.v == b.potentials.v);
}

TEST_CASE("clamping overrides every visible spike") {
  // no hidden neurons: output must equal the clamp exactly
  const Topology topo = build_topology(fully_connected_spec(3, 0, 1));
  const HyperParams hyper;
  const Parameters params = init_parameters(topo, 3);
  SpikeRecord exo(1, 15);
  SpikeRecord clamp(3, 15);
  Rng rng(9);
  for (int r = 0; r < 3; ++r)
    for (int t = 0; t < 15; ++t) clamp.set(r, t, rng.bernoulli(0.5));

  Rng run_rng(17);
  const Trajectory traj =
      run_trajectory(params, topo, hyper, exo, SpikeMode::stochastic, &clamp, &run_rng);
  CHECK(traj.spikes == clamp);
}

TEST_CASE("clamp horizon mismatch is rejected") {
  const Topology topo = build_topology(fully_connected_spec(1, 0, 1));
  const HyperParams hyper;
  const Parameters params = init_parameters(topo, 3);
  const SpikeRecord exo(1, 10);
  const SpikeRecord clamp(1, 9);
  Rng rng(1);
  CHECK_THROWS_AS(
      run_trajectory(params, topo, hyper, exo, SpikeMode::stochastic, &clamp, &rng),
      std::invalid_argument);
}

TEST_CASE("empty horizon yields an empty record") {
  const Topology topo = build_topology(fully_connected_spec(1, 1, 1));
  const HyperParams hyper;
  const Parameters params = init_parameters(topo, 3);
  const SpikeRecord exo(1, 0);
  const Trajectory traj = run_trajectory(params, topo, hyper, exo, SpikeMode::deterministic);
  CHECK(traj.spikes.horizon == 0);
  CHECK(traj.spikes.count_all() == 0);
}

TEST_CASE("stochastic mode with huge bandwidth reproduces the threshold network") {
  Rng rng(1234);
  for (int trial = 0; trial < 10; ++trial) {
    const Topology topo = build_topology(fully_connected_spec(2, 3, 4));
    HyperParams det_hyper;
    det_hyper.threshold = 0.3;
    HyperParams sto_hyper = det_hyper;
    sto_hyper.bandwidth = 1e6;

    Parameters det_params = init_parameters(topo, 100 + trial);
    for (auto& row : det_params.weights)
      for (auto& w : row) w *= 3.0;
    Parameters sto_params = det_params;
    for (NodeId i = 0; i < topo.neuron_count; ++i) sto_params.bias[i] = -det_hyper.threshold;

    SpikeRecord exo(4, 30);
    for (int r = 0; r < 4; ++r)
      for (int t = 0; t < 30; ++t) exo.set(r, t, rng.bernoulli(0.35));

    const Trajectory det =
        run_trajectory(det_params, topo, det_hyper, exo, SpikeMode::deterministic);
    Rng sto_rng(999 + trial);
    const Trajectory sto =
        run_trajectory(sto_params, topo, sto_hyper, exo, SpikeMode::stochastic, nullptr, &sto_rng);

    // compare stepwise while the threshold margin stays above 1e-3
    bool comparable = true;
    for (int t = 0; t < 30 && comparable; ++t) {
      for (NodeId i = 0; i < topo.neuron_count && comparable; ++i) {
        const double margin = det.potentials.at(static_cast<int>(i), t) - det_hyper.threshold;
        if (std::fabs(margin) <= 1e-3) {
          comparable = false;
          break;
        }
        CHECK(det.spikes.get(static_cast<int>(i), t) == sto.spikes.get(static_cast<int>(i), t));
      }
    }
  }
}

TEST_CASE("init respects the fan-in bound and the seed") {
  const Topology topo = build_topology(fully_connected_spec(2, 6, 4));
  const double c = 1.0 / std::sqrt(topo.mean_in_degree());
  const Parameters a = init_parameters(topo, 77);
  const Parameters b = init_parameters(topo, 77);
  const Parameters d = init_parameters(topo, 78);
  CHECK(a.weights == b.weights);
  CHECK(a.weights != d.weights);
  for (const auto& row : a.weights)
    for (double w : row) CHECK(std::fabs(w) <= c);
}
