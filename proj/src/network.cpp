#include "snn/network.hpp"

#include <cmath>

#include "snn/glm.hpp"

namespace snn {

double HyperParams::decay_mem() const { return std::exp(-1.0 / tau_mem); }
double HyperParams::decay_syn() const { return std::exp(-1.0 / tau_syn); }
double HyperParams::decay_ref() const { return std::exp(-1.0 / tau_ref); }

void HyperParams::validate() const {
  require_arg(tau_mem > 0 && tau_syn > 0 && tau_ref > 0, "hyper: time constants must be positive");
  require_arg(bandwidth > 0, "hyper: bandwidth must be positive");
  require_arg(std::isfinite(threshold), "hyper: threshold must be finite");
}

void Parameters::validate(const Topology& topo) const {
  require_arg(weights.size() == topo.neuron_count, "params: weight rows != neuron count");
  require_arg(bias.size() == topo.neuron_count, "params: bias size != neuron count");
  for (NodeId i = 0; i < topo.neuron_count; ++i) {
    require_arg(weights[i].size() == topo.parents[i].size(),
                "params: neuron " + std::to_string(i) + " weight count != parent count");
    for (double w : weights[i]) require_arg(std::isfinite(w), "params: non-finite weight");
    require_arg(std::isfinite(bias[i]), "params: non-finite bias");
  }
}

Parameters init_parameters(const Topology& topo, std::uint64_t seed) {
  Rng rng(seed);
  const double mean_deg = topo.mean_in_degree();
  const double c = mean_deg > 0 ? 1.0 / std::sqrt(mean_deg) : 0.0;
  Parameters params;
  params.weights.resize(topo.neuron_count);
  params.bias.assign(topo.neuron_count, 0.0);
  for (NodeId i = 0; i < topo.neuron_count; ++i) {
    params.weights[i].reserve(topo.parents[i].size());
    for (std::size_t k = 0; k < topo.parents[i].size(); ++k)
      params.weights[i].push_back(rng.uniform(-c, c));
  }
  return params;
}

NetworkState NetworkState::zero(const Topology& topo) {
  NetworkState s;
  s.syn_p.assign(topo.channel_count(), 0.0);
  s.syn_q.assign(topo.channel_count(), 0.0);
  s.ref_r.assign(topo.neuron_count, 0.0);
  s.potential.assign(topo.neuron_count, 0.0);
  s.last_spikes.assign(topo.channel_count(), 0);
  return s;
}

void step_traces(NetworkState& state, const Topology& topo, const HyperParams& hyper,
                 std::span<const std::uint8_t> prev_spikes) {
  const NodeId channels = topo.channel_count();
  require_arg(prev_spikes.size() == channels, "step_traces: spike vector size mismatch");
  require_arg(state.syn_p.size() == channels, "step_traces: state size mismatch");

  const double dm = hyper.decay_mem();
  const double ds = hyper.decay_syn();
  const double dr = hyper.decay_ref();
  for (NodeId j = 0; j < channels; ++j) {
    state.syn_p[j] = dm * state.syn_p[j] + state.syn_q[j];
    state.syn_q[j] = ds * state.syn_q[j] + prev_spikes[j];
  }
  for (NodeId i = 0; i < topo.neuron_count; ++i)
    state.ref_r[i] = dr * state.ref_r[i] + prev_spikes[i];
}

double membrane_potential(const NetworkState& state, const Parameters& params,
                          const Topology& topo, NodeId neuron) {
  require_arg(neuron < topo.neuron_count, "membrane_potential: unknown neuron");
  const auto& parents = topo.parents[neuron];
  const auto& w = params.weights[neuron];
  double u = params.bias[neuron] - state.ref_r[neuron];
  for (std::size_t k = 0; k < parents.size(); ++k) u += w[k] * state.syn_p[parents[k]];
  return u;
}

std::vector<std::uint8_t> step_network(NetworkState& state, const Parameters& params,
                                       const Topology& topo, const HyperParams& hyper,
                                       std::span<const std::uint8_t> exogenous_t, SpikeMode mode,
                                       Rng* rng) {
  require_arg(exogenous_t.size() == topo.exogenous_count, "step_network: exogenous size mismatch");
  require_arg(mode == SpikeMode::deterministic || rng != nullptr,
              "step_network: stochastic mode needs an rng");

  step_traces(state, topo, hyper, state.last_spikes);

  std::vector<std::uint8_t> spikes(topo.neuron_count, 0);
  for (NodeId i = 0; i < topo.neuron_count; ++i) {
    const double u = membrane_potential(state, params, topo, i);
    state.potential[i] = u;
    if (mode == SpikeMode::deterministic) {
      spikes[i] = srm_spike(u, hyper.threshold) ? 1 : 0;
    } else {
      spikes[i] = sample_spike(spike_probability(u, hyper.bandwidth), *rng);
    }
  }
  for (NodeId i = 0; i < topo.neuron_count; ++i) state.last_spikes[i] = spikes[i];
  for (NodeId k = 0; k < topo.exogenous_count; ++k)
    state.last_spikes[topo.exo_channel(k)] = exogenous_t[k];
  return spikes;
}

Trajectory run_trajectory(const Parameters& params, const Topology& topo,
                          const HyperParams& hyper, const SpikeRecord& exogenous, SpikeMode mode,
                          const SpikeRecord* clamp, Rng* rng, const NetworkState* initial) {
  require_arg(exogenous.rows == static_cast<int>(topo.exogenous_count),
              "run_trajectory: exogenous rows != exogenous channels");
  const int horizon = exogenous.horizon;
  if (clamp) {
    require_arg(clamp->rows == static_cast<int>(topo.visible.size()),
                "run_trajectory: clamp rows != visible count");
    require_arg(clamp->horizon == horizon, "run_trajectory: clamp horizon mismatch");
  }

  NetworkState state = initial ? *initial : NetworkState::zero(topo);
  Trajectory out;
  out.spikes = SpikeRecord(static_cast<int>(topo.neuron_count), horizon);
  out.potentials = Matrix(static_cast<int>(topo.neuron_count), horizon);
  out.pre_traces = Matrix(static_cast<int>(topo.channel_count()), horizon);

  std::vector<std::uint8_t> exo_t(topo.exogenous_count, 0);
  for (int t = 0; t < horizon; ++t) {
    for (NodeId k = 0; k < topo.exogenous_count; ++k) exo_t[k] = exogenous.get(static_cast<int>(k), t);
    std::vector<std::uint8_t> spikes = step_network(state, params, topo, hyper, exo_t, mode, rng);
    if (clamp) {
      for (std::size_t v = 0; v < topo.visible.size(); ++v) {
        const NodeId i = topo.visible[v];
        spikes[i] = clamp->get(static_cast<int>(v), t);
        state.last_spikes[i] = spikes[i];
      }
    }
    for (NodeId i = 0; i < topo.neuron_count; ++i) {
      out.spikes.set(static_cast<int>(i), t, spikes[i]);
      out.potentials.at(static_cast<int>(i), t) = state.potential[i];
    }
    for (NodeId j = 0; j < topo.channel_count(); ++j)
      out.pre_traces.at(static_cast<int>(j), t) = state.syn_p[j];
  }
  return out;
}

}  // namespace snn
