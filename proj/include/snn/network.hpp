#pragma once

#include <optional>
#include <span>
#include <vector>

#include "snn/rng.hpp"
#include "snn/topology.hpp"
#include "snn/types.hpp"

namespace snn {

struct HyperParams {
  double tau_mem = 20.0;    // membrane time constant, steps
  double tau_syn = 5.0;     // synaptic time constant, steps
  double tau_ref = 10.0;    // refractory time constant, steps
  double threshold = 1.0;   // spike threshold
  double bandwidth = 1.0;   // sigmoid bandwidth, stochastic mode only

  double decay_mem() const;
  double decay_syn() const;
  double decay_ref() const;
  void validate() const;
};

// Synaptic weights and biases. weights[i][k] belongs to the edge from
// parents[i][k] to neuron i.
struct Parameters {
  std::vector<std::vector<double>> weights;
  std::vector<double> bias;

  void validate(const Topology& topo) const;
};

// Uniform init in [-c, c] with c = 1/sqrt(mean in-degree); biases zero.
Parameters init_parameters(const Topology& topo, std::uint64_t seed);

// Filter traces and the most recent potentials/spikes. p and q are indexed
// by source channel: the synaptic trace of an edge depends only on its
// source spike train, so all out-edges of a channel share one trace.
struct NetworkState {
  std::vector<double> syn_p;               // per channel
  std::vector<double> syn_q;               // per channel
  std::vector<double> ref_r;               // per neuron
  std::vector<double> potential;           // per neuron, current step
  std::vector<std::uint8_t> last_spikes;   // per channel, previous step

  static NetworkState zero(const Topology& topo);
};

// Advances all traces by one step given the spikes of the previous step.
// p reads the pre-update q, so a spike enters q one step and p two steps
// after it was emitted.
void step_traces(NetworkState& state, const Topology& topo, const HyperParams& hyper,
                 std::span<const std::uint8_t> prev_spikes);

// u_i = sum_j w_ij p_j - r_i + gamma_i. The refractory trace enters with a
// minus sign: the feedback kernel is negative while r itself stays positive.
double membrane_potential(const NetworkState& state, const Parameters& params,
                          const Topology& topo, NodeId neuron);

// Threshold rule; spikes exactly at threshold.
inline bool srm_spike(double u, double threshold) { return u >= threshold; }

enum class SpikeMode { deterministic, stochastic };

// One network step: trace update from last_spikes, potentials, spike
// emission, and bookkeeping of exogenous_t for the next step. rng is
// required in stochastic mode.
std::vector<std::uint8_t> step_network(NetworkState& state, const Parameters& params,
                                       const Topology& topo, const HyperParams& hyper,
                                       std::span<const std::uint8_t> exogenous_t, SpikeMode mode,
                                       Rng* rng);

struct Trajectory {
  SpikeRecord spikes;   // neurons x T
  Matrix potentials;    // neurons x T
  Matrix pre_traces;    // channels x T, p at each step (the pre factor of the rules)
};

// Runs T steps. clamp, when present, overwrites the emitted visible spikes
// with data after u is computed (teacher forcing); rows follow
// topo.visible order. initial defaults to the zero state.
Trajectory run_trajectory(const Parameters& params, const Topology& topo,
                          const HyperParams& hyper, const SpikeRecord& exogenous, SpikeMode mode,
                          const SpikeRecord* clamp = nullptr, Rng* rng = nullptr,
                          const NetworkState* initial = nullptr);

}  // namespace snn
