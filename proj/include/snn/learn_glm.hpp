#pragma once

#include <span>

#include "snn/glm.hpp"
#include "snn/learn_srm.hpp"
#include "snn/network.hpp"

namespace snn {

// Two-factor rule for a visible neuron's in-edge: prediction error times
// pre-synaptic trace.
inline double visible_contribution(int x, double u, double bandwidth, double pre_trace) {
  return (x - spike_probability(u, bandwidth)) * pre_trace;
}

// Common error signal: summed visible cross-entropy at one step.
double global_error(std::span<const std::uint8_t> x_t, std::span<const double> u_t,
                    double bandwidth);

// Three-factor rule for a hidden neuron's in-edge: centered global error
// times prediction error times pre-synaptic trace.
inline double hidden_contribution(double e_bar, int h, double u, double bandwidth,
                                  double pre_trace, double baseline) {
  return (e_bar - baseline) * (h - spike_probability(u, bandwidth)) * pre_trace;
}

struct GlmTrainConfig {
  bool baseline_enabled = true;
  double baseline_decay = 0.99;
  int samples_per_example = 1;
  bool train_bias = true;
};

struct GlmTrainState {
  UpdateAccumulator acc;
  double baseline = 0.0;        // running mean of the global error; 0 while disabled
  bool baseline_primed = false; // EMA starts from the first observed error

  static GlmTrainState zero(const Topology& topo) {
    return {UpdateAccumulator::zero(topo), 0.0, false};
  }
};

// Clamps the visible neurons to the example, samples the hidden neurons
// online, and accumulates bound-gradient estimates: the exact gradient for
// visible in-edges and the score-function estimate for hidden in-edges.
// Returns the sampled bound value (summed global error over steps).
//
// forced_hidden (testing hook) replaces hidden sampling with a given
// trajectory, in topology hidden order.
double train_step_glm(const Parameters& params, const Topology& topo, const HyperParams& hyper,
                      const SpikeRecord& exogenous, const SpikeRecord& visible_targets,
                      const GlmTrainConfig& cfg, GlmTrainState& state, Rng& rng,
                      const NetworkState* initial = nullptr,
                      const SpikeRecord* forced_hidden = nullptr);

}  // namespace snn
