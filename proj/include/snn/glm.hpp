#pragma once

#include "snn/network.hpp"
#include "snn/rng.hpp"
#include "snn/types.hpp"

namespace snn {

// Floor keeping probabilities away from exact 0/1 so logs stay finite.
inline constexpr double kProbFloor = 1e-12;

// Numerically stable logistic in (0, 1).
double stable_sigmoid(double v);

// Logistic clamped to [kProbFloor, 1 - kProbFloor].
double clamped_sigmoid(double v);

// softplus(v) = log(1 + exp(v)) without overflow.
double softplus(double v);

// Spiking probability sigma_Delta(u) = 1 / (1 + exp(-bandwidth * u)),
// clamped away from 0 and 1.
double spike_probability(double u, double bandwidth);

// Bernoulli draw; independent across neurons given the past.
inline int sample_spike(double prob, Rng& rng) { return rng.bernoulli(prob) ? 1 : 0; }

// Binary cross-entropy of a spike against sigma(bandwidth * u), computed in
// log-sigmoid form (sigma itself is never materialized near 0 or 1).
double nll_local(int spike, double u, double bandwidth);

// Deterministic forward pass of a fully specified record (every neuron's
// spikes given): returns the potentials and pre-traces the record induces.
Trajectory replay_trajectory(const SpikeRecord& record, const SpikeRecord& exogenous,
                             const Parameters& params, const Topology& topo,
                             const HyperParams& hyper, const NetworkState* initial = nullptr);

// Per-neuron, per-step cross-entropy terms of a fully specified trajectory.
struct LikelihoodBreakdown {
  Matrix per_term;  // neurons x T
  double total = 0.0;

  double subset_total(const std::vector<NodeId>& neurons) const;
};

// Replays a complete spike record (all neurons given, visible and hidden)
// and sums the per-spike cross-entropy over every neuron and step.
LikelihoodBreakdown sequence_nll_complete(const SpikeRecord& record, const SpikeRecord& exogenous,
                                          const Parameters& params, const Topology& topo,
                                          const HyperParams& hyper);

// Exact -log p(visible) by exhaustive enumeration of all hidden
// trajectories. Testing oracle; guarded to |H| * T <= 20.
double marginal_nll_exact(const SpikeRecord& visible, const SpikeRecord& exogenous,
                          const Parameters& params, const Topology& topo,
                          const HyperParams& hyper);

// One sampled trajectory with the visible neurons clamped to data, plus the
// quantities the Jensen-bound estimate is built from.
struct TrajectorySample {
  SpikeRecord record;                // all neurons; visible rows equal the clamp
  double log_prob_hidden = 0.0;      // log p(hidden trajectory || clamped visible)
  std::vector<double> bound_terms;   // per step, sum over visible of nll_local
  Matrix potentials;                 // neurons x T
  Matrix pre_traces;                 // channels x T

  double bound_total() const;
};

TrajectorySample bound_sample(const SpikeRecord& visible, const SpikeRecord& exogenous,
                              const Parameters& params, const Topology& topo,
                              const HyperParams& hyper, Rng& rng);

}  // namespace snn
