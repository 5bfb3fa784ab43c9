#include "snn/glm.hpp"

#include <algorithm>
#include <cmath>

namespace snn {

double stable_sigmoid(double v) {
  if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

double clamped_sigmoid(double v) {
  return std::clamp(stable_sigmoid(v), kProbFloor, 1.0 - kProbFloor);
}

double softplus(double v) {
  if (v > 30.0) return v + std::log1p(std::exp(-v));
  return std::log1p(std::exp(v));
}

double spike_probability(double u, double bandwidth) {
  require_arg(bandwidth > 0, "spike_probability: bandwidth must be positive");
  return clamped_sigmoid(bandwidth * u);
}

double nll_local(int spike, double u, double bandwidth) {
  // ell(s, sigma(v)) = softplus(v) - s * v = softplus((1 - 2s) * v)
  const double v = bandwidth * u;
  return softplus(spike ? -v : v);
}

double LikelihoodBreakdown::subset_total(const std::vector<NodeId>& neurons) const {
  double s = 0.0;
  for (NodeId i : neurons)
    for (int t = 0; t < per_term.cols; ++t) s += per_term.at(static_cast<int>(i), t);
  return s;
}

Trajectory replay_trajectory(const SpikeRecord& record, const SpikeRecord& exogenous,
                             const Parameters& params, const Topology& topo,
                             const HyperParams& hyper, const NetworkState* initial) {
  require_arg(record.rows == static_cast<int>(topo.neuron_count),
              "replay: record rows != neuron count");
  require_arg(exogenous.rows == static_cast<int>(topo.exogenous_count),
              "replay: exogenous rows != exogenous channels");
  require_arg(exogenous.horizon == record.horizon, "replay: horizon mismatch");

  const int horizon = record.horizon;
  NetworkState state = initial ? *initial : NetworkState::zero(topo);
  Trajectory out;
  out.spikes = record;
  out.potentials = Matrix(static_cast<int>(topo.neuron_count), horizon);
  out.pre_traces = Matrix(static_cast<int>(topo.channel_count()), horizon);
  std::vector<std::uint8_t> prev(state.last_spikes.begin(), state.last_spikes.end());
  for (int t = 0; t < horizon; ++t) {
    step_traces(state, topo, hyper, prev);
    for (NodeId i = 0; i < topo.neuron_count; ++i)
      out.potentials.at(static_cast<int>(i), t) = membrane_potential(state, params, topo, i);
    for (NodeId j = 0; j < topo.channel_count(); ++j)
      out.pre_traces.at(static_cast<int>(j), t) = state.syn_p[j];
    for (NodeId i = 0; i < topo.neuron_count; ++i) prev[i] = record.get(static_cast<int>(i), t);
    for (NodeId k = 0; k < topo.exogenous_count; ++k)
      prev[topo.exo_channel(k)] = exogenous.get(static_cast<int>(k), t);
  }
  return out;
}

namespace {

double log_sum_exp(const std::vector<double>& xs) {
  const double m = *std::max_element(xs.begin(), xs.end());
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

LikelihoodBreakdown sequence_nll_complete(const SpikeRecord& record, const SpikeRecord& exogenous,
                                          const Parameters& params, const Topology& topo,
                                          const HyperParams& hyper) {
  const Matrix u = replay_trajectory(record, exogenous, params, topo, hyper).potentials;
  LikelihoodBreakdown out;
  out.per_term = Matrix(static_cast<int>(topo.neuron_count), record.horizon);
  for (NodeId i = 0; i < topo.neuron_count; ++i) {
    for (int t = 0; t < record.horizon; ++t) {
      const double term =
          nll_local(record.get(static_cast<int>(i), t), u.at(static_cast<int>(i), t), hyper.bandwidth);
      out.per_term.at(static_cast<int>(i), t) = term;
      out.total += term;
    }
  }
  return out;
}

double marginal_nll_exact(const SpikeRecord& visible, const SpikeRecord& exogenous,
                          const Parameters& params, const Topology& topo,
                          const HyperParams& hyper) {
  require_arg(visible.rows == static_cast<int>(topo.visible.size()),
              "marginal_nll_exact: visible rows != visible count");
  const int horizon = visible.horizon;
  const std::size_t hidden_bits = topo.hidden.size() * static_cast<std::size_t>(horizon);
  require_arg(hidden_bits <= 20, "marginal_nll_exact: |H|*T exceeds enumeration guard (20)");

  SpikeRecord record(static_cast<int>(topo.neuron_count), horizon);
  for (std::size_t v = 0; v < topo.visible.size(); ++v)
    for (int t = 0; t < horizon; ++t)
      record.set(static_cast<int>(topo.visible[v]), t, visible.get(static_cast<int>(v), t));

  std::vector<double> log_joint;
  const std::uint64_t combos = std::uint64_t{1} << hidden_bits;
  log_joint.reserve(combos);
  for (std::uint64_t m = 0; m < combos; ++m) {
    std::size_t bit = 0;
    for (int t = 0; t < horizon; ++t)
      for (NodeId h : topo.hidden) record.set(static_cast<int>(h), t, (m >> bit++) & 1u);
    const LikelihoodBreakdown nll = sequence_nll_complete(record, exogenous, params, topo, hyper);
    log_joint.push_back(-nll.total);
  }
  if (log_joint.empty()) return 0.0;
  return -log_sum_exp(log_joint);
}

double TrajectorySample::bound_total() const {
  double s = 0.0;
  for (double b : bound_terms) s += b;
  return s;
}

TrajectorySample bound_sample(const SpikeRecord& visible, const SpikeRecord& exogenous,
                              const Parameters& params, const Topology& topo,
                              const HyperParams& hyper, Rng& rng) {
  Trajectory traj =
      run_trajectory(params, topo, hyper, exogenous, SpikeMode::stochastic, &visible, &rng);

  TrajectorySample sample;
  sample.bound_terms.assign(static_cast<std::size_t>(visible.horizon), 0.0);
  for (int t = 0; t < visible.horizon; ++t) {
    for (std::size_t v = 0; v < topo.visible.size(); ++v) {
      const int i = static_cast<int>(topo.visible[v]);
      sample.bound_terms[static_cast<std::size_t>(t)] +=
          nll_local(visible.get(static_cast<int>(v), t), traj.potentials.at(i, t), hyper.bandwidth);
    }
    for (NodeId h : topo.hidden) {
      const int i = static_cast<int>(h);
      sample.log_prob_hidden -=
          nll_local(traj.spikes.get(i, t), traj.potentials.at(i, t), hyper.bandwidth);
    }
  }
  sample.record = std::move(traj.spikes);
  sample.potentials = std::move(traj.potentials);
  sample.pre_traces = std::move(traj.pre_traces);
  return sample;
}

}  // namespace snn
