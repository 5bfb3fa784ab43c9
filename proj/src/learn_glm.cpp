#include "snn/learn_glm.hpp"

namespace snn {

double global_error(std::span<const std::uint8_t> x_t, std::span<const double> u_t,
                    double bandwidth) {
  require_arg(x_t.size() == u_t.size(), "global_error: vector size mismatch");
  double e_bar = 0.0;
  for (std::size_t v = 0; v < x_t.size(); ++v) e_bar += nll_local(x_t[v], u_t[v], bandwidth);
  return e_bar;
}

namespace {

// One clamped trajectory's contribution, scaled by `weight`. The
// accumulator stores gradients of the bound, so the visible two-factor term
// enters negated and both rules carry the bandwidth factor from
// d sigma(bandwidth * u) / du.
double accumulate_sample(const Trajectory& traj, const SpikeRecord& visible_targets,
                         const Topology& topo, const HyperParams& hyper,
                         const GlmTrainConfig& cfg, GlmTrainState& state, double weight) {
  const double bw = hyper.bandwidth;
  double bound_value = 0.0;
  std::vector<std::uint8_t> x_t(topo.visible.size(), 0);
  std::vector<double> u_t(topo.visible.size(), 0.0);
  for (int t = 0; t < visible_targets.horizon; ++t) {
    for (std::size_t v = 0; v < topo.visible.size(); ++v) {
      x_t[v] = visible_targets.get(static_cast<int>(v), t);
      u_t[v] = traj.potentials.at(static_cast<int>(topo.visible[v]), t);
    }
    const double e_bar = global_error(x_t, u_t, bw);
    bound_value += e_bar;
    if (cfg.baseline_enabled && !state.baseline_primed) {
      state.baseline = e_bar;
      state.baseline_primed = true;
    }

    for (std::size_t v = 0; v < topo.visible.size(); ++v) {
      const NodeId i = topo.visible[v];
      const double u = u_t[v];
      const auto& parents = topo.parents[i];
      auto& g = state.acc.grads[i];
      for (std::size_t k = 0; k < parents.size(); ++k) {
        const double pre = traj.pre_traces.at(static_cast<int>(parents[k]), t);
        g[k] -= weight * bw * visible_contribution(x_t[v], u, bw, pre);
      }
      if (cfg.train_bias)
        state.acc.bias_grads[i] -= weight * bw * visible_contribution(x_t[v], u, bw, 1.0);
    }

    const double baseline = cfg.baseline_enabled ? state.baseline : 0.0;
    for (NodeId i : topo.hidden) {
      const double u = traj.potentials.at(static_cast<int>(i), t);
      const int h = traj.spikes.get(static_cast<int>(i), t);
      const auto& parents = topo.parents[i];
      auto& g = state.acc.grads[i];
      for (std::size_t k = 0; k < parents.size(); ++k) {
        const double pre = traj.pre_traces.at(static_cast<int>(parents[k]), t);
        g[k] += weight * bw * hidden_contribution(e_bar, h, u, bw, pre, baseline);
      }
      if (cfg.train_bias)
        state.acc.bias_grads[i] += weight * bw * hidden_contribution(e_bar, h, u, bw, 1.0, baseline);
    }

    if (cfg.baseline_enabled)
      state.baseline = cfg.baseline_decay * state.baseline + (1.0 - cfg.baseline_decay) * e_bar;
  }
  return bound_value;
}

}  // namespace

double train_step_glm(const Parameters& params, const Topology& topo, const HyperParams& hyper,
                      const SpikeRecord& exogenous, const SpikeRecord& visible_targets,
                      const GlmTrainConfig& cfg, GlmTrainState& state, Rng& rng,
                      const NetworkState* initial, const SpikeRecord* forced_hidden) {
  require_arg(visible_targets.rows == static_cast<int>(topo.visible.size()),
              "train_step_glm: target rows != visible count");
  require_arg(visible_targets.horizon == exogenous.horizon,
              "train_step_glm: target horizon mismatch");
  require_arg(cfg.samples_per_example > 0, "train_step_glm: samples_per_example must be positive");

  const double weight = 1.0 / cfg.samples_per_example;
  double bound_mean = 0.0;
  for (int s = 0; s < cfg.samples_per_example; ++s) {
    Trajectory traj;
    if (forced_hidden) {
      require_arg(forced_hidden->rows == static_cast<int>(topo.hidden.size()) &&
                      forced_hidden->horizon == visible_targets.horizon,
                  "train_step_glm: forced hidden shape mismatch");
      SpikeRecord record(static_cast<int>(topo.neuron_count), visible_targets.horizon);
      for (int t = 0; t < visible_targets.horizon; ++t) {
        for (std::size_t v = 0; v < topo.visible.size(); ++v)
          record.set(static_cast<int>(topo.visible[v]), t, visible_targets.get(static_cast<int>(v), t));
        for (std::size_t hi = 0; hi < topo.hidden.size(); ++hi)
          record.set(static_cast<int>(topo.hidden[hi]), t, forced_hidden->get(static_cast<int>(hi), t));
      }
      traj = replay_trajectory(record, exogenous, params, topo, hyper, initial);
    } else {
      traj = run_trajectory(params, topo, hyper, exogenous, SpikeMode::stochastic,
                            &visible_targets, &rng, initial);
    }
    bound_mean += accumulate_sample(traj, visible_targets, topo, hyper, cfg, state, weight) /
                  cfg.samples_per_example;
  }
  state.acc.count += 1;
  return bound_mean;
}

}  // namespace snn
