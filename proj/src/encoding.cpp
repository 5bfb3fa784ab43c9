#include "snn/encoding.hpp"

#include <algorithm>
#include <cmath>

namespace snn {

EncodingScheme parse_encoding_scheme(const std::string& name) {
  if (name == "rate") return EncodingScheme::rate;
  if (name == "time") return EncodingScheme::time;
  if (name == "population_rate") return EncodingScheme::population_rate;
  if (name == "population_time") return EncodingScheme::population_time;
  throw std::invalid_argument("encoder: unknown scheme '" + name + "'");
}

void EncoderSpec::validate() const {
  require_arg(window > 0, "encoder: window must be positive");
  require_arg(max_rate > 0.0 && max_rate <= 1.0, "encoder: max_rate must be in (0, 1]");
  if (scheme == EncodingScheme::population_rate || scheme == EncodingScheme::population_time)
    require_arg(neurons_per_value >= 2, "encoder: population schemes need neurons_per_value >= 2");
  if (scheme == EncodingScheme::population_time) {
    require_arg(!centers.empty() && centers.size() == widths.size(),
                "encoder: centers/widths must be non-empty and aligned");
    require_arg(centers.size() == static_cast<std::size_t>(neurons_per_value),
                "encoder: population_time needs one receptive field per neuron");
    for (std::size_t k = 0; k + 1 < centers.size(); ++k)
      require_arg(centers[k] < centers[k + 1], "encoder: centers must be strictly increasing");
    for (double w : widths) require_arg(w > 0, "encoder: widths must be positive");
  }
}

namespace {

void check_value(double value) {
  require_arg(value >= 0.0 && value <= 1.0, "encoder: value outside [0, 1]");
}

int latency_step(double activation, int window) {
  // activation 1 -> step 1, activation 0 -> step `window` (1-based).
  return static_cast<int>(std::lround(1.0 + (1.0 - activation) * (window - 1)));
}

}  // namespace

SpikeRecord rate_encode(double value, const EncoderSpec& spec, Rng* rng) {
  check_value(value);
  require_arg(spec.scheme == EncodingScheme::rate, "rate_encode: scheme mismatch");
  spec.validate();
  SpikeRecord train(1, spec.window);
  const double rate = value * spec.max_rate;
  if (spec.deterministic) {
    const int n = static_cast<int>(std::floor(rate * spec.window));
    for (int k = 1; k <= n; ++k) {
      const int step = std::min(spec.window, static_cast<int>(std::ceil(k / rate)));
      train.set(0, step - 1, 1);
    }
  } else {
    require_arg(rng != nullptr, "rate_encode: stochastic mode needs an rng");
    for (int t = 0; t < spec.window; ++t) train.set(0, t, rng->bernoulli(rate));
  }
  return train;
}

SpikeRecord time_encode(double value, const EncoderSpec& spec) {
  check_value(value);
  require_arg(spec.scheme == EncodingScheme::time, "time_encode: scheme mismatch");
  spec.validate();
  SpikeRecord train(1, spec.window);
  train.set(0, latency_step(value, spec.window) - 1, 1);
  return train;
}

SpikeRecord population_rate_encode(double value, const EncoderSpec& spec, Rng& rng) {
  check_value(value);
  require_arg(spec.scheme == EncodingScheme::population_rate, "population_rate_encode: scheme mismatch");
  spec.validate();
  SpikeRecord trains(spec.neurons_per_value, spec.window);
  const double rate = value * spec.max_rate;
  for (int n = 0; n < spec.neurons_per_value; ++n)
    for (int t = 0; t < spec.window; ++t) trains.set(n, t, rng.bernoulli(rate));
  return trains;
}

SpikeRecord population_time_encode(double value, const EncoderSpec& spec) {
  check_value(value);
  require_arg(spec.scheme == EncodingScheme::population_time, "population_time_encode: scheme mismatch");
  spec.validate();
  SpikeRecord trains(static_cast<int>(spec.centers.size()), spec.window);
  for (std::size_t k = 0; k < spec.centers.size(); ++k) {
    const double d = value - spec.centers[k];
    const double activation = std::exp(-d * d / (2.0 * spec.widths[k] * spec.widths[k]));
    if (activation < spec.activation_cutoff) continue;
    trains.set(static_cast<int>(k), latency_step(activation, spec.window) - 1, 1);
  }
  return trains;
}

int rate_decode(const SpikeRecord& output) {
  require_arg(output.rows > 0, "rate_decode: empty record");
  int best = 0;
  int best_count = output.count_row(0);
  for (int r = 1; r < output.rows; ++r) {
    const int c = output.count_row(r);
    if (c > best_count) {
      best = r;
      best_count = c;
    }
  }
  return best;
}

SpikeRecord make_target(int label, int classes, const EncoderSpec& spec) {
  require_arg(classes > 0, "make_target: need at least one class");
  require_arg(label >= 0 && label < classes, "make_target: label out of range");
  EncoderSpec rate_spec = spec;
  rate_spec.scheme = EncodingScheme::rate;
  rate_spec.deterministic = true;
  const SpikeRecord pattern = rate_encode(1.0, rate_spec);
  SpikeRecord target(classes, spec.window);
  for (int t = 0; t < spec.window; ++t) target.set(label, t, pattern.get(0, t));
  return target;
}

}  // namespace snn
