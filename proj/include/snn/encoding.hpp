#pragma once

#include <string>
#include <vector>

#include "snn/rng.hpp"
#include "snn/types.hpp"

namespace snn {

enum class EncodingScheme { rate, time, population_rate, population_time };

EncodingScheme parse_encoding_scheme(const std::string& name);

struct EncoderSpec {
  EncodingScheme scheme = EncodingScheme::rate;
  int window = 50;             // encoding steps per value
  int neurons_per_value = 1;   // population schemes
  double max_rate = 1.0;       // spike probability per step at value 1
  std::vector<double> centers; // receptive fields, population_time
  std::vector<double> widths;
  bool deterministic = true;
  double activation_cutoff = 0.05;

  void validate() const;
};

// Value in the spike count: n = floor(value * max_rate * window) spikes,
// evenly spaced in deterministic mode, i.i.d. Bernoulli otherwise.
SpikeRecord rate_encode(double value, const EncoderSpec& spec, Rng* rng = nullptr);

// Value in the latency of a single spike; larger values spike earlier.
SpikeRecord time_encode(double value, const EncoderSpec& spec);

// Value in the average rate of a group of encoding neurons.
SpikeRecord population_rate_encode(double value, const EncoderSpec& spec, Rng& rng);

// Value in per-neuron latencies given by Gaussian receptive fields; each
// neuron emits at most one spike, none below the activation cutoff.
SpikeRecord population_time_encode(double value, const EncoderSpec& spec);

// Read-out: class index with the highest total spike count, ties to the
// lowest index.
int rate_decode(const SpikeRecord& output);

// Supervised target: the labelled class neuron carries the deterministic
// rate pattern for value 1, all other rows stay silent.
SpikeRecord make_target(int label, int classes, const EncoderSpec& spec);

}  // namespace snn
