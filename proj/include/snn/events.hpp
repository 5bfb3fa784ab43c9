#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "snn/rng.hpp"
#include "snn/types.hpp"

namespace snn {

// One sensor event: timestamp in microseconds, pixel position, polarity.
struct Event {
  std::uint32_t t = 0;
  std::uint16_t x = 0;
  std::uint16_t y = 0;
  std::int8_t polarity = 1;  // -1 or +1

  bool operator==(const Event&) const = default;
};

struct EventStream {
  std::vector<Event> events;  // sorted by timestamp, non-decreasing
};

// Reads either the text format (one "t,x,y,p" record per line) or the
// compact binary format (little-endian u32 t, u16 x, u16 y, i8 p records),
// chosen by file extension: ".bin" and ".evt" are binary, anything else is
// text. Errors carry the offending line (text) or byte offset (binary).
EventStream load_events(const std::string& path);
EventStream load_events_text(const std::string& path);
EventStream load_events_binary(const std::string& path);

void write_events_text(const std::string& path, const EventStream& stream);
void write_events_binary(const std::string& path, const EventStream& stream);

enum class PolarityMode { per_sign, binary };

PolarityMode parse_polarity_mode(const std::string& name);

// Binary spike frames binned from an event stream. channels is 2 in
// per_sign mode (0 = positive, 1 = negative) and 1 in binary mode.
struct FrameSequence {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::uint32_t period_us = 1;
  int horizon = 0;
  std::vector<std::uint8_t> bits;

  std::uint8_t get(int c, int y, int x, int t) const { return bits[index(c, y, x, t)]; }
  void set(int c, int y, int x, int t, std::uint8_t s) { bits[index(c, y, x, t)] = s ? 1 : 0; }
  std::size_t index(int c, int y, int x, int t) const {
    return ((static_cast<std::size_t>(c) * height + y) * width + x) * horizon + t;
  }
};

// Keeps events inside a centered crop_w x crop_h window and below the
// duration cap, then bins them into frames of `period_us`. Multiple events
// in one (pixel, bin) cell saturate to a single 1. With duration_cap_us = 0
// the duration is taken from the last kept event.
FrameSequence crop_and_bin(const EventStream& stream, int sensor_w, int sensor_h, int crop_w,
                           int crop_h, std::uint32_t period_us, std::uint32_t duration_cap_us,
                           PolarityMode mode);

// Row-major flattening (channel, row, column) -> exogenous channel index.
SpikeRecord flatten(const FrameSequence& frames);
FrameSequence unflatten(const SpikeRecord& record, int channels, int height, int width,
                        std::uint32_t period_us);

// Coarser re-binning of a spike record: ORs each row over windows of
// `factor` steps.
SpikeRecord coarsen_record(const SpikeRecord& record, int factor);

struct ManifestEntry {
  std::string path;
  int label = 0;
  std::string split;  // "train" or "test"
};

struct DatasetManifest {
  int class_count = 0;
  std::uint64_t seed = 0;
  std::vector<ManifestEntry> entries;
};

DatasetManifest load_manifest(const std::string& path);
void save_manifest(const std::string& path, const DatasetManifest& manifest);

// Synthetic spatio-temporal pattern task. Each class owns a prototype that
// assigns every active input channel one spike time; examples jitter each
// spike by up to +/- jitter steps and, with probability `noise`, delete it
// or add a spurious one.
struct SynthSpec {
  int classes = 2;
  int inputs = 20;
  int horizon = 50;
  int jitter = 2;
  double noise = 0.05;
  int train_count = 512;
  int test_count = 200;
  std::uint64_t seed = 1;
  // Optional per-class channel mask (classes x inputs); all channels active
  // when empty.
  std::vector<std::vector<std::uint8_t>> class_channel_mask;
};

struct LabeledExample {
  SpikeRecord inputs;
  int label = 0;
};

struct SyntheticDataset {
  SynthSpec spec;
  std::vector<SpikeRecord> prototypes;  // one per class
  std::vector<LabeledExample> train;
  std::vector<LabeledExample> test;
};

SyntheticDataset synthesize_patterns(const SynthSpec& spec);

}  // namespace snn
