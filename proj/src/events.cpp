#include "snn/events.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace snn {

namespace {

bool has_extension(const std::string& path, const char* ext) {
  const auto dot = path.find_last_of('.');
  return dot != std::string::npos && path.substr(dot) == ext;
}

void check_sorted(const EventStream& stream, const std::string& path) {
  for (std::size_t k = 1; k < stream.events.size(); ++k)
    require_run(stream.events[k].t >= stream.events[k - 1].t,
                path + ": timestamps not sorted at record " + std::to_string(k));
}

}  // namespace

EventStream load_events(const std::string& path) {
  if (has_extension(path, ".bin") || has_extension(path, ".evt")) return load_events_binary(path);
  return load_events_text(path);
}

EventStream load_events_text(const std::string& path) {
  std::ifstream in(path);
  require_run(in.good(), path + ": cannot open");
  EventStream stream;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    long t = -1, x = -1, y = -1, p = 0;
    char trailing = 0;
    const int got = std::sscanf(line.c_str(), "%ld,%ld,%ld,%ld %c", &t, &x, &y, &p, &trailing);
    require_run(got == 4, path + ":" + std::to_string(line_no) + ": malformed record '" + line + "'");
    require_run(t >= 0 && x >= 0 && x <= 0xffff && y >= 0 && y <= 0xffff,
                path + ":" + std::to_string(line_no) + ": field out of range");
    require_run(p == -1 || p == 1,
                path + ":" + std::to_string(line_no) + ": polarity must be -1 or +1");
    stream.events.push_back(Event{static_cast<std::uint32_t>(t), static_cast<std::uint16_t>(x),
                                  static_cast<std::uint16_t>(y), static_cast<std::int8_t>(p)});
  }
  check_sorted(stream, path);
  return stream;
}

EventStream load_events_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require_run(in.good(), path + ": cannot open");
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  constexpr std::size_t kRecord = 9;  // u32 t, u16 x, u16 y, i8 p
  require_run(raw.size() % kRecord == 0,
              path + ": truncated record at byte offset " + std::to_string(raw.size() - raw.size() % kRecord));
  EventStream stream;
  for (std::size_t off = 0; off < raw.size(); off += kRecord) {
    const auto* b = reinterpret_cast<const unsigned char*>(raw.data() + off);
    Event e;
    e.t = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
          (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    e.x = static_cast<std::uint16_t>(b[4] | (b[5] << 8));
    e.y = static_cast<std::uint16_t>(b[6] | (b[7] << 8));
    e.polarity = static_cast<std::int8_t>(b[8]);
    require_run(e.polarity == -1 || e.polarity == 1,
                path + ": invalid polarity at byte offset " + std::to_string(off + 8));
    stream.events.push_back(e);
  }
  check_sorted(stream, path);
  return stream;
}

void write_events_text(const std::string& path, const EventStream& stream) {
  std::ofstream out(path);
  require_run(out.good(), path + ": cannot open for writing");
  for (const Event& e : stream.events)
    out << e.t << ',' << e.x << ',' << e.y << ',' << static_cast<int>(e.polarity) << '\n';
  require_run(out.good(), path + ": write failed");
}

void write_events_binary(const std::string& path, const EventStream& stream) {
  std::ofstream out(path, std::ios::binary);
  require_run(out.good(), path + ": cannot open for writing");
  for (const Event& e : stream.events) {
    unsigned char b[9];
    b[0] = e.t & 0xff;
    b[1] = (e.t >> 8) & 0xff;
    b[2] = (e.t >> 16) & 0xff;
    b[3] = (e.t >> 24) & 0xff;
    b[4] = e.x & 0xff;
    b[5] = (e.x >> 8) & 0xff;
    b[6] = e.y & 0xff;
    b[7] = (e.y >> 8) & 0xff;
    b[8] = static_cast<unsigned char>(e.polarity);
    out.write(reinterpret_cast<const char*>(b), sizeof b);
  }
  require_run(out.good(), path + ": write failed");
}

PolarityMode parse_polarity_mode(const std::string& name) {
  if (name == "per_sign") return PolarityMode::per_sign;
  if (name == "binary") return PolarityMode::binary;
  throw std::invalid_argument("polarity mode: unknown mode '" + name + "'");
}

FrameSequence crop_and_bin(const EventStream& stream, int sensor_w, int sensor_h, int crop_w,
                           int crop_h, std::uint32_t period_us, std::uint32_t duration_cap_us,
                           PolarityMode mode) {
  require_arg(sensor_w > 0 && sensor_h > 0, "crop_and_bin: sensor dimensions must be positive");
  require_arg(crop_w > 0 && crop_h > 0 && crop_w <= sensor_w && crop_h <= sensor_h,
              "crop_and_bin: crop larger than sensor");
  require_arg(period_us > 0, "crop_and_bin: period must be positive");

  const int x0 = (sensor_w - crop_w) / 2;
  const int y0 = (sensor_h - crop_h) / 2;

  std::uint64_t duration = duration_cap_us;
  if (duration == 0) {
    for (const Event& e : stream.events) {
      if (e.x >= x0 && e.x < x0 + crop_w && e.y >= y0 && e.y < y0 + crop_h)
        duration = std::max<std::uint64_t>(duration, static_cast<std::uint64_t>(e.t) + 1);
    }
  }

  FrameSequence frames;
  frames.channels = mode == PolarityMode::per_sign ? 2 : 1;
  frames.height = crop_h;
  frames.width = crop_w;
  frames.period_us = period_us;
  frames.horizon = static_cast<int>((duration + period_us - 1) / period_us);
  frames.bits.assign(static_cast<std::size_t>(frames.channels) * crop_h * crop_w * frames.horizon, 0);

  for (const Event& e : stream.events) {
    if (e.x < x0 || e.x >= x0 + crop_w || e.y < y0 || e.y >= y0 + crop_h) continue;
    if (duration_cap_us > 0 && e.t >= duration_cap_us) continue;
    const int t = static_cast<int>(e.t / period_us);
    if (t >= frames.horizon) continue;
    const int c = mode == PolarityMode::binary ? 0 : (e.polarity > 0 ? 0 : 1);
    frames.set(c, e.y - y0, e.x - x0, t, 1);
  }
  return frames;
}

SpikeRecord flatten(const FrameSequence& frames) {
  SpikeRecord record(frames.channels * frames.height * frames.width, frames.horizon);
  int row = 0;
  for (int c = 0; c < frames.channels; ++c)
    for (int y = 0; y < frames.height; ++y)
      for (int x = 0; x < frames.width; ++x, ++row)
        for (int t = 0; t < frames.horizon; ++t) record.set(row, t, frames.get(c, y, x, t));
  return record;
}

FrameSequence unflatten(const SpikeRecord& record, int channels, int height, int width,
                        std::uint32_t period_us) {
  require_arg(record.rows == channels * height * width, "unflatten: shape mismatch");
  FrameSequence frames;
  frames.channels = channels;
  frames.height = height;
  frames.width = width;
  frames.period_us = period_us;
  frames.horizon = record.horizon;
  frames.bits.assign(record.bits.size(), 0);
  int row = 0;
  for (int c = 0; c < channels; ++c)
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x, ++row)
        for (int t = 0; t < record.horizon; ++t) frames.set(c, y, x, t, record.get(row, t));
  return frames;
}

SpikeRecord coarsen_record(const SpikeRecord& record, int factor) {
  require_arg(factor > 0, "coarsen_record: factor must be positive");
  SpikeRecord out(record.rows, (record.horizon + factor - 1) / factor);
  for (int r = 0; r < record.rows; ++r)
    for (int t = 0; t < record.horizon; ++t)
      if (record.get(r, t)) out.set(r, t / factor, 1);
  return out;
}

DatasetManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  require_run(in.good(), path + ": cannot open");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  DatasetManifest manifest;
  manifest.class_count = doc.at("class_count").get<int>();
  manifest.seed = doc.value("seed", std::uint64_t{0});
  for (const auto& item : doc.at("examples")) {
    ManifestEntry entry;
    entry.path = item.at("path").get<std::string>();
    entry.label = item.at("label").get<int>();
    entry.split = item.value("split", "train");
    require_run(entry.label >= 0 && entry.label < manifest.class_count,
                path + ": label out of range for " + entry.path);
    require_run(entry.split == "train" || entry.split == "test",
                path + ": split must be train or test for " + entry.path);
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

void save_manifest(const std::string& path, const DatasetManifest& manifest) {
  nlohmann::json doc;
  doc["class_count"] = manifest.class_count;
  doc["seed"] = manifest.seed;
  doc["examples"] = nlohmann::json::array();
  for (const auto& entry : manifest.entries)
    doc["examples"].push_back({{"path", entry.path}, {"label", entry.label}, {"split", entry.split}});
  std::ofstream out(path);
  require_run(out.good(), path + ": cannot open for writing");
  out << doc.dump(2) << '\n';
  require_run(out.good(), path + ": write failed");
}

namespace {

SpikeRecord synth_example(const std::vector<int>& proto_times,
                          const std::vector<std::uint8_t>& mask, const SynthSpec& spec, Rng& rng) {
  SpikeRecord rec(spec.inputs, spec.horizon);
  for (int ch = 0; ch < spec.inputs; ++ch) {
    if (!mask.empty() && !mask[ch]) continue;
    if (rng.uniform() >= spec.noise) {
      const int jittered = spec.jitter > 0
                               ? proto_times[ch] + static_cast<int>(rng.range(-spec.jitter, spec.jitter))
                               : proto_times[ch];
      rec.set(ch, std::clamp(jittered, 0, spec.horizon - 1), 1);
    }
    if (spec.noise > 0 && rng.uniform() < spec.noise)
      rec.set(ch, static_cast<int>(rng.below(spec.horizon)), 1);
  }
  return rec;
}

}  // namespace

SyntheticDataset synthesize_patterns(const SynthSpec& spec) {
  require_arg(spec.classes >= 2, "synthesize_patterns: need at least two classes");
  require_arg(spec.inputs > 0 && spec.horizon > 0, "synthesize_patterns: bad shape");
  require_arg(spec.jitter >= 0 && spec.horizon > 2 * spec.jitter,
              "synthesize_patterns: horizon too small for jitter");
  require_arg(spec.noise >= 0 && spec.noise < 1, "synthesize_patterns: noise must be in [0, 1)");
  if (!spec.class_channel_mask.empty()) {
    require_arg(spec.class_channel_mask.size() == static_cast<std::size_t>(spec.classes),
                "synthesize_patterns: mask rows != classes");
    for (const auto& row : spec.class_channel_mask)
      require_arg(row.size() == static_cast<std::size_t>(spec.inputs),
                  "synthesize_patterns: mask columns != inputs");
  }

  Rng rng(spec.seed);
  SyntheticDataset data;
  data.spec = spec;

  const int lo = spec.jitter;
  const int hi = spec.horizon - 1 - spec.jitter;
  std::vector<std::vector<int>> proto_times(spec.classes, std::vector<int>(spec.inputs, 0));
  for (int c = 0; c < spec.classes; ++c) {
    SpikeRecord proto(spec.inputs, spec.horizon);
    const auto& mask = spec.class_channel_mask.empty() ? std::vector<std::uint8_t>{}
                                                       : spec.class_channel_mask[c];
    for (int ch = 0; ch < spec.inputs; ++ch) {
      proto_times[c][ch] = static_cast<int>(rng.range(lo, hi));
      if (mask.empty() || mask[ch]) proto.set(ch, proto_times[c][ch], 1);
    }
    data.prototypes.push_back(std::move(proto));
  }

  auto mask_for = [&](int c) -> const std::vector<std::uint8_t>& {
    static const std::vector<std::uint8_t> kEmpty;
    return spec.class_channel_mask.empty() ? kEmpty : spec.class_channel_mask[c];
  };
  for (int i = 0; i < spec.train_count; ++i) {
    const int label = i % spec.classes;
    data.train.push_back({synth_example(proto_times[label], mask_for(label), spec, rng), label});
  }
  for (int i = 0; i < spec.test_count; ++i) {
    const int label = i % spec.classes;
    data.test.push_back({synth_example(proto_times[label], mask_for(label), spec, rng), label});
  }
  return data;
}

}  // namespace snn
