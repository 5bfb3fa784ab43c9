#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace snn {

using NodeId = std::uint32_t;

// Validation failure (bad config, shape mismatch, domain violation).
inline void require_arg(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Runtime failure (I/O, parse errors, corrupt files).
inline void require_run(bool ok, const std::string& msg) {
  if (!ok) throw std::runtime_error(msg);
}

// Dense row-major matrix of doubles.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> v;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, fill) {}

  double& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }
  bool empty() const { return v.empty(); }
};

// Binary spike matrix: rows are channels (neurons and/or exogenous inputs),
// columns are time steps 1..horizon.
struct SpikeRecord {
  int rows = 0;
  int horizon = 0;
  std::vector<std::uint8_t> bits;

  SpikeRecord() = default;
  SpikeRecord(int r, int t) : rows(r), horizon(t), bits(static_cast<std::size_t>(r) * t, 0) {}

  std::uint8_t get(int r, int t) const { return bits[static_cast<std::size_t>(r) * horizon + t]; }
  void set(int r, int t, std::uint8_t s) { bits[static_cast<std::size_t>(r) * horizon + t] = s ? 1 : 0; }

  int count_row(int r) const {
    int n = 0;
    for (int t = 0; t < horizon; ++t) n += get(r, t);
    return n;
  }
  long count_all() const {
    long n = 0;
    for (auto b : bits) n += b;
    return n;
  }
  bool operator==(const SpikeRecord& o) const {
    return rows == o.rows && horizon == o.horizon && bits == o.bits;
  }
};

}  // namespace snn
