#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ccpd {

enum class Label : uint8_t {
  NonPd = 0,
  Pd = 1,
  Unlabeled = 255,
};

/// Raw one-cycle voltage waveform in meter units.
struct Signal {
  std::vector<int16_t> samples;
  double nominal_frequency_hz = 50.0;

  size_t sample_count() const { return samples.size(); }
};

struct LabeledSignal {
  Signal signal;
  Label label = Label::Unlabeled;
  uint32_t id = 0;
};

/// Ordered collection of records sharing one sample count.
struct Dataset {
  std::vector<LabeledSignal> records;

  size_t size() const { return records.size(); }
  size_t sample_count() const { return records.empty() ? 0 : records.front().signal.sample_count(); }
};

constexpr size_t kMinSampleCount = 16;

/// Throws std::runtime_error naming the offending record when the dataset
/// invariants do not hold (non-empty, homogeneous length >= 16, unique ids).
void validate_dataset(const Dataset& dataset);

}  // namespace ccpd
