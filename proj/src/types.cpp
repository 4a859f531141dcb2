#include "ccpd/types.hpp"

#include <stdexcept>
#include <string>
#include <unordered_set>

namespace ccpd {

void validate_dataset(const Dataset& dataset) {
  if (dataset.records.empty()) throw std::runtime_error("empty dataset");
  const size_t n = dataset.records.front().signal.sample_count();
  if (n < kMinSampleCount)
    throw std::runtime_error("sample_count " + std::to_string(n) + " below minimum " +
                             std::to_string(kMinSampleCount));
  std::unordered_set<uint32_t> ids;
  ids.reserve(dataset.records.size());
  for (size_t i = 0; i < dataset.records.size(); ++i) {
    const auto& rec = dataset.records[i];
    if (rec.signal.sample_count() != n)
      throw std::runtime_error("record " + std::to_string(i) + ": sample_count " +
                               std::to_string(rec.signal.sample_count()) +
                               " differs from dataset sample_count " + std::to_string(n));
    if (!ids.insert(rec.id).second)
      throw std::runtime_error("record " + std::to_string(i) + ": duplicate id " +
                               std::to_string(rec.id));
  }
}

}  // namespace ccpd
