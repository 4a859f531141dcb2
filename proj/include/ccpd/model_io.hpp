#pragma once

#include <filesystem>

#include "ccpd/pipeline.hpp"

namespace ccpd {

/// Self-describing text format (see KvFile): kind, version, and shape fields
/// first, then scaler state, preprocessing settings, and parameter blocks.
/// load_model(save_model(m)) reproduces bitwise-identical parameters.
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace ccpd
