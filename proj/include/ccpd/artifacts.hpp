#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "ccpd/features.hpp"
#include "ccpd/kvfile.hpp"
#include "ccpd/stl.hpp"
#include "ccpd/types.hpp"

namespace ccpd {

/// On-disk artifacts passed between the staged CLI commands. Both carry the
/// producing configuration (as key = value text) for provenance.

/// "PDR1" residual container: magic, u32 version, u32 record_count,
/// u32 sample_count, u32 window_count, windows, u32 config_len + config text,
/// then per record: u32 id, u8 label, window_count * sample_count f64 (LE).
struct ResidualFile {
  std::vector<ResidualSet> residuals;
  std::vector<Label> labels;
  KvFile config;
};

void save_residuals(const std::filesystem::path& path, std::span<const ResidualSet> residuals,
                    std::span<const LabeledSignal> records, const KvFile& config);
ResidualFile load_residuals(const std::filesystem::path& path);

/// Feature CSV: `# key = value` provenance comments, a header line, then one
/// row per (record, step): id,label,step,f0..f11 with full-precision floats.
struct FeatureFile {
  std::vector<LabeledSequence> sequences;
  KvFile config;
};

void save_features(const std::filesystem::path& path, std::span<const LabeledSequence> sequences,
                   const KvFile& config);
FeatureFile load_features(const std::filesystem::path& path);

}  // namespace ccpd
