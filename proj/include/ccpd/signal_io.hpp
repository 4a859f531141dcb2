#pragma once

#include <filesystem>

#include "ccpd/types.hpp"

namespace ccpd {

enum class FileFormat {
  Binary,  // "PDS1" container, little-endian, bit-exact
  Csv,     // one record per line: id,label,s0,s1,...
};

/// Sniffs the on-disk format from the leading magic bytes.
FileFormat detect_format(const std::filesystem::path& path);

Dataset load_dataset(const std::filesystem::path& path, FileFormat format);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path, FileFormat format);

}  // namespace ccpd
