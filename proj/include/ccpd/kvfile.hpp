#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace ccpd {

/// Line-oriented `key = value` text used by model files and configs.
/// Scalars are bare tokens; arrays are `key = [v1, v2, ...]` on one line.
/// Doubles are written with 17 significant digits so they round-trip to the
/// exact bit pattern. Lines starting with '#' and blank lines are ignored.
/// Keys keep insertion order on write.
class KvFile {
 public:
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, int64_t value);
  void set(const std::string& key, std::span<const double> values);
  void set(const std::string& key, std::span<const int> values);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  int64_t get_int(const std::string& key) const;
  std::vector<double> get_array(const std::string& key) const;

  std::string to_string() const;
  void write(const std::filesystem::path& path) const;

  static KvFile parse_string(const std::string& text);
  static KvFile parse(const std::filesystem::path& path);

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  static std::string format_double(double value);

 private:
  const std::string* find(const std::string& key) const;

  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace ccpd
