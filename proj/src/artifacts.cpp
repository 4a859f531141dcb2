#include "ccpd/artifacts.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ccpd {

namespace {

constexpr char kResidualMagic[4] = {'P', 'D', 'R', '1'};
constexpr uint32_t kResidualVersion = 1;

void put_u32(std::ostream& out, uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b, 4);
}

void put_f64(std::ostream& out, double v) {
  const auto u = std::bit_cast<uint64_t>(v);
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((u >> (8 * i)) & 0xFF);
  out.write(b, 8);
}

uint32_t get_u32(std::istream& in, const std::string& context) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4))
    throw std::runtime_error("truncated residual file while reading " + context);
  return b[0] | (static_cast<uint32_t>(b[1]) << 8) | (static_cast<uint32_t>(b[2]) << 16) |
         (static_cast<uint32_t>(b[3]) << 24);
}

double get_f64(std::istream& in, const std::string& context) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8))
    throw std::runtime_error("truncated residual file while reading " + context);
  uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= static_cast<uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(u);
}

}  // namespace

void save_residuals(const std::filesystem::path& path, std::span<const ResidualSet> residuals,
                    std::span<const LabeledSignal> records, const KvFile& config) {
  if (residuals.size() != records.size())
    throw std::invalid_argument("save_residuals: residual and record counts differ");
  if (residuals.empty()) throw std::invalid_argument("save_residuals: nothing to save");

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());

  const auto sample_count = static_cast<uint32_t>(residuals.front().residuals.front().size());
  out.write(kResidualMagic, 4);
  put_u32(out, kResidualVersion);
  put_u32(out, static_cast<uint32_t>(residuals.size()));
  put_u32(out, sample_count);
  put_u32(out, static_cast<uint32_t>(residuals.front().windows.size()));
  for (const int w : residuals.front().windows) put_u32(out, static_cast<uint32_t>(w));
  const std::string cfg = config.to_string();
  put_u32(out, static_cast<uint32_t>(cfg.size()));
  out.write(cfg.data(), static_cast<std::streamsize>(cfg.size()));

  for (size_t i = 0; i < residuals.size(); ++i) {
    put_u32(out, residuals[i].signal_id);
    out.put(static_cast<char>(records[i].label));
    for (const auto& series : residuals[i].residuals) {
      if (series.size() != sample_count)
        throw std::runtime_error("save_residuals: inconsistent residual length in record " +
                                 std::to_string(i));
      for (const double v : series) put_f64(out, v);
    }
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

ResidualFile load_residuals(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());

  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kResidualMagic, 4) != 0)
    throw std::runtime_error(path.string() + ": magic mismatch, not a PDR1 file");
  const uint32_t version = get_u32(in, "version");
  if (version != kResidualVersion)
    throw std::runtime_error(path.string() + ": unsupported version " + std::to_string(version));
  const uint32_t record_count = get_u32(in, "record_count");
  const uint32_t sample_count = get_u32(in, "sample_count");
  const uint32_t window_count = get_u32(in, "window_count");
  if (window_count != 4)
    throw std::runtime_error(path.string() + ": expected 4 windows, found " +
                             std::to_string(window_count));

  ResidualFile file;
  std::array<int, 4> windows{};
  for (auto& w : windows) w = static_cast<int>(get_u32(in, "windows"));

  const uint32_t cfg_len = get_u32(in, "config length");
  std::string cfg(cfg_len, '\0');
  if (cfg_len > 0 && !in.read(cfg.data(), cfg_len))
    throw std::runtime_error(path.string() + ": truncated config block");
  file.config = KvFile::parse_string(cfg);

  file.residuals.resize(record_count);
  file.labels.resize(record_count);
  for (uint32_t i = 0; i < record_count; ++i) {
    const std::string rec = "record " + std::to_string(i);
    auto& set = file.residuals[i];
    set.windows = windows;
    set.signal_id = get_u32(in, rec + " id");
    const int label = in.get();
    if (label == EOF) throw std::runtime_error("truncated residual file while reading " + rec);
    if (label != 0 && label != 1 && label != 255)
      throw std::runtime_error(rec + ": unknown label byte " + std::to_string(label));
    file.labels[i] = static_cast<Label>(label);
    for (auto& series : set.residuals) {
      series.resize(sample_count);
      for (auto& v : series) v = get_f64(in, rec + " residuals");
    }
  }
  return file;
}

void save_features(const std::filesystem::path& path, std::span<const LabeledSequence> sequences,
                   const KvFile& config) {
  if (sequences.empty()) throw std::invalid_argument("save_features: nothing to save");
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());

  for (const auto& [key, value] : config.entries()) out << "# " << key << " = " << value << '\n';
  out << "id,label,step";
  for (const char* base : {"n", "s", "sd"})
    for (int w = 0; w < 4; ++w) out << ',' << base << "_w" << w;
  out << '\n';

  for (const auto& rec : sequences) {
    const int label = rec.label == Label::Unlabeled ? -1 : static_cast<int>(rec.label);
    for (size_t step = 0; step < rec.sequence.steps.size(); ++step) {
      out << rec.id << ',' << label << ',' << step;
      for (const double v : rec.sequence.steps[step]) out << ',' << KvFile::format_double(v);
      out << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

FeatureFile load_features(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());

  FeatureFile file;
  std::string config_text;
  std::string line;
  bool header_seen = false;
  size_t lineno = 0;

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      config_text += line.substr(1);
      config_text += '\n';
      continue;
    }
    if (!header_seen) {
      if (line.rfind("id,label,step", 0) != 0)
        throw std::runtime_error(path.string() + ": line " + std::to_string(lineno) +
                                 ": expected the feature header row");
      header_seen = true;
      continue;
    }
    std::istringstream ss(line);
    std::string field;
    const auto next = [&](const char* what) {
      if (!std::getline(ss, field, ','))
        throw std::runtime_error(path.string() + ": line " + std::to_string(lineno) +
                                 ": missing " + what);
      return field;
    };
    const auto id = static_cast<uint32_t>(std::stoul(next("id")));
    const long label_value = std::stol(next("label"));
    if (label_value != -1 && label_value != 0 && label_value != 1)
      throw std::runtime_error(path.string() + ": line " + std::to_string(lineno) +
                               ": unknown label value " + std::to_string(label_value));
    const auto step = static_cast<size_t>(std::stoul(next("step")));

    if (file.sequences.empty() || file.sequences.back().id != id) {
      LabeledSequence rec;
      rec.id = id;
      rec.label = label_value == -1 ? Label::Unlabeled : static_cast<Label>(label_value);
      file.sequences.push_back(std::move(rec));
    }
    auto& seq = file.sequences.back().sequence;
    if (step != seq.steps.size())
      throw std::runtime_error(path.string() + ": line " + std::to_string(lineno) +
                               ": steps of record " + std::to_string(id) + " are out of order");
    std::array<double, kFeatureDims> row{};
    for (int d = 0; d < kFeatureDims; ++d) row[d] = std::stod(next("feature"));
    seq.steps.push_back(row);
  }
  if (!header_seen) throw std::runtime_error(path.string() + ": no feature header row");
  file.config = KvFile::parse_string(config_text);
  return file;
}

}  // namespace ccpd
