#include "ccpd/signal_io.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ccpd {

namespace {

constexpr char kMagic[4] = {'P', 'D', 'S', '1'};
constexpr uint32_t kVersion = 1;

void put_u32(std::string& out, uint32_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
  out.push_back(static_cast<char>((v >> 16) & 0xFF));
  out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

void put_i16(std::string& out, int16_t v) {
  const auto u = static_cast<uint16_t>(v);
  out.push_back(static_cast<char>(u & 0xFF));
  out.push_back(static_cast<char>((u >> 8) & 0xFF));
}

class ByteReader {
 public:
  ByteReader(const std::string& bytes, const std::string& what) : bytes_(bytes), what_(what) {}

  uint8_t u8(const std::string& context) {
    need(1, context);
    return static_cast<uint8_t>(bytes_[pos_++]);
  }

  uint32_t u32(const std::string& context) {
    need(4, context);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<uint8_t>(bytes_[pos_++])) << (8 * i);
    return v;
  }

  int16_t i16(const std::string& context) {
    need(2, context);
    uint16_t v = static_cast<uint8_t>(bytes_[pos_]) | (static_cast<uint16_t>(static_cast<uint8_t>(bytes_[pos_ + 1])) << 8);
    pos_ += 2;
    return static_cast<int16_t>(v);
  }

  bool remaining(size_t n) const { return pos_ + n <= bytes_.size(); }
  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  void need(size_t n, const std::string& context) {
    if (pos_ + n > bytes_.size())
      throw std::runtime_error(what_ + ": truncated payload while reading " + context);
  }

  const std::string& bytes_;
  std::string what_;
  size_t pos_ = 0;
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

Label label_from_byte(uint8_t b, size_t record) {
  switch (b) {
    case 0: return Label::NonPd;
    case 1: return Label::Pd;
    case 255: return Label::Unlabeled;
    default:
      throw std::runtime_error("record " + std::to_string(record) + ": unknown label byte " +
                               std::to_string(b));
  }
}

Label label_from_csv(long v, size_t record) {
  switch (v) {
    case 0: return Label::NonPd;
    case 1: return Label::Pd;
    case -1: return Label::Unlabeled;
    default:
      throw std::runtime_error("record " + std::to_string(record) + ": unknown label value " +
                               std::to_string(v));
  }
}

Dataset load_binary(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  ByteReader r(bytes, path.filename().string());
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw std::runtime_error(path.string() + ": magic mismatch, not a PDS1 file");
  (void)r.u32("magic");
  const uint32_t version = r.u32("version");
  if (version != kVersion)
    throw std::runtime_error(path.string() + ": unsupported version " + std::to_string(version));
  const uint32_t record_count = r.u32("record_count");
  const uint32_t sample_count = r.u32("sample_count");

  Dataset dataset;
  dataset.records.reserve(record_count);
  for (uint32_t i = 0; i < record_count; ++i) {
    const std::string rec = "record " + std::to_string(i);
    LabeledSignal ls;
    ls.id = r.u32(rec + " id");
    ls.label = label_from_byte(r.u8(rec + " label"), i);
    ls.signal.samples.resize(sample_count);
    for (uint32_t s = 0; s < sample_count; ++s) ls.signal.samples[s] = r.i16(rec + " samples");
    dataset.records.push_back(std::move(ls));
  }
  if (!r.at_end()) throw std::runtime_error(path.string() + ": trailing bytes after last record");
  validate_dataset(dataset);
  return dataset;
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  Dataset dataset;
  std::string line;
  size_t record = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string field;
    LabeledSignal ls;
    if (!std::getline(ss, field, ','))
      throw std::runtime_error("record " + std::to_string(record) + ": missing id field");
    ls.id = static_cast<uint32_t>(std::stoul(field));
    if (!std::getline(ss, field, ','))
      throw std::runtime_error("record " + std::to_string(record) + ": missing label field");
    ls.label = label_from_csv(std::stol(field), record);
    while (std::getline(ss, field, ',')) {
      const long v = std::stol(field);
      if (v < INT16_MIN || v > INT16_MAX)
        throw std::runtime_error("record " + std::to_string(record) + ": sample " +
                                 std::to_string(v) + " outside the 16-bit range");
      ls.signal.samples.push_back(static_cast<int16_t>(v));
    }
    if (!dataset.records.empty() && ls.signal.sample_count() != dataset.sample_count())
      throw std::runtime_error("record " + std::to_string(record) + ": sample_count " +
                               std::to_string(ls.signal.sample_count()) +
                               " differs from dataset sample_count " +
                               std::to_string(dataset.sample_count()));
    dataset.records.push_back(std::move(ls));
    ++record;
  }
  validate_dataset(dataset);
  return dataset;
}

}  // namespace

FileFormat detect_format(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  char magic[4] = {};
  in.read(magic, 4);
  return (in.gcount() == 4 && std::memcmp(magic, kMagic, 4) == 0) ? FileFormat::Binary
                                                                  : FileFormat::Csv;
}

Dataset load_dataset(const std::filesystem::path& path, FileFormat format) {
  return format == FileFormat::Binary ? load_binary(path) : load_csv(path);
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path, FileFormat format) {
  validate_dataset(dataset);
  std::string out;
  if (format == FileFormat::Binary) {
    out.reserve(16 + dataset.size() * (5 + 2 * dataset.sample_count()));
    out.append(kMagic, 4);
    put_u32(out, kVersion);
    put_u32(out, static_cast<uint32_t>(dataset.size()));
    put_u32(out, static_cast<uint32_t>(dataset.sample_count()));
    for (const auto& rec : dataset.records) {
      put_u32(out, rec.id);
      out.push_back(static_cast<char>(rec.label));
      for (const int16_t s : rec.signal.samples) put_i16(out, s);
    }
  } else {
    std::ostringstream ss;
    for (const auto& rec : dataset.records) {
      ss << rec.id << ',';
      ss << (rec.label == Label::Unlabeled ? -1 : static_cast<int>(rec.label));
      for (const int16_t s : rec.signal.samples) ss << ',' << s;
      ss << '\n';
    }
    out = std::move(ss).str();
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace ccpd
