#include "ccpd/kvfile.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ccpd {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& token, const std::string& key) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0')
    throw std::runtime_error("key '" + key + "': cannot parse number '" + token + "'");
  return v;
}

}  // namespace

std::string KvFile::format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void KvFile::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

void KvFile::set(const std::string& key, double value) { set(key, format_double(value)); }

void KvFile::set(const std::string& key, int64_t value) { set(key, std::to_string(value)); }

void KvFile::set(const std::string& key, std::span<const double> values) {
  std::string out = "[";
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_double(values[i]);
  }
  out += "]";
  set(key, out);
}

void KvFile::set(const std::string& key, std::span<const int> values) {
  std::string out = "[";
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(values[i]);
  }
  out += "]";
  set(key, out);
}

const std::string* KvFile::find(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return &v;
  return nullptr;
}

bool KvFile::has(const std::string& key) const { return find(key) != nullptr; }

std::string KvFile::get_string(const std::string& key) const {
  const std::string* v = find(key);
  if (!v) throw std::runtime_error("missing key '" + key + "'");
  return *v;
}

double KvFile::get_double(const std::string& key) const {
  return parse_double(get_string(key), key);
}

int64_t KvFile::get_int(const std::string& key) const {
  const std::string v = get_string(key);
  try {
    size_t pos = 0;
    const int64_t out = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw std::runtime_error("key '" + key + "': cannot parse integer '" + v + "'");
  }
}

std::vector<double> KvFile::get_array(const std::string& key) const {
  const std::string v = get_string(key);
  if (v.size() < 2 || v.front() != '[' || v.back() != ']')
    throw std::runtime_error("key '" + key + "': expected an array value");
  std::vector<double> out;
  std::istringstream ss(v.substr(1, v.size() - 2));
  std::string token;
  while (std::getline(ss, token, ',')) {
    token = trim(token);
    if (token.empty()) continue;
    out.push_back(parse_double(token, key));
  }
  return out;
}

std::string KvFile::to_string() const {
  std::string out;
  for (const auto& [k, v] : entries_) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

void KvFile::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_string();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

KvFile KvFile::parse_string(const std::string& text) {
  KvFile kv;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error("line " + std::to_string(lineno) + ": empty key");
    kv.entries_.emplace_back(key, value);
  }
  return kv;
}

KvFile KvFile::parse(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_string(std::move(ss).str());
}

}  // namespace ccpd
