#include "fracspde/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

namespace fracspde {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw ConfigError(key, "expected a finite number, got '" + std::string(text) + "'");
  return v;
}

template <class Int>
Int parse_integer(const std::string& key, std::string_view text) {
  text = trim(text);
  Int v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError(key, "expected an integer, got '" + std::string(text) + "'");
  return v;
}

}  // namespace

Config Config::parse(std::string_view text) {
  Config c;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(line_no);
    if (eq == std::string_view::npos) throw ConfigError(where, "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError(where, "empty key");
    if (value.empty()) throw ConfigError(key, "empty value");
    if (!c.entries_.emplace(key, value).second) throw ConfigError(key, "given twice");
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("--config", "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void Config::set(const std::string& key, const std::string& value) { entries_[key] = value; }

bool Config::has(const std::string& key) const { return entries_.count(key) != 0; }

const std::string& Config::raw(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError(key, "missing");
  used_.insert(key);
  return it->second;
}

std::string Config::get_string(const std::string& key) const { return raw(key); }

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? raw(key) : fallback;
}

double Config::get_double(const std::string& key) const { return parse_double(key, raw(key)); }

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long Config::get_int(const std::string& key) const { return parse_integer<long>(key, raw(key)); }

long Config::get_int(const std::string& key, long fallback) const { return has(key) ? get_int(key) : fallback; }

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  return has(key) ? parse_integer<std::uint64_t>(key, raw(key)) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& v = raw(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key, "expected true or false, got '" + v + "'");
}

std::vector<double> Config::get_list(const std::string& key) const {
  std::string_view rest = raw(key);
  std::vector<double> out;
  while (true) {
    const auto comma = rest.find(',');
    out.push_back(parse_double(key, rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return out;
}

std::vector<double> Config::get_list(const std::string& key, const std::vector<double>& fallback) const {
  return has(key) ? get_list(key) : fallback;
}

void Config::reject_unused() const {
  for (const auto& [key, value] : entries_)
    if (!used_.count(key)) throw ConfigError(key, "unknown for this command");
}

std::string Config::canonical() const {
  std::string s;
  for (const auto& [key, value] : entries_) s += key + "=" + value + "\n";
  return s;
}

std::string Config::hash() const {
  const std::string text = canonical();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace fracspde
