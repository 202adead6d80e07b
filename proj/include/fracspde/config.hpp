#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fracspde/error.hpp"

namespace fracspde {

/// A config entry is missing, malformed, or unknown. field() names it.
class ConfigError : public InvalidArgument {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : InvalidArgument("config field '" + field + "': " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Flat `key = value` text, one entry per line. '#' starts a comment; lists are
/// comma separated. Every read marks the key as used so that leftovers can be
/// reported as unknown fields.
class Config {
 public:
  static Config parse(std::string_view text);
  static Config load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key) const;
  long get_int(const std::string& key, long fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& key) const;
  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;

  /// Throws ConfigError for the first key that was never read.
  void reject_unused() const;

  /// Sorted `key=value` lines; the hash is SHA-256 of this text.
  std::string canonical() const;
  std::string hash() const;
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  const std::string& raw(const std::string& key) const;

  std::map<std::string, std::string> entries_;
  mutable std::set<std::string> used_;
};

/// Shortest text that reads back to the same double; '.' decimal point.
std::string format_number(double v);

}  // namespace fracspde
