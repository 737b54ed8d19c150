#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace weaklab {

/// Flat key-value store read from an INI-style file:
///
///   # comment
///   seeds = 1 2 3
///   [loss]
///   q = 0.7          -> key "loss.q"
///
/// Values are strings; typed getters throw std::invalid_argument on
/// malformed input. Lookups are recorded so callers can reject unknown keys.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in);
  static KeyValueConfig load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::size_t get_size(const std::string& key, std::size_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  /// Whitespace- or comma-separated list.
  std::vector<std::string> get_list(const std::string& key,
                                    const std::vector<std::string>& fallback) const;
  std::vector<double> get_doubles(const std::string& key,
                                  const std::vector<double>& fallback) const;
  std::vector<std::uint64_t> get_seeds(const std::string& key,
                                       const std::vector<std::uint64_t>& fallback) const;

  /// Keys that were set but never looked up.
  std::vector<std::string> unused_keys() const;

 private:
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

double parse_double(const std::string& text, const std::string& what);
std::size_t parse_size(const std::string& text, const std::string& what);

}  // namespace weaklab
