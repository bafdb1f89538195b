#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace swarm {

/// Plain-text `key = value` configuration shared by every subcommand.
///
/// One entry per line; `#` starts a comment; blank lines are ignored. List
/// values are comma separated. Every parse or conversion failure throws
/// ConfigError carrying `source:line`.
class KeyValueConfig {
public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  KeyValueConfig() = default;

  static KeyValueConfig parse(std::string_view text, std::string source = "<string>");
  static KeyValueConfig load(const std::filesystem::path& path);

  bool has(std::string_view key) const;
  const std::string& source() const { return source_; }
  const std::map<std::string, Entry, std::less<>>& entries() const { return entries_; }

  std::string get_string(std::string_view key) const;
  std::string get_string(std::string_view key, std::string fallback) const;
  double get_double(std::string_view key) const;
  double get_double(std::string_view key, double fallback) const;
  long long get_int(std::string_view key) const;
  long long get_int(std::string_view key, long long fallback) const;
  bool get_bool(std::string_view key, bool fallback) const;

  std::vector<std::string> get_list(std::string_view key) const;
  std::vector<double> get_doubles(std::string_view key) const;
  std::vector<long long> get_ints(std::string_view key) const;

  /// Integer list that also accepts `a..b` ranges, e.g. `1..15` or `0..50:10`.
  std::vector<long long> get_int_range(std::string_view key) const;

  /// Rejects any key not listed in `known`, naming its line.
  void require_known(const std::vector<std::string_view>& known) const;

  void set(std::string key, std::string value);
  std::string to_string() const;

private:
  const Entry& entry(std::string_view key) const;
  [[noreturn]] void fail(const Entry& e, std::string_view key, const std::string& msg) const;

  std::string source_ = "<string>";
  std::map<std::string, Entry, std::less<>> entries_;
};

}  // namespace swarm
