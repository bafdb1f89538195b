#include "swarm/config.hpp"

#include "swarm/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace swarm {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  s = trim(s);
  T value{};
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc{} || ptr != end || s.empty()) return std::nullopt;
  return value;
}

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const auto comma = value.find(',', start);
    const auto piece = trim(value.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (!piece.empty()) out.emplace_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text, std::string source) {
  KeyValueConfig cfg;
  cfg.source_ = std::move(source);
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw ConfigError(cfg.source_ + ":" + std::to_string(line_no) + ": expected 'key = value'");
      }
      const std::string key(trim(line.substr(0, eq)));
      const std::string value(trim(line.substr(eq + 1)));
      if (key.empty()) {
        throw ConfigError(cfg.source_ + ":" + std::to_string(line_no) + ": empty key");
      }
      if (auto it = cfg.entries_.find(key); it != cfg.entries_.end()) {
        throw ConfigError(cfg.source_ + ":" + std::to_string(line_no) + ": duplicate key '" + key +
                          "' (first set on line " + std::to_string(it->second.line) + ")");
      }
      cfg.entries_.emplace(key, Entry{value, line_no});
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

bool KeyValueConfig::has(std::string_view key) const { return entries_.find(key) != entries_.end(); }

const KeyValueConfig::Entry& KeyValueConfig::entry(std::string_view key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError(source_ + ": missing required key '" + std::string(key) + "'");
  return it->second;
}

void KeyValueConfig::fail(const Entry& e, std::string_view key, const std::string& msg) const {
  throw ConfigError(source_ + ":" + std::to_string(e.line) + ": key '" + std::string(key) + "': " + msg);
}

std::string KeyValueConfig::get_string(std::string_view key) const { return entry(key).value; }

std::string KeyValueConfig::get_string(std::string_view key, std::string fallback) const {
  return has(key) ? entry(key).value : std::move(fallback);
}

double KeyValueConfig::get_double(std::string_view key) const {
  const auto& e = entry(key);
  const auto v = parse_number<double>(e.value);
  if (!v) fail(e, key, "expected a number, got '" + e.value + "'");
  return *v;
}

double KeyValueConfig::get_double(std::string_view key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long long KeyValueConfig::get_int(std::string_view key) const {
  const auto& e = entry(key);
  const auto v = parse_number<long long>(e.value);
  if (!v) fail(e, key, "expected an integer, got '" + e.value + "'");
  return *v;
}

long long KeyValueConfig::get_int(std::string_view key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool KeyValueConfig::get_bool(std::string_view key, bool fallback) const {
  if (!has(key)) return fallback;
  const auto& e = entry(key);
  if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no") return false;
  fail(e, key, "expected true/false, got '" + e.value + "'");
}

std::vector<std::string> KeyValueConfig::get_list(std::string_view key) const {
  return split_list(entry(key).value);
}

std::vector<double> KeyValueConfig::get_doubles(std::string_view key) const {
  const auto& e = entry(key);
  std::vector<double> out;
  for (const auto& item : split_list(e.value)) {
    const auto v = parse_number<double>(item);
    if (!v) fail(e, key, "expected a number list, bad item '" + item + "'");
    out.push_back(*v);
  }
  return out;
}

std::vector<long long> KeyValueConfig::get_ints(std::string_view key) const {
  const auto& e = entry(key);
  std::vector<long long> out;
  for (const auto& item : split_list(e.value)) {
    const auto v = parse_number<long long>(item);
    if (!v) fail(e, key, "expected an integer list, bad item '" + item + "'");
    out.push_back(*v);
  }
  return out;
}

std::vector<long long> KeyValueConfig::get_int_range(std::string_view key) const {
  const auto& e = entry(key);
  std::vector<long long> out;
  for (const auto& item : split_list(e.value)) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      const auto v = parse_number<long long>(item);
      if (!v) fail(e, key, "bad integer '" + item + "'");
      out.push_back(*v);
      continue;
    }
    std::string_view rest = std::string_view(item).substr(dots + 2);
    long long stride = 1;
    if (const auto colon = rest.find(':'); colon != std::string_view::npos) {
      const auto s = parse_number<long long>(rest.substr(colon + 1));
      if (!s || *s <= 0) fail(e, key, "bad range stride in '" + item + "'");
      stride = *s;
      rest = rest.substr(0, colon);
    }
    const auto lo = parse_number<long long>(std::string_view(item).substr(0, dots));
    const auto hi = parse_number<long long>(rest);
    if (!lo || !hi || *hi < *lo) fail(e, key, "bad range '" + item + "'");
    for (long long v = *lo; v <= *hi; v += stride) out.push_back(v);
  }
  return out;
}

void KeyValueConfig::require_known(const std::vector<std::string_view>& known) const {
  for (const auto& [key, e] : entries_) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      fail(e, key, "unknown key");
    }
  }
}

void KeyValueConfig::set(std::string key, std::string value) {
  entries_[std::move(key)] = Entry{std::move(value), 0};
}

std::string KeyValueConfig::to_string() const {
  std::string out;
  for (const auto& [key, e] : entries_) out += key + " = " + e.value + "\n";
  return out;
}

}  // namespace swarm
