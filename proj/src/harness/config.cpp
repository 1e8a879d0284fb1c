#include "fractint/harness/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>

#include <fmt/format.h>

namespace fractint {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string strip_comment(const std::string& s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((s[i] == '#' || s[i] == ';') && (i == 0 || std::isspace(static_cast<unsigned char>(s[i - 1])))) {
      return s.substr(0, i);
    }
  }
  return s;
}

bool valid_name(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

}  // namespace

Config Config::parse(std::istream& in, std::string source) {
  Config cfg;
  cfg.source_ = std::move(source);
  std::string section = "run";
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(fmt::format("{}:{}: unterminated section header", cfg.source_, line));
      section = trim(s.substr(1, s.size() - 2));
      if (!valid_name(section)) throw ConfigError(fmt::format("{}:{}: bad section name '{}'", cfg.source_, line, section));
      cfg.sections_[section];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("{}:{}: expected key = value", cfg.source_, line));
    const std::string key = trim(s.substr(0, eq));
    if (!valid_name(key)) throw ConfigError(fmt::format("{}:{}: bad key '{}'", cfg.source_, line, key));
    auto& entries = cfg.sections_[section];
    if (entries.count(key)) {
      throw ConfigError(fmt::format("{}:{}: duplicate key [{}] {} (first on line {})", cfg.source_, line, section, key,
                                    entries[key].line));
    }
    entries[key] = Entry{trim(s.substr(eq + 1)), line};
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
  return parse(in, path.string());
}

bool Config::has_section(const std::string& section) const { return sections_.count(section) > 0; }

bool Config::has(const std::string& section, const std::string& key) const {
  const auto it = sections_.find(section);
  return it != sections_.end() && it->second.count(key) > 0;
}

void Config::fail(const std::string& section, const std::string& key, const std::string& what) const {
  if (has(section, key)) {
    throw ConfigError(fmt::format("{}:{}: [{}] {}: {}", source_, sections_.at(section).at(key).line, section, key, what));
  }
  throw ConfigError(fmt::format("{}: [{}] {}: {}", source_, section, key, what));
}

const Config::Entry& Config::entry(const std::string& section, const std::string& key) const {
  if (!has(section, key)) fail(section, key, "missing");
  used_.insert({section, key});
  return sections_.at(section).at(key);
}

std::string Config::text(const std::string& section, const std::string& key) const {
  return entry(section, key).value;
}

std::string Config::text_or(const std::string& section, const std::string& key, const std::string& fallback) const {
  return has(section, key) ? text(section, key) : fallback;
}

double Config::number(const std::string& section, const std::string& key) const {
  const std::string& v = entry(section, key).value;
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  fail(section, key, fmt::format("'{}' is not a number", v));
}

double Config::number_or(const std::string& section, const std::string& key, double fallback) const {
  return has(section, key) ? number(section, key) : fallback;
}

long long Config::integer(const std::string& section, const std::string& key) const {
  const std::string& v = entry(section, key).value;
  long long x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) fail(section, key, fmt::format("'{}' is not an integer", v));
  return x;
}

long long Config::integer_or(const std::string& section, const std::string& key, long long fallback) const {
  return has(section, key) ? integer(section, key) : fallback;
}

bool Config::flag_or(const std::string& section, const std::string& key, bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = text(section, key);
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  fail(section, key, fmt::format("'{}' is not a boolean", v));
}

std::vector<std::string> Config::words(const std::string& section, const std::string& key) const {
  std::string v = text(section, key);
  std::replace(v.begin(), v.end(), ',', ' ');
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < v.size()) {
    while (i < v.size() && v[i] == ' ') ++i;
    std::size_t j = i;
    while (j < v.size() && v[j] != ' ') ++j;
    if (j > i) out.push_back(v.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<double> Config::numbers(const std::string& section, const std::string& key) const {
  std::vector<double> out;
  for (const std::string& w : words(section, key)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(w, &used));
      if (used != w.size()) throw std::invalid_argument(w);
    } catch (const std::exception&) {
      fail(section, key, fmt::format("'{}' is not a number", w));
    }
  }
  if (out.empty()) fail(section, key, "empty list");
  return out;
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  auto& e = sections_[section][key];
  e.value = value;
}

std::string Config::canonical() const {
  std::string out;
  for (const auto& [section, entries] : sections_) {
    for (const auto& [key, e] : entries) out += fmt::format("[{}] {} = {}\n", section, key, e.value);
  }
  return out;
}

std::vector<std::string> Config::unused() const {
  std::vector<std::string> out;
  for (const auto& [section, entries] : sections_) {
    for (const auto& [key, e] : entries) {
      if (!used_.count({section, key})) out.push_back(fmt::format("{}:{}: [{}] {}", source_, e.line, section, key));
    }
  }
  return out;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace fractint
