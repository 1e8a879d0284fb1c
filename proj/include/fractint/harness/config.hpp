#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fractint/error.hpp"

namespace fractint {

// Raised with the source name and line of the offending entry.
class ConfigError : public FormatError {
 public:
  using FormatError::FormatError;
};

// Line-oriented "key = value" text with [section] headers. Keys before the
// first header belong to section "run". '#' and ';' start comments.
class Config {
 public:
  static Config parse(std::istream& in, std::string source = "<config>");
  static Config load(const std::filesystem::path& path);

  bool has_section(const std::string& section) const;
  bool has(const std::string& section, const std::string& key) const;

  std::string text(const std::string& section, const std::string& key) const;
  std::string text_or(const std::string& section, const std::string& key, const std::string& fallback) const;
  double number(const std::string& section, const std::string& key) const;
  double number_or(const std::string& section, const std::string& key, double fallback) const;
  long long integer(const std::string& section, const std::string& key) const;
  long long integer_or(const std::string& section, const std::string& key, long long fallback) const;
  bool flag_or(const std::string& section, const std::string& key, bool fallback) const;
  // Whitespace- or comma-separated numbers.
  std::vector<double> numbers(const std::string& section, const std::string& key) const;
  std::vector<std::string> words(const std::string& section, const std::string& key) const;

  void set(const std::string& section, const std::string& key, const std::string& value);

  // Sorted "[section] key = value" lines; the basis of the config hash.
  std::string canonical() const;
  // Entries never read, as "source:line: [section] key" strings.
  std::vector<std::string> unused() const;
  // Throws ConfigError naming the entry.
  [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& what) const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  const Entry& entry(const std::string& section, const std::string& key) const;

  std::string source_;
  std::map<std::string, std::map<std::string, Entry>> sections_;
  mutable std::set<std::pair<std::string, std::string>> used_;
};

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace fractint
