#pragma once

#include <map>
#include <stdexcept>
#include <string>

namespace crplab::cli {

// key = value lines; '#' starts a comment; blank lines are skipped.
struct ConfigEntry {
  std::string value;
  int line = 0;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Config {
 public:
  static Config load(const std::string& path);
  static Config parse(const std::string& text, const std::string& origin);

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  const std::map<std::string, ConfigEntry>& entries() const { return entries_; }
  const std::string& origin() const { return origin_; }
  // "<origin>:<line>: <message>"
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

 private:
  std::string origin_;
  std::map<std::string, ConfigEntry> entries_;
};

}  // namespace crplab::cli
