#include "config.hpp"

#include <fstream>
#include <sstream>

namespace crplab::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

Config Config::parse(const std::string& text, const std::string& origin) {
  Config c;
  c.origin_ = origin;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    const std::string where = origin + ":" + std::to_string(line) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value, got '" + s + "'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + "missing key before '='");
    if (c.entries_.count(key))
      throw ConfigError(where + "duplicate key '" + key + "' (first set on line " +
                        std::to_string(c.entries_[key].line) + ")");
    c.entries_[key] = {value, line};
  }
  return c;
}

void Config::fail(const std::string& key, const std::string& message) const {
  auto it = entries_.find(key);
  const int line = it == entries_.end() ? 0 : it->second.line;
  throw ConfigError(origin_ + ":" + std::to_string(line) + ": " + message);
}

}  // namespace crplab::cli
