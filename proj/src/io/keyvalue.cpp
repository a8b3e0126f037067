// Copyright 2026 The mcsep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mcsep/io/keyvalue.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mcsep::io {

namespace {
std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}
}  // namespace

KeyValues KeyValues::parse(const std::string& text, const std::string& origin) {
  KeyValues kv;
  kv.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    if (!kv.values_.emplace(key, value).second)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
  }
  return kv;
}

KeyValues KeyValues::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

std::optional<std::string> KeyValues::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValues::get_string(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

std::int64_t KeyValues::get_int(const std::string& key, std::int64_t fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  char* end = nullptr;
  errno = 0;
  const long long out = std::strtoll(v->c_str(), &end, 10);
  if (errno != 0 || end == v->c_str() || *end != '\0')
    throw ConfigError("config key '" + key + "': expected an integer, got '" + *v + "'");
  return out;
}

std::size_t KeyValues::get_size(const std::string& key, std::size_t fallback) const {
  const auto v = get_int(key, static_cast<std::int64_t>(fallback));
  if (v < 0) throw ConfigError("config key '" + key + "': must not be negative");
  return static_cast<std::size_t>(v);
}

double KeyValues::get_double(const std::string& key, double fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  char* end = nullptr;
  errno = 0;
  const double out = std::strtod(v->c_str(), &end);
  if (errno != 0 || end == v->c_str() || *end != '\0')
    throw ConfigError("config key '" + key + "': expected a number, got '" + *v + "'");
  return out;
}

bool KeyValues::get_bool(const std::string& key, bool fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  if (*v == "on" || *v == "true" || *v == "yes" || *v == "1") return true;
  if (*v == "off" || *v == "false" || *v == "no" || *v == "0") return false;
  throw ConfigError("config key '" + key + "': expected on/off, got '" + *v + "'");
}

std::string KeyValues::to_string() const {
  std::ostringstream os;
  for (const auto& [k, v] : values_) os << k << " = " << v << '\n';
  return os.str();
}

}  // namespace mcsep::io
