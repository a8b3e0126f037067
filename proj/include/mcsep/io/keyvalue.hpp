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

#pragma once

// Minimal "key = value" text format used for model, training and corpus
// configuration. Blank lines and text after '#' are ignored. Keys are case
// sensitive; a repeated key is an error.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

namespace mcsep::io {

/// Bad configuration; what() names the offending key or line.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class KeyValues {
 public:
  static KeyValues parse(const std::string& text, const std::string& origin = "<text>");
  static KeyValues load(const std::filesystem::path& path);

  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::optional<std::string> get(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::size_t get_size(const std::string& key, std::size_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  /// Accepts on/off, true/false, yes/no, 1/0.
  bool get_bool(const std::string& key, bool fallback) const;

  std::string to_string() const;

 private:
  std::string origin_;
  std::map<std::string, std::string> values_;
};

}  // namespace mcsep::io
