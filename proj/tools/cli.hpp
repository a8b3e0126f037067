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

// Command layer of the mcsep tool. Each command validates its inputs, writes
// its artifacts plus a JSON run manifest next to them, and reports failures
// through the exit status.

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace mcsep::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2 };

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::string config;  // resolved key = value text
  std::uint64_t seed = 0;
  std::vector<std::filesystem::path> inputs;
  std::vector<std::filesystem::path> outputs;
  double seconds = 0;
};

void write_run_manifest(const std::filesystem::path& path, const RunManifest& manifest);

std::string version();

}  // namespace mcsep::cli
