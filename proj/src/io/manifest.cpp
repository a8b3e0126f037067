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

#include "mcsep/io/manifest.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace mcsep::io {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto end = s.find(sep, start);
    out.push_back(s.substr(start, end - start));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

std::string relative_to(const std::filesystem::path& p, const std::filesystem::path& base) {
  if (base.empty()) return p.generic_string();
  const auto rel = p.lexically_proximate(base);
  const auto s = rel.generic_string();
  if (s.rfind("..", 0) == 0) return p.generic_string();
  return s;
}

}  // namespace

std::vector<ManifestRow> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest " + path.string());
  const auto base = path.parent_path();
  std::vector<ManifestRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split(line, '\t');
    auto fail = [&](const std::string& what) {
      return std::invalid_argument(path.string() + ":" + std::to_string(line_no) + ": " + what);
    };
    if (fields.size() < 6) throw fail("expected at least 6 tab-separated fields");
    ManifestRow row;
    auto resolve = [&](const std::string& s) {
      std::filesystem::path p(s);
      return p.is_absolute() ? p : base / p;
    };
    row.mixture = resolve(fields[0]);
    for (const auto& r : split(fields[1], ',')) row.references.push_back(resolve(r));
    try {
      std::size_t used = 0;
      row.snr_db = std::stod(fields[2], &used);
      row.t60_s = std::stod(fields[3], &used);
      row.angle_deg = std::stod(fields[4], &used);
      row.seed = std::stoull(fields[5], &used);
    } catch (const std::exception&) {
      throw fail("malformed numeric field");
    }
    if (fields.size() > 6 && !fields[6].empty()) row.speakers = split(fields[6], ',');
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestRow>& rows) {
  const auto base = path.parent_path();
  std::ostringstream out;
  out << "# mixture\treferences\tsnr_db\tt60_s\tangle_deg\tseed\tspeakers\n";
  out << std::setprecision(10);
  for (const auto& row : rows) {
    out << relative_to(row.mixture, base) << '\t';
    for (std::size_t i = 0; i < row.references.size(); ++i)
      out << (i ? "," : "") << relative_to(row.references[i], base);
    out << '\t' << row.snr_db << '\t' << row.t60_s << '\t' << row.angle_deg << '\t' << row.seed << '\t';
    for (std::size_t i = 0; i < row.speakers.size(); ++i) out << (i ? "," : "") << row.speakers[i];
    out << '\n';
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream file(tmp, std::ios::trunc);
    if (!file) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    file << out.str();
    if (!file) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace mcsep::io
