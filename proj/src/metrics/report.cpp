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

#include "mcsep/metrics/report.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "mcsep/io/wav.hpp"
#include "mcsep/model/separator.hpp"

namespace mcsep::metrics {

namespace {

Waveform to_double(const std::vector<float>& x) { return Waveform(x.begin(), x.end()); }

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string join_permutation(const std::vector<std::size_t>& p) {
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? " " : "") + std::to_string(p[i]);
  return s;
}

}  // namespace

std::size_t bucket_index(double angle) {
  if (!(angle >= 0.0 && angle <= 180.0))
    throw std::invalid_argument("angle difference " + std::to_string(angle) + " is outside [0, 180]");
  return std::min(kBucketCount - 1, static_cast<std::size_t>(std::floor(angle / kBucketWidth)));
}

MetricsReport bucket_report(std::vector<UtteranceRecord> records) {
  MetricsReport r;
  for (std::size_t b = 0; b < kBucketCount; ++b) {
    r.buckets[b].lower = kBucketWidth * double(b);
    r.buckets[b].upper = kBucketWidth * double(b + 1);
  }
  std::array<double, kBucketCount> sums{};
  double total = 0;
  for (const auto& rec : records) {
    const auto b = bucket_index(rec.angle_deg);
    ++r.buckets[b].count;
    sums[b] += rec.si_snri_db;
    total += rec.si_snri_db;
  }
  for (std::size_t b = 0; b < kBucketCount; ++b)
    if (r.buckets[b].count) r.buckets[b].mean = sums[b] / double(r.buckets[b].count);
  if (!records.empty()) r.global_mean = total / double(records.size());
  r.records = std::move(records);
  return r;
}

Utterance load_utterance(const io::ManifestRow& row) {
  Utterance u;
  u.id = row.id();
  u.angle_deg = row.angle_deg;
  const auto mix = io::read_wav(row.mixture);
  for (const auto& ch : mix.channels) u.mixture.push_back(to_double(ch));
  for (const auto& path : row.references) {
    const auto ref = io::read_wav(path);
    if (ref.channels.size() != 1) throw std::invalid_argument(path.string() + ": reference is not mono");
    if (ref.frames() != mix.frames())
      throw std::invalid_argument(path.string() + ": reference length differs from the mixture");
    u.references.push_back(to_double(ref.channels.front()));
  }
  return u;
}

System passthrough_system() {
  return {"passthrough", [](const Utterance& u) {
            return std::vector<Waveform>(u.references.size(), u.mixture.front());
          }};
}

System ibm_system(const StftOptions& options) {
  return {"ibm", [options](const Utterance& u) { return ibm_separate(u.mixture.front(), u.references, options); }};
}

System model_system(std::string name, model::Checkpoint checkpoint) {
  auto ckpt = std::make_shared<const model::Checkpoint>(std::move(checkpoint));
  return {std::move(name), [ckpt](const Utterance& u) {
            const std::size_t m = ckpt->config.mics;
            if (u.mixture.size() < m)
              throw std::invalid_argument(u.id + ": mixture has " + std::to_string(u.mixture.size()) +
                                          " channels, the model expects " + std::to_string(m));
            std::vector<std::vector<float>> channels;
            for (std::size_t c = 0; c < m; ++c) channels.emplace_back(u.mixture[c].begin(), u.mixture[c].end());
            std::vector<Waveform> out;
            for (const auto& e : model::separate(channels, ckpt->params, ckpt->config)) out.push_back(to_double(e));
            return out;
          }};
}

MetricsReport evaluate(const std::vector<Utterance>& utterances, const System& system, const EvaluateOptions& o) {
  std::vector<UtteranceRecord> records(utterances.size());
  auto run = [&](std::size_t i) {
    const auto& u = utterances[i];
    const auto estimates = system.separate(u);
    const auto s = si_snri(u.mixture.front(), estimates, u.references, o.si_snr);
    records[i] = {u.id, u.angle_deg, s.mean, s.permutation};
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(o.threads, utterances.size()));
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < utterances.size(); i += workers) run(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return bucket_report(std::move(records));
}

Comparison compare_reports(std::vector<std::string> systems, std::vector<MetricsReport> reports) {
  if (systems.size() != reports.size()) throw std::invalid_argument("compare: one name per report is required");
  if (reports.empty()) throw std::invalid_argument("compare: no systems");
  for (std::size_t s = 1; s < reports.size(); ++s) {
    const auto& a = reports.front().records;
    const auto& b = reports[s].records;
    bool same = a.size() == b.size();
    for (std::size_t i = 0; same && i < a.size(); ++i) same = a[i].id == b[i].id;
    if (!same)
      throw std::invalid_argument("compare: " + systems[s] + " was evaluated on a different manifest than " +
                                  systems.front());
  }
  return {std::move(systems), std::move(reports)};
}

Comparison compare_systems(const std::vector<io::ManifestRow>& manifest, const std::vector<System>& systems,
                           const EvaluateOptions& options) {
  if (manifest.empty()) throw std::invalid_argument("compare: the manifest is empty");
  std::vector<Utterance> utterances;
  for (const auto& row : manifest) utterances.push_back(load_utterance(row));
  std::vector<std::string> names;
  std::vector<MetricsReport> reports;
  for (const auto& s : systems) {
    names.push_back(s.name);
    reports.push_back(evaluate(utterances, s, options));
  }
  return compare_reports(std::move(names), std::move(reports));
}

std::string format_table(const Comparison& c, bool buckets) {
  std::ostringstream out;
  std::size_t width = 8;
  for (const auto& s : c.systems) width = std::max(width, s.size() + 2);
  auto pad = [&](const std::string& s, std::size_t w) { return s + std::string(w > s.size() ? w - s.size() : 1, ' '); };

  out << pad("system", width) << pad("utterances", 12) << "mean SI-SNRi (dB)\n";
  for (std::size_t s = 0; s < c.systems.size(); ++s)
    out << pad(c.systems[s], width) << pad(std::to_string(c.reports[s].records.size()), 12)
        << fixed(c.reports[s].global_mean, 2) << '\n';
  if (!buckets) return out.str();

  out << '\n' << pad("angle", 12);
  for (const auto& s : c.systems) out << pad(s, std::max<std::size_t>(width, 14));
  out << '\n';
  for (std::size_t b = 0; b < kBucketCount; ++b) {
    const auto& first = c.reports.front().buckets[b];
    const std::string range = std::string("[") + fixed(first.lower, 0) + "," + fixed(first.upper, 0) +
                              (b + 1 == kBucketCount ? "]" : ")");
    out << pad(range, 12);
    for (const auto& r : c.reports) {
      const auto& bucket = r.buckets[b];
      const std::string cell =
          bucket.count ? fixed(bucket.mean, 2) + " (" + std::to_string(bucket.count) + ")" : "- (0)";
      out << pad(cell, std::max<std::size_t>(width, 14));
    }
    out << '\n';
  }
  return out.str();
}

std::string format_csv(const Comparison& c) {
  std::ostringstream out;
  out << "system,utterance_id,angle_diff_deg,si_snri_db,permutation\n";
  for (std::size_t s = 0; s < c.systems.size(); ++s)
    for (const auto& r : c.reports[s].records)
      out << c.systems[s] << ',' << r.id << ',' << fixed(r.angle_deg, 4) << ',' << fixed(r.si_snri_db, 6) << ','
          << join_permutation(r.permutation) << '\n';
  return out.str();
}

}  // namespace mcsep::metrics
