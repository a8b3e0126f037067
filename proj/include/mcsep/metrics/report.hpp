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

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "mcsep/io/manifest.hpp"
#include "mcsep/metrics/metrics.hpp"
#include "mcsep/model/checkpoint.hpp"

namespace mcsep::metrics {

inline constexpr std::size_t kBucketCount = 12;
inline constexpr double kBucketWidth = 15.0;

/// Left-closed 15 degree buckets; 180 falls in the last one. Throws
/// std::invalid_argument outside [0, 180].
std::size_t bucket_index(double angle_deg);

struct UtteranceRecord {
  std::string id;
  double angle_deg = 0;
  double si_snri_db = 0;
  std::vector<std::size_t> permutation;
};

struct BucketSummary {
  double lower = 0, upper = 0;
  std::size_t count = 0;
  double mean = 0;  // 0 when empty
};

struct MetricsReport {
  std::vector<UtteranceRecord> records;
  std::array<BucketSummary, kBucketCount> buckets{};
  double global_mean = 0;
};

MetricsReport bucket_report(std::vector<UtteranceRecord> records);

struct Utterance {
  std::string id;
  std::vector<Waveform> mixture;  // all channels
  std::vector<Waveform> references;
  double angle_deg = 0;
};

Utterance load_utterance(const io::ManifestRow& row);

struct System {
  std::string name;
  std::function<std::vector<Waveform>(const Utterance&)> separate;
};

/// Returns the reference-channel mixture once per speaker.
System passthrough_system();
System ibm_system(const StftOptions& options = {});
/// Feeds the first M mixture channels to the model.
System model_system(std::string name, model::Checkpoint checkpoint);

struct EvaluateOptions {
  train::SiSnrOptions si_snr;
  std::size_t threads = 1;
};

MetricsReport evaluate(const std::vector<Utterance>& utterances, const System& system,
                       const EvaluateOptions& options = {});

struct Comparison {
  std::vector<std::string> systems;
  std::vector<MetricsReport> reports;
};

/// Throws std::invalid_argument when the reports cover different utterances.
Comparison compare_reports(std::vector<std::string> systems, std::vector<MetricsReport> reports);

/// Throws std::invalid_argument on an empty manifest.
Comparison compare_systems(const std::vector<io::ManifestRow>& manifest, const std::vector<System>& systems,
                           const EvaluateOptions& options = {});

std::string format_table(const Comparison& comparison, bool buckets);
/// Columns: system, utterance_id, angle_diff_deg, si_snri_db, permutation.
std::string format_csv(const Comparison& comparison);

}  // namespace mcsep::metrics
