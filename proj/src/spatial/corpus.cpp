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

#include "mcsep/spatial/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "mcsep/io/wav.hpp"

namespace mcsep::spatial {

namespace {

const std::set<std::string> kKeys{"count",   "mics",  "speakers",   "seconds",      "reverberant", "t60_min",
                                  "t60_max", "snr_min", "snr_max",  "seed",         "split",       "source",
                                  "source_dir", "speaker_pool", "threads"};

std::string sample_name(const CorpusConfig& c, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%06zu", index);
  return c.split + buf;
}

}  // namespace

void CorpusConfig::validate() const {
  auto bad = [](const std::string& key, const std::string& why) {
    return io::ConfigError("corpus config: " + key + " " + why);
  };
  if (count == 0) throw bad("count", "must be positive");
  if (mics == 0) throw bad("mics", "must be positive");
  if (speakers < 2) throw bad("speakers", "must be at least 2");
  if (!(seconds > 0)) throw bad("seconds", "must be positive");
  if (reverberant && !(t60_min >= 0.2 && t60_max <= 0.6 && t60_min <= t60_max))
    throw bad("t60_min/t60_max", "must satisfy 0.2 <= t60_min <= t60_max <= 0.6");
  if (!(snr_min >= -5.0 && snr_max <= 5.0 && snr_min <= snr_max))
    throw bad("snr_min/snr_max", "must satisfy -5 <= snr_min <= snr_max <= 5");
  if (source != "synthetic" && source != "folder") throw bad("source", "must be synthetic or folder");
  if (source == "folder" && source_dir.empty()) throw bad("source_dir", "is required for source = folder");
  if (speaker_pool < speakers) throw bad("speaker_pool", "must hold at least as many speakers as a mixture");
  if (threads == 0) throw bad("threads", "must be positive");
  if (split.empty() || split.find_first_of("/\\\t ,") != std::string::npos)
    throw bad("split", "must be a plain name");
  if (!(peak > 0 && peak <= 1)) throw bad("peak", "must lie in (0, 1]");
}

CorpusConfig corpus_config_from(const io::KeyValues& kv, const CorpusConfig& d) {
  for (const auto& [key, value] : kv.values())
    if (!kKeys.count(key)) throw io::ConfigError("corpus config: unknown key '" + key + "'");
  CorpusConfig c = d;
  c.count = kv.get_size("count", d.count);
  c.mics = kv.get_size("mics", d.mics);
  c.speakers = kv.get_size("speakers", d.speakers);
  c.seconds = kv.get_double("seconds", d.seconds);
  c.reverberant = kv.get_bool("reverberant", d.reverberant);
  c.t60_min = kv.get_double("t60_min", d.t60_min);
  c.t60_max = kv.get_double("t60_max", d.t60_max);
  c.snr_min = kv.get_double("snr_min", d.snr_min);
  c.snr_max = kv.get_double("snr_max", d.snr_max);
  c.seed = static_cast<std::uint64_t>(kv.get_int("seed", static_cast<std::int64_t>(d.seed)));
  c.split = kv.get_string("split", d.split);
  c.source = kv.get_string("source", d.source);
  c.source_dir = kv.get_string("source_dir", d.source_dir.string());
  c.speaker_pool = kv.get_size("speaker_pool", d.speaker_pool);
  c.threads = kv.get_size("threads", d.threads);
  c.validate();
  return c;
}

std::string serialize(const CorpusConfig& c) {
  std::ostringstream out;
  out.precision(17);
  out << "count = " << c.count << "\nmics = " << c.mics << "\nspeakers = " << c.speakers << "\nseconds = " << c.seconds
      << "\nreverberant = " << (c.reverberant ? "on" : "off") << "\nt60_min = " << c.t60_min
      << "\nt60_max = " << c.t60_max << "\nsnr_min = " << c.snr_min << "\nsnr_max = " << c.snr_max
      << "\nseed = " << c.seed << "\nsplit = " << c.split << "\nsource = " << c.source << '\n';
  if (!c.source_dir.empty()) out << "source_dir = " << c.source_dir.string() << '\n';
  out << "speaker_pool = " << c.speaker_pool << "\nthreads = " << c.threads << '\n';
  return out.str();
}

std::unique_ptr<SourceProvider> make_provider(const CorpusConfig& c) {
  if (c.source == "folder") return std::make_unique<WavFolder>(c.source_dir, c.sample_rate);
  return std::make_unique<SyntheticSpeech>(c.split, c.speaker_pool, c.sample_rate);
}

GeneratedSample generate_sample(const CorpusConfig& c, const SourceProvider& provider, std::size_t index) {
  GeneratedSample g;
  g.seed = util::child_seed(c.seed, "sample", index);
  util::Rng rng(g.seed);
  GeometryLimits limits;
  limits.t60_min = c.t60_min;
  limits.t60_max = c.t60_max;
  g.scene = sample_geometry(rng, c.mics, c.speakers, c.reverberant, limits);
  const double snr = util::uniform(rng, c.snr_min, c.snr_max);

  // Distinct speakers, drawn without replacement.
  auto pool = provider.speakers();
  if (pool.size() < c.speakers) throw std::invalid_argument("source provider has too few speakers");
  for (std::size_t k = 0; k < c.speakers; ++k) {
    const auto pick = k + util::uniform_index(rng, pool.size() - k);
    std::swap(pool[k], pool[pick]);
    g.speakers.push_back(pool[k]);
  }
  const auto length = static_cast<std::size_t>(std::lround(c.seconds * c.sample_rate));
  std::vector<Signal> dry;
  for (const auto& spk : g.speakers) dry.push_back(provider.utterance(spk, length, rng));

  RirOptions options;
  options.sample_rate = c.sample_rate;
  g.mixture = mix(dry, g.scene, simulate_rirs(g.scene, options), snr);
  return g;
}

std::vector<io::ManifestRow> generate_corpus(const CorpusConfig& c, const SourceProvider& provider,
                                             const std::filesystem::path& out_dir) {
  c.validate();
  namespace fs = std::filesystem;
  fs::create_directories(out_dir / "mix");
  fs::create_directories(out_dir / "ref");

  std::vector<io::ManifestRow> rows(c.count);
  auto produce = [&](std::size_t i) {
    const auto g = generate_sample(c, provider, i);
    const auto& s = g.mixture;
    double peak = 0;
    for (const auto& ch : s.mixture)
      for (double v : ch) peak = std::max(peak, std::abs(v));
    for (const auto& r : s.references)
      for (double v : r) peak = std::max(peak, std::abs(v));
    const double gain = peak > c.peak ? c.peak / peak : 1.0;
    auto to_float = [&](const Signal& x) {
      std::vector<float> out(x.size());
      for (std::size_t j = 0; j < x.size(); ++j) out[j] = static_cast<float>(x[j] * gain);
      return out;
    };

    const std::string name = sample_name(c, i);
    io::ManifestRow& row = rows[i];
    row.mixture = out_dir / "mix" / (name + ".wav");
    io::Audio mixture{c.sample_rate, {}};
    for (const auto& ch : s.mixture) mixture.channels.push_back(to_float(ch));
    io::write_wav(row.mixture, mixture);
    for (std::size_t k = 0; k < s.references.size(); ++k) {
      row.references.push_back(out_dir / "ref" / (name + "_s" + std::to_string(k + 1) + ".wav"));
      io::write_wav(row.references.back(), io::Audio{c.sample_rate, {to_float(s.references[k])}});
    }
    row.snr_db = s.snr_db;
    row.t60_s = s.t60;
    row.angle_deg = s.angle_deg;
    row.seed = g.seed;
    row.speakers = g.speakers;
  };

  const std::size_t workers = std::min(c.threads, c.count);
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < c.count; i += workers) produce(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  io::write_manifest(out_dir / "manifest.tsv", rows);
  return rows;
}

}  // namespace mcsep::spatial
