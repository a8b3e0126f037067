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

// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. `acceptance --only 8,9` runs a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mcsep/core/gradcheck.hpp"
#include "mcsep/core/ops.hpp"
#include "mcsep/core/segment.hpp"
#include "mcsep/metrics/metrics.hpp"
#include "mcsep/metrics/report.hpp"
#include "mcsep/model/parameters.hpp"
#include "mcsep/model/separator.hpp"
#include "mcsep/spatial/corpus.hpp"
#include "mcsep/spatial/geometry.hpp"
#include "mcsep/spatial/mixer.hpp"
#include "mcsep/spatial/rir.hpp"
#include "mcsep/train/cstl.hpp"
#include "mcsep/train/loss.hpp"
#include "mcsep/train/trainer.hpp"
#include "test_util.hpp"

namespace {

using namespace mcsep;
using core::Tensor;
using model::ModelConfig;
using model::Variant;
using Clock = std::chrono::steady_clock;
using Inputs = std::vector<Tensor<double>>;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---- 1: gradients

struct Projector {
  std::vector<double> weights;
  Tensor<double> operator()(const Tensor<double>& t) {
    if (weights.size() != t.numel()) {
      std::mt19937_64 rng(t.numel() + 17);
      weights = testing::random_values<double>(t.numel(), rng);
    }
    return core::weighted_sum<double>(t, weights);
  }
};

double gradcheck(const core::ScalarGraph& f, Inputs in) { return core::finite_diff_check(f, in, 1e-5).max_relative_error; }

Verdict gradients() {
  const auto start = Clock::now();
  std::mt19937_64 rng(101);
  auto rt = [&](core::Shape s) { return testing::random_tensor<double>(std::move(s), rng); };
  std::vector<std::pair<std::string, double>> ops;
  auto record = [&](const std::string& name, double err) {
    for (auto& [n, e] : ops)
      if (n == name) {
        e = std::max(e, err);
        return;
      }
    ops.emplace_back(name, err);
  };
  for (int trial = 0; trial < 5; ++trial) {
    Projector p;
    record("matmul", gradcheck([&](const Inputs& in) { return p(core::matmul(in[0], in[1])); },
                               {rt({3, 4}), rt({4, std::size_t(5 + trial)})}));
    for (std::size_t groups : {1u, 2u, 4u}) {
      const std::size_t out = groups == 4 ? 4 : 2 * groups;
      const std::size_t taps = groups == 1 && trial % 2 == 0 ? 1 : 3, dil = 1 + trial % 3;
      record("conv1d", gradcheck([&](const Inputs& in) { return p(core::conv1d(in[0], in[1], in[2], dil, groups)); },
                                 {rt({4, 9}), rt({out, 4 / groups, taps}), rt({out})}));
    }
    for (std::size_t groups : {1u, 2u})
      record("global_layer_norm",
             gradcheck([&](const Inputs& in) { return p(core::global_layer_norm(in[0], in[1], in[2], 1e-8, groups)); },
                       {rt({4, 7}), rt({4, 1}), rt({4, 1})}));
    record("prelu", gradcheck([&](const Inputs& in) { return p(core::prelu(in[0], in[1])); },
                              {Tensor<double>({12}, testing::away_from_zero(12, rng)), Tensor<double>::scalar(0.25)}));
    record("sigmoid", gradcheck([&](const Inputs& in) { return p(core::sigmoid(in[0])); }, {rt({3, 6})}));
    record("concat/add/mul/scale/slice", gradcheck(
                                             [&](const Inputs& in) {
                                               auto c = core::concat_channels<double>({in[0], in[1]});
                                               auto m = core::mul(c, core::scale(c, 0.5));
                                               return p(core::add(core::slice_rows(m, 1, 2), in[2]));
                                             },
                                             {rt({2, 6}), rt({1, 6}), rt({2, 6})}));
    record("sum/add_scalars", gradcheck(
                                  [&](const Inputs& in) {
                                    return core::add_scalars<double>({core::sum(in[0]), core::sum(core::mul(in[0], in[0]))});
                                  },
                                  {rt({5})}));
    const std::size_t n = 11 + 3 * trial, len = 2 + trial, hop = 1 + trial % len;
    record("segment/overlap_add", gradcheck(
                                      [&](const Inputs& in) {
                                        auto seg = core::segment(in[0], len, hop);
                                        seg.data = core::mul(seg.data, in[1]);
                                        return p(core::overlap_add(seg));
                                      },
                                      {rt({n}), rt({len, core::segment_count(n, len, hop)})}));
    const auto ref = testing::random_values<double>(40, rng);
    for (bool zm : {true, false})
      record("si_snr", gradcheck([&](const Inputs& in) { return train::si_snr<double>(in[0], ref, {zm, 60}); },
                                 {rt({40})}));
    const std::vector<std::vector<double>> refs{testing::random_values<double>(30, rng),
                                                testing::random_values<double>(30, rng)};
    record("pit_loss", gradcheck([&](const Inputs& in) { return train::pit_loss<double>(in, refs).loss; },
                                 {rt({30}), rt({30})}));
  }
  double worst_op = 0;
  std::string worst_name;
  for (const auto& [n, e] : ops)
    if (e >= worst_op) {
      worst_op = e;
      worst_name = n;
    }

  double worst_model = 0;
  for (auto v : {Variant::single, Variant::early_fusion, Variant::late_fusion}) {
    ModelConfig c;
    c.variant = v;
    c.mics = v == Variant::single ? 1 : 2;
    c.window = 4;
    c.bases = 8;
    c.bottleneck = 4;
    c.skip = 4;
    c.hidden = 8;
    c.blocks = 2;
    c.repeats = 1;
    const auto init = model::init_parameters<double>(c, 31);
    std::vector<Tensor<double>> x;
    for (std::size_t m = 0; m < c.mics; ++m) x.emplace_back(core::Shape{20}, testing::random_values<double>(20, rng));
    const std::vector<std::vector<double>> refs{testing::random_values<double>(20, rng),
                                                testing::random_values<double>(20, rng)};
    Inputs inputs;
    std::vector<std::string> names;
    for (const auto& [name, t] : init.entries()) {
      names.push_back(name);
      inputs.emplace_back(t.shape(), std::vector<double>(t.data().begin(), t.data().end()), true);
    }
    core::ScalarGraph graph = [&](const Inputs& in) {
      model::ParameterSet<double> p;
      for (std::size_t i = 0; i < in.size(); ++i) p.add(names[i], in[i]);
      return train::pit_loss<double>(model::forward(x, p, c).estimates, refs).loss;
    };
    worst_model = std::max(worst_model, core::finite_diff_check(graph, inputs, 1e-5).max_relative_error);
  }
  const double secs = seconds_since(start);
  return {worst_op < 1e-5 && worst_model < 1e-4 && secs < 60.0,
          "worst per-op " + fmt("%.2e", worst_op) + " (" + worst_name + "), end-to-end PIT loss " +
              fmt("%.2e", worst_model) + ", " + fmt("%.1f", secs) + " s"};
}

// ---- 2: segmentation inverse

Verdict segmentation() {
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<std::size_t> len_d(2, 64), n_d(1, 3000);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t len = len_d(rng), hop = std::uniform_int_distribution<std::size_t>(1, len)(rng), n = n_d(rng);
    const auto x = testing::random_tensor<double>({n}, rng);
    const auto y = core::overlap_add(core::segment(x, len, hop));
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(y.data()[i] - x.data()[i]));
  }
  return {worst < 1e-12, "max |overlap_add(segment(x)) - x| = " + fmt("%.2e", worst) + " over 100 cases"};
}

// ---- 3: PIT enumeration

Verdict pit_enumeration() {
  std::mt19937_64 rng(303);
  std::size_t checked = 0, mismatches = 0;
  for (std::size_t k : {2u, 3u, 4u}) {
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<std::vector<double>> est, ref;
      for (std::size_t i = 0; i < k; ++i) {
        ref.push_back(testing::random_values<double>(100, rng));
        est.push_back(testing::random_values<double>(100, rng));
      }
      // Every fifth case duplicates an estimate to force ties.
      if (trial % 5 == 0) est[1] = est[0];
      std::vector<std::size_t> perm(k), best_perm;
      std::iota(perm.begin(), perm.end(), 0);
      double best = std::numeric_limits<double>::infinity();
      do {
        double loss = 0;
        for (std::size_t r = 0; r < k; ++r) loss -= train::si_snr<double>(est[perm[r]], ref[r]);
        loss /= double(k);
        if (loss < best) {
          best = loss;
          best_perm = perm;
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
      const auto got = train::pit_loss<double>(est, ref);
      ++checked;
      if (got.loss != best || got.permutation != best_perm) ++mismatches;
    }
  }
  return {mismatches == 0, std::to_string(checked - mismatches) + "/" + std::to_string(checked) +
                               " match exhaustive enumeration exactly; ties resolve to the first permutation in "
                               "lexicographic order"};
}

// ---- 4: SI-SNR

Verdict si_snr_properties() {
  std::mt19937_64 rng(404);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = testing::random_values<double>(256, rng), e = testing::random_values<double>(256, rng);
    for (bool zm : {true, false}) {
      const double base = train::si_snr<double>(e, s, {zm, 60});
      for (double c : {-7.5, -1.0, 1e-4, 0.3, 1e3}) {
        auto scaled = e;
        for (auto& v : scaled) v *= c;
        worst = std::max(worst, std::abs(train::si_snr<double>(scaled, s, {zm, 60}) - base));
      }
    }
  }
  auto r4 = [](double v) { return std::round(v * 1e4) / 1e4; };
  const double orth = train::si_snr<double>(std::vector<double>{1, 1}, std::vector<double>{1, 0}, {false, 60});
  const double six = train::si_snr<double>(std::vector<double>{1, 0.5}, std::vector<double>{1, 0}, {false, 60});
  double clamp = 0;
  bool clamp_ok = true;
  for (double c : {1.0, 3.0, -1.0, -0.2}) {
    clamp = train::si_snr<double>(std::vector<double>{c, -c}, std::vector<double>{1, -1});
    clamp_ok &= r4(clamp) == 60.0;
  }
  const bool pass = worst < 1e-9 && r4(orth) == 0.0 && r4(six) == 6.0206 && clamp_ok;
  return {pass, "scale/sign drift " + fmt("%.1e", worst) + " dB; examples " + fmt("%.4f", orth) + ", " +
                    fmt("%.4f", six) + ", " + fmt("%.4f", clamp) + " dB"};
}

// ---- 5 and 6: structural equivalences

ModelConfig small(Variant v, std::size_t mics) {
  ModelConfig c = ModelConfig::desk(v, mics);
  c.bases = 16;
  c.bottleneck = 8;
  c.skip = 8;
  c.hidden = 16;
  c.blocks = 3;
  c.repeats = 2;
  return c;
}

double max_diff(const std::vector<std::vector<float>>& a, const std::vector<std::vector<float>>& b) {
  double worst = 0;
  for (std::size_t k = 0; k < a.size(); ++k)
    for (std::size_t i = 0; i < a[k].size(); ++i) worst = std::max(worst, std::abs(double(a[k][i]) - double(b[k][i])));
  return worst;
}

std::vector<std::vector<float>> channels(std::size_t m, std::size_t n, std::mt19937_64& rng) {
  std::vector<std::vector<float>> x;
  for (std::size_t i = 0; i < m; ++i) x.push_back(testing::random_values<float>(n, rng));
  return x;
}

Verdict reduction() {
  std::mt19937_64 rng(505);
  double worst = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto base = small(Variant::single, 1);
    const auto p = model::init_parameters<float>(base, 50 + trial);
    const auto x = channels(1, 200 + 37 * trial, rng);
    const auto ref = model::separate(x, p, base);
    worst = std::max(worst, max_diff(ref, model::separate(x, p, small(Variant::early_fusion, 1))));
    worst = std::max(worst, max_diff(ref, model::separate(x, p, small(Variant::late_fusion, 1))));
  }
  return {worst < 1e-6, "max |EF/LF(M=1) - single| = " + fmt("%.2e", worst) + " over 10 inputs"};
}

Verdict cstl_equivalence() {
  std::mt19937_64 rng(606);
  double worst = 0;
  std::size_t cases = 0;
  for (auto v : {Variant::early_fusion, Variant::late_fusion}) {
    for (std::size_t m = 2; m <= 4; ++m) {
      const auto source_cfg = m == 2 ? small(Variant::single, 1) : small(v, m - 1);
      const auto target_cfg = small(v, m);
      const auto source = model::init_parameters<float>(source_cfg, 60 + m);
      const auto target = train::cstl_expand(source, source_cfg, target_cfg);
      for (int trial = 0; trial < 3; ++trial) {
        auto x = channels(m, 300 + 11 * trial, rng);
        const auto expected = model::separate({x.begin(), x.end() - 1}, source, source_cfg);
        worst = std::max(worst, max_diff(expected, model::separate(x, target, target_cfg)));
        ++cases;
      }
    }
  }
  return {worst < 1e-6, "max |expanded - source| = " + fmt("%.2e", worst) + " over " + std::to_string(cases) +
                            " EF/LF cases, M = 2..4"};
}

// ---- 7: parameter counts

Verdict parameter_counts() {
  const std::size_t n = 512, b = 128, sc = 128, k = 2;
  bool increments = true;
  for (std::size_t m = 1; m < 4; ++m) {
    increments &= model::count_parameters(ModelConfig::full_scale(Variant::early_fusion, m + 1)) -
                      model::count_parameters(ModelConfig::full_scale(Variant::early_fusion, m)) ==
                  n * b + 2 * n;
    increments &= model::count_parameters(ModelConfig::full_scale(Variant::late_fusion, m + 1)) -
                      model::count_parameters(ModelConfig::full_scale(Variant::late_fusion, m)) ==
                  k * n * sc;
  }
  const double reported_ef[] = {5.05, 5.12, 5.18}, reported_lf[] = {5.18, 5.31, 5.44};
  double worst = 0;
  std::ostringstream totals;
  for (std::size_t m = 2; m <= 4; ++m) {
    const double ef = double(model::count_parameters(ModelConfig::full_scale(Variant::early_fusion, m))) / 1e6;
    const double lf = double(model::count_parameters(ModelConfig::full_scale(Variant::late_fusion, m))) / 1e6;
    worst = std::max({worst, std::abs(ef / reported_ef[m - 2] - 1), std::abs(lf / reported_lf[m - 2] - 1)});
    totals << (m > 2 ? ", " : "") << "EF" << m << " " << fmt("%.3f", ef) << "M LF" << m << " " << fmt("%.3f", lf) << "M";
  }
  return {increments && worst < 0.05, std::string("increments ") + (increments ? "exact" : "WRONG") + " (" +
                                          std::to_string(n * b + 2 * n) + " EF, " + std::to_string(k * n * sc) +
                                          " LF); totals " + totals.str() + "; worst deviation " +
                                          fmt("%.1f", 100 * worst) + "%"};
}

// ---- 8 and 9: training

std::vector<train::Sample> anechoic_samples(std::size_t count, std::size_t mics, double seconds, std::uint64_t seed,
                                            const std::string& split) {
  spatial::CorpusConfig c;
  c.count = count;
  c.mics = mics;
  c.seconds = seconds;
  c.reverberant = false;
  c.seed = seed;
  c.split = split;
  c.speaker_pool = 32;
  const auto provider = spatial::make_provider(c);
  std::vector<train::Sample> out;
  for (std::size_t i = 0; i < count; ++i) {
    const auto g = spatial::generate_sample(c, *provider, i);
    train::Sample s;
    s.id = split + std::to_string(i);
    s.angle_deg = g.mixture.angle_deg;
    for (const auto& ch : g.mixture.mixture) s.mixture.emplace_back(ch.begin(), ch.end());
    for (const auto& r : g.mixture.references) s.references.emplace_back(r.begin(), r.end());
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<train::Sample> keep_channels(std::vector<train::Sample> samples, std::size_t mics) {
  for (auto& s : samples) s.mixture.resize(mics);
  return samples;
}

double mean_si_snri(const std::vector<train::Sample>& samples, const model::ParameterSet<float>& p,
                    const ModelConfig& c) {
  double total = 0;
  for (const auto& s : samples) {
    std::vector<metrics::Waveform> est, ref;
    for (const auto& e : model::separate(s.mixture, p, c)) est.emplace_back(e.begin(), e.end());
    for (const auto& r : s.references) ref.emplace_back(r.begin(), r.end());
    const metrics::Waveform mix(s.mixture.front().begin(), s.mixture.front().end());
    total += metrics::si_snri(mix, est, ref).mean;
  }
  return total / double(samples.size());
}

double mean_input_si_snr(const std::vector<train::Sample>& samples) {
  double total = 0;
  for (const auto& s : samples)
    for (const auto& r : s.references)
      total += train::si_snr<float>(s.mixture.front(), r) / double(s.references.size());
  return total / double(samples.size());
}

Verdict overfit() {
  const auto start = Clock::now();
  const auto samples = anechoic_samples(4, 1, 1.0, 808, "overfit");
  train::TrainConfig cfg;
  cfg.model = ModelConfig::desk();
  cfg.segment_seconds = 0;
  cfg.batch_size = 4;
  cfg.patience = 1000000;
  cfg.max_epochs = 2000;
  cfg.max_steps = 2000;
  cfg.seed = 8;
  const double baseline = mean_input_si_snr(samples);
  train::TrainHooks hooks;
  // The batch is the whole set, so -loss - baseline tracks training SI-SNRi.
  hooks.on_step = [&](std::size_t, double loss, const model::ParameterSet<float>&) { return -loss - baseline < 15.5; };
  const auto result =
      train::train(samples, samples, cfg, model::init_parameters<float>(cfg.model, util::child_seed(8, "init", 0)),
                   hooks);
  const double sisnri = mean_si_snri(samples, result.best, cfg.model);
  const double minutes = seconds_since(start) / 60.0;
  return {sisnri >= 15.0 && result.steps <= 2000 && minutes < 30.0,
          "training SI-SNRi " + fmt("%.2f", sisnri) + " dB after " + std::to_string(result.steps) + " steps, " +
              fmt("%.1f", minutes) + " min"};
}

// MCSEP_FUSION_STEPS overrides the per-model step budget for longer
// diagnostic runs.
std::size_t fusion_steps() {
  const char* env = std::getenv("MCSEP_FUSION_STEPS");
  return env ? std::stoul(env) : 1500;
}

Verdict fusion_signal() {
  const auto start = Clock::now();
  const std::size_t steps = fusion_steps();
  const auto train_all = anechoic_samples(200, 2, 1.0, 909, "train");
  const auto valid_all = anechoic_samples(50, 2, 1.0, 910, "valid");
  struct Run {
    std::string name;
    ModelConfig config;
    double sisnri = 0;
  };
  std::vector<Run> runs{{"single", ModelConfig::desk(Variant::single, 1)},
                        {"EF", ModelConfig::desk(Variant::early_fusion, 2)},
                        {"LF", ModelConfig::desk(Variant::late_fusion, 2)}};
  for (auto& r : runs) {
    train::TrainConfig cfg;
    cfg.model = r.config;
    cfg.segment_seconds = 0;
    cfg.batch_size = 4;
    cfg.patience = 1000000;
    cfg.max_epochs = 1000;
    cfg.max_steps = steps;
    cfg.seed = 9;
    const auto tr = keep_channels(train_all, r.config.mics);
    const auto va = keep_channels(valid_all, r.config.mics);
    const auto result =
        train::train(tr, va, cfg, model::init_parameters<float>(r.config, util::child_seed(9, "init", 0)));
    r.sisnri = mean_si_snri(va, result.best, r.config);
    std::printf("  %s: validation SI-SNRi %.2f dB (%zu steps)\n", r.name.c_str(), r.sisnri, result.steps);
    std::fflush(stdout);
  }
  const bool pass = runs[1].sisnri > runs[0].sisnri && runs[2].sisnri > runs[0].sisnri;
  return {pass, "validation SI-SNRi single " + fmt("%.2f", runs[0].sisnri) + " dB, EF " + fmt("%.2f", runs[1].sisnri) +
                    " dB, LF " + fmt("%.2f", runs[2].sisnri) + " dB (" + std::to_string(steps) + " steps each, " +
                    fmt("%.1f", seconds_since(start) / 60.0) + " min)"};
}

// ---- 10: spatializer physics

Verdict spatializer() {
  double worst_t60 = 0;
  for (std::size_t i = 0; i < 20; ++i) {
    auto rng = util::make_rng(1010, "t60", i);
    const auto s = spatial::sample_geometry(rng, 2, 2, true);
    for (const auto& row : spatial::simulate_rirs(s))
      for (const auto& h : row) worst_t60 = std::max(worst_t60, std::abs(spatial::measure_t60(h, 8000) / s.t60 - 1));
  }

  double additivity = 0;
  spatial::CorpusConfig c;
  c.count = 3;
  c.mics = 3;
  c.seconds = 1.0;
  c.seed = 1011;
  const auto provider = spatial::make_provider(c);
  for (std::size_t i = 0; i < c.count; ++i) {
    const auto g = spatial::generate_sample(c, *provider, i);
    const auto& m = g.mixture;
    for (std::size_t mic = 0; mic < c.mics; ++mic)
      for (std::size_t n = 0; n < m.mixture[mic].size(); ++n) {
        double sum = 0;
        for (const auto& img : m.images) sum += img[mic][n];
        additivity = std::max(additivity, std::abs(m.mixture[mic][n] - sum));
      }
  }

  std::size_t valid = 0;
  for (std::size_t i = 0; i < 1000; ++i) {
    auto rng = util::make_rng(1012, "geometry", i);
    const auto s = spatial::sample_geometry(rng, 1 + i % 4, 2, i % 2 == 0);
    valid += spatial::scene_violations(s).empty();
  }
  return {worst_t60 <= 0.25 && additivity == 0.0 && valid == 1000,
          "worst T60 error " + fmt("%.1f", 100 * worst_t60) + "% over 20 scenes x 4 paths; mixture minus images " +
              fmt("%.1e", additivity) + "; " + std::to_string(valid) + "/1000 geometries valid"};
}

// ---- 11: bucketing

Verdict bucketing() {
  auto rng = util::make_rng(1111, "angles", 0);
  std::vector<metrics::UtteranceRecord> records;
  for (std::size_t i = 0; i < 2000; ++i) {
    const double angle = i <= 12 ? 15.0 * double(i) : util::uniform(rng, 0, 180);
    records.push_back({std::to_string(i), angle, 1.0, {0, 1}});
  }
  const auto report = metrics::bucket_report(records);
  std::size_t total = 0;
  for (const auto& b : report.buckets) total += b.count;
  bool boundaries = metrics::bucket_index(14.9) == 0 && metrics::bucket_index(15.0) == 1 &&
                    metrics::bucket_index(180.0) == 11 && metrics::bucket_index(0.0) == 0 &&
                    metrics::bucket_index(165.0) == 11;
  for (const auto& r : report.records) {
    const auto& b = report.buckets[metrics::bucket_index(r.angle_deg)];
    boundaries &= r.angle_deg >= b.lower && (r.angle_deg < b.upper || r.angle_deg == 180.0);
  }
  bool rejects = false;
  try {
    metrics::bucket_index(180.5);
  } catch (const std::invalid_argument&) {
    rejects = true;
  }
  return {total == records.size() && boundaries && rejects && report.buckets.size() == 12,
          std::to_string(report.buckets.size()) + " buckets, counts " + std::to_string(total) + "/" +
              std::to_string(records.size()) + ", 14.9->0 15->1 180->11, out-of-range " +
              (rejects ? "rejected" : "ACCEPTED")};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--only") {
      std::stringstream list(argv[i + 1]);
      for (std::string item; std::getline(list, item, ',');) only.insert(std::stoi(item));
    }
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"gradient correctness", gradients},
      {"segmentation inverse", segmentation},
      {"PIT enumeration equivalence", pit_enumeration},
      {"SI-SNR invariances and examples", si_snr_properties},
      {"single-microphone reduction", reduction},
      {"transfer functional equivalence", cstl_equivalence},
      {"parameter-count arithmetic", parameter_counts},
      {"overfit sanity", overfit},
      {"fusion learning signal", fusion_signal},
      {"spatializer physics", spatializer},
      {"angle bucketing", bucketing},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = int(i + 1);
    if (!only.empty() && !only.count(id)) continue;
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failures += !v.pass;
    std::printf("criterion %2d %s  %s: %s\n", id, v.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
