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

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>

#include "mcsep/io/manifest.hpp"
#include "mcsep/io/wav.hpp"
#include "mcsep/spatial/corpus.hpp"
#include "mcsep/spatial/geometry.hpp"
#include "mcsep/spatial/mixer.hpp"
#include "mcsep/spatial/rir.hpp"
#include "mcsep/spatial/sources.hpp"

namespace mcsep::spatial {
namespace {

namespace fs = std::filesystem;

std::string bytes_of(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool strictly_inside(const Vec3& p, const Vec3& room) {
  return p.x > 0 && p.y > 0 && p.z > 0 && p.x < room.x && p.y < room.y && p.z < room.z;
}

// Recomputed here rather than via scene_violations.
void expect_valid(const Scene& s, bool reverberant) {
  for (const auto& m : s.mics) EXPECT_TRUE(strictly_inside(m, s.room));
  for (const auto& p : s.speakers) EXPECT_TRUE(strictly_inside(p, s.room));
  for (std::size_t i = 0; i < s.mics.size(); ++i)
    for (std::size_t j = i + 1; j < s.mics.size(); ++j) {
      const double d = distance(s.mics[i], s.mics[j]);
      EXPECT_GE(d, 0.05);
      EXPECT_LE(d, 0.25);
    }
  Vec3 c;
  for (const auto& m : s.mics) {
    c.x += m.x / double(s.mics.size());
    c.y += m.y / double(s.mics.size());
    c.z += m.z / double(s.mics.size());
  }
  for (std::size_t i = 0; i < s.speakers.size(); ++i) {
    EXPECT_GE(distance(s.speakers[i], c), 0.5);
    for (std::size_t j = i + 1; j < s.speakers.size(); ++j) EXPECT_GE(distance(s.speakers[i], s.speakers[j]), 1.0);
  }
  if (reverberant) {
    EXPECT_GE(s.t60, 0.2);
    EXPECT_LE(s.t60, 0.6);
  } else {
    EXPECT_EQ(s.t60, 0.0);
  }
}

TEST(Geometry, ThousandScenesSatisfyInvariants) {
  for (std::size_t i = 0; i < 1000; ++i) {
    auto rng = util::make_rng(7, "geometry", i);
    const std::size_t mics = 1 + i % 4, speakers = 2 + i % 2;
    const bool reverberant = i % 3 != 0;
    const auto s = sample_geometry(rng, mics, speakers, reverberant);
    ASSERT_EQ(s.mics.size(), mics);
    ASSERT_EQ(s.speakers.size(), speakers);
    expect_valid(s, reverberant);
    EXPECT_TRUE(scene_violations(s).empty());
    if (::testing::Test::HasFailure()) FAIL() << "scene " << i;
  }
}

TEST(Geometry, ViolationsAreReported) {
  Scene s;
  s.room = {6, 5, 3};
  s.mics = {{3, 2.5, 1.5}, {3.01, 2.5, 1.5}};
  s.speakers = {{3.2, 2.5, 1.5}, {3.9, 2.5, 1.5}, {7, 1, 1}};
  s.t60 = 0.9;
  // mic pair, speaker 0 near array, speakers 0/1 close, speaker 2 outside, T60
  EXPECT_EQ(scene_violations(s).size(), 5u);
}

TEST(Geometry, DeterministicAndVariesPerDraw) {
  auto a = util::make_rng(3, "g", 0), b = util::make_rng(3, "g", 0);
  const auto s1 = sample_geometry(a, 3, 2, true);
  const auto s2 = sample_geometry(b, 3, 2, true);
  EXPECT_EQ(s1.mics[2].x, s2.mics[2].x);
  EXPECT_EQ(s1.speakers[1].y, s2.speakers[1].y);
  const auto s3 = sample_geometry(a, 3, 2, true);
  EXPECT_NE(s1.mics[1].x - s1.mics[0].x, s3.mics[1].x - s3.mics[0].x);
}

TEST(Geometry, ErrorsAndExhaustedBudget) {
  auto rng = util::make_rng(1, "g", 0);
  EXPECT_THROW(sample_geometry(rng, 0, 2, true), std::invalid_argument);
  EXPECT_THROW(sample_geometry(rng, 2, 1, true), std::invalid_argument);
  GeometryLimits impossible;
  impossible.min_speaker_distance = 50.0;
  impossible.max_tries = 1000;
  EXPECT_THROW(sample_geometry(rng, 2, 2, false, impossible), SamplingFailure);
}

TEST(Angle, Examples) {
  EXPECT_DOUBLE_EQ(angle_difference_deg(30, 75), 45);
  EXPECT_DOUBLE_EQ(angle_difference_deg(350, 10), 20);
  EXPECT_DOUBLE_EQ(angle_difference_deg(0, 180), 180);
  Scene s;
  s.room = {8, 8, 3};
  s.mics = {{4, 4, 1.5}};
  s.speakers = {{6, 4, 1.5}, {7, 4, 1.2}};
  EXPECT_NEAR(angle_difference(s), 0.0, 1e-12);
  s.speakers = {{6, 4, 1.5}, {4, 6, 1.5}};
  EXPECT_NEAR(angle_difference(s), 90.0, 1e-12);
  s.speakers = {{6, 4, 1.5}, {2, 4, 1.5}};
  EXPECT_NEAR(angle_difference(s), 180.0, 1e-12);
}

TEST(Rir, SabineOracle) {
  // V = 105, S = 137
  EXPECT_NEAR(sabine_absorption({6, 5, 3.5}, 0.3), 0.161 * 105.0 / (137.0 * 0.3), 1e-12);
  EXPECT_NEAR(sabine_absorption({6, 5, 3.5}, 0.3), 0.411, 5e-4);
  EXPECT_THROW(sabine_absorption({6, 5, 3.5}, 0.0), std::invalid_argument);
}

TEST(Rir, AnechoicIntegerDelayIsSinglePulse) {
  // 3.43 m at 343 m/s and 8 kHz is exactly 80 samples.
  const Vec3 room{10, 10, 4}, mic{2, 2, 1.5}, src{5.43, 2, 1.5};
  const auto h = simulate_rir(room, src, mic, 0.0);
  ASSERT_GT(h.size(), 80u);
  EXPECT_NEAR(h[80], 1.0 / (4.0 * std::numbers::pi * 3.43), 1e-12);
  for (std::size_t n = 0; n < h.size(); ++n)
    if (n != 80) EXPECT_NEAR(h[n], 0.0, 1e-12) << n;
}

TEST(Rir, FractionalDelayIsAccurate) {
  const Vec3 room{10, 10, 4}, mic{2, 2, 1.5};
  for (int i = 0; i < 20; ++i) {
    const double d = 1.0 + 0.173 * i;
    const auto h = simulate_rir(room, {2 + d, 2, 1.5}, mic, 0.0);
    const double expected = d / 343.0 * 8000.0;
    // Group delay at low frequency.
    const double w = 2.0 * std::numbers::pi * 100.0 / 8000.0;
    std::complex<double> H = 0;
    for (std::size_t n = 0; n < h.size(); ++n) H += h[n] * std::polar(1.0, -w * double(n));
    double phase = -std::arg(H);
    const double wraps = std::round((w * expected - phase) / (2 * std::numbers::pi));
    phase += 2 * std::numbers::pi * wraps;
    EXPECT_NEAR(phase / w, expected, 0.05) << d;
    double sum = 0;
    for (double v : h) sum += v;
    EXPECT_NEAR(sum, 1.0 / (4.0 * std::numbers::pi * d), 0.02 / (4.0 * std::numbers::pi * d));
  }
}

TEST(Rir, LengthCoversT60) {
  const Vec3 room{6, 5, 3.5};
  for (double t60 : {0.2, 0.4, 0.6}) {
    const auto h = simulate_rir(room, {4, 3, 1.5}, {2, 2, 1.5}, t60);
    EXPECT_GE(double(h.size()), t60 * 8000.0);
  }
}

TEST(Rir, CoincidentOrOutsideIsRejected) {
  const Vec3 room{6, 5, 3.5};
  EXPECT_THROW(simulate_rir(room, {2, 2, 1.5}, {2, 2, 1.5}, 0.3), std::invalid_argument);
  EXPECT_THROW(simulate_rir(room, {2, 2, 1.5}, {2, 2, 1.5}, 0.0), std::invalid_argument);
  EXPECT_THROW(simulate_rir(room, {7, 2, 1.5}, {2, 2, 1.5}, 0.3), std::invalid_argument);
  EXPECT_THROW(simulate_rir(room, {3, 2, 1.5}, {2, 2, 1.5}, -0.1), std::invalid_argument);
}

TEST(Rir, SchroederT60WithinTolerance) {
  double worst = 0;
  for (std::size_t i = 0; i < 20; ++i) {
    auto rng = util::make_rng(11, "t60", i);
    const auto s = sample_geometry(rng, 2, 2, true);
    const auto rirs = simulate_rirs(s);
    for (const auto& row : rirs)
      for (const auto& h : row) {
        const double measured = measure_t60(h, 8000);
        worst = std::max(worst, std::abs(measured / s.t60 - 1.0));
        EXPECT_NEAR(measured, s.t60, 0.25 * s.t60) << "scene " << i;
      }
  }
  RecordProperty("worst_relative_error", std::to_string(worst));
}

TEST(Rir, MeasureT60OnSyntheticDecay) {
  // Exponential energy decay of 60 dB per 0.4 s.
  std::vector<double> energy(8000);
  for (std::size_t n = 0; n < energy.size(); ++n) energy[n] = std::pow(10.0, -6.0 * double(n) / 3200.0);
  EXPECT_NEAR(measure_t60_energy(energy, 8000), 0.4, 0.01);
}

TEST(Highpass, RemovesDcKeepsVoiceBand) {
  std::vector<double> dc(16000, 1.0);
  highpass(dc, 50.0, 8000);
  for (std::size_t n = 8000; n < dc.size(); ++n) EXPECT_NEAR(dc[n], 0.0, 1e-6);
  std::vector<double> tone(16000);
  for (std::size_t n = 0; n < tone.size(); ++n) tone[n] = std::sin(2 * std::numbers::pi * 1000.0 * double(n) / 8000.0);
  highpass(tone, 50.0, 8000);
  double power = 0;
  for (std::size_t n = 8000; n < tone.size(); ++n) power += tone[n] * tone[n] / 8000.0;
  EXPECT_NEAR(power, 0.5, 1e-4);
  EXPECT_THROW(highpass(tone, 5000.0, 8000), std::invalid_argument);
}

TEST(Convolve, FftMatchesDirectSum) {
  auto rng = util::make_rng(5, "conv", 0);
  Signal x(3000), h(700);
  for (auto& v : x) v = util::uniform(rng, -1, 1);
  for (auto& v : h) v = util::uniform(rng, -1, 1);
  const auto y = convolve(x, h, 3000);
  for (std::size_t i : {0ul, 1ul, 699ul, 700ul, 1500ul, 2999ul}) {
    double acc = 0;
    for (std::size_t j = 0; j <= i; ++j)
      if (i - j < h.size()) acc += x[j] * h[i - j];
    EXPECT_NEAR(y[i], acc, 1e-10) << i;
  }
  const Signal small = convolve({1, 2, 3}, {1, -1}, 5);
  EXPECT_EQ(small, (Signal{1, 1, 1, -3, 0}));
}

Scene two_point_scene() {
  Scene s;
  s.room = {8, 8, 3};
  s.mics = {{3.95, 4, 1.5}, {4.05, 4, 1.5}};
  s.speakers = {{6, 4, 1.5}, {4, 6, 1.5}};
  return s;
}

TEST(Mix, PowerRatioArithmetic) {
  const auto s = two_point_scene();
  const RirSet delta{{{1.0}, {1.0}}, {{1.0}, {1.0}}};
  Signal a(1000), b(1000);
  for (std::size_t i = 0; i < 1000; ++i) {
    a[i] = i % 2 ? 1.0 : -1.0;  // power 1
    b[i] = i % 3 ? 2.0 : -2.0;  // power 4
  }
  const auto m = mix({a, b}, s, delta, 0.0);
  EXPECT_DOUBLE_EQ(m.gains[0], 1.0);
  EXPECT_NEAR(m.gains[1] * m.gains[1], 0.25, 1e-15);
  const auto m6 = mix({a, b}, s, delta, 6.0);
  EXPECT_NEAR(10 * std::log10(mean_power(m6.references[0]) / mean_power(m6.references[1])), 6.0, 1e-9);
  EXPECT_NEAR(m.angle_deg, 90.0, 1e-12);
}

TEST(Mix, ReverberantImagesAndEquationConsistency) {
  auto rng = util::make_rng(9, "mix", 0);
  const auto s = sample_geometry(rng, 3, 2, true);
  const auto rirs = simulate_rirs(s);
  SyntheticSpeech voices("t", 4);
  std::vector<Signal> dry{voices.utterance("t-spk001", 8000, rng), voices.utterance("t-spk003", 8000, rng)};
  const auto m = mix(dry, s, rirs, 0.0);
  EXPECT_NEAR(mean_power(m.references[0]) / mean_power(m.references[1]), 1.0, 1e-9);
  for (std::size_t mic = 0; mic < 3; ++mic)
    for (std::size_t i = 0; i < 8000; ++i)
      EXPECT_EQ(m.mixture[mic][i] - (m.images[0][mic][i] + m.images[1][mic][i]), 0.0);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(m.references[k], m.images[k][0]);
    const auto again = convolve(m.dry[k], rirs[0][k], 8000);
    for (std::size_t i = 0; i < 8000; i += 97) EXPECT_NEAR(again[i], m.references[k][i], 1e-12);
  }
}

TEST(Mix, Errors) {
  const auto s = two_point_scene();
  const RirSet delta{{{1.0}, {1.0}}, {{1.0}, {1.0}}};
  Signal a(100, 0.5), silent(100, 0.0);
  EXPECT_THROW(mix({a, silent}, s, delta, 0.0), std::invalid_argument);
  EXPECT_THROW(mix({a}, s, delta, 0.0), std::invalid_argument);
  EXPECT_THROW(mix({a, Signal(99, 0.5)}, s, delta, 0.0), std::invalid_argument);
  EXPECT_THROW(mix({a, a}, s, RirSet{{{1.0}, {1.0}}}, 0.0), std::invalid_argument);
}

TEST(Sources, SyntheticSpeechIsSeededAndNormalized) {
  SyntheticSpeech a("train", 8), b("train", 8), c("test", 8);
  ASSERT_EQ(a.speakers().size(), 8u);
  for (const auto& id : a.speakers())
    EXPECT_EQ(std::count(c.speakers().begin(), c.speakers().end(), id), 0);
  auto r1 = util::make_rng(1, "u", 0), r2 = util::make_rng(1, "u", 0);
  const auto x = a.utterance(a.speakers()[2], 4000, r1);
  EXPECT_EQ(x, b.utterance(b.speakers()[2], 4000, r2));
  EXPECT_NEAR(std::sqrt(mean_power(x)), 0.1, 1e-9);
  EXPECT_NE(a.voice(a.speakers()[0]).f0, a.voice(a.speakers()[1]).f0);
  EXPECT_THROW(a.utterance("nobody", 10, r1), std::invalid_argument);
}

class CorpusDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          (std::string("mcsep_spatial_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  fs::path dir;
};

TEST_F(CorpusDir, WavFolderGroupsBySpeaker) {
  auto write = [&](const fs::path& p, float v) {
    fs::create_directories(p.parent_path());
    io::write_wav(p, io::Audio{8000, {std::vector<float>(2000, v)}});
  };
  write(dir / "alice" / "u1.wav", 0.3f);
  write(dir / "alice" / "u2.wav", 0.3f);
  write(dir / "bob_01.wav", -0.2f);
  WavFolder folder(dir);
  EXPECT_EQ(folder.speakers(), (std::vector<std::string>{"alice", "bob"}));
  auto rng = util::make_rng(0, "w", 0);
  const auto x = folder.utterance("bob", 3000, rng);
  ASSERT_EQ(x.size(), 3000u);
  EXPECT_EQ(x[2500], 0.0);
  EXPECT_LT(x[0], 0.0);
  fs::create_directories(dir / "solo" / "carol");
  write(dir / "solo" / "carol" / "u1.wav", 0.1f);
  EXPECT_THROW(WavFolder(dir / "solo"), std::invalid_argument);
  EXPECT_THROW(WavFolder(dir / "missing"), std::invalid_argument);
}

CorpusConfig small_corpus(const std::string& split) {
  CorpusConfig c;
  c.count = 10;
  c.seconds = 0.5;
  c.split = split;
  c.seed = 21;
  c.reverberant = true;
  return c;
}

TEST_F(CorpusDir, WritesReadableFilesAndManifest) {
  const auto c = small_corpus("train");
  const auto provider = make_provider(c);
  const auto rows = generate_corpus(c, *provider, dir / "a");
  ASSERT_EQ(rows.size(), 10u);
  const auto back = io::read_manifest(dir / "a" / "manifest.tsv");
  ASSERT_EQ(back.size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_EQ(back[i].mixture, rows[i].mixture);
    const auto mix = io::read_wav(back[i].mixture);
    EXPECT_EQ(mix.channels.size(), 2u);
    EXPECT_EQ(mix.frames(), 4000u);
    ASSERT_EQ(back[i].references.size(), 2u);
    for (const auto& r : back[i].references) {
      const auto ref = io::read_wav(r);
      EXPECT_EQ(ref.frames(), 4000u);
      // Reading and rewriting reproduces the file exactly.
      io::write_wav(dir / "copy.wav", ref);
      EXPECT_EQ(bytes_of(dir / "copy.wav"), bytes_of(r));
    }
    EXPECT_GE(back[i].snr_db, -5.0);
    EXPECT_LE(back[i].snr_db, 5.0);
    EXPECT_GE(back[i].t60_s, 0.2);
    EXPECT_LE(back[i].t60_s, 0.6);
    EXPECT_GE(back[i].angle_deg, 0.0);
    EXPECT_LE(back[i].angle_deg, 180.0);
    EXPECT_NE(back[i].speakers[0], back[i].speakers[1]);
  }
}

TEST_F(CorpusDir, RegenerationIsByteIdenticalAcrossThreads) {
  auto c = small_corpus("valid");
  c.count = 6;
  c.reverberant = false;
  const auto provider = make_provider(c);
  generate_corpus(c, *provider, dir / "a");
  generate_corpus(c, *provider, dir / "b");
  c.threads = 3;
  generate_corpus(c, *provider, dir / "c");
  for (const auto& entry : fs::recursive_directory_iterator(dir / "a")) {
    if (!entry.is_regular_file()) continue;
    const auto rel = entry.path().lexically_relative(dir / "a");
    EXPECT_EQ(bytes_of(entry.path()), bytes_of(dir / "b" / rel)) << rel;
    EXPECT_EQ(bytes_of(entry.path()), bytes_of(dir / "c" / rel)) << rel;
  }
  c.seed = 22;
  generate_corpus(c, *provider, dir / "d");
  EXPECT_NE(bytes_of(dir / "a" / "mix" / "valid_000000.wav"), bytes_of(dir / "d" / "mix" / "valid_000000.wav"));
}

TEST_F(CorpusDir, SplitsUseDisjointSpeakers) {
  auto train = small_corpus("train"), test = small_corpus("test");
  train.reverberant = test.reverberant = false;
  const auto train_rows = generate_corpus(train, *make_provider(train), dir / "train");
  const auto test_rows = generate_corpus(test, *make_provider(test), dir / "test");
  std::set<std::string> seen;
  for (const auto& r : train_rows) seen.insert(r.speakers.begin(), r.speakers.end());
  for (const auto& r : test_rows)
    for (const auto& s : r.speakers) EXPECT_EQ(seen.count(s), 0u) << s;
}

TEST(CorpusConfigTest, ValidationAndParsing) {
  auto kv = io::KeyValues::parse("count = 3\nmics = 4\nt60_min = 0.3\nsplit = dev\n");
  const auto c = corpus_config_from(kv);
  EXPECT_EQ(c.count, 3u);
  EXPECT_EQ(c.mics, 4u);
  EXPECT_EQ(c.t60_min, 0.3);
  EXPECT_EQ(c.split, "dev");
  const auto round = corpus_config_from(io::KeyValues::parse(serialize(c)));
  EXPECT_EQ(serialize(round), serialize(c));
  EXPECT_THROW(corpus_config_from(io::KeyValues::parse("colour = red\n")), io::ConfigError);
  EXPECT_THROW(corpus_config_from(io::KeyValues::parse("t60_max = 0.9\n")), io::ConfigError);
  EXPECT_THROW(corpus_config_from(io::KeyValues::parse("snr_min = -8\n")), io::ConfigError);
  EXPECT_THROW(corpus_config_from(io::KeyValues::parse("speakers = 1\n")), io::ConfigError);
  EXPECT_THROW(corpus_config_from(io::KeyValues::parse("split = ../x\n")), io::ConfigError);
}

}  // namespace
}  // namespace mcsep::spatial
