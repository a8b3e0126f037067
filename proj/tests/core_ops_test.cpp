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
#include <numeric>
#include <random>

#include "mcsep/core/ops.hpp"
#include "mcsep/core/segment.hpp"
#include "test_util.hpp"

using mcsep::core::Shape;
using mcsep::core::Tensor;
namespace core = mcsep::core;

namespace {

Tensor<double> ramp(std::size_t n) {
  std::vector<double> v(n);
  std::iota(v.begin(), v.end(), 0.0);
  return Tensor<double>({n}, v);
}

// Independent framing oracle: sample index for (l, t), or -1 for padding.
long frame_index(std::size_t l, std::size_t t, std::size_t hop, std::size_t n) {
  const std::size_t i = t * hop + l;
  return i < n ? static_cast<long>(i) : -1;
}

// Direct "same" convolution with explicit zero padding.
std::vector<double> conv_oracle(const std::vector<double>& x, const std::vector<double>& k, std::size_t d) {
  const long half = static_cast<long>(k.size() / 2);
  std::vector<double> y(x.size(), 0.0);
  for (long t = 0; t < static_cast<long>(x.size()); ++t)
    for (long p = 0; p < static_cast<long>(k.size()); ++p) {
      const long i = t + (p - half) * static_cast<long>(d);
      if (i >= 0 && i < static_cast<long>(x.size())) y[t] += k[p] * x[i];
    }
  return y;
}

}  // namespace

// ---- segment / overlap_add ------------------------------------------------

TEST(Segment, ExactTiling) {
  auto s = core::segment(ramp(32), 16, 8);
  EXPECT_EQ(s.frames(), 3u);
  EXPECT_EQ(s.original_length, 32u);
  EXPECT_EQ(s.data.at(15, 2), 31.0);
}

TEST(Segment, SingleColumnIsWaveform) {
  auto x = ramp(16);
  auto s = core::segment(x, 16, 8);
  ASSERT_EQ(s.frames(), 1u);
  for (std::size_t l = 0; l < 16; ++l) EXPECT_EQ(s.data.at(l, 0), x.data()[l]);
}

TEST(Segment, TailIsZeroPadded) {
  const std::size_t n = 20, len = 16, hop = 8;
  std::vector<double> v(n);
  std::iota(v.begin(), v.end(), 1.0);  // nonzero samples
  auto s = core::segment(Tensor<double>({n}, v), len, hop);
  ASSERT_EQ(s.frames(), 2u);
  std::size_t zeros = 0;
  for (std::size_t t = 0; t < 2; ++t)
    for (std::size_t l = 0; l < len; ++l) {
      const long i = frame_index(l, t, hop, n);
      EXPECT_EQ(s.data.at(l, t), i < 0 ? 0.0 : v[i]);
      if (t == 1 && i < 0) ++zeros;
    }
  // Column 1 covers samples 8..23: 12 real samples then 4 padding zeros.
  EXPECT_EQ(zeros, 4u);
}

TEST(Segment, RejectsBadArguments) {
  EXPECT_THROW(core::segment(ramp(32), 8, 9), std::invalid_argument);
  EXPECT_THROW(core::segment(ramp(32), 8, 0), std::invalid_argument);
  EXPECT_THROW(Tensor<double>(Shape{0}), std::invalid_argument);
}

TEST(Segment, SegmentCountFormula) {
  EXPECT_EQ(core::segment_count(16000, 16, 8), 1999u);
  EXPECT_EQ(core::segment_count(5, 16, 8), 1u);
  EXPECT_EQ(core::segment_count(17, 16, 8), 2u);
  EXPECT_EQ(core::segment_count(24, 16, 8), 2u);
  EXPECT_EQ(core::segment_count(25, 16, 8), 3u);
}

TEST(OverlapAdd, InvertsSegmentationOnRamp) {
  auto x = ramp(32);
  auto y = core::overlap_add(core::segment(x, 16, 8));
  ASSERT_EQ(y.numel(), 32u);
  EXPECT_LT(mcsep::testing::max_abs_diff<double>(x.data(), y.data()), 1e-12);
}

TEST(OverlapAdd, SingleSegmentIsIdentity) {
  auto x = ramp(10);
  auto y = core::overlap_add(core::segment(x, 16, 8));
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(y.data()[i], x.data()[i]);
}

TEST(OverlapAdd, ExactInverseProperty) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> len_dist(1, 300), seg_dist(1, 40);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = len_dist(rng), len = seg_dist(rng);
    const std::size_t hop = std::uniform_int_distribution<std::size_t>(1, len)(rng);
    auto x = mcsep::testing::random_tensor<double>({n}, rng);
    auto y = core::overlap_add(core::segment(x, len, hop));
    ASSERT_LT(mcsep::testing::max_abs_diff<double>(x.data(), y.data()), 1e-12)
        << "n=" << n << " L=" << len << " hop=" << hop;
  }
}

// ---- matmul ---------------------------------------------------------------

TEST(Matmul, IdentityLeavesOperand) {
  std::mt19937_64 rng(3);
  Tensor<double> eye({3, 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  auto a = mcsep::testing::random_tensor<double>({3, 5}, rng);
  auto c = core::matmul(eye, a);
  for (std::size_t i = 0; i < a.numel(); ++i) EXPECT_EQ(c.data()[i], a.data()[i]);
}

TEST(Matmul, HandExample) {
  auto c = core::matmul(Tensor<double>({2, 2}, {1, 2, 3, 4}), Tensor<double>({2, 1}, {1, 1}));
  EXPECT_EQ(c.shape(), (Shape{2, 1}));
  EXPECT_EQ(c.data()[0], 3.0);
  EXPECT_EQ(c.data()[1], 7.0);
}

TEST(Matmul, GradientOfSumIsOnesTimesBTransposed) {
  std::mt19937_64 rng(5);
  auto a = mcsep::testing::random_tensor<double>({3, 4}, rng, true);
  auto b = mcsep::testing::random_tensor<double>({4, 2}, rng);
  core::backward(core::sum(core::matmul(a, b)));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < 4; ++k)
      EXPECT_NEAR(a.grad()[i * 4 + k], b.at(k, 0) + b.at(k, 1), 1e-14);
}

TEST(Matmul, RejectsMismatch) {
  EXPECT_THROW(core::matmul(Tensor<double>({2, 3}), Tensor<double>({2, 3})), std::invalid_argument);
}

// ---- conv1d ---------------------------------------------------------------

TEST(Conv1d, SamePaddingHandExample) {
  auto y = core::conv1d(Tensor<double>({1, 4}, {1, 2, 3, 4}), Tensor<double>({1, 1, 3}, {1, 1, 1}), {}, 1, 1);
  EXPECT_EQ(std::vector<double>(y.data().begin(), y.data().end()), (std::vector<double>{3, 6, 9, 7}));
}

TEST(Conv1d, PointwiseScales) {
  auto y = core::conv1d(Tensor<double>({1, 3}, {1, -2, 5}), Tensor<double>({1, 1, 1}, {2}), {}, 1, 1);
  EXPECT_EQ(std::vector<double>(y.data().begin(), y.data().end()), (std::vector<double>{2, -4, 10}));
}

TEST(Conv1d, DilatedTaps) {
  const std::vector<double> x{1, 2, 3, 4, 5}, k{1, 0, 1};
  auto y = core::conv1d(Tensor<double>({1, 5}, x), Tensor<double>({1, 1, 3}, k), {}, 2, 1);
  const auto expected = conv_oracle(x, k, 2);
  EXPECT_EQ(expected, (std::vector<double>{3, 4, 6, 2, 3}));
  EXPECT_EQ(std::vector<double>(y.data().begin(), y.data().end()), expected);
}

TEST(Conv1d, RejectsEvenKernelAndBadGroups) {
  EXPECT_THROW(core::conv1d(Tensor<double>({2, 5}), Tensor<double>({2, 2, 2}), {}, 1, 1), std::invalid_argument);
  EXPECT_THROW(core::conv1d(Tensor<double>({3, 5}), Tensor<double>({2, 1, 3}), {}, 1, 2), std::invalid_argument);
}

TEST(Conv1d, DepthwiseSeparableMatchesExpandedConvolution) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t c = 3, c_out = 4, frames = 37, taps = 3, dil = 1 + trial % 4;
    auto x = mcsep::testing::random_tensor<double>({c, frames}, rng);
    auto dw = mcsep::testing::random_tensor<double>({c, 1, taps}, rng);
    auto pw = mcsep::testing::random_tensor<double>({c_out, c, 1}, rng);
    auto y = core::conv1d(core::conv1d(x, dw, {}, dil, c), pw, {}, 1, 1);

    // Expanded full kernel K[o][c][p] = pw[o][c] * dw[c][p].
    std::vector<double> full(c_out * c * taps);
    for (std::size_t o = 0; o < c_out; ++o)
      for (std::size_t ci = 0; ci < c; ++ci)
        for (std::size_t p = 0; p < taps; ++p)
          full[(o * c + ci) * taps + p] = pw.data()[o * c + ci] * dw.data()[ci * taps + p];
    // Oracle path avoids conv1d entirely.
    std::vector<double> expected(c_out * frames, 0.0);
    for (std::size_t o = 0; o < c_out; ++o)
      for (std::size_t ci = 0; ci < c; ++ci) {
        std::vector<double> row(x.data().begin() + ci * frames, x.data().begin() + (ci + 1) * frames);
        std::vector<double> kern(full.begin() + (o * c + ci) * taps, full.begin() + (o * c + ci + 1) * taps);
        auto part = conv_oracle(row, kern, dil);
        for (std::size_t t = 0; t < frames; ++t) expected[o * frames + t] += part[t];
      }
    EXPECT_LT(mcsep::testing::max_abs_diff<double>(y.data(), expected), 1e-10);
  }
}

// ---- gLN ------------------------------------------------------------------

TEST(GlobalLayerNorm, ConstantInputGivesZeros) {
  Tensor<double> x({2, 3}, 4.5), g({2, 1}, 1.0), b({2, 1}, 0.0);
  auto y = core::global_layer_norm(x, g, b, 1e-8);
  for (double v : y.data()) EXPECT_EQ(v, 0.0);
}

TEST(GlobalLayerNorm, UnitVarianceInputIsUnchanged) {
  Tensor<double> x({2, 2}, {1, -1, 1, -1}), g({2, 1}, 1.0), b({2, 1}, 0.0);
  auto y = core::global_layer_norm(x, g, b, 1e-14);
  EXPECT_LT(mcsep::testing::max_abs_diff<double>(x.data(), y.data()), 1e-12);
}

TEST(GlobalLayerNorm, ZeroGainGivesBias) {
  std::mt19937_64 rng(8);
  auto x = mcsep::testing::random_tensor<double>({3, 7}, rng);
  Tensor<double> g({3, 1}, 0.0), b({3, 1}, {0.5, -1.0, 2.0});
  auto y = core::global_layer_norm(x, g, b, 1e-8);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t t = 0; t < 7; ++t) EXPECT_EQ(y.at(c, t), b.data()[c]);
}

TEST(GlobalLayerNorm, NormalizedMomentsProperty) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t c = 1 + trial % 5, t = 3 + 7 * trial;
    auto x = mcsep::testing::random_tensor<double>({c, t}, rng);
    for (auto& v : x.data()) v = 3.0 * v + 1.5;
    Tensor<double> g({c, 1}, 1.0), b({c, 1}, 0.0);
    auto y = core::global_layer_norm(x, g, b, 1e-12);
    double mean = 0, var = 0;
    for (double v : y.data()) mean += v;
    mean /= y.numel();
    for (double v : y.data()) var += (v - mean) * (v - mean);
    var /= y.numel();
    EXPECT_NEAR(mean, 0.0, 1e-6);
    EXPECT_NEAR(var, 1.0, 1e-6);
  }
}

TEST(GlobalLayerNorm, GroupedMatchesPerBlockNormalization) {
  std::mt19937_64 rng(23);
  auto a = mcsep::testing::random_tensor<double>({3, 9}, rng);
  auto b = mcsep::testing::random_tensor<double>({3, 9}, rng);
  for (auto& v : b.data()) v = 5.0 * v - 2.0;
  auto g = mcsep::testing::random_tensor<double>({6, 1}, rng);
  auto bt = mcsep::testing::random_tensor<double>({6, 1}, rng);
  auto joint = core::global_layer_norm(core::concat_channels<double>({a, b}), g, bt, 1e-8, 2);
  auto first = core::global_layer_norm(a, core::slice_rows(g, 0, 3), core::slice_rows(bt, 0, 3), 1e-8);
  auto second = core::global_layer_norm(b, core::slice_rows(g, 3, 3), core::slice_rows(bt, 3, 3), 1e-8);
  auto expected = core::concat_channels<double>({first, second});
  EXPECT_LT(mcsep::testing::max_abs_diff<double>(joint.data(), expected.data()), 1e-14);
}

// ---- pointwise ------------------------------------------------------------

TEST(Prelu, Examples) {
  auto y = core::prelu(Tensor<double>({2}, {-4, 2}), Tensor<double>::scalar(0.25));
  EXPECT_EQ(y.data()[0], -1.0);
  EXPECT_EQ(y.data()[1], 2.0);
  std::mt19937_64 rng(1);
  auto x = mcsep::testing::random_tensor<double>({17}, rng);
  auto id = core::prelu(x, Tensor<double>::scalar(1.0));
  for (std::size_t i = 0; i < 17; ++i) EXPECT_EQ(id.data()[i], x.data()[i]);
}

TEST(Prelu, SlopeGradientAtNegativeInput) {
  auto slope = Tensor<double>::scalar(0.3, true);
  core::backward(core::sum(core::prelu(Tensor<double>({1}, {-4.0}), slope)));
  EXPECT_DOUBLE_EQ(slope.grad()[0], -4.0);
  const double e = 1e-6;
  const double fd = ((0.3 + e) * -4.0 - (0.3 - e) * -4.0) / (2 * e);
  EXPECT_NEAR(slope.grad()[0], fd, 1e-8);
}

TEST(Sigmoid, ValuesAndSaturation) {
  auto y = core::sigmoid(Tensor<double>({3}, {0.0, 800.0, -800.0}));
  EXPECT_EQ(y.data()[0], 0.5);
  EXPECT_EQ(y.data()[1], 1.0);
  EXPECT_GE(y.data()[2], 0.0);
  EXPECT_TRUE(std::isfinite(y.data()[2]));
  auto yf = core::sigmoid(Tensor<float>({1}, {100.0f}));
  EXPECT_FLOAT_EQ(yf.data()[0], 1.0f);
}

TEST(ConcatChannels, ShapesAndGradientRouting) {
  Tensor<double> a({2, 3}, 1.0, true), b({2, 3}, 2.0, true);
  auto c = core::concat_channels<double>({a, b});
  EXPECT_EQ(c.shape(), (Shape{4, 3}));
  EXPECT_EQ(c.at(3, 2), 2.0);
  core::backward(core::sum(c));
  for (double g : a.grad()) EXPECT_EQ(g, 1.0);
  for (double g : b.grad()) EXPECT_EQ(g, 1.0);
  auto single = core::concat_channels<double>({a});
  EXPECT_EQ(single.shape(), a.shape());
  EXPECT_THROW(core::concat_channels<double>({a, Tensor<double>({2, 4})}), std::invalid_argument);
}

// ---- backward contract ----------------------------------------------------

TEST(Backward, SumGivesOnes) {
  Tensor<double> w({3, 2}, 0.7, true);
  core::backward(core::sum(w));
  for (double g : w.grad()) EXPECT_EQ(g, 1.0);
}

TEST(Backward, RejectsNonScalarRoot) {
  Tensor<double> w({3, 2}, 0.7, true);
  EXPECT_THROW(core::backward(core::scale(w, 2.0)), std::invalid_argument);
}

TEST(Backward, RepeatedCallsAccumulateIntoLeaves) {
  Tensor<double> w({2}, {1.0, 2.0}, true);
  auto loss = core::sum(core::mul(w, w));
  core::backward(loss);
  core::backward(loss);
  EXPECT_EQ(w.grad()[0], 4.0);
  EXPECT_EQ(w.grad()[1], 8.0);
  w.zero_grad();
  core::backward(loss);
  EXPECT_EQ(w.grad()[0], 2.0);
}

TEST(Backward, ConstantsBuildNoGraph) {
  Tensor<double> a({2, 2}, 1.0), b({2, 2}, 2.0);
  auto c = core::add(a, b);
  EXPECT_FALSE(c.requires_grad());
  EXPECT_TRUE(c.is_leaf());
}

TEST(Tensor, InvariantsAndFiniteChecks) {
  EXPECT_THROW(Tensor<float>({2, 3}, std::vector<float>(5)), std::invalid_argument);
  core::set_finite_checks(true);
  Tensor<double> a({1}, {std::nan("")});
  EXPECT_THROW(core::scale(a, 1.0), core::NonFiniteError);
  core::set_finite_checks(false);
  EXPECT_NO_THROW(core::scale(a, 1.0));
}

TEST(Determinism, ForwardBackwardBitReproducible) {
  auto run = [] {
    std::mt19937_64 rng(77);
    auto x = mcsep::testing::random_tensor<float>({6, 50}, rng);
    auto w = mcsep::testing::random_tensor<float>({8, 6, 1}, rng, true);
    auto dw = mcsep::testing::random_tensor<float>({8, 1, 3}, rng, true);
    auto g = Tensor<float>({8, 1}, 1.0f, true);
    auto b = Tensor<float>({8, 1}, 0.0f, true);
    auto h = core::conv1d(core::conv1d(x, w, {}, 1, 1), dw, {}, 2, 8);
    auto y = core::sigmoid(core::global_layer_norm(h, g, b, 1e-8f));
    core::backward(core::sum(y));
    std::vector<float> out(y.data().begin(), y.data().end());
    out.insert(out.end(), w.grad().begin(), w.grad().end());
    out.insert(out.end(), dw.grad().begin(), dw.grad().end());
    return out;
  };
  EXPECT_EQ(run(), run());
}
