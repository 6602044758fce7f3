// Copyright 2026 The TC-HGR Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "tchgr/error.hpp"
#include "tchgr/preprocess.hpp"

namespace tchgr {
namespace {

constexpr double kPi = std::numbers::pi;

// Amplitude of the `freq` component of `y[from..]` via a least-squares fit of
// a·sin + b·cos (the two regressors are orthogonal over whole periods only,
// so solve the 2×2 normal equations).
double fitted_amplitude(const std::vector<double>& y, std::size_t from, double freq, double rate) {
  double ss = 0, cc = 0, sc = 0, ys = 0, yc = 0;
  for (std::size_t t = from; t < y.size(); ++t) {
    const double s = std::sin(2 * kPi * freq * static_cast<double>(t) / rate);
    const double c = std::cos(2 * kPi * freq * static_cast<double>(t) / rate);
    ss += s * s;
    cc += c * c;
    sc += s * c;
    ys += y[t] * s;
    yc += y[t] * c;
  }
  const double det = ss * cc - sc * sc;
  const double a = (ys * cc - yc * sc) / det;
  const double b = (yc * ss - ys * sc) / det;
  return std::hypot(a, b);
}

// Single-channel recording with one gesture span per entry of `spans`
// (length in samples), each followed by `gap` rest samples.
Recording make_recording(const std::vector<std::size_t>& spans, std::size_t gap = 100) {
  Recording rec;
  rec.channels = 1;
  rec.sample_rate_hz = 2000.0;
  std::uint16_t gesture = 1;
  rec.annotations.assign(gap, Annotation{});
  for (std::size_t span : spans) {
    rec.annotations.insert(rec.annotations.end(), span, Annotation{gesture, 1});
    rec.annotations.insert(rec.annotations.end(), gap, Annotation{});
    ++gesture;
  }
  rec.frames = rec.annotations.size();
  rec.samples.assign(rec.frames, 0.25f);
  return rec;
}

TEST(ButterworthTest, Coefficients) {
  const auto c = butterworth_first_order({450.0, 2000.0});
  const double k = std::tan(kPi * 450.0 / 2000.0);
  EXPECT_DOUBLE_EQ(c.b0, k / (1 + k));
  EXPECT_DOUBLE_EQ(c.b1, k / (1 + k));
  EXPECT_DOUBLE_EQ(c.a1, (k - 1) / (k + 1));
}

TEST(ButterworthTest, ConstantConvergesToItself) {
  const std::vector<double> x(400, 3.7);
  const auto y = butterworth_lowpass(x, {});
  EXPECT_NEAR(y.back(), 3.7, 1e-9);
}

TEST(ButterworthTest, ZeroStaysZero) {
  const std::vector<double> x(100, 0.0);
  for (double v : butterworth_lowpass(x, {})) EXPECT_EQ(v, 0.0);
}

TEST(ButterworthTest, HalfPowerAtCutoff) {
  for (double cutoff : {100.0, 450.0, 700.0}) {
    std::vector<double> x(8000);
    for (std::size_t t = 0; t < x.size(); ++t) x[t] = std::sin(2 * kPi * cutoff * t / 2000.0 + 0.3);
    const auto y = butterworth_lowpass(x, {cutoff, 2000.0});
    EXPECT_NEAR(fitted_amplitude(y, 2000, cutoff, 2000.0), 1.0 / std::sqrt(2.0), 0.01) << cutoff;
  }
}

TEST(ButterworthTest, AttenuationIncreasesWithFrequency) {
  double previous = 2.0;
  for (double f : {10.0, 200.0, 450.0, 800.0, 990.0}) {
    std::vector<double> x(6000);
    for (std::size_t t = 0; t < x.size(); ++t) x[t] = std::sin(2 * kPi * f * t / 2000.0);
    const double amp = fitted_amplitude(butterworth_lowpass(x, {}), 1000, f, 2000.0);
    EXPECT_LT(amp, previous) << f;
    previous = amp;
  }
}

TEST(ButterworthTest, RejectsCutoffAtOrAboveNyquist) {
  EXPECT_THROW(butterworth_first_order({1000.0, 2000.0}), ConfigError);
  EXPECT_THROW(butterworth_first_order({0.0, 2000.0}), ConfigError);
  EXPECT_THROW(butterworth_first_order({100.0, -1.0}), ConfigError);
}

TEST(MuLawTest, FixedPoints) {
  const MuLawParams p;
  EXPECT_EQ(mu_law(0.0, p), 0.0);
  EXPECT_EQ(mu_law(1.0, p), 1.0);
  EXPECT_EQ(mu_law(-1.0, p), -1.0);
}

TEST(MuLawTest, HalfAtDefaultMu) {
  // ln(128.5) / ln(256), evaluated to 30 digits.
  EXPECT_NEAR(mu_law(0.5, {}), 0.875703068649, 1e-12);
  EXPECT_NEAR(mu_law(0.5, {}), std::log(128.5) / std::log(256.0), 1e-15);
}

TEST(MuLawTest, OddAndStrictlyIncreasing) {
  const MuLawParams p;
  double previous = -2.0;
  for (int i = 0; i <= 1000; ++i) {
    const double x = -1.0 + 2.0 * i / 1000.0;
    const double y = mu_law(x, p);
    EXPECT_EQ(mu_law(-x, p), -y);
    EXPECT_GT(y, previous);
    previous = y;
  }
}

TEST(MuLawTest, SmallMuApproachesIdentity) {
  const MuLawParams p{1e-6};
  double worst = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double x = -1.0 + 2.0 * i / 1000.0;
    worst = std::max(worst, std::abs(mu_law(x, p) - x));
  }
  EXPECT_LE(worst, 1e-5);
}

TEST(MuLawTest, OutOfRangeNamesIndex) {
  const std::vector<double> x{0.1, -0.2, 1.5};
  try {
    mu_law(x, MuLawParams{});
    FAIL() << "expected RangeError";
  } catch (const RangeError& e) {
    EXPECT_NE(std::string(e.what()).find("index 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(mu_law(-1.0000001, MuLawParams{}), RangeError);
}

TEST(WindowTest, SamplesFromMilliseconds) {
  EXPECT_EQ(window_samples(200, 2000.0), 400u);
  EXPECT_EQ(window_samples(300, 2000.0), 600u);
  EXPECT_THROW(window_samples(0, 2000.0), ConfigError);
  EXPECT_THROW(window_samples(1, 1500.0), ConfigError);  // 1.5 samples
}

TEST(SegmentTest, CountsPerSpan) {
  EXPECT_EQ(segment(make_recording({2000}), 200, 200, 2000.0).size(), 5u);
  EXPECT_EQ(segment(make_recording({800}), 200, 100, 2000.0).size(), 3u);
  EXPECT_EQ(segment(make_recording({10000}), 300, 300, 2000.0).size(), 16u);
}

TEST(SegmentTest, CountFormulaAcrossSpans) {
  const std::vector<std::size_t> spans{399, 400, 401, 799, 800, 1234, 5000};
  const SegmentSet set = segment(make_recording(spans), 200, 150, 2000.0);
  std::size_t expected = 0;
  for (std::size_t s : spans) expected += s >= 400 ? (s - 400) / 300 + 1 : 0;
  EXPECT_EQ(set.size(), expected);
  for (const Segment& s : set.segments) {
    EXPECT_EQ(s.x.size(), 400u);
    EXPECT_EQ(s.repetition, 1);
  }
  EXPECT_EQ(set.length, 400u);
  // Gesture 1 (399 samples) produces nothing; labels start at gesture 2.
  EXPECT_EQ(set.segments.front().label, 1);
}

TEST(SegmentTest, WindowLongerThanSpansGivesEmptySet) {
  const SegmentSet set = segment(make_recording({300, 350}), 200, 200, 2000.0);
  EXPECT_TRUE(set.empty());
  EXPECT_EQ(set.length, 400u);
}

TEST(SegmentTest, AdjacentGesturesDoNotMerge) {
  Recording rec = make_recording({600, 600}, 0);
  // Gap 0: the spans touch. Two windows per span; a merged 1200-sample run
  // would give five.
  const SegmentSet set = segment(rec, 200, 100, 2000.0);
  EXPECT_EQ(set.size(), 4u);
}

TEST(SegmentTest, ChannelMajorLayout) {
  Recording rec = make_recording({400}, 10);
  rec.channels = 2;
  rec.samples.resize(2 * rec.frames);
  for (std::size_t t = 0; t < rec.frames; ++t) {
    rec.samples[t] = static_cast<float>(t);
    rec.samples[rec.frames + t] = -static_cast<float>(t);
  }
  const SegmentSet set = segment(rec, 200, 200, 2000.0);
  ASSERT_EQ(set.size(), 1u);
  EXPECT_EQ(set.segments[0].x[0], 10.0);
  EXPECT_EQ(set.segments[0].x[400], -10.0);
  EXPECT_EQ(set.segments[0].x[799], -409.0);
}

TEST(ConditionTest, BoundedAndNormalized) {
  Recording rec = make_recording({2000});
  for (std::size_t t = 0; t < rec.frames; ++t) rec.samples[t] = static_cast<float>(50.0 * std::sin(0.01 * t));
  const ConditionedSignal sig = condition(rec, {});
  double peak = 0.0;
  for (double v : sig.samples) peak = std::max(peak, std::abs(v));
  EXPECT_DOUBLE_EQ(peak, 1.0);
}

TEST(ConditionTest, SilentRecordingStaysZero) {
  Recording rec = make_recording({800});
  std::fill(rec.samples.begin(), rec.samples.end(), 0.0f);
  for (double v : condition(rec, {}).samples) EXPECT_EQ(v, 0.0);
}

TEST(PreprocessTest, DeterministicAndLabelled) {
  const Recording rec = make_recording({1000, 1200});
  const SegmentSet a = preprocess(rec, {}, 3);
  const SegmentSet b = preprocess(rec, {}, 3);
  ASSERT_EQ(a.size(), 5u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.segments[i].x, b.segments[i].x);
    EXPECT_EQ(a.segments[i].subject, 3);
    for (double v : a.segments[i].x) EXPECT_LE(std::abs(v), 1.0);
  }
  EXPECT_EQ(a.segments[0].label, 0);
  EXPECT_EQ(a.segments[4].label, 1);
}

}  // namespace
}  // namespace tchgr
