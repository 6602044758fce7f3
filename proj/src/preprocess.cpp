// Copyright 2026 The TC-HGR Authors
// SPDX-License-Identifier: Apache-2.0

#include "tchgr/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <string>

#include "tchgr/error.hpp"

namespace tchgr {

void FilterParams::validate() const {
  if (!(sample_rate_hz > 0.0)) {
    throw ConfigError("sample rate must be positive, got " +
                      std::to_string(sample_rate_hz));
  }
  if (!(cutoff_hz > 0.0) || cutoff_hz >= sample_rate_hz / 2.0) {
    throw ConfigError("cutoff " + std::to_string(cutoff_hz) +
                      " Hz must lie in (0, Nyquist = " +
                      std::to_string(sample_rate_hz / 2.0) + " Hz)");
  }
}

FirstOrderCoefficients butterworth_first_order(const FilterParams& p) {
  p.validate();
  // Prewarped analog cutoff, normalized so the bilinear map is s = (1−z⁻¹)/(1+z⁻¹).
  const double k = std::tan(std::numbers::pi * p.cutoff_hz / p.sample_rate_hz);
  FirstOrderCoefficients c;
  c.b0 = k / (1.0 + k);
  c.b1 = c.b0;
  c.a1 = (k - 1.0) / (k + 1.0);
  return c;
}

std::vector<double> butterworth_lowpass(std::span<const double> signal,
                                        const FilterParams& p) {
  if (signal.empty()) throw UsageError("butterworth_lowpass: empty signal");
  const FirstOrderCoefficients c = butterworth_first_order(p);
  std::vector<double> out(signal.size());
  double x_prev = 0.0, y_prev = 0.0;
  for (std::size_t n = 0; n < signal.size(); ++n) {
    const double y = c.b0 * signal[n] + c.b1 * x_prev - c.a1 * y_prev;
    out[n] = y;
    x_prev = signal[n];
    y_prev = y;
  }
  return out;
}

double mu_law(double x, const MuLawParams& p) {
  if (!(p.mu > 0.0) || !std::isfinite(p.mu)) {
    throw ConfigError("mu must be positive and finite, got " +
                      std::to_string(p.mu));
  }
  if (!(std::abs(x) <= 1.0)) {
    throw RangeError("mu_law input " + std::to_string(x) + " outside [-1, 1]");
  }
  // Magnitude first, sign last: F(−x) == −F(x) bit for bit.
  return std::copysign(std::log1p(p.mu * std::abs(x)) / std::log1p(p.mu), x);
}

std::vector<double> mu_law(std::span<const double> x, const MuLawParams& p) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(std::abs(x[i]) <= 1.0)) {
      throw RangeError("mu_law input " + std::to_string(x[i]) + " at index " +
                       std::to_string(i) + " outside [-1, 1]");
    }
    out[i] = mu_law(x[i], p);
  }
  return out;
}

namespace {

std::size_t ms_to_samples(int ms, double sample_rate_hz, const char* what) {
  const double exact = static_cast<double>(ms) * sample_rate_hz / 1000.0;
  const double rounded = std::round(exact);
  if (ms <= 0 || rounded < 1.0 || std::abs(exact - rounded) > 1e-9) {
    throw ConfigError(std::string(what) + " of " + std::to_string(ms) +
                      " ms is not a positive whole number of samples at " +
                      std::to_string(sample_rate_hz) + " Hz");
  }
  return static_cast<std::size_t>(rounded);
}

}  // namespace

std::size_t window_samples(int window_ms, double sample_rate_hz) {
  return ms_to_samples(window_ms, sample_rate_hz, "window");
}

ConditionedSignal condition(const Recording& recording,
                            const PreprocessParams& params) {
  recording.validate();
  FilterParams filter = params.filter;
  filter.sample_rate_hz = recording.sample_rate_hz;

  ConditionedSignal out;
  out.channels = recording.channels;
  out.frames = recording.frames;
  out.samples.reserve(recording.samples.size());
  std::vector<double> channel(recording.frames);
  for (std::size_t c = 0; c < recording.channels; ++c) {
    const auto raw = recording.channel(c);
    std::copy(raw.begin(), raw.end(), channel.begin());
    const auto filtered = butterworth_lowpass(channel, filter);
    out.samples.insert(out.samples.end(), filtered.begin(), filtered.end());
  }

  double peak = 0.0;
  for (double v : out.samples) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    for (double& v : out.samples) v = std::clamp(v / peak, -1.0, 1.0);
  }
  out.samples = mu_law(out.samples, params.mu_law);
  return out;
}

namespace {

template <typename Sample>
SegmentSet segment_impl(std::span<const Sample> samples, std::size_t channels,
                        std::size_t frames,
                        std::span<const Annotation> annotations, int window_ms,
                        int stride_ms, double sample_rate_hz, int subject) {
  if (annotations.size() != frames) {
    throw DataError("annotation length " + std::to_string(annotations.size()) +
                    " does not match frame count " + std::to_string(frames));
  }
  const std::size_t length = ms_to_samples(window_ms, sample_rate_hz, "window");
  const std::size_t stride = ms_to_samples(stride_ms, sample_rate_hz, "stride");

  SegmentSet set;
  set.channels = channels;
  set.length = length;
  set.sample_rate_hz = sample_rate_hz;

  bool any_active = false;
  std::size_t begin = 0;
  while (begin < frames) {
    const Annotation tag = annotations[begin];
    std::size_t end = begin + 1;
    while (end < frames && annotations[end] == tag) ++end;
    if (tag.gesture != 0) {
      any_active = true;
      for (std::size_t start = begin; start + length <= end; start += stride) {
        Segment seg;
        seg.label = static_cast<int>(tag.gesture) - 1;
        seg.subject = subject;
        seg.repetition = tag.repetition;
        seg.x.resize(channels * length);
        for (std::size_t c = 0; c < channels; ++c) {
          const Sample* src = samples.data() + c * frames + start;
          std::copy(src, src + length, seg.x.begin() + static_cast<std::ptrdiff_t>(c * length));
        }
        set.segments.push_back(std::move(seg));
      }
    }
    begin = end;
  }
  if (any_active && set.segments.empty()) {
    std::cerr << "warning: window of " << length
              << " samples is longer than every gesture span; no segments\n";
  }
  return set;
}

}  // namespace

SegmentSet segment(const Recording& recording, int window_ms, int stride_ms,
                   double sample_rate_hz, int subject) {
  recording.validate();
  return segment_impl<float>(recording.samples, recording.channels,
                             recording.frames, recording.annotations, window_ms,
                             stride_ms, sample_rate_hz, subject);
}

SegmentSet segment(const ConditionedSignal& signal,
                   std::span<const Annotation> annotations, int window_ms,
                   int stride_ms, double sample_rate_hz, int subject) {
  return segment_impl<double>(signal.samples, signal.channels, signal.frames,
                              annotations, window_ms, stride_ms, sample_rate_hz,
                              subject);
}

SegmentSet preprocess(const Recording& recording, const PreprocessParams& params,
                      int subject) {
  const ConditionedSignal conditioned = condition(recording, params);
  return segment(conditioned, recording.annotations, params.window_ms,
                 params.stride_ms, recording.sample_rate_hz, subject);
}

}  // namespace tchgr
