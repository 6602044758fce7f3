// Copyright 2026 The TC-HGR Authors
// SPDX-License-Identifier: Apache-2.0

// sEMG conditioning: first-order Butterworth smoothing, max-abs
// normalization, μ-law companding and windowing into labelled segments.

#pragma once

#include <span>
#include <vector>

#include "tchgr/recording.hpp"

namespace tchgr {

struct MuLawParams {
  double mu = 255.0;
};

struct FilterParams {
  double cutoff_hz = 450.0;
  double sample_rate_hz = kDb2SampleRateHz;

  void validate() const;
};

// Difference-equation coefficients y[n] = b0·x[n] + b1·x[n−1] − a1·y[n−1].
struct FirstOrderCoefficients {
  double b0 = 0.0;
  double b1 = 0.0;
  double a1 = 0.0;
};

// Bilinear transform of the analog prototype ωc/(s+ωc), prewarped so the
// digital −3 dB point lands exactly on cutoff_hz.
FirstOrderCoefficients butterworth_first_order(const FilterParams& p);

// Single causal pass from zero initial state.
std::vector<double> butterworth_lowpass(std::span<const double> signal,
                                        const FilterParams& p);

double mu_law(double x, const MuLawParams& p);

// Throws RangeError naming the first index with |x| > 1.
std::vector<double> mu_law(std::span<const double> x, const MuLawParams& p);

struct PreprocessParams {
  FilterParams filter;
  MuLawParams mu_law;
  int window_ms = 200;
  int stride_ms = 200;
};

// Samples per window; throws ConfigError unless window_ms·rate/1000 is a
// positive integer.
std::size_t window_samples(int window_ms, double sample_rate_hz);

// Conditioned channel-major signal, same layout as Recording::samples.
struct ConditionedSignal {
  std::size_t channels = 0;
  std::size_t frames = 0;
  std::vector<double> samples;
};

// Filter each channel, divide by the recording-wide max |value| and apply
// μ-law. An all-zero recording stays zero.
ConditionedSignal condition(const Recording& recording,
                            const PreprocessParams& params);

// Every window fully inside one contiguous (gesture, repetition) active span,
// starting at the span start and advancing by the stride. Rest and
// boundary-straddling windows are dropped. Emits a warning on stderr when no
// span is long enough for a single window.
SegmentSet segment(const Recording& recording, int window_ms, int stride_ms,
                   double sample_rate_hz, int subject = 0);

// Same windowing applied to already conditioned samples.
SegmentSet segment(const ConditionedSignal& signal,
                   std::span<const Annotation> annotations, int window_ms,
                   int stride_ms, double sample_rate_hz, int subject = 0);

// condition() followed by segment().
SegmentSet preprocess(const Recording& recording, const PreprocessParams& params,
                      int subject = 0);

}  // namespace tchgr
