// Copyright 2026 The TC-HGR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace tchgr {

inline constexpr std::uint32_t kDb2Channels = 12;
inline constexpr double kDb2SampleRateHz = 2000.0;
inline constexpr int kExerciseBGestures = 17;

// Per-sample label. Gesture 0 is rest; repetitions run 1..6 on active samples.
struct Annotation {
  std::uint16_t gesture = 0;
  std::uint16_t repetition = 0;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

// Raw multi-channel sEMG, channel-major: samples[c * frames + t].
struct Recording {
  std::uint32_t channels = 0;
  double sample_rate_hz = 0.0;
  std::size_t frames = 0;
  std::vector<float> samples;
  std::vector<Annotation> annotations;

  std::span<const float> channel(std::size_t c) const {
    return std::span<const float>(samples).subspan(c * frames, frames);
  }

  // Throws DataError on any broken invariant.
  void validate() const;
};

// One labelled window X ∈ R^{C×L}, row-major by channel.
struct Segment {
  std::vector<double> x;
  int label = 0;  // class index, gesture id − 1
  int subject = 0;
  int repetition = 0;
};

struct SegmentSet {
  std::size_t channels = 0;
  std::size_t length = 0;
  double sample_rate_hz = 0.0;
  std::vector<Segment> segments;

  std::size_t size() const { return segments.size(); }
  bool empty() const { return segments.empty(); }
};

}  // namespace tchgr
