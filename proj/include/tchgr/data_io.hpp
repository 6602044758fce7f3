// Copyright 2026 The TC-HGR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <vector>

#include "tchgr/recording.hpp"

namespace tchgr {

// SEMG-BIN v1, little-endian:
//   "SEMG" | u32 version=1 | u32 channels | f64 sample_rate | u64 frames |
//   channels×frames f32 samples (channel-major) | frames × (u16 gesture, u16 repetition)
inline constexpr std::uint32_t kSemgBinVersion = 1;

void write_recording(const std::filesystem::path& path, const Recording& rec);

// Sniffs the first bytes: "SEMG" selects the binary reader, a "ch1" header the
// annotated CSV reader (which takes `csv_sample_rate_hz`). Anything else is a
// FormatError; nothing partial is returned.
Recording read_recording(const std::filesystem::path& path,
                         double csv_sample_rate_hz = kDb2SampleRateHz);

// Header ch1..chC,gesture,repetition; one row per frame.
void write_recording_csv(const std::filesystem::path& path, const Recording& rec);
Recording read_recording_csv(const std::filesystem::path& path, double sample_rate_hz);

// Segment container used between preprocess, train and eval:
//   "SEGS" | u32 version=1 | u32 channels | u32 length | f64 sample_rate |
//   u64 count | per segment: u32 label, u32 subject, u32 repetition,
//   channels×length f64 values
void write_segments(const std::filesystem::path& path, const SegmentSet& set);
SegmentSet read_segments(const std::filesystem::path& path);

struct SplitSpec {
  std::set<int> train_repetitions{1, 3, 4, 6};
  std::set<int> test_repetitions{2, 5};

  // ConfigError on overlap or ids outside 1..6.
  void validate() const;
};

struct SplitResult {
  SegmentSet train;
  SegmentSet test;
  std::size_t dropped = 0;
};

// Partitions by repetition id; segments in neither set are dropped and
// counted (with a warning on stderr).
SplitResult split(const SegmentSet& segments, const SplitSpec& spec);

// Concatenates sets with identical geometry.
SegmentSet merge(const std::vector<SegmentSet>& sets);

struct SynthConfig {
  std::size_t subjects = 1;
  int classes = kExerciseBGestures;
  int repetitions = 6;
  std::uint64_t seed = 0;
  std::uint32_t channels = kDb2Channels;
  double sample_rate_hz = kDb2SampleRateHz;
  double active_seconds = 5.0;
  double rest_seconds = 3.0;
  double noise = 0.05;
};

// One recording per subject. Each class owns a distinct signature: two
// class-specific carrier frequencies and a per-channel amplitude profile,
// with mild per-subject and per-repetition gain jitter plus Gaussian noise.
// Gestures cycle rest → (g, rep) for rep in 1..R and g in 1..classes, ending
// with rest. Pure function of the config.
std::vector<Recording> generate_synthetic(const SynthConfig& config);

}  // namespace tchgr
