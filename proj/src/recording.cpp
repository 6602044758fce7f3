// Copyright 2026 The TC-HGR Authors
// SPDX-License-Identifier: Apache-2.0

#include "tchgr/recording.hpp"

#include <cmath>
#include <string>

#include "tchgr/error.hpp"

namespace tchgr {

void Recording::validate() const {
  if (channels == 0) throw DataError("recording has zero channels");
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
    throw DataError("recording sample rate must be positive and finite");
  }
  if (samples.size() != static_cast<std::size_t>(channels) * frames) {
    throw DataError("recording holds " + std::to_string(samples.size()) +
                    " samples, expected channels×frames = " +
                    std::to_string(static_cast<std::size_t>(channels) * frames));
  }
  if (annotations.size() != frames) {
    throw DataError("annotation length " + std::to_string(annotations.size()) +
                    " does not match frame count " + std::to_string(frames));
  }
  for (std::size_t t = 0; t < frames; ++t) {
    const Annotation& a = annotations[t];
    if (a.gesture != 0 && (a.repetition < 1 || a.repetition > 6)) {
      throw DataError("repetition id " + std::to_string(a.repetition) +
                      " at frame " + std::to_string(t) + " outside [1,6]");
    }
  }
}

}  // namespace tchgr
