// Copyright 2026 The TC-HGR Authors
// SPDX-License-Identifier: Apache-2.0

#include "tchgr/data_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

#include "binary_io.hpp"
#include "tchgr/error.hpp"
#include "tchgr/random.hpp"

namespace tchgr {

namespace {

constexpr std::string_view kSemgMagic = "SEMG";
constexpr std::string_view kSegsMagic = "SEGS";
constexpr std::uint32_t kSegsVersion = 1;

Recording parse_semg_bin(const std::vector<char>& bytes, const std::string& name) {
  detail::ByteReader r(bytes, "recording '" + name + "'");
  if (r.get_bytes(4) != kSemgMagic) r.fail("bad magic (expected \"SEMG\")");
  const std::uint32_t version = r.get_u32();
  if (version != kSemgBinVersion) {
    r.fail("unsupported SEMG-BIN version " + std::to_string(version));
  }
  Recording rec;
  rec.channels = r.get_u32();
  rec.sample_rate_hz = r.get_f64();
  rec.frames = r.get_u64();
  const std::uint64_t payload =
      static_cast<std::uint64_t>(rec.channels) * rec.frames * 4 + rec.frames * 4;
  if (payload != r.remaining()) {
    r.fail("payload of " + std::to_string(r.remaining()) + " bytes, header implies " +
           std::to_string(payload));
  }
  rec.samples.resize(static_cast<std::size_t>(rec.channels) * rec.frames);
  for (float& v : rec.samples) v = r.get_f32();
  rec.annotations.resize(rec.frames);
  for (Annotation& a : rec.annotations) {
    a.gesture = r.get_u16();
    a.repetition = r.get_u16();
  }
  rec.validate();
  return rec;
}

std::string csv_header(std::uint32_t channels) {
  std::string header;
  for (std::uint32_t c = 1; c <= channels; ++c) header += "ch" + std::to_string(c) + ",";
  return header + "gesture,repetition";
}

template <typename T>
T parse_cell(std::string_view text, const std::string& where) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw FormatError(where + ": cannot parse '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

void write_recording(const std::filesystem::path& path, const Recording& rec) {
  rec.validate();
  detail::ByteWriter w;
  w.put_bytes(kSemgMagic);
  w.put_u32(kSemgBinVersion);
  w.put_u32(rec.channels);
  w.put_f64(rec.sample_rate_hz);
  w.put_u64(rec.frames);
  for (float v : rec.samples) w.put_f32(v);
  for (const Annotation& a : rec.annotations) {
    w.put_u16(a.gesture);
    w.put_u16(a.repetition);
  }
  detail::write_file(path, w.bytes());
}

Recording read_recording(const std::filesystem::path& path, double csv_sample_rate_hz) {
  const std::vector<char> bytes = detail::read_file(path);
  const std::string_view head(bytes.data(), std::min<std::size_t>(bytes.size(), 4));
  if (head == kSemgMagic) return parse_semg_bin(bytes, path.string());
  if (head.starts_with("ch1")) return read_recording_csv(path, csv_sample_rate_hz);
  throw FormatError("recording '" + path.string() +
                    "': unrecognized format (bad magic) at offset 0");
}

void write_recording_csv(const std::filesystem::path& path, const Recording& rec) {
  rec.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << csv_header(rec.channels) << '\n';
  char buf[32];
  for (std::size_t t = 0; t < rec.frames; ++t) {
    for (std::size_t c = 0; c < rec.channels; ++c) {
      const auto res = std::to_chars(buf, buf + sizeof(buf), rec.samples[c * rec.frames + t]);
      out.write(buf, res.ptr - buf);
      out << ',';
    }
    out << rec.annotations[t].gesture << ',' << rec.annotations[t].repetition << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Recording read_recording_csv(const std::filesystem::path& path, double sample_rate_hz) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header;
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 3) throw FormatError(path.string() + ": header too short");
  const auto channels = static_cast<std::uint32_t>(header.size() - 2);
  if (line != csv_header(channels)) {
    throw FormatError(path.string() + ": expected header '" + csv_header(channels) + "'");
  }

  std::vector<std::vector<float>> columns(channels);
  std::vector<Annotation> annotations;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(number);
    std::string_view rest(line);
    std::vector<std::string_view> cells;
    while (true) {
      const auto comma = rest.find(',');
      cells.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cells.size() != channels + 2) {
      throw DataError(where + ": expected " + std::to_string(channels + 2) + " columns, got " +
                      std::to_string(cells.size()));
    }
    for (std::uint32_t c = 0; c < channels; ++c) {
      columns[c].push_back(parse_cell<float>(cells[c], where));
    }
    annotations.push_back({parse_cell<std::uint16_t>(cells[channels], where),
                           parse_cell<std::uint16_t>(cells[channels + 1], where)});
  }

  Recording rec;
  rec.channels = channels;
  rec.sample_rate_hz = sample_rate_hz;
  rec.frames = annotations.size();
  rec.annotations = std::move(annotations);
  for (const auto& col : columns) rec.samples.insert(rec.samples.end(), col.begin(), col.end());
  rec.validate();
  return rec;
}

// ---------------------------------------------------------------------------

void write_segments(const std::filesystem::path& path, const SegmentSet& set) {
  detail::ByteWriter w;
  w.put_bytes(kSegsMagic);
  w.put_u32(kSegsVersion);
  w.put_u32(static_cast<std::uint32_t>(set.channels));
  w.put_u32(static_cast<std::uint32_t>(set.length));
  w.put_f64(set.sample_rate_hz);
  w.put_u64(set.segments.size());
  const std::size_t per = set.channels * set.length;
  for (const Segment& s : set.segments) {
    if (s.x.size() != per) {
      throw DimensionError("segment holds " + std::to_string(s.x.size()) +
                           " values, expected " + std::to_string(per));
    }
    w.put_u32(static_cast<std::uint32_t>(s.label));
    w.put_u32(static_cast<std::uint32_t>(s.subject));
    w.put_u32(static_cast<std::uint32_t>(s.repetition));
    for (double v : s.x) w.put_f64(v);
  }
  detail::write_file(path, w.bytes());
}

SegmentSet read_segments(const std::filesystem::path& path) {
  const std::vector<char> bytes = detail::read_file(path);
  detail::ByteReader r(bytes, "segment file '" + path.string() + "'");
  if (r.get_bytes(4) != kSegsMagic) r.fail("bad magic (expected \"SEGS\")");
  const std::uint32_t version = r.get_u32();
  if (version != kSegsVersion) r.fail("unsupported version " + std::to_string(version));
  SegmentSet set;
  set.channels = r.get_u32();
  set.length = r.get_u32();
  set.sample_rate_hz = r.get_f64();
  const std::uint64_t count = r.get_u64();
  const std::uint64_t per = static_cast<std::uint64_t>(set.channels) * set.length;
  if (count * (12 + per * 8) != r.remaining()) {
    r.fail("payload size does not match " + std::to_string(count) + " segments");
  }
  set.segments.resize(count);
  for (Segment& s : set.segments) {
    s.label = static_cast<int>(r.get_u32());
    s.subject = static_cast<int>(r.get_u32());
    s.repetition = static_cast<int>(r.get_u32());
    s.x.resize(per);
    for (double& v : s.x) v = r.get_f64();
  }
  return set;
}

// ---------------------------------------------------------------------------

void SplitSpec::validate() const {
  for (const auto* reps : {&train_repetitions, &test_repetitions}) {
    for (int r : *reps) {
      if (r < 1 || r > 6) throw ConfigError("repetition id " + std::to_string(r) + " outside 1..6");
    }
  }
  for (int r : train_repetitions) {
    if (test_repetitions.count(r)) {
      throw ConfigError("repetition " + std::to_string(r) + " is in both train and test sets");
    }
  }
}

SplitResult split(const SegmentSet& segments, const SplitSpec& spec) {
  spec.validate();
  SplitResult out;
  for (SegmentSet* s : {&out.train, &out.test}) {
    s->channels = segments.channels;
    s->length = segments.length;
    s->sample_rate_hz = segments.sample_rate_hz;
  }
  for (const Segment& seg : segments.segments) {
    if (spec.train_repetitions.count(seg.repetition)) {
      out.train.segments.push_back(seg);
    } else if (spec.test_repetitions.count(seg.repetition)) {
      out.test.segments.push_back(seg);
    } else {
      ++out.dropped;
    }
  }
  if (out.dropped) {
    std::cerr << "warning: dropped " << out.dropped
              << " segments whose repetition is in neither split\n";
  }
  return out;
}

SegmentSet merge(const std::vector<SegmentSet>& sets) {
  SegmentSet out;
  bool first = true;
  for (const SegmentSet& s : sets) {
    if (first) {
      out.channels = s.channels;
      out.length = s.length;
      out.sample_rate_hz = s.sample_rate_hz;
      first = false;
    } else if (s.channels != out.channels || s.length != out.length ||
               s.sample_rate_hz != out.sample_rate_hz) {
      throw DimensionError("cannot merge segment sets with different geometry");
    }
    out.segments.insert(out.segments.end(), s.segments.begin(), s.segments.end());
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<Recording> generate_synthetic(const SynthConfig& cfg) {
  if (cfg.classes < 2) throw ConfigError("synthetic data needs at least 2 classes");
  if (cfg.subjects < 1) throw ConfigError("synthetic data needs at least 1 subject");
  if (cfg.repetitions < 1 || cfg.repetitions > 6) {
    throw ConfigError("repetitions must lie in 1..6");
  }
  if (cfg.channels < 1 || !(cfg.sample_rate_hz > 0.0) || !(cfg.active_seconds > 0.0) ||
      cfg.rest_seconds < 0.0 || cfg.noise < 0.0) {
    throw ConfigError("invalid synthetic recording geometry");
  }

  Rng rng(cfg.seed);
  const double nyquist = cfg.sample_rate_hz / 2.0;
  struct Signature {
    double f1, f2;
    std::vector<double> gain;
  };
  std::vector<Signature> signatures(static_cast<std::size_t>(cfg.classes));
  for (int c = 0; c < cfg.classes; ++c) {
    Signature& s = signatures[static_cast<std::size_t>(c)];
    // Spread carriers over 25–250 Hz, well inside the default smoothing band.
    const double span = std::min(225.0, 0.45 * nyquist);
    s.f1 = 25.0 + span * (c + 0.5) / cfg.classes;
    s.f2 = s.f1 * 1.7;
    for (std::uint32_t ch = 0; ch < cfg.channels; ++ch) s.gain.push_back(uniform(rng, 0.1, 1.0));
  }

  const auto active = static_cast<std::size_t>(std::llround(cfg.active_seconds * cfg.sample_rate_hz));
  const auto rest = static_cast<std::size_t>(std::llround(cfg.rest_seconds * cfg.sample_rate_hz));
  const std::size_t spans = static_cast<std::size_t>(cfg.classes) * cfg.repetitions;
  const std::size_t frames = spans * (rest + active) + rest;

  std::vector<Recording> out;
  for (std::size_t subj = 0; subj < cfg.subjects; ++subj) {
    std::vector<double> subject_gain(cfg.channels);
    for (double& g : subject_gain) g = uniform(rng, 0.85, 1.15);

    Recording rec;
    rec.channels = cfg.channels;
    rec.sample_rate_hz = cfg.sample_rate_hz;
    rec.frames = frames;
    rec.samples.assign(static_cast<std::size_t>(cfg.channels) * frames, 0.0f);
    rec.annotations.assign(frames, Annotation{});

    std::vector<double> clean(rec.samples.size(), 0.0);
    std::size_t cursor = rest;
    for (int g = 1; g <= cfg.classes; ++g) {
      const Signature& sig = signatures[static_cast<std::size_t>(g - 1)];
      for (int rep = 1; rep <= cfg.repetitions; ++rep) {
        const double rep_gain = uniform(rng, 0.9, 1.1);
        // One source per repetition seen by all electrodes, so the channel
        // profile carries the class identity and phases carry none.
        const double phase1 = uniform(rng, 0.0, 2.0 * std::numbers::pi);
        const double phase2 = uniform(rng, 0.0, 2.0 * std::numbers::pi);
        for (std::uint32_t ch = 0; ch < cfg.channels; ++ch) {
          const double amp = sig.gain[ch] * subject_gain[ch] * rep_gain;
          double* dst = clean.data() + ch * frames + cursor;
          for (std::size_t t = 0; t < active; ++t) {
            const double time = static_cast<double>(t) / cfg.sample_rate_hz;
            dst[t] = amp * (std::sin(2.0 * std::numbers::pi * sig.f1 * time + phase1) +
                            0.5 * std::sin(2.0 * std::numbers::pi * sig.f2 * time + phase2));
          }
        }
        for (std::size_t t = 0; t < active; ++t) {
          rec.annotations[cursor + t] = {static_cast<std::uint16_t>(g),
                                         static_cast<std::uint16_t>(rep)};
        }
        cursor += active + rest;
      }
    }
    for (std::size_t i = 0; i < clean.size(); ++i) {
      rec.samples[i] = static_cast<float>(clean[i] + cfg.noise * standard_normal(rng));
    }
    rec.validate();
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace tchgr
