// Copyright 2026 The TC-HGR Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "run_config.hpp"
#include "tchgr/data_io.hpp"
#include "tchgr/error.hpp"
#include "tchgr/model.hpp"
#include "tchgr/preprocess.hpp"
#include "tchgr/stats.hpp"
#include "tchgr/training.hpp"

namespace tchgr::cli {

namespace {

namespace fs = std::filesystem;

// Command-line overrides for RunConfig fields.
struct Overrides {
  std::optional<std::string> config_path;
  std::optional<int> window_ms;
  std::optional<int> stride_ms;
  std::optional<std::size_t> num_patches;
  std::optional<std::size_t> model_dim;
  std::optional<std::size_t> kernel_size;
  std::optional<double> mu;
  std::optional<double> cutoff_hz;
  std::optional<double> sample_rate_hz;
  std::optional<std::size_t> batch_size;
  std::optional<std::size_t> epochs;
  std::optional<double> lr;
  std::optional<std::uint64_t> seed;

  RunConfig resolve(bool check_model_geometry = true) const {
    RunConfig cfg = config_path ? load_run_config(*config_path) : RunConfig{};
    if (window_ms) cfg.window_ms = *window_ms;
    if (stride_ms) cfg.stride_ms = *stride_ms;
    if (num_patches) cfg.num_patches = *num_patches;
    if (model_dim) cfg.model_dim = *model_dim;
    if (kernel_size) cfg.kernel_size = *kernel_size;
    if (mu) cfg.mu = *mu;
    if (cutoff_hz) cfg.cutoff_hz = *cutoff_hz;
    if (sample_rate_hz) cfg.sample_rate_hz = *sample_rate_hz;
    if (batch_size) cfg.batch_size = *batch_size;
    if (epochs) cfg.epochs = *epochs;
    if (lr) cfg.lr = *lr;
    if (seed) cfg.seed = *seed;
    cfg.validate(check_model_geometry);
    return cfg;
  }
};

void add_config_options(CLI::App& cmd, Overrides& o) {
  cmd.add_option("--config", o.config_path, "JSON run config");
  cmd.add_option("--window-ms", o.window_ms, "Window length W in ms");
  cmd.add_option("--stride-ms", o.stride_ms, "Window stride in ms (default: window)");
  cmd.add_option("--num-patches", o.num_patches, "Number of patches N");
  cmd.add_option("--model-dim", o.model_dim, "Model dimension D");
  cmd.add_option("--kernel-size", o.kernel_size, "Temporal conv kernel size k");
  cmd.add_option("--mu", o.mu, "mu-law range parameter");
  cmd.add_option("--cutoff-hz", o.cutoff_hz, "Butterworth cutoff in Hz");
  cmd.add_option("--sample-rate", o.sample_rate_hz, "Sampling rate in Hz");
  cmd.add_option("--batch-size", o.batch_size, "Mini-batch size");
  cmd.add_option("--epochs", o.epochs, "Training epochs");
  cmd.add_option("--lr", o.lr, "Adam learning rate");
  cmd.add_option("--seed", o.seed, "RNG seed (fallback: TCHGR_SEED)");
}

std::string describe(const ModelConfig& c) {
  std::ostringstream os;
  os << "C=" << c.channels << " L=" << c.seq_len << " N=" << c.num_patches
     << " P=" << c.patch_len << " D=" << c.model_dim << " Z=" << c.num_blocks
     << " k=" << c.kernel_size << " dilations=[";
  for (std::size_t i = 0; i < c.dilations.size(); ++i) {
    os << (i ? "," : "") << c.dilations[i];
  }
  os << "]";
  return os.str();
}

fs::path require_path(const std::optional<std::string>& flag,
                      const std::optional<fs::path>& from_config, const char* what) {
  if (flag) return *flag;
  if (from_config) return *from_config;
  throw ConfigError(std::string("missing required path: ") + what);
}

std::vector<int> predict_all(const TchgrModel& model, const SegmentSet& set) {
  constexpr std::size_t kChunk = 64;
  std::vector<int> predictions;
  predictions.reserve(set.size());
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < set.size(); start += kChunk) {
    idx.clear();
    for (std::size_t i = start; i < std::min(set.size(), start + kChunk); ++i) idx.push_back(i);
    Tape tape;
    const auto batch = predict_classes(forward(tape, stack_segments(set, idx), model));
    predictions.insert(predictions.end(), batch.begin(), batch.end());
  }
  return predictions;
}

void check_geometry(const ModelConfig& cfg, const SegmentSet& set) {
  if (set.channels != cfg.channels || set.length != cfg.seq_len) {
    throw DimensionError("segments are " + std::to_string(set.channels) + "×" +
                         std::to_string(set.length) + " but the model expects " +
                         std::to_string(cfg.channels) + "×" + std::to_string(cfg.seq_len));
  }
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string out_dir;
  std::size_t subjects = 1;
  std::optional<std::uint64_t> seed;
  int classes = kExerciseBGestures;
  int reps = 6;
  double active_s = 5.0;
  double rest_s = 3.0;
  double noise = 0.05;
  std::string format = "bin";
};

int cmd_synth(const SynthArgs& a, std::ostream& out, std::ostream& err) {
  RunConfig seed_source;
  seed_source.seed = a.seed;
  SynthConfig cfg;
  cfg.subjects = a.subjects;
  cfg.classes = a.classes;
  cfg.repetitions = a.reps;
  cfg.seed = seed_source.resolved_seed();
  cfg.active_seconds = a.active_s;
  cfg.rest_seconds = a.rest_s;
  cfg.noise = a.noise;
  if (a.format != "bin" && a.format != "csv") throw ConfigError("--format must be bin or csv");

  const auto recordings = generate_synthetic(cfg);
  std::error_code ec;
  fs::create_directories(a.out_dir, ec);
  if (ec) throw IoError("cannot create '" + a.out_dir + "': " + ec.message());
  for (std::size_t s = 0; s < recordings.size(); ++s) {
    char name[32];
    std::snprintf(name, sizeof(name), "subject_%02zu.%s", s + 1,
                  a.format == "bin" ? "semg" : "csv");
    const fs::path path = fs::path(a.out_dir) / name;
    if (a.format == "bin") {
      write_recording(path, recordings[s]);
    } else {
      write_recording_csv(path, recordings[s]);
    }
    err << "wrote " << path.string() << " (" << recordings[s].frames << " frames)\n";
    out << path.string() << '\n';
  }
  return kOk;
}

struct PreprocessArgs {
  Overrides config;
  std::vector<std::string> inputs;
  std::optional<std::string> output;
};

int cmd_preprocess(const PreprocessArgs& a, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = a.config.resolve();
  std::vector<std::string> inputs = a.inputs;
  if (inputs.empty() && cfg.input) inputs.push_back(cfg.input->string());
  if (inputs.empty()) throw ConfigError("missing required path: --in");
  const fs::path output = require_path(a.output, cfg.segments, "--out");

  std::vector<SegmentSet> sets;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const Recording rec = read_recording(inputs[i], cfg.sample_rate_hz);
    if (rec.sample_rate_hz != cfg.sample_rate_hz) {
      throw ConfigError("recording '" + inputs[i] + "' is sampled at " +
                        std::to_string(rec.sample_rate_hz) + " Hz, config expects " +
                        std::to_string(cfg.sample_rate_hz));
    }
    if (rec.channels != cfg.channels) {
      throw ConfigError("recording '" + inputs[i] + "' has " + std::to_string(rec.channels) +
                        " channels, config expects " + std::to_string(cfg.channels));
    }
    // Subjects are numbered by input order, starting at 1.
    sets.push_back(preprocess(rec, cfg.preprocess_params(), static_cast<int>(i + 1)));
  }
  SegmentSet all = merge(sets);
  write_segments(output, all);

  std::map<int, std::size_t> per_class;
  for (const Segment& s : all.segments) ++per_class[s.label];
  for (const auto& [label, count] : per_class) {
    err << "class " << label << ": " << count << " segments\n";
  }
  out << "segments=" << all.size() << " L=" << all.length << " C=" << all.channels
      << " path=" << output.string() << '\n';
  return kOk;
}

struct TrainArgs {
  Overrides config;
  std::optional<std::string> segments;
  std::optional<std::string> checkpoint_out;
  std::optional<std::string> trace;
  std::optional<std::string> resume;
};

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = a.config.resolve(false);
  const fs::path seg_path = require_path(a.segments, cfg.segments, "--segments");
  const fs::path ckpt_path = require_path(a.checkpoint_out, cfg.checkpoint, "--checkpoint-out");
  const fs::path trace_path = a.trace ? fs::path(*a.trace) : fs::path(ckpt_path.string() + ".trace.csv");

  const SegmentSet all = read_segments(seg_path);
  const SplitResult parts = split(all, cfg.split_spec());
  const TrainConfig tc = cfg.train_config();

  std::optional<Trainer> trainer;
  if (a.resume) {
    trainer.emplace(Trainer::resume(load_checkpoint(*a.resume), tc));
  } else {
    const ModelConfig mc = ModelConfig::make(all.channels, all.length, cfg.num_patches,
                                             cfg.model_dim, cfg.kernel_size, cfg.num_classes);
    trainer.emplace(TchgrModel(mc, tc.seed), tc);
  }
  const ModelConfig& mc = trainer->model().config();
  check_geometry(mc, parts.train);
  err << "model: " << describe(mc) << " params=" << count_parameters(trainer->model()).total
      << '\n';
  err << "training on " << parts.train.size() << " segments for " << tc.epochs << " epochs\n";

  std::vector<EpochStats> trace;
  if (tc.epochs > 0) {
    if (parts.train.empty()) throw UsageError("no training segments after the split");
    trace = trainer->run(parts.train, tc.epochs);
    for (const EpochStats& s : trace) {
      err << "epoch " << s.epoch << " loss=" << s.loss << " train_acc=" << s.train_accuracy << '\n';
    }
  }
  save_checkpoint(ckpt_path, trainer->checkpoint());
  write_trace_csv(trace_path, trace);

  std::vector<int> labels;
  for (const Segment& s : parts.train.segments) labels.push_back(s.label);
  const std::string acc = parts.train.empty()
                              ? "nan"
                              : format_double(accuracy(predict_all(trainer->model(), parts.train), labels));
  out << "checkpoint=" << ckpt_path.string() << " trace=" << trace_path.string()
      << " train_acc=" << acc << '\n';
  return kOk;
}

struct EvalArgs {
  Overrides config;
  std::optional<std::string> checkpoint;
  std::optional<std::string> segments;
  std::optional<std::string> out_dir;
  std::string model_id = "model";
};

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = a.config.resolve(false);
  const fs::path ckpt_path = require_path(a.checkpoint, cfg.checkpoint, "--checkpoint");
  const fs::path seg_path = require_path(a.segments, cfg.segments, "--segments");
  const fs::path out_dir = require_path(a.out_dir, cfg.out_dir, "--out-dir");

  const Trainer trainer = Trainer::resume(load_checkpoint(ckpt_path), cfg.train_config());
  const SegmentSet test = split(read_segments(seg_path), cfg.split_spec()).test;
  check_geometry(trainer.model().config(), test);
  if (test.empty()) throw UsageError("no test segments after the split");

  const std::vector<int> predicted = predict_all(trainer.model(), test);
  std::map<int, std::pair<std::size_t, std::size_t>> tally;  // subject → (hits, total)
  for (std::size_t i = 0; i < test.size(); ++i) {
    auto& [hits, total] = tally[test.segments[i].subject];
    hits += predicted[i] == test.segments[i].label;
    ++total;
  }
  std::map<int, double> per_subject;
  for (const auto& [subject, counts] : tally) {
    per_subject[subject] = static_cast<double>(counts.first) / static_cast<double>(counts.second);
    err << "subject " << subject << ": accuracy " << per_subject[subject] << '\n';
  }
  const std::vector<EvalReport> reports{aggregate(per_subject, a.model_id)};
  const EmittedFiles files = emit_report(reports, {}, out_dir);
  out << "per_subject=" << files.per_subject.front().string()
      << " summary=" << files.summary.string() << " mean=" << format_double(reports[0].mean)
      << " std=" << format_double(reports[0].std) << '\n';
  return kOk;
}

struct ParamsArgs {
  Overrides config;
  bool all_variants = false;
};

int cmd_params(const ParamsArgs& a, std::ostream& out, std::ostream& err) {
  const RunConfig base = a.config.resolve();
  std::vector<RunConfig> variants;
  if (a.all_variants) {
    for (int window : {200, 300}) {
      for (std::size_t n : {std::size_t{10}, window == 200 ? std::size_t{16} : std::size_t{15}}) {
        for (std::size_t d : {std::size_t{12}, std::size_t{16}}) {
          RunConfig v = base;
          v.window_ms = window;
          v.stride_ms.reset();
          v.num_patches = n;
          v.model_dim = d;
          v.validate();
          variants.push_back(v);
        }
      }
    }
  } else {
    variants.push_back(base);
  }

  out << "window_ms,N,D,P,Z,k,embedding,attention,blocks,classifier,total,ratio\n";
  for (const RunConfig& v : variants) {
    const ModelConfig mc = v.model_config();
    const ParameterCount count = count_parameters(TchgrModel::zeros(mc));
    const double ratio = static_cast<double>(kReferenceLstmParams) / static_cast<double>(count.total);
    err << std::setw(4) << v.window_ms << " ms  " << describe(mc) << '\n'
        << "  embedding  " << count.embedding << "\n  attention  " << count.attention
        << "\n  blocks     " << count.blocks << "\n  classifier " << count.classifier
        << "\n  total      " << count.total << "  (reference " << kReferenceLstmParams
        << " is " << std::fixed << std::setprecision(1) << ratio << "x larger)\n"
        << std::defaultfloat << std::setprecision(6);
    out << v.window_ms << ',' << mc.num_patches << ',' << mc.model_dim << ',' << mc.patch_len
        << ',' << mc.num_blocks << ',' << mc.kernel_size << ',' << count.embedding << ','
        << count.attention << ',' << count.blocks << ',' << count.classifier << ','
        << count.total << ',' << format_double(ratio) << '\n';
  }
  return kOk;
}

struct CompareArgs {
  std::vector<std::string> reports;
  std::string output;
};

std::string model_id_from_path(const fs::path& path) {
  std::string stem = path.stem().string();
  constexpr std::string_view prefix = "per_subject_";
  if (stem.starts_with(prefix)) stem = stem.substr(prefix.size());
  return stem;
}

int cmd_compare(const CompareArgs& a, std::ostream& out, std::ostream& err) {
  if (a.reports.size() < 2) throw UsageError("compare needs at least two per-subject CSVs");
  std::vector<EvalReport> reports;
  for (const std::string& path : a.reports) {
    reports.push_back(aggregate(read_per_subject_csv(path), model_id_from_path(path)));
  }
  const auto comparisons = compare_to_baseline(reports);
  write_comparisons_csv(a.output, comparisons);
  for (const Comparison& c : comparisons) {
    err << c.model_a << " vs " << c.model_b << ": W=" << c.result.statistic
        << " p=" << c.result.p_value << " (" << to_string(c.result.method) << ", n="
        << c.result.n_effective << ") " << c.band << '\n';
  }
  out << "comparisons=" << a.output << '\n';
  return kOk;
}

int exit_code_for(const Error& e) {
  if (dynamic_cast<const TrainingError*>(&e)) return kNumericalError;
  if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const FormatError*>(&e)) return kIoError;
  return kConfigError;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"TC-HGR sEMG gesture recognition pipeline", "tchgr"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic 17-class sEMG recordings");
  synth_cmd->add_option("--out", synth.out_dir, "Output directory")->required();
  synth_cmd->add_option("--subjects", synth.subjects, "Number of subjects");
  synth_cmd->add_option("--seed", synth.seed, "RNG seed (fallback: TCHGR_SEED)");
  synth_cmd->add_option("--classes", synth.classes, "Gesture classes");
  synth_cmd->add_option("--reps", synth.reps, "Repetitions per gesture");
  synth_cmd->add_option("--active-s", synth.active_s, "Gesture duration in seconds");
  synth_cmd->add_option("--rest-s", synth.rest_s, "Rest duration in seconds");
  synth_cmd->add_option("--noise", synth.noise, "Gaussian noise standard deviation");
  synth_cmd->add_option("--format", synth.format, "bin (SEMG-BIN) or csv");

  PreprocessArgs pre;
  auto* pre_cmd = app.add_subcommand("preprocess", "Filter, normalize, mu-law and segment recordings");
  add_config_options(*pre_cmd, pre.config);
  pre_cmd->add_option("--in", pre.inputs, "Recording files (SEMG-BIN or CSV), one per subject");
  pre_cmd->add_option("--out", pre.output, "Output segment file");

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train a model on the training repetitions");
  add_config_options(*train_cmd, tr.config);
  train_cmd->add_option("--segments", tr.segments, "Segment file from preprocess");
  train_cmd->add_option("--checkpoint-out", tr.checkpoint_out, "Checkpoint to write");
  train_cmd->add_option("--trace", tr.trace, "Per-epoch CSV (default: <checkpoint>.trace.csv)");
  train_cmd->add_option("--resume", tr.resume, "Continue from this checkpoint");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on the test repetitions");
  add_config_options(*eval_cmd, ev.config);
  eval_cmd->add_option("--checkpoint", ev.checkpoint, "Checkpoint file");
  eval_cmd->add_option("--segments", ev.segments, "Segment file from preprocess");
  eval_cmd->add_option("--out-dir", ev.out_dir, "Directory for report CSVs");
  eval_cmd->add_option("--model-id", ev.model_id, "Model identifier used in file names");

  ParamsArgs pa;
  auto* params_cmd = app.add_subcommand("params", "Print the parameter-count breakdown");
  add_config_options(*params_cmd, pa.config);
  params_cmd->add_flag("--all-variants", pa.all_variants, "Audit all eight W/N/D variants");

  CompareArgs cmp;
  auto* compare_cmd = app.add_subcommand("compare", "Wilcoxon comparison of the first report against the rest");
  compare_cmd->add_option("reports", cmp.reports, "Per-subject CSVs; the first is the baseline")->required();
  compare_cmd->add_option("--out", cmp.output, "Comparison CSV to write")->required();

  std::vector<std::string> storage{"tchgr"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (std::string& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (synth_cmd->parsed()) return cmd_synth(synth, out, err);
    if (pre_cmd->parsed()) return cmd_preprocess(pre, out, err);
    if (train_cmd->parsed()) return cmd_train(tr, out, err);
    if (eval_cmd->parsed()) return cmd_eval(ev, out, err);
    if (params_cmd->parsed()) return cmd_params(pa, out, err);
    if (compare_cmd->parsed()) return cmd_compare(cmp, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  }
  return kConfigError;
}

}  // namespace tchgr::cli
