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

#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "mcsep/io/keyvalue.hpp"
#include "mcsep/io/manifest.hpp"
#include "mcsep/io/wav.hpp"
#include "mcsep/metrics/report.hpp"
#include "mcsep/model/checkpoint.hpp"
#include "mcsep/model/separator.hpp"
#include "mcsep/spatial/corpus.hpp"
#include "mcsep/train/cstl.hpp"
#include "mcsep/train/trainer.hpp"

namespace mcsep::cli {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

fs::path with_suffix(const fs::path& p, const std::string& suffix) { return fs::path(p.string() + suffix); }

void write_text(const fs::path& path, const std::string& text) {
  const auto tmp = with_suffix(path, ".tmp");
  {
    std::ofstream f(tmp, std::ios::binary);
    f << text;
    if (!f) throw std::runtime_error("cannot write " + path.string());
  }
  fs::rename(tmp, path);
}

// Removes every registered output unless the command finished.
class OutputGuard {
 public:
  void add(const fs::path& p) { paths_.push_back(p); }
  void commit() { committed_ = true; }
  ~OutputGuard() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& p : paths_) fs::remove(p, ec);
  }

 private:
  std::vector<fs::path> paths_;
  bool committed_ = false;
};

io::KeyValues load_config(const std::string& path) {
  return path.empty() ? io::KeyValues{} : io::KeyValues::load(path);
}

std::string to_text(std::size_t v) { return std::to_string(v); }

// ---- spatialize

struct SpatializeArgs {
  std::string config, out;
  std::uint64_t seed = 0;
  std::size_t mics = 0, speakers = 0, count = 0, threads = 0;
  std::string split;
  bool anechoic = false;
  CLI::Option *seed_opt, *mics_opt, *speakers_opt, *count_opt, *threads_opt, *split_opt;
};

int cmd_spatialize(const SpatializeArgs& a, const RunManifest& base, std::ostream& out) {
  const auto start = Clock::now();
  auto kv = load_config(a.config);
  if (a.seed_opt->count()) kv.set("seed", std::to_string(a.seed));
  if (a.mics_opt->count()) kv.set("mics", to_text(a.mics));
  if (a.speakers_opt->count()) kv.set("speakers", to_text(a.speakers));
  if (a.count_opt->count()) kv.set("count", to_text(a.count));
  if (a.threads_opt->count()) kv.set("threads", to_text(a.threads));
  if (a.split_opt->count()) kv.set("split", a.split);
  if (a.anechoic) kv.set("reverberant", "off");
  const auto config = spatial::corpus_config_from(kv);
  config.validate();

  const fs::path dir(a.out);
  fs::create_directories(dir);
  const auto marker = dir / "INCOMPLETE";
  write_text(marker, "corpus generation did not finish\n");
  std::vector<io::ManifestRow> rows;
  try {
    const auto provider = spatial::make_provider(config);
    rows = spatial::generate_corpus(config, *provider, dir);
  } catch (const std::exception& e) {
    std::error_code ec;
    fs::remove(dir / "manifest.tsv", ec);
    write_text(marker, std::string("corpus generation failed: ") + e.what() + "\n");
    throw;
  }

  RunManifest m = base;
  m.config = spatial::serialize(config);
  m.seed = config.seed;
  if (!config.source_dir.empty()) m.inputs.push_back(config.source_dir);
  m.outputs.push_back(dir / "manifest.tsv");
  m.seconds = seconds_since(start);
  write_run_manifest(dir / "run.json", m);
  fs::remove(marker);

  double t60 = 0, angle = 0;
  for (const auto& r : rows) {
    t60 += r.t60_s / double(rows.size());
    angle += r.angle_deg / double(rows.size());
  }
  out << "wrote " << rows.size() << " mixtures (" << config.mics << " mics, " << config.speakers << " speakers, split "
      << config.split << ") to " << dir.string() << "\n"
      << "mean T60 " << t60 << " s, mean angle difference " << angle << " deg\n";
  return kOk;
}

// ---- train

struct TrainArgs {
  std::string config, train_manifest, valid_manifest, out, init_from, variant, zero_mean, init;
  std::uint64_t seed = 0;
  std::size_t mics = 0, speakers = 0, max_steps = 0, max_epochs = 0, threads = 0;
  CLI::Option *seed_opt, *mics_opt, *speakers_opt, *variant_opt, *zero_mean_opt, *max_steps_opt, *max_epochs_opt,
      *threads_opt;
};

int cmd_train(const TrainArgs& a, const RunManifest& base, std::ostream& out) {
  const auto start = Clock::now();
  auto kv = load_config(a.config);
  if (a.seed_opt->count()) kv.set("seed", std::to_string(a.seed));
  if (a.variant_opt->count()) kv.set("variant", a.variant);
  if (a.mics_opt->count()) kv.set("M", to_text(a.mics));
  if (a.speakers_opt->count()) kv.set("K", to_text(a.speakers));
  if (a.zero_mean_opt->count()) kv.set("zero_mean", a.zero_mean);
  if (a.max_steps_opt->count()) kv.set("max_steps", to_text(a.max_steps));
  if (a.max_epochs_opt->count()) kv.set("max_epochs", to_text(a.max_epochs));
  if (a.threads_opt->count()) kv.set("threads", to_text(a.threads));

  // A starting checkpoint supplies the architecture defaults.
  std::optional<model::Checkpoint> source;
  train::TrainConfig defaults;
  defaults.model = model::ModelConfig::desk();
  if (!a.init_from.empty()) {
    source = model::load_checkpoint(a.init_from);
    defaults.model = source->config;
  }
  const auto config = train::train_config_from(kv, defaults);

  model::ParameterSet<float> init;
  if (!source) {
    init = model::init_parameters<float>(config.model, util::child_seed(config.seed, "init", 0));
  } else if (source->config == config.model) {
    out << "continuing from " << a.init_from << "\n";
    init = source->params;
  } else {
    const auto from = source->config.mics, to = config.model.mics;
    if (to == from)
      throw io::ConfigError("--init-from: the model configuration differs from the checkpoint's, which is " +
                            to_string(source->config.variant) + " with M=" + std::to_string(from));
    if (to != from + 1)
      throw io::ConfigError("--init-from: cannot go from " + std::to_string(from) + " to " + std::to_string(to) +
                            " microphones in one step; transfer adds one microphone at a time, so train the "
                            "intermediate models in sequence");
    train::CstlOptions cstl;
    if (a.init == "gaussian") cstl.init = train::NewSliceInit::gaussian;
    cstl.seed = util::child_seed(config.seed, "cstl", 0);
    init = train::cstl_expand(source->params, source->config, config.model, cstl);
    out << "channel-sequential transfer: " << to_string(source->config.variant) << " M=" << from << " -> "
        << to_string(config.model.variant) << " M=" << to << " (" << a.init << " new slices)\n";
  }

  const auto train_rows = io::read_manifest(a.train_manifest);
  const auto valid_rows = io::read_manifest(a.valid_manifest);
  const auto train_set = train::load_samples(train_rows, config.model.mics);
  const auto valid_set = train::load_samples(valid_rows, config.model.mics);
  out << "training " << to_string(config.model.variant) << " M=" << config.model.mics << " on " << train_set.size()
      << " mixtures, validating on " << valid_set.size() << "\n";

  train::TrainHooks hooks;
  hooks.on_epoch = [&](const train::EpochRecord& r) {
    out << "epoch " << r.epoch << "  train " << r.train_loss << "  valid " << r.valid_loss << "\n" << std::flush;
  };
  const auto result = train::train(train_set, valid_set, config, init, hooks);

  const fs::path ckpt(a.out);
  if (ckpt.has_parent_path()) fs::create_directories(ckpt.parent_path());
  OutputGuard guard;
  const auto history = with_suffix(ckpt, ".history.csv");
  const auto run_json = with_suffix(ckpt, ".run.json");
  guard.add(ckpt);
  guard.add(history);
  guard.add(run_json);
  model::save_checkpoint(ckpt, config.model, result.best);
  write_text(history, train::loss_history_csv(result.history));

  RunManifest m = base;
  m.config = train::serialize(config);
  m.seed = config.seed;
  m.inputs = {a.train_manifest, a.valid_manifest};
  if (!a.init_from.empty()) m.inputs.push_back(a.init_from);
  m.outputs = {ckpt, history};
  m.seconds = seconds_since(start);
  write_run_manifest(run_json, m);
  guard.commit();

  out << "best epoch " << result.best_epoch << " of " << result.history.size() << " (" << result.steps << " steps"
      << (result.early_stopped ? ", stopped early" : "") << "), checkpoint " << ckpt.string() << "\n";
  return kOk;
}

// ---- separate

struct SeparateArgs {
  std::string checkpoint, input, out;
};

int cmd_separate(const SeparateArgs& a, const RunManifest& base, std::ostream& out) {
  const auto start = Clock::now();
  const auto ckpt = model::load_checkpoint(a.checkpoint);
  const auto audio = io::read_wav(a.input);
  const std::size_t expected = ckpt.config.mics;
  if (audio.channels.size() != expected)
    throw std::invalid_argument(a.input + " has " + std::to_string(audio.channels.size()) +
                                " channels; the checkpoint expects " + std::to_string(expected));
  if (audio.sample_rate != 8000)
    throw std::invalid_argument(a.input + " is sampled at " + std::to_string(audio.sample_rate) +
                                " Hz; the model runs at 8000 Hz");
  const auto estimates = model::separate(audio.channels, ckpt.params, ckpt.config);

  const fs::path dir(a.out);
  fs::create_directories(dir);
  const auto stem = fs::path(a.input).stem().string();
  OutputGuard guard;
  RunManifest m = base;
  for (std::size_t k = 0; k < estimates.size(); ++k) {
    const auto path = dir / (stem + "_s" + std::to_string(k + 1) + ".wav");
    guard.add(path);
    io::write_wav(path, io::Audio{audio.sample_rate, {estimates[k]}});
    m.outputs.push_back(path);
  }
  const auto run_json = dir / (stem + ".run.json");
  guard.add(run_json);
  m.config = model::serialize(ckpt.config);
  m.inputs = {a.checkpoint, a.input};
  m.seconds = seconds_since(start);
  write_run_manifest(run_json, m);
  guard.commit();
  out << "wrote " << estimates.size() << " sources of " << audio.frames() << " samples to " << dir.string() << "\n";
  return kOk;
}

// ---- evaluate

struct EvaluateArgs {
  std::vector<std::string> checkpoints;
  std::string manifest, report, zero_mean = "on";
  bool ibm = false, passthrough = false, buckets = false;
  std::size_t threads = 1;
};

int cmd_evaluate(const EvaluateArgs& a, const RunManifest& base, std::ostream& out) {
  const auto start = Clock::now();
  std::vector<metrics::System> systems;
  std::vector<std::string> names;
  for (const auto& path : a.checkpoints) {
    std::string name = fs::path(path).stem().string();
    while (std::find(names.begin(), names.end(), name) != names.end()) name += "+";
    names.push_back(name);
    systems.push_back(metrics::model_system(name, model::load_checkpoint(path)));
  }
  if (a.passthrough) systems.push_back(metrics::passthrough_system());
  if (a.ibm) systems.push_back(metrics::ibm_system());
  if (systems.empty()) throw io::ConfigError("evaluate: give at least one --checkpoint, --ibm or --passthrough");

  metrics::EvaluateOptions options;
  io::KeyValues flags;
  flags.set("zero_mean", a.zero_mean);
  options.si_snr.zero_mean = flags.get_bool("zero_mean", true);
  options.threads = a.threads;
  const auto comparison = metrics::compare_systems(io::read_manifest(a.manifest), systems, options);
  const auto table = metrics::format_table(comparison, a.buckets);

  const fs::path report(a.report);
  if (report.has_parent_path()) fs::create_directories(report.parent_path());
  auto text_path = fs::path(report).replace_extension(".txt");
  if (text_path == report) text_path = with_suffix(report, ".table.txt");
  const auto run_json = with_suffix(report, ".run.json");
  OutputGuard guard;
  guard.add(report);
  guard.add(text_path);
  guard.add(run_json);
  write_text(report, metrics::format_csv(comparison));
  write_text(text_path, table);

  RunManifest m = base;
  m.config = "zero_mean = " + a.zero_mean + "\nbuckets = " + (a.buckets ? "on" : "off") + "\n";
  m.inputs.push_back(a.manifest);
  m.inputs.insert(m.inputs.end(), a.checkpoints.begin(), a.checkpoints.end());
  m.outputs = {report, text_path};
  m.seconds = seconds_since(start);
  write_run_manifest(run_json, m);
  guard.commit();
  out << table;
  return kOk;
}

}  // namespace

std::string version() { return MCSEP_VERSION; }

void write_run_manifest(const fs::path& path, const RunManifest& m) {
  nlohmann::json j;
  j["command"] = m.command;
  j["argv"] = m.argv;
  j["config"] = m.config;
  j["seed"] = m.seed;
  j["version"] = version();
  auto strings = [](const std::vector<fs::path>& ps) {
    std::vector<std::string> out;
    for (const auto& p : ps) out.push_back(fs::absolute(p).lexically_normal().string());
    return out;
  };
  j["inputs"] = strings(m.inputs);
  j["outputs"] = strings(m.outputs);
  j["wall_clock_seconds"] = m.seconds;
  write_text(path, j.dump(2) + "\n");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-channel time-domain speech separation", "mcsep"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  RunManifest base;
  base.argv = args;

  SpatializeArgs sp;
  auto* spatialize = app.add_subcommand("spatialize", "Generate a spatialized mixture corpus");
  spatialize->add_option("--config", sp.config, "Corpus config file (key = value)")->check(CLI::ExistingFile);
  spatialize->add_option("--out", sp.out, "Output directory")->required();
  sp.seed_opt = spatialize->add_option("--seed", sp.seed, "Master seed");
  sp.mics_opt = spatialize->add_option("--mics", sp.mics, "Microphones per mixture");
  sp.speakers_opt = spatialize->add_option("--speakers", sp.speakers, "Speakers per mixture");
  sp.count_opt = spatialize->add_option("--count", sp.count, "Number of mixtures");
  sp.split_opt = spatialize->add_option("--split", sp.split, "Split name; also names the speaker pool");
  sp.threads_opt = spatialize->add_option("--threads", sp.threads, "Worker threads");
  spatialize->add_flag("--anechoic", sp.anechoic, "Direct path only");

  TrainArgs tr;
  tr.init = "zero";
  auto* train_cmd = app.add_subcommand("train", "Train a separator");
  train_cmd->add_option("--config", tr.config, "Training config file (key = value)")->check(CLI::ExistingFile);
  train_cmd->add_option("--train", tr.train_manifest, "Training manifest")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--valid", tr.valid_manifest, "Validation manifest")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--out", tr.out, "Checkpoint path")->required();
  train_cmd->add_option("--init-from", tr.init_from, "Starting checkpoint; one extra microphone triggers transfer")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--init", tr.init, "New-slice initialization for transfer")
      ->check(CLI::IsMember({"zero", "gaussian"}));
  tr.seed_opt = train_cmd->add_option("--seed", tr.seed, "Master seed");
  tr.variant_opt =
      train_cmd->add_option("--variant", tr.variant, "single, ef or lf")->check(CLI::IsMember({"single", "ef", "lf"}));
  tr.mics_opt = train_cmd->add_option("--mics", tr.mics, "Microphones");
  tr.speakers_opt = train_cmd->add_option("--speakers", tr.speakers, "Speakers");
  tr.zero_mean_opt =
      train_cmd->add_option("--zero-mean", tr.zero_mean, "Mean removal in SI-SNR")->check(CLI::IsMember({"on", "off"}));
  tr.max_steps_opt = train_cmd->add_option("--max-steps", tr.max_steps, "Optimizer step limit");
  tr.max_epochs_opt = train_cmd->add_option("--max-epochs", tr.max_epochs, "Epoch limit");
  tr.threads_opt = train_cmd->add_option("--threads", tr.threads, "Worker threads");

  SeparateArgs se;
  auto* separate = app.add_subcommand("separate", "Separate one multichannel WAV file");
  separate->add_option("--checkpoint", se.checkpoint, "Checkpoint")->required()->check(CLI::ExistingFile);
  separate->add_option("--input", se.input, "Mixture WAV")->required()->check(CLI::ExistingFile);
  separate->add_option("--out", se.out, "Output directory")->required();

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Score systems on a manifest");
  evaluate->add_option("--checkpoint", ev.checkpoints, "Checkpoint (repeatable)")->check(CLI::ExistingFile);
  evaluate->add_option("--manifest", ev.manifest, "Manifest to score")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--report", ev.report, "CSV report path")->required();
  evaluate->add_flag("--ibm", ev.ibm, "Add the ideal binary mask oracle");
  evaluate->add_flag("--passthrough", ev.passthrough, "Add the unprocessed mixture");
  evaluate->add_flag("--buckets", ev.buckets, "Print the 15 degree angle-difference table");
  evaluate->add_option("--zero-mean", ev.zero_mean, "Mean removal in SI-SNR")->check(CLI::IsMember({"on", "off"}));
  evaluate->add_option("--threads", ev.threads, "Worker threads");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (spatialize->parsed()) {
      base.command = "spatialize";
      return cmd_spatialize(sp, base, out);
    }
    if (train_cmd->parsed()) {
      base.command = "train";
      return cmd_train(tr, base, out);
    }
    if (separate->parsed()) {
      base.command = "separate";
      return cmd_separate(se, base, out);
    }
    base.command = "evaluate";
    return cmd_evaluate(ev, base, out);
  } catch (const io::ConfigError& e) {
    err << "mcsep: configuration error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "mcsep: error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace mcsep::cli
