#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "msdn/attention_common.hpp"
#include "msdn/checkpoint.hpp"
#include "msdn/errors.hpp"
#include "msdn/inference.hpp"
#include "msdn/synthetic.hpp"
#include "msdn/tensor_io.hpp"
#include "msdn/training.hpp"

namespace msdn::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------- options

struct TrainFlags {
  std::string preset = "synthetic";
  double learning_rate = 0;
  std::size_t batch_size = 0;
  std::size_t epochs = 30;
  double momentum = 0, weight_decay = 0, rms_decay = 0, rms_epsilon = 0;
  double lambda_cal = 0, lambda_ar = 0, lambda_causal = 0, lambda_distill = 0;
  std::string intervention = "random";
  std::uint64_t seed = 0;
  std::uint64_t intervention_stream = 0;

  CLI::Option* lr_opt = nullptr;
  CLI::Option* batch_opt = nullptr;
  CLI::Option* momentum_opt = nullptr;
  CLI::Option* wd_opt = nullptr;
  CLI::Option* rms_decay_opt = nullptr;
  CLI::Option* rms_eps_opt = nullptr;
  CLI::Option* cal_opt = nullptr;
  CLI::Option* ar_opt = nullptr;
  CLI::Option* causal_opt = nullptr;
  CLI::Option* distill_opt = nullptr;
};

struct FusionFlags {
  double alpha1 = 0.8, alpha2 = 0.2;
  std::string setting = "both";
  CLI::Option* alpha1_opt = nullptr;
  CLI::Option* alpha2_opt = nullptr;
};

struct Options {
  std::size_t threads = 1;

  // gen-synth
  fs::path synth_out;
  std::uint64_t synth_seed = 0;
  SynthConfig synth;

  // shared by train / eval / intervene-compare / export-attention
  fs::path data;
  fs::path run_dir = "run";
  fs::path checkpoint;
  // Each subcommand owns its flag set so option pointers stay distinct.
  TrainFlags train, compare;
  FusionFlags train_fusion, eval_fusion, compare_fusion;
  std::string compare_mode = "train";

  // export-attention
  std::vector<std::size_t> sample_indices;
  std::size_t top_n = 10;
  fs::path export_out;
};

void add_threads(CLI::App* app, Options& o) {
  app->add_option("--threads", o.threads, "Worker threads for per-sample work (results do not depend on it)")
      ->check(CLI::PositiveNumber);
}

void add_config(CLI::App* app) {
  // Later occurrences win, so explicit flags placed after the expanded config override it.
  app->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app->add_option("--config", "key=value configuration file (keys are long option names)");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Turns a key=value file into "--key value" pairs, rejecting keys the
// subcommand does not define.
std::vector<std::string> config_arguments(const fs::path& path, const CLI::App& sub) {
  std::ifstream in(path);
  if (!in) throw CLI::FileError::Missing(path.string());
  std::vector<std::string> out;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const auto eq = line.find('=');
    const std::string where = path.string() + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw CLI::ConversionError(where + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front()) {
      value = value.substr(1, value.size() - 2);
    }
    const CLI::Option* opt = sub.get_option_no_throw("--" + key);
    if (key.empty() || key == "config" || opt == nullptr) {
      throw CLI::ConfigError::Extras(where + ": unknown key '" + key + "' for " + sub.get_name());
    }
    out.push_back("--" + key);
    out.push_back(value);
  }
  return out;
}

// Expands every --config FILE belonging to the chosen subcommand in place of
// the subcommand name, ahead of the explicit arguments.
std::vector<std::string> expand_config(const std::vector<std::string>& args, const CLI::App& app) {
  if (args.size() < 2) return args;
  const CLI::App* sub = nullptr;
  std::size_t sub_pos = 1;
  for (; sub_pos < args.size(); ++sub_pos) {
    if (args[sub_pos].empty() || args[sub_pos][0] == '-') continue;
    sub = app.get_subcommand_no_throw(args[sub_pos]);
    break;
  }
  if (sub == nullptr) return args;

  std::vector<std::string> explicit_args;
  std::vector<std::string> from_config;
  for (std::size_t i = sub_pos + 1; i < args.size(); ++i) {
    const std::string& a = args[i];
    std::string file;
    if (a == "--config") {
      if (i + 1 >= args.size()) throw CLI::ArgumentMismatch("--config", 1, 0);
      file = args[++i];
    } else if (a.rfind("--config=", 0) == 0) {
      file = a.substr(9);
    } else {
      explicit_args.push_back(a);
      continue;
    }
    auto extra = config_arguments(file, *sub);
    from_config.insert(from_config.end(), extra.begin(), extra.end());
  }
  std::vector<std::string> out(args.begin(), args.begin() + static_cast<std::ptrdiff_t>(sub_pos + 1));
  out.insert(out.end(), from_config.begin(), from_config.end());
  out.insert(out.end(), explicit_args.begin(), explicit_args.end());
  return out;
}

void add_train_flags(CLI::App* app, TrainFlags& t) {
  app->add_option("--preset", t.preset, "Configuration preset")
      ->check(CLI::IsMember({"synthetic", "cub", "sun", "awa2"}))
      ->capture_default_str();
  app->add_option("--epochs", t.epochs, "Training epochs")->capture_default_str();
  t.lr_opt = app->add_option("--lr", t.learning_rate, "Learning rate");
  t.batch_opt = app->add_option("--batch-size", t.batch_size, "Mini-batch size");
  t.momentum_opt = app->add_option("--momentum", t.momentum, "RMSProp momentum");
  t.wd_opt = app->add_option("--weight-decay", t.weight_decay, "Decoupled weight decay");
  t.rms_decay_opt = app->add_option("--rms-decay", t.rms_decay, "RMSProp squared-gradient decay");
  t.rms_eps_opt = app->add_option("--rms-epsilon", t.rms_epsilon, "RMSProp epsilon");
  t.cal_opt = app->add_option("--lambda-cal", t.lambda_cal, "Self-calibration weight");
  t.ar_opt = app->add_option("--lambda-ar", t.lambda_ar, "Attribute regression weight");
  t.causal_opt = app->add_option("--lambda-causal", t.lambda_causal, "Causal loss weight");
  t.distill_opt = app->add_option("--lambda-distill", t.lambda_distill, "Distillation loss weight");
  app->add_option("--intervention", t.intervention, "Intervention attention kind")
      ->check(CLI::IsMember({"random", "uniform", "reversed", "random_plus_reversed"}))
      ->capture_default_str();
  app->add_option("--seed", t.seed, "Seed for initialization, shuffling and interventions")->capture_default_str();
  app->add_option("--intervention-stream", t.intervention_stream, "Selects the intervention RNG substream")
      ->capture_default_str();
}

void add_fusion_flags(CLI::App* app, FusionFlags& f, bool with_setting) {
  f.alpha1_opt = app->add_option("--alpha1", f.alpha1, "AVCA fusion weight (default from checkpoint/preset)");
  f.alpha2_opt = app->add_option("--alpha2", f.alpha2, "VACA fusion weight (default from checkpoint/preset)");
  if (with_setting) {
    app->add_option("--setting", f.setting, "Evaluation setting")
        ->check(CLI::IsMember({"czsl", "gzsl", "both"}))
        ->capture_default_str();
  }
}

// ---------------------------------------------------------------- resolution

struct Preset {
  Hyperparams hp;
  FusionConfig fusion;
};

Preset preset_named(const std::string& name) {
  if (name == "synthetic") return {Hyperparams::synthetic_defaults(), FusionConfig::cub()};
  Preset p{Hyperparams::reference_defaults(), FusionConfig::cub()};
  if (name == "cub") {
    p.hp.loss_weights = LossWeights::cub();
  } else if (name == "sun") {
    p.hp.loss_weights = LossWeights::sun();
    p.fusion = FusionConfig::sun();
  } else if (name == "awa2") {
    p.hp.loss_weights = LossWeights::awa2();
    p.fusion = FusionConfig::awa2();
  } else {
    throw ArgumentError("unknown preset '" + name + "'");
  }
  return p;
}

template <typename T>
void override_if(const CLI::Option* opt, T& target, const T& value) {
  if (opt != nullptr && opt->count() > 0) target = value;
}

Hyperparams resolve_hyperparams(const TrainFlags& t, std::size_t threads) {
  Hyperparams hp = preset_named(t.preset).hp;
  hp.epochs = t.epochs;
  override_if(t.lr_opt, hp.learning_rate, t.learning_rate);
  override_if(t.batch_opt, hp.batch_size, t.batch_size);
  override_if(t.momentum_opt, hp.momentum, t.momentum);
  override_if(t.wd_opt, hp.weight_decay, t.weight_decay);
  override_if(t.rms_decay_opt, hp.rms_decay, t.rms_decay);
  override_if(t.rms_eps_opt, hp.rms_epsilon, t.rms_epsilon);
  override_if(t.cal_opt, hp.loss_weights.lambda_cal, t.lambda_cal);
  override_if(t.ar_opt, hp.loss_weights.lambda_ar, t.lambda_ar);
  override_if(t.causal_opt, hp.loss_weights.lambda_causal, t.lambda_causal);
  override_if(t.distill_opt, hp.loss_weights.lambda_distill, t.lambda_distill);
  hp.intervention = parse_intervention_kind(t.intervention);
  hp.seed = t.seed;
  hp.intervention_stream = t.intervention_stream;
  hp.threads = threads;
  hp.validate();
  return hp;
}

FusionConfig resolve_fusion(const FusionFlags& f, FusionConfig base) {
  override_if(f.alpha1_opt, base.alpha1, f.alpha1);
  override_if(f.alpha2_opt, base.alpha2, f.alpha2);
  base.validate();
  return base;
}

json hyperparams_json(const Hyperparams& hp) {
  return {{"learning_rate", hp.learning_rate},
          {"batch_size", hp.batch_size},
          {"epochs", hp.epochs},
          {"momentum", hp.momentum},
          {"weight_decay", hp.weight_decay},
          {"rms_decay", hp.rms_decay},
          {"rms_epsilon", hp.rms_epsilon},
          {"lambda_cal", hp.loss_weights.lambda_cal},
          {"lambda_ar", hp.loss_weights.lambda_ar},
          {"lambda_causal", hp.loss_weights.lambda_causal},
          {"lambda_distill", hp.loss_weights.lambda_distill},
          {"intervention", std::string(to_string(hp.intervention))},
          {"seed", hp.seed},
          {"intervention_stream", hp.intervention_stream}};
}

json loss_json(const LossReport& r) {
  return {{"acec", r.acec}, {"ar", r.ar}, {"causal", r.causal}, {"distill", r.distill}, {"total", r.total}};
}

void write_text(const fs::path& path, const std::string& text) {
  write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

fs::path checkpoint_dir(const Options& o) { return o.checkpoint.empty() ? o.run_dir / "checkpoint" : o.checkpoint; }

FusionConfig fusion_from_checkpoint(const Checkpoint& cp) {
  FusionConfig f;
  if (cp.metadata.contains("fusion")) {
    f.alpha1 = cp.metadata["fusion"].value("alpha1", f.alpha1);
    f.alpha2 = cp.metadata["fusion"].value("alpha2", f.alpha2);
  }
  return f;
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(4) << v;
  return s.str();
}

// ---------------------------------------------------------------- commands

int cmd_gen_synth(const Options& o, std::ostream& out) {
  o.synth.validate();
  const Dataset d = generate_synthetic(o.synth, o.synth_seed);
  save_dataset(d, o.synth_out);
  out << "wrote " << o.synth_out.string() << ": " << d.name << ", " << d.num_classes() << " classes ("
      << d.split.seen_classes.size() << " seen / " << d.split.unseen_classes.size() << " unseen), K="
      << d.num_attributes() << ", Da=" << d.attribute_dim() << ", R=" << d.regions_per_sample()
      << ", D=" << d.feature_dim() << ", samples=" << d.samples.size() << " (train " << d.split.train_samples.size()
      << ", test seen " << d.split.test_seen_samples.size() << ", test unseen "
      << d.split.test_unseen_samples.size() << ")\n";
  return kOk;
}

json train_and_save(const Dataset& d, const Hyperparams& hp, const FusionConfig& fusion, const fs::path& run_dir,
                    std::ostream& out) {
  const TrainResult result = train(d, hp, [&](std::size_t epoch, const EpochRecord& r) {
    out << "epoch " << epoch << "  total " << fmt(r.loss.total) << "  acec " << fmt(r.loss.acec) << "  ar "
        << fmt(r.loss.ar) << "  causal " << fmt(r.loss.causal) << "  distill " << fmt(r.loss.distill)
        << "  train_acc " << fmt(r.train_accuracy) << '\n';
  });

  json history = json::array();
  json log_epochs = json::array();
  for (std::size_t i = 0; i < result.log.epochs.size(); ++i) {
    const auto& e = result.log.epochs[i];
    history.push_back(e.loss.total);
    json entry = loss_json(e.loss);
    entry["epoch"] = i + 1;
    entry["train_accuracy"] = e.train_accuracy;
    entry["seconds"] = e.seconds;
    log_epochs.push_back(entry);
  }
  const json metadata = {{"dataset", d.name},
                         {"epoch", result.log.epochs.size()},
                         {"seed", hp.seed},
                         {"steps", result.state.steps},
                         {"hyperparams", hyperparams_json(hp)},
                         {"fusion", {{"alpha1", fusion.alpha1}, {"alpha2", fusion.alpha2}}},
                         {"loss_history", history}};
  ensure_dir(run_dir);
  save_checkpoint(run_dir / "checkpoint", result.state.params, metadata);
  const json log = {{"hyperparams", hyperparams_json(hp)}, {"epochs", log_epochs}};
  write_text(run_dir / "train_log.json", log.dump(2) + "\n");
  return metadata;
}

int cmd_train(const Options& o, std::ostream& out) {
  const Hyperparams hp = resolve_hyperparams(o.train, o.threads);
  const FusionConfig fusion = resolve_fusion(o.train_fusion, preset_named(o.train.preset).fusion);
  const Dataset d = load_dataset(o.data);
  train_and_save(d, hp, fusion, o.run_dir, out);
  out << "checkpoint written to " << (o.run_dir / "checkpoint").string() << '\n';
  return kOk;
}

void print_report(const EvalReport& r, std::ostream& out) {
  if (r.czsl_acc) out << "CZSL acc " << fmt(*r.czsl_acc) << '\n';
  if (r.gzsl) out << "GZSL U " << fmt(r.gzsl->unseen) << "  S " << fmt(r.gzsl->seen) << "  H " << fmt(r.gzsl->harmonic) << '\n';
}

EvalReport run_eval(const Dataset& d, const ModelParams& params, FusionConfig fusion, const std::string& setting,
                    std::size_t threads) {
  if (setting == "both") return evaluate_both(d, params, fusion, threads);
  fusion.setting = setting == "czsl" ? Setting::czsl : Setting::gzsl;
  return evaluate(d, params, fusion, threads);
}

int cmd_eval(const Options& o, std::ostream& out) {
  const Checkpoint cp = load_checkpoint(checkpoint_dir(o));
  const FusionConfig fusion = resolve_fusion(o.eval_fusion, fusion_from_checkpoint(cp));
  const Dataset d = load_dataset(o.data);
  const EvalReport report = run_eval(d, cp.params, fusion, o.eval_fusion.setting, o.threads);
  print_report(report, out);
  ensure_dir(o.run_dir);
  write_text(o.run_dir / "eval_report.json", eval_report_json(report, fusion));
  write_text(o.run_dir / "per_class_acc.csv", per_class_csv(report, d));
  return kOk;
}

int cmd_intervene_compare(const Options& o, std::ostream& out) {
  const Hyperparams base = resolve_hyperparams(o.compare, o.threads);
  const Dataset d = load_dataset(o.data);

  std::ostringstream csv;
  csv.precision(17);
  csv << "intervention,acc,U,S,H\n";
  out << std::left << std::setw(22) << "intervention" << std::setw(9) << "acc" << std::setw(9) << "U" << std::setw(9)
      << "S" << "H\n";

  std::optional<Checkpoint> cp;
  if (o.compare_mode == "eval") cp = load_checkpoint(checkpoint_dir(o));
  for (const auto kind : kAllInterventionKinds) {
    Hyperparams hp = base;
    hp.intervention = kind;
    EvalReport report;
    FusionConfig fusion;
    if (cp) {
      // Interventions only act during training, so evaluation rows coincide.
      fusion = resolve_fusion(o.compare_fusion, fusion_from_checkpoint(*cp));
      report = evaluate_both(d, cp->params, fusion, o.threads);
    } else {
      fusion = resolve_fusion(o.compare_fusion, preset_named(o.compare.preset).fusion);
      const TrainResult trained = train(d, hp);
      report = evaluate_both(d, trained.state.params, fusion, o.threads);
    }
    const std::string name(to_string(kind));
    csv << name << ',' << *report.czsl_acc << ',' << report.gzsl->unseen << ',' << report.gzsl->seen << ','
        << report.gzsl->harmonic << '\n';
    out << std::left << std::setw(22) << name << std::setw(9) << fmt(*report.czsl_acc) << std::setw(9)
        << fmt(report.gzsl->unseen) << std::setw(9) << fmt(report.gzsl->seen) << fmt(report.gzsl->harmonic) << '\n';
  }
  ensure_dir(o.run_dir);
  write_text(o.run_dir / "intervene_table.csv", csv.str());
  return kOk;
}

int cmd_export_attention(const Options& o, std::ostream& out) {
  const Checkpoint cp = load_checkpoint(checkpoint_dir(o));
  const Dataset d = load_dataset(o.data);
  if (o.sample_indices.empty()) throw ArgumentError("export-attention: --samples is required");
  if (o.top_n == 0) throw ArgumentError("export-attention: --top must be >= 1");
  const fs::path dir = o.export_out.empty() ? o.run_dir / "attention" : o.export_out;
  ensure_dir(dir);

  for (auto index : o.sample_indices) {
    if (index >= d.samples.size()) {
      throw ArgumentError("export-attention: sample " + std::to_string(index) + " out of range (" +
                          std::to_string(d.samples.size()) + " samples)");
    }
    const Matrix& V = d.samples[index].regions;
    const AvcaForward av = avca_forward(V, d.attributes, cp.params.avca, d.class_semantics);
    const Matrix gamma = vaca_attention(V, d.attributes, cp.params.vaca);
    const std::string stem = "sample_" + std::to_string(index);
    export_attention_map(dir / (stem + "_beta"), av.beta, d.attribute_names);
    export_attention_map(dir / (stem + "_gamma"), gamma, d.attribute_names);

    std::vector<std::size_t> order(av.psi.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return av.psi[a] > av.psi[b]; });
    std::ostringstream top;
    top.precision(9);
    top << "rank\tattribute\tname\tscore\n";
    const std::size_t n = std::min(o.top_n, order.size());
    for (std::size_t i = 0; i < n; ++i) {
      const auto k = order[i];
      top << i + 1 << '\t' << k << '\t' << (k < d.attribute_names.size() ? d.attribute_names[k] : "") << '\t'
          << av.psi[k] << '\n';
    }
    write_text(dir / (stem + "_top.tsv"), top.str());
    out << "sample " << index << " (class " << d.samples[index].label << "): wrote " << stem << "_beta.msdt, "
        << stem << "_gamma.msdt, " << stem << "_top.tsv\n";
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Mutually causal semantic distillation network for zero-shot learning"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen-synth", "Generate a synthetic dataset directory");
  add_config(gen);
  gen->add_option("--out", o.synth_out, "Output dataset directory")->required();
  gen->add_option("--seed", o.synth_seed, "Generator seed")->capture_default_str();
  gen->add_option("--classes", o.synth.classes, "Number of classes (>= 4)")->capture_default_str();
  gen->add_option("--attributes", o.synth.attributes, "Number of attributes K (>= 4)")->capture_default_str();
  gen->add_option("--attribute-dim", o.synth.attribute_dim, "Attribute vector length")->capture_default_str();
  gen->add_option("--regions", o.synth.regions, "Regions per sample R (>= 2)")->capture_default_str();
  gen->add_option("--feature-dim", o.synth.feature_dim, "Region feature length D (>= 2)")->capture_default_str();
  gen->add_option("--samples-per-class", o.synth.samples_per_class, "Samples per class (>= 2)")->capture_default_str();
  gen->add_option("--unseen-fraction", o.synth.unseen_fraction, "Fraction of unseen classes")->capture_default_str();
  gen->add_option("--test-seen-fraction", o.synth.test_seen_fraction, "Held-out fraction of seen-class samples")
      ->capture_default_str();
  gen->add_option("--noise", o.synth.noise, "Region feature noise std")->capture_default_str();
  gen->add_option("--active-fraction", o.synth.active_fraction, "Fraction of active attributes per class")
      ->capture_default_str();

  auto* tr = app.add_subcommand("train", "Train on a dataset directory and write a checkpoint");
  add_config(tr);
  tr->add_option("--data", o.data, "Dataset directory")->required();
  tr->add_option("--run-dir", o.run_dir, "Run directory for outputs")->capture_default_str();
  add_train_flags(tr, o.train);
  add_fusion_flags(tr, o.train_fusion, false);
  add_threads(tr, o);

  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint (CZSL and/or GZSL)");
  add_config(ev);
  ev->add_option("--data", o.data, "Dataset directory")->required();
  ev->add_option("--run-dir", o.run_dir, "Run directory for outputs")->capture_default_str();
  ev->add_option("--checkpoint", o.checkpoint, "Checkpoint directory (default <run-dir>/checkpoint)");
  add_fusion_flags(ev, o.eval_fusion, true);
  add_threads(ev, o);

  auto* cmp = app.add_subcommand("intervene-compare", "Compare intervention kinds");
  add_config(cmp);
  cmp->add_option("--data", o.data, "Dataset directory")->required();
  cmp->add_option("--run-dir", o.run_dir, "Run directory for outputs")->capture_default_str();
  cmp->add_option("--checkpoint", o.checkpoint, "Checkpoint directory for --mode eval");
  cmp->add_option("--mode", o.compare_mode, "Train one model per kind, or only evaluate a checkpoint")
      ->check(CLI::IsMember({"train", "eval"}))
      ->capture_default_str();
  add_train_flags(cmp, o.compare);
  add_fusion_flags(cmp, o.compare_fusion, false);
  add_threads(cmp, o);

  auto* ex = app.add_subcommand("export-attention", "Export attention maps and top attributes for samples");
  add_config(ex);
  ex->add_option("--data", o.data, "Dataset directory")->required();
  ex->add_option("--run-dir", o.run_dir, "Run directory")->capture_default_str();
  ex->add_option("--checkpoint", o.checkpoint, "Checkpoint directory (default <run-dir>/checkpoint)");
  ex->add_option("--samples", o.sample_indices, "Sample indices")->delimiter(',')->required();
  ex->add_option("--top", o.top_n, "Number of top attributes to rank")->capture_default_str();
  ex->add_option("--out", o.export_out, "Output directory (default <run-dir>/attention)");

  try {
    const std::vector<std::string> expanded = expand_config(args, app);
    std::vector<std::string> argv_rev(expanded.rbegin(), expanded.rend() - (expanded.empty() ? 0 : 1));
    app.parse(std::move(argv_rev));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (gen->parsed()) return cmd_gen_synth(o, out);
    if (tr->parsed()) return cmd_train(o, out);
    if (ev->parsed()) return cmd_eval(o, out);
    if (cmp->parsed()) return cmd_intervene_compare(o, out);
    if (ex->parsed()) return cmd_export_attention(o, out);
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kNumericError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  }
  return kConfigError;
}

}  // namespace msdn::cli
