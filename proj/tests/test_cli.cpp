#include <doctest.h>

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "msdn/checkpoint.hpp"
#include "msdn/inference.hpp"
#include "msdn/tensor_io.hpp"
#include "support.hpp"

using namespace msdn;
using nlohmann::json;
using test::TempDir;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "msdnpp");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string p(const test::fs::path& path) { return path.string(); }

std::vector<std::string> csv_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

// Dataset generated once for the whole file.
const TempDir& shared_data() {
  static const TempDir dir("cli_data");
  static const bool made = [] {
    REQUIRE(run({"gen-synth", "--out", p(dir.path()), "--seed", "7"}).code == 0);
    return true;
  }();
  (void)made;
  return dir;
}

}  // namespace

TEST_CASE("gen-synth is deterministic and self-validating") {
  TempDir a("gen_a"), b("gen_b");
  const Result r = run({"gen-synth", "--out", p(a.path()), "--seed", "7"});
  CHECK(r.code == 0);
  CHECK(r.out.find("10 classes") != std::string::npos);
  CHECK(run({"gen-synth", "--out", p(b.path()), "--seed", "7"}).code == 0);
  CHECK(test::snapshot(a.path()) == test::snapshot(b.path()));
  CHECK_NOTHROW(load_dataset(a.path()));
}

TEST_CASE("gen-synth rejects out-of-range config") {
  TempDir dir("gen_bad");
  const Result r = run({"gen-synth", "--out", p(dir / "d"), "--classes", "3"});
  CHECK(r.code == 2);
  CHECK(r.err.find("classes") != std::string::npos);
  CHECK_FALSE(test::fs::exists(dir / "d"));
}

TEST_CASE("flag and usage errors exit 2, help exits 0") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"train"}).code == 2);
  CHECK(run({"train", "--data", "x", "--epochs", "many"}).code == 2);
  CHECK(run({"train", "--data", "x", "--preset", "imagenet"}).code == 2);
  CHECK(run({"train", "--data", "x", "--intervention", "sideways"}).code == 2);
  CHECK(run({"--help"}).code == 0);
  const Result help = run({"train", "--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("--lambda-causal") != std::string::npos);
}

TEST_CASE("missing inputs exit 3") {
  TempDir dir("missing");
  CHECK(run({"train", "--data", p(dir / "nope"), "--run-dir", p(dir / "run")}).code == 3);
  CHECK(run({"eval", "--data", p(shared_data().path()), "--run-dir", p(dir / "run")}).code == 3);
}

TEST_CASE("train writes a checkpoint and a log") {
  TempDir run_dir("train");
  const Result r = run({"train", "--data", p(shared_data().path()), "--run-dir", p(run_dir.path()), "--epochs", "1",
                        "--seed", "1"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("epoch 1") != std::string::npos);
  const Checkpoint cp = load_checkpoint(run_dir / "checkpoint");
  CHECK(cp.metadata["epoch"] == 1);
  CHECK(cp.metadata["seed"] == 1);
  CHECK(cp.metadata["loss_history"].size() == 1);
  const json log = json::parse(test::read_text(run_dir / "train_log.json"));
  CHECK(log["epochs"].size() == 1);
  CHECK(log["epochs"][0].contains("seconds"));
}

TEST_CASE("presets set loss weights and explicit flags override them") {
  TempDir run_dir("preset");
  REQUIRE(run({"train", "--data", p(shared_data().path()), "--run-dir", p(run_dir.path()), "--epochs", "0",
               "--preset", "cub"})
              .code == 0);
  json hp = load_checkpoint(run_dir / "checkpoint").metadata["hyperparams"];
  CHECK(hp["lambda_cal"] == 0.05);
  CHECK(hp["lambda_ar"] == 0.03);
  CHECK(hp["lambda_causal"] == 0.3);
  CHECK(hp["lambda_distill"] == 0.001);
  CHECK(hp["learning_rate"] == 0.0001);
  CHECK(hp["batch_size"] == 50);

  REQUIRE(run({"train", "--data", p(shared_data().path()), "--run-dir", p(run_dir.path()), "--epochs", "0",
               "--preset", "sun", "--lambda-ar", "0.5"})
              .code == 0);
  const json meta = load_checkpoint(run_dir / "checkpoint").metadata;
  CHECK(meta["hyperparams"]["lambda_ar"] == 0.5);
  CHECK(meta["hyperparams"]["lambda_distill"] == 0.05);
  CHECK(meta["fusion"]["alpha1"] == 0.7);
}

TEST_CASE("config files: keys apply, flags win, unknown keys are rejected") {
  TempDir dir("config");
  {
    std::ofstream cfg(dir / "good.cfg");
    cfg << "# comment\nepochs = 1\nlr=0.01\nintervention=uniform\n";
    std::ofstream bad(dir / "bad.cfg");
    bad << "epochs=1\nlearning_rate_typo=0.1\n";
  }
  REQUIRE(run({"train", "--data", p(shared_data().path()), "--run-dir", p(dir / "r"), "--config", p(dir / "good.cfg"),
               "--lr", "0.02"})
              .code == 0);
  const json hp = load_checkpoint(dir / "r" / "checkpoint").metadata["hyperparams"];
  CHECK(hp["epochs"] == 1);
  CHECK(hp["learning_rate"] == 0.02);
  CHECK(hp["intervention"] == "uniform");

  const Result bad = run({"train", "--data", p(shared_data().path()), "--run-dir", p(dir / "r2"), "--config",
                          p(dir / "bad.cfg")});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("learning_rate_typo") != std::string::npos);
  CHECK(run({"train", "--data", p(shared_data().path()), "--config", p(dir / "absent.cfg")}).code == 2);
}

TEST_CASE("identical train invocations give identical checkpoints") {
  TempDir a("det_a"), b("det_b");
  for (const auto* dir : {&a, &b}) {
    REQUIRE(run({"train", "--data", p(shared_data().path()), "--run-dir", p(dir->path()), "--epochs", "3"}).code == 0);
  }
  CHECK(test::snapshot(a / "checkpoint") == test::snapshot(b / "checkpoint"));
}

TEST_CASE("eval on an untrained checkpoint gives finite metrics and the H formula") {
  TempDir run_dir("eval");
  REQUIRE(run({"train", "--data", p(shared_data().path()), "--run-dir", p(run_dir.path()), "--epochs", "0"}).code == 0);
  const Result r = run({"eval", "--data", p(shared_data().path()), "--run-dir", p(run_dir.path()), "--setting", "gzsl"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("U ") != std::string::npos);
  CHECK(r.out.find("S ") != std::string::npos);
  CHECK(r.out.find("H ") != std::string::npos);
  const json report = json::parse(test::read_text(run_dir / "eval_report.json"));
  CHECK_FALSE(report.contains("czsl"));
  const double U = report["gzsl"]["U"], S = report["gzsl"]["S"], H = report["gzsl"]["H"];
  CHECK(std::isfinite(H));
  CHECK(std::abs(H - (S + U > 0 ? 2 * S * U / (S + U) : 0.0)) <= 1e-9);
  CHECK(test::fs::exists(run_dir / "per_class_acc.csv"));
}

TEST_CASE("eval matches a counting oracle on a 4-class toy") {
  TempDir dir("toy");
  const Dataset d = test::tiny_dataset(4, 4, 3, 3, 5, 2, 17, 4);
  save_dataset(d, dir / "data");
  const ModelParams params = init_params(d.feature_dim(), d.attribute_dim(), 5);
  save_checkpoint(dir / "run" / "checkpoint", params, json::object());
  REQUIRE(run({"eval", "--data", p(dir / "data"), "--run-dir", p(dir / "run"), "--alpha1", "0.6", "--alpha2", "0.4"})
              .code == 0);
  const json report = json::parse(test::read_text(dir / "run" / "eval_report.json"));
  CHECK(report["alpha1"] == 0.6);

  FusionConfig cfg;
  cfg.alpha1 = 0.6;
  cfg.alpha2 = 0.4;
  const auto mean_acc = [&](const std::vector<std::size_t>& idx, Setting setting) {
    cfg.setting = setting;
    std::map<std::size_t, std::pair<int, int>> counts;
    for (auto i : idx) {
      auto& [hit, total] = counts[d.samples[i].label];
      hit += predict(d.samples[i], params, d, cfg) == d.samples[i].label;
      ++total;
    }
    double sum = 0.0;
    for (const auto& [c, ht] : counts) sum += static_cast<double>(ht.first) / ht.second;
    return sum / static_cast<double>(counts.size());
  };
  CHECK(report["czsl"]["acc"].get<double>() == doctest::Approx(mean_acc(d.split.test_unseen_samples, Setting::czsl)));
  CHECK(report["gzsl"]["U"].get<double>() == doctest::Approx(mean_acc(d.split.test_unseen_samples, Setting::gzsl)));
  CHECK(report["gzsl"]["S"].get<double>() == doctest::Approx(mean_acc(d.split.test_seen_samples, Setting::gzsl)));
}

TEST_CASE("intervene-compare emits one row per kind") {
  TempDir run_dir("compare");
  const std::string data = p(shared_data().path());
  REQUIRE(run({"intervene-compare", "--data", data, "--run-dir", p(run_dir.path()), "--epochs", "2"}).code == 0);
  const auto lines = csv_lines(test::read_text(run_dir / "intervene_table.csv"));
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "intervention,acc,U,S,H");
  CHECK(lines[1].rfind("random,", 0) == 0);
  CHECK(lines[2].rfind("uniform,", 0) == 0);
  CHECK(lines[3].rfind("reversed,", 0) == 0);
  CHECK(lines[4].rfind("random_plus_reversed,", 0) == 0);

  REQUIRE(run({"intervene-compare", "--data", data, "--run-dir", p(run_dir.path()), "--epochs", "2",
               "--lambda-causal", "0"})
              .code == 0);
  const auto flat = csv_lines(test::read_text(run_dir / "intervene_table.csv"));
  REQUIRE(flat.size() == 5);
  const auto metrics = [](const std::string& line) { return line.substr(line.find(',')); };
  for (std::size_t i = 2; i < 5; ++i) CHECK(metrics(flat[i]) == metrics(flat[1]));
}

TEST_CASE("intervene-compare eval mode needs a checkpoint") {
  TempDir run_dir("compare_eval");
  const std::string data = p(shared_data().path());
  CHECK(run({"intervene-compare", "--data", data, "--run-dir", p(run_dir.path()), "--mode", "eval"}).code == 3);
  REQUIRE(run({"train", "--data", data, "--run-dir", p(run_dir.path()), "--epochs", "1"}).code == 0);
  REQUIRE(run({"intervene-compare", "--data", data, "--run-dir", p(run_dir.path()), "--mode", "eval"}).code == 0);
  CHECK(csv_lines(test::read_text(run_dir / "intervene_table.csv")).size() == 5);
}

TEST_CASE("export-attention writes maps and a sorted top-N file") {
  TempDir run_dir("export");
  const std::string data = p(shared_data().path());
  REQUIRE(run({"train", "--data", data, "--run-dir", p(run_dir.path()), "--epochs", "2"}).code == 0);
  REQUIRE(run({"export-attention", "--data", data, "--run-dir", p(run_dir.path()), "--samples", "3,5", "--top", "4"})
              .code == 0);

  const Dataset d = load_dataset(data);
  const Checkpoint cp = load_checkpoint(run_dir / "checkpoint");
  const auto dir = run_dir / "attention";
  const AvcaForward fwd = avca_forward(d.samples[3].regions, d.attributes, cp.params.avca, d.class_semantics);
  const Tensor beta = read_msdt(dir / "sample_3_beta.msdt");
  CHECK(beta == to_tensor(fwd.beta));
  const Matrix beta_m = to_matrix(beta);
  for (std::size_t k = 0; k < beta_m.rows(); ++k) {
    double s = 0.0;
    for (double x : beta_m.row(k)) s += x;
    CHECK(std::abs(s - 1.0) < 1e-6);
  }
  const Tensor gamma = read_msdt(dir / "sample_3_gamma.msdt");
  CHECK(gamma == to_tensor(vaca_attention(d.samples[3].regions, d.attributes, cp.params.vaca)));
  CHECK(test::fs::exists(dir / "sample_5_beta.msdt"));
  CHECK(test::fs::exists(dir / "sample_3_beta.attributes.txt"));

  const auto lines = csv_lines(test::read_text(dir / "sample_3_top.tsv"));
  REQUIRE(lines.size() == 5);
  double previous = INFINITY;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const double score = std::stod(lines[i].substr(lines[i].rfind('\t') + 1));
    CHECK(score <= previous);
    previous = score;
  }

  CHECK(run({"export-attention", "--data", data, "--run-dir", p(run_dir.path()), "--samples", "100000"}).code == 2);
}

TEST_CASE("commands never modify the input dataset") {
  TempDir run_dir("readonly");
  const auto before = test::snapshot(shared_data().path());
  const std::string data = p(shared_data().path());
  REQUIRE(run({"train", "--data", data, "--run-dir", p(run_dir.path()), "--epochs", "1"}).code == 0);
  REQUIRE(run({"eval", "--data", data, "--run-dir", p(run_dir.path())}).code == 0);
  REQUIRE(run({"export-attention", "--data", data, "--run-dir", p(run_dir.path()), "--samples", "0"}).code == 0);
  CHECK(test::snapshot(shared_data().path()) == before);
}
