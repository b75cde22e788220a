// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>

#include "cli.hpp"
#include "msdn/errors.hpp"
#include "msdn/inference.hpp"
#include "msdn/losses.hpp"
#include "msdn/synthetic.hpp"
#include "msdn/tensor_io.hpp"
#include "msdn/training.hpp"
#include "support.hpp"

using namespace msdn;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "msdnpp");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (code != 0) std::cerr << err.str();
  return code;
}

Outcome gradient_fidelity() {
  const auto start = Clock::now();
  const Dataset d = test::tiny_dataset(3, 4, 3, 3, 5, 1, 2024, 3);
  ModelParams params = init_params(d.feature_dim(), d.attribute_dim(), 1);
  const std::vector<std::size_t> batch = d.split.train_samples;
  const auto interventions = test::random_interventions(d, batch.size(), 5);
  const GradCheckReport report = test::check_total_gradient(d, params, LossWeights::cub(), batch, interventions);
  const double elapsed = seconds_since(start);
  return {report.max_relative_error < 1e-4 && report.per_parameter_errors.size() == 5 && elapsed < 10.0,
          fmt("max relative error %.2e over W1..W_att, %.2f s", report.max_relative_error, elapsed)};
}

Outcome normalization() {
  RngStream rng(1);
  double worst_row = 0.0, worst_shift = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t K = 2 + rng.below(10), R = 1 + rng.below(12), D = 1 + rng.below(8), Da = 1 + rng.below(8);
    const Matrix V = sample_uniform(rng, R, D, -3, 3);
    const Matrix A = sample_uniform(rng, K, Da, -3, 3);
    const ModelParams p = init_params(D, Da, rng.next_u64());
    for (const Matrix& att : {avca_attention(V, A, p.avca), vaca_attention(V, A, p.vaca)}) {
      for (std::size_t r = 0; r < att.rows(); ++r) {
        const auto row = att.row(r);
        worst_row = std::max(worst_row, std::abs(std::accumulate(row.begin(), row.end(), 0.0) - 1.0));
      }
    }
    Vector v(1 + rng.below(20));
    for (auto& x : v) x = rng.uniform(-20, 20);
    Vector shifted = v;
    const double c = rng.uniform(-50, 50);
    for (auto& x : shifted) x += c;
    const Vector a = softmax(v), b = softmax(shifted);
    for (std::size_t i = 0; i < a.size(); ++i) worst_shift = std::max(worst_shift, std::abs(a[i] - b[i]));
  }
  return {worst_row <= 1e-6 && worst_shift <= 1e-9,
          fmt("1000 inputs, worst row-sum error %.1e, worst shift error %.1e", worst_row, worst_shift)};
}

Outcome null_intervention() {
  RngStream rng(2);
  std::size_t exact = 0;
  const std::size_t trials = 200;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t K = 2 + rng.below(8), R = 1 + rng.below(8), D = 1 + rng.below(6), Da = 1 + rng.below(6);
    const Matrix V = sample_uniform(rng, R, D, -2, 2);
    const Matrix A = sample_uniform(rng, K, Da, -2, 2);
    const Matrix Z = sample_uniform(rng, 2 + rng.below(6), K, 0, 1);
    const ModelParams p = init_params(D, Da, rng.next_u64());
    const AvcaForward av = avca_forward(V, A, p.avca, Z);
    const VacaForward va = vaca_forward(V, A, p.vaca, Z);
    const AvcaIntervened av_bar = avca_intervened(V, A, p.avca, av.beta, Z);
    const VacaIntervened va_bar = vaca_intervened(V, A, p.vaca, va.gamma, Z);
    const Vector e1 = avca_causal_effect(av.logits, av_bar.logits_bar);
    const Vector e2 = vaca_causal_effect(va.logits, va_bar.logits_bar);
    const bool zero = std::all_of(e1.begin(), e1.end(), [](double x) { return x == 0.0; }) &&
                      std::all_of(e2.begin(), e2.end(), [](double x) { return x == 0.0; });
    exact += av_bar.logits_bar == av.logits && va_bar.logits_bar == va.logits && zero;
  }
  return {exact == trials, fmt("%.0f/%.0f random cases bit-exact with zero causal effect", double(exact), double(trials))};
}

Outcome detachment() {
  const Dataset d = generate_synthetic({}, 7);
  Hyperparams hp = Hyperparams::synthetic_defaults();
  hp.epochs = 5;
  hp.loss_weights.lambda_causal = 0.0;
  const TrainResult a = train(d, hp);
  hp.intervention_stream = 1;
  const TrainResult b = train(d, hp);
  hp.intervention_stream = 99;
  hp.intervention = InterventionKind::reversed;
  const TrainResult c = train(d, hp);
  const bool same = a.state.params == b.state.params && a.state.params == c.state.params;
  return {same, same ? "5 epochs, three intervention streams give bit-identical parameters"
                     : "parameters differ across intervention streams"};
}

Outcome loss_identities() {
  RngStream rng(3);
  double worst_sym = 0.0, worst_self = 0.0, worst_causal = 0.0;
  bool ar_ok = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.below(10);
    Vector x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rng.uniform(-4, 4);
      y[i] = rng.uniform(-4, 4);
    }
    const Vector p = softmax(x), q = softmax(y);
    worst_self = std::max(worst_self, std::abs(distill_loss(p, p)));
    worst_sym = std::max(worst_sym, std::abs(distill_loss(p, q) - distill_loss(q, p)));

    ar_ok = ar_ok && ar_loss(x, x) == 0.0;
    Vector x2 = x;
    x2[rng.below(n)] += 1e-9;
    ar_ok = ar_ok && ar_loss(x, x2) > 0.0;

    Matrix Z = sample_uniform(rng, 4, n, 0, 1);
    Split split;
    split.seen_classes = {0, 1, 3};
    split.unseen_classes = {2};
    const std::size_t label = split.seen_classes[rng.below(3)];
    const double ce = seen_cross_entropy_grad(x, label, Z, split).value;
    worst_causal = std::max(worst_causal, std::abs(causal_loss(x, x, label, Z, split) - 2.0 * ce));
  }
  return {worst_self == 0.0 && worst_sym <= 1e-12 && ar_ok && worst_causal <= 1e-9,
          fmt("distill(p,p) max %.1e, asymmetry %.1e, causal vs 2CE %.1e; ar zero iff equal", worst_self, worst_sym,
              worst_causal)};
}

Outcome harmonic() {
  const double h = harmonic_mean(60.1, 48.4);
  RngStream rng(4);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double s = rng.uniform(0, 1), u = rng.uniform(0, 1);
    worst = std::max(worst, std::abs(harmonic_mean(s, u) - 2 * s * u / (s + u)));
  }
  return {std::abs(h - 53.6) <= 0.05 && worst <= 1e-9,
          fmt("U=48.4 S=60.1 gives H=%.3f; 100-point grid max error %.1e", h, worst)};
}

Outcome synthetic_end_to_end() {
  const auto start = Clock::now();
  const Dataset d = generate_synthetic({}, 7);
  Hyperparams hp = Hyperparams::synthetic_defaults();
  hp.epochs = 30;
  const TrainResult r = train(d, hp);
  const EvalReport e = evaluate_both(d, r.state.params, FusionConfig{});
  const double elapsed = seconds_since(start);
  return {*e.czsl_acc >= 0.90 && e.gzsl->harmonic >= 0.70 && elapsed < 300.0,
          fmt("CZSL acc %.3f, GZSL H %.3f, %.2f s", *e.czsl_acc, e.gzsl->harmonic, elapsed)};
}

std::vector<std::vector<std::string>> read_table(const test::fs::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(test::read_text(path));
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream cs(line);
    for (std::string cell; std::getline(cs, cell, ',');) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

Outcome ablation_shape() {
  test::TempDir dir("accept_ablation");
  const std::string data = (dir / "data").string();
  if (run_cli({"gen-synth", "--out", data, "--seed", "7"}) != 0) return {false, "gen-synth failed"};
  if (run_cli({"intervene-compare", "--data", data, "--run-dir", (dir / "base").string(), "--lambda-causal", "0"}) !=
      0) {
    return {false, "baseline intervene-compare failed"};
  }
  if (run_cli({"intervene-compare", "--data", data, "--run-dir", (dir / "causal").string()}) != 0) {
    return {false, "intervene-compare failed"};
  }
  const auto base = read_table(dir / "base" / "intervene_table.csv");
  const auto rows = read_table(dir / "causal" / "intervene_table.csv");
  if (base.size() != 4 || rows.size() != 4) return {false, "table does not have 4 rows"};
  bool identical = true;
  for (const auto& row : base) identical = identical && std::equal(row.begin() + 1, row.end(), base[0].begin() + 1);
  const double baseline_h = std::stod(base[0][4]);
  double min_h = 1.0;
  std::string detail;
  for (const auto& row : rows) {
    min_h = std::min(min_h, std::stod(row[4]));
    detail += row[0] + " H=" + fmt("%.3f", std::stod(row[4])) + " ";
  }
  return {identical && min_h >= baseline_h - 0.02,
          "4 rows; lambda_causal=0 rows " + std::string(identical ? "identical" : "DIFFER") +
              fmt(", baseline H=%.3f; ", baseline_h) + detail};
}

Outcome determinism() {
  test::TempDir dir("accept_determinism");
  const std::string data = (dir / "data").string();
  if (run_cli({"gen-synth", "--out", data, "--seed", "11"}) != 0) return {false, "gen-synth failed"};
  for (const char* name : {"a", "b"}) {
    const std::string run_dir = (dir / name).string();
    if (run_cli({"train", "--data", data, "--run-dir", run_dir, "--seed", "5", "--threads", name[0] == 'a' ? "1" : "4"}) != 0 ||
        run_cli({"eval", "--data", data, "--run-dir", run_dir}) != 0) {
      return {false, "train/eval failed"};
    }
  }
  const bool ckpt = test::snapshot(dir / "a" / "checkpoint") == test::snapshot(dir / "b" / "checkpoint");
  const bool report = test::read_text(dir / "a" / "eval_report.json") == test::read_text(dir / "b" / "eval_report.json");
  return {ckpt && report, std::string("checkpoint bytes ") + (ckpt ? "identical" : "DIFFER") + ", eval_report bytes " +
                              (report ? "identical" : "DIFFER")};
}

Outcome format_robustness() {
  Tensor t{{2, 3, 4}, std::vector<float>(24)};
  std::iota(t.data.begin(), t.data.end(), -3.0f);
  const std::vector<std::uint8_t> good = encode_msdt(t);

  std::vector<std::vector<std::uint8_t>> corpus;
  // truncations at every header boundary and through the payload
  for (std::size_t len : {0, 1, 3, 4, 5, 6, 7, 9, 10, 13, 17, 18, 21, 50}) corpus.emplace_back(good.begin(), good.begin() + len);
  for (std::size_t cut = 1; cut <= 8; ++cut) corpus.emplace_back(good.begin(), good.end() - cut);
  // trailing garbage
  for (std::size_t extra : {1, 3, 4, 100}) {
    auto v = good;
    v.insert(v.end(), extra, 0xAB);
    corpus.push_back(v);
  }
  // magic, version and rank corruption
  for (std::size_t i = 0; i < 4; ++i) {
    auto v = good;
    v[i] ^= 0x20;
    corpus.push_back(v);
  }
  for (std::uint8_t version : {0, 2, 255}) {
    auto v = good;
    v[4] = version;
    corpus.push_back(v);
  }
  for (std::uint8_t rank : {0, 4, 200}) {
    auto v = good;
    v[5] = rank;
    corpus.push_back(v);
  }
  // dimension fields that disagree with the payload, including overflow-sized ones
  for (std::size_t byte : {6, 9, 10, 13, 14, 17}) {
    auto v = good;
    v[byte] = 0xFF;
    corpus.push_back(v);
  }
  {
    auto v = good;
    v[6] = 0;  // zero-length first dim, payload still present
    corpus.push_back(v);
  }
  // non-finite payload values: NaN, +Inf, -Inf at several offsets
  const std::uint8_t nan_bytes[][4] = {{0x00, 0x00, 0xC0, 0x7F}, {0x00, 0x00, 0x80, 0x7F}, {0x00, 0x00, 0x80, 0xFF}};
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t pos : {0u, 11u}) {
      auto v = good;
      std::copy(nan_bytes[k], nan_bytes[k] + 4, v.begin() + 18 + 4 * pos);
      corpus.push_back(v);
    }
  }
  {
    RngStream rng(6);
    std::vector<std::uint8_t> noise(64);
    for (auto& b : noise) b = static_cast<std::uint8_t>(rng.below(256));
    corpus.push_back(noise);
  }

  test::TempDir dir("accept_fuzz");
  std::size_t format_errors = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto path = dir / ("case_" + std::to_string(i) + ".msdt");
    write_file_bytes(path, corpus[i]);
    try {
      (void)read_msdt(path);
    } catch (const FormatError&) {
      ++format_errors;
    } catch (const std::exception& e) {
      std::cerr << "case " << i << ": unexpected exception: " << e.what() << '\n';
    }
  }
  return {corpus.size() == 50 && format_errors == corpus.size(),
          fmt("%.0f/%.0f corrupted files rejected with a format error", double(format_errors), double(corpus.size()))};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gradient-fidelity", gradient_fidelity},   {"normalization", normalization},
      {"null-intervention", null_intervention},   {"detachment", detachment},
      {"loss-identities", loss_identities},       {"harmonic-mean", harmonic},
      {"synthetic-end-to-end", synthetic_end_to_end}, {"intervention-ablation", ablation_shape},
      {"determinism", determinism},               {"format-robustness", format_robustness},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
