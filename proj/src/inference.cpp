#include "msdn/inference.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "msdn/avca.hpp"
#include "msdn/errors.hpp"
#include "msdn/parallel.hpp"
#include "msdn/vaca.hpp"

namespace msdn {

void FusionConfig::validate() const {
  if (!(alpha1 >= 0.0) || !(alpha2 >= 0.0) || !std::isfinite(alpha1) || !std::isfinite(alpha2)) {
    throw ArgumentError("fusion: alpha1 and alpha2 must be finite and >= 0");
  }
  if (!(alpha1 + alpha2 > 0.0)) throw ArgumentError("fusion: alpha1 + alpha2 must be > 0");
  if (!(calibration >= 0.0) || !std::isfinite(calibration)) throw ArgumentError("fusion: bad calibration magnitude");
}

Embeddings embed(const Matrix& regions, const Matrix& attributes, const ModelParams& params) {
  Embeddings e;
  e.psi = avca_embed(avca_features(avca_attention(regions, attributes, params.avca), regions), attributes, params.avca);
  const Matrix gamma = vaca_attention(regions, attributes, params.vaca);
  const Vector psi_hat = vaca_embed(regions, vaca_features(gamma, attributes), params.vaca);
  e.psi_attr = vaca_project(psi_hat, regions, attributes, params.vaca);
  return e;
}

ScoredClasses fused_score(std::span<const double> psi, std::span<const double> psi_attr, const Matrix& z,
                          const Split& split, const FusionConfig& cfg) {
  cfg.validate();
  if (psi.size() != z.cols() || psi_attr.size() != z.cols()) {
    throw ShapeError("fused_score: embeddings of length " + std::to_string(psi.size()) + "/" +
                     std::to_string(psi_attr.size()) + " vs prototypes " + z.shape_string());
  }
  const ClassPartition classes(split, z.rows());
  Vector fused(psi.size());
  for (std::size_t k = 0; k < fused.size(); ++k) fused[k] = cfg.alpha1 * psi[k] + cfg.alpha2 * psi_attr[k];

  ScoredClasses out;
  for (std::size_t c = 0; c < z.rows(); ++c) {
    const bool unseen = classes.is_unseen(c);
    if (cfg.setting == Setting::czsl && !unseen) continue;
    out.classes.push_back(c);
    out.scores.push_back(dot(fused, z.row(c)) + (unseen ? cfg.calibration : -cfg.calibration));
  }
  return out;
}

std::size_t argmax_lowest(std::span<const double> scores) {
  if (scores.empty()) throw ArgumentError("argmax over an empty candidate set");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

std::size_t predict(const Sample& sample, const ModelParams& params, const Dataset& dataset, const FusionConfig& cfg) {
  const Embeddings e = embed(sample.regions, dataset.attributes, params);
  const ScoredClasses s = fused_score(e.psi, e.psi_attr, dataset.class_semantics, dataset.split, cfg);
  return s.classes[argmax_lowest(s.scores)];
}

double harmonic_mean(double seen, double unseen) {
  const double sum = seen + unseen;
  return sum > 0.0 ? 2.0 * seen * unseen / sum : 0.0;
}

ClassAccuracy per_class_accuracy(std::span<const std::size_t> labels, std::span<const std::size_t> predictions) {
  if (labels.size() != predictions.size()) throw ShapeError("per_class_accuracy: label/prediction count mismatch");
  if (labels.empty()) throw ArgumentError("per_class_accuracy: no samples");
  std::map<std::size_t, std::pair<std::size_t, std::size_t>> counts;  // class -> (hits, total)
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto& [hits, total] = counts[labels[i]];
    hits += labels[i] == predictions[i] ? 1 : 0;
    ++total;
  }
  ClassAccuracy out;
  for (const auto& [c, ht] : counts) {
    const double acc = static_cast<double>(ht.first) / static_cast<double>(ht.second);
    out.per_class[c] = acc;
    out.mean += acc;
  }
  out.mean /= static_cast<double>(counts.size());
  return out;
}

namespace {

std::vector<std::size_t> predict_all(const Dataset& d, std::span<const std::size_t> indices, const ModelParams& params,
                                     const FusionConfig& cfg, std::size_t threads) {
  std::vector<std::size_t> out(indices.size());
  parallel_for(indices.size(), threads, [&](std::size_t i) { out[i] = predict(d.samples[indices[i]], params, d, cfg); });
  return out;
}

std::vector<std::size_t> labels_of(const Dataset& d, std::span<const std::size_t> indices) {
  std::vector<std::size_t> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(d.samples[i].label);
  return out;
}

void add_confusion(std::map<std::pair<std::size_t, std::size_t>, std::size_t>& into,
                   std::span<const std::size_t> labels, std::span<const std::size_t> predictions) {
  for (std::size_t i = 0; i < labels.size(); ++i) ++into[{labels[i], predictions[i]}];
}

}  // namespace

EvalReport evaluate(const Dataset& d, const ModelParams& params, const FusionConfig& cfg, std::size_t threads) {
  cfg.validate();
  EvalReport report;
  const auto& unseen_idx = d.split.test_unseen_samples;
  const auto& seen_idx = d.split.test_seen_samples;
  if (unseen_idx.empty()) throw ArgumentError("evaluate: test_unseen split is empty");

  const auto unseen_labels = labels_of(d, unseen_idx);
  if (cfg.setting == Setting::czsl) {
    const auto preds = predict_all(d, unseen_idx, params, cfg, threads);
    const ClassAccuracy acc = per_class_accuracy(unseen_labels, preds);
    report.czsl_acc = acc.mean;
    report.czsl_per_class = acc.per_class;
    add_confusion(report.czsl_confusion, unseen_labels, preds);
    return report;
  }

  if (seen_idx.empty()) throw ArgumentError("evaluate: test_seen split is empty (required for GZSL)");
  const auto seen_labels = labels_of(d, seen_idx);
  const auto unseen_preds = predict_all(d, unseen_idx, params, cfg, threads);
  const auto seen_preds = predict_all(d, seen_idx, params, cfg, threads);
  const ClassAccuracy u = per_class_accuracy(unseen_labels, unseen_preds);
  const ClassAccuracy s = per_class_accuracy(seen_labels, seen_preds);
  report.gzsl = GzslMetrics{u.mean, s.mean, harmonic_mean(s.mean, u.mean)};
  report.gzsl_per_class = u.per_class;
  report.gzsl_per_class.insert(s.per_class.begin(), s.per_class.end());
  add_confusion(report.gzsl_confusion, unseen_labels, unseen_preds);
  add_confusion(report.gzsl_confusion, seen_labels, seen_preds);
  return report;
}

EvalReport evaluate_both(const Dataset& d, const ModelParams& params, const FusionConfig& cfg, std::size_t threads) {
  FusionConfig c = cfg;
  c.setting = Setting::czsl;
  EvalReport report = evaluate(d, params, c, threads);
  c.setting = Setting::gzsl;
  EvalReport g = evaluate(d, params, c, threads);
  report.gzsl = g.gzsl;
  report.gzsl_per_class = std::move(g.gzsl_per_class);
  report.gzsl_confusion = std::move(g.gzsl_confusion);
  return report;
}

namespace {

nlohmann::json confusion_json(const std::map<std::pair<std::size_t, std::size_t>, std::size_t>& m) {
  auto arr = nlohmann::json::array();
  for (const auto& [key, count] : m) arr.push_back({{"true", key.first}, {"predicted", key.second}, {"count", count}});
  return arr;
}

nlohmann::json per_class_json(const std::map<std::size_t, double>& m) {
  auto obj = nlohmann::json::object();
  for (const auto& [c, acc] : m) obj[std::to_string(c)] = acc;
  return obj;
}

}  // namespace

std::string eval_report_json(const EvalReport& r, const FusionConfig& cfg) {
  nlohmann::json j;
  j["alpha1"] = cfg.alpha1;
  j["alpha2"] = cfg.alpha2;
  if (r.czsl_acc) {
    j["czsl"] = {{"acc", *r.czsl_acc},
                 {"per_class_acc", per_class_json(r.czsl_per_class)},
                 {"confusion", confusion_json(r.czsl_confusion)}};
  }
  if (r.gzsl) {
    j["gzsl"] = {{"U", r.gzsl->unseen},
                 {"S", r.gzsl->seen},
                 {"H", r.gzsl->harmonic},
                 {"per_class_acc", per_class_json(r.gzsl_per_class)},
                 {"confusion", confusion_json(r.gzsl_confusion)}};
  }
  return j.dump(2) + "\n";
}

std::string per_class_csv(const EvalReport& r, const Dataset& d) {
  std::ostringstream out;
  out.precision(17);
  out << "setting,class,name,accuracy\n";
  const auto emit = [&](const char* setting, const std::map<std::size_t, double>& m) {
    for (const auto& [c, acc] : m) {
      out << setting << ',' << c << ',' << (c < d.class_names.size() ? d.class_names[c] : "") << ',' << acc << '\n';
    }
  };
  emit("czsl", r.czsl_per_class);
  emit("gzsl", r.gzsl_per_class);
  return out.str();
}

}  // namespace msdn
