#include "qgen/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "qgen/rng.hpp"
#include "qgen/text_util.hpp"

namespace qgen {

using nlohmann::json;

namespace {

uint32_t hashed_slot(char ns, const std::string& term) {
  std::string salted;
  salted.push_back(ns);
  salted += term;
  return static_cast<uint32_t>(fnv1a64(salted) % kHashedDim);
}

double sigmoid(double z) {
  if (z > 35.0) return 1.0;
  if (z < -35.0) return 0.0;
  return 1.0 / (1.0 + std::exp(-z));
}

int binarize(const RelevanceLabel& label, const LabelSet& labels,
             std::optional<int> threshold) {
  int cut = threshold.value_or(labels.top().rank);
  return label.rank >= cut ? 1 : 0;
}

}  // namespace

FeatureVector featurize(const std::string& query, const Document& doc) {
  auto q_tokens = tokenize(query);
  auto d_tokens = tokenize(doc.prompt_text());

  std::map<uint32_t, double> acc;
  std::unordered_map<std::string, size_t> q_tf, d_tf;
  for (const auto& t : q_tokens) q_tf[t]++;
  for (const auto& t : d_tokens) d_tf[t]++;

  for (const auto& [term, tf] : q_tf) acc[hashed_slot('q', term)] += static_cast<double>(tf);
  for (const auto& [term, tf] : d_tf) acc[hashed_slot('d', term)] += static_cast<double>(tf);
  size_t shared = 0;
  for (const auto& [term, tf] : q_tf) {
    auto it = d_tf.find(term);
    if (it == d_tf.end()) continue;
    ++shared;
    acc[hashed_slot('x', term)] += static_cast<double>(std::min(tf, it->second));
  }

  size_t q_unique = q_tf.size(), d_unique = d_tf.size();
  size_t union_size = q_unique + d_unique - shared;
  double jaccard = union_size == 0 ? 0.0 : static_cast<double>(shared) / union_size;
  double q_cov = q_unique == 0 ? 0.0 : static_cast<double>(shared) / q_unique;
  double d_cov = d_unique == 0 ? 0.0 : static_cast<double>(shared) / d_unique;
  size_t longer = std::max(q_tokens.size(), d_tokens.size());
  double len_ratio = longer == 0
                         ? 0.0
                         : static_cast<double>(std::min(q_tokens.size(), d_tokens.size())) / longer;
  acc[kHashedDim + 0] = jaccard;
  acc[kHashedDim + 1] = q_cov;
  acc[kHashedDim + 2] = d_cov;
  acc[kHashedDim + 3] = len_ratio;

  FeatureVector fv;
  fv.entries.assign(acc.begin(), acc.end());
  return fv;
}

PointwiseModel PointwiseModel::zero(Hyperparams hp) {
  PointwiseModel m;
  m.weights.assign(kFeatureDim, 0.0);
  m.hyperparams = hp;
  return m;
}

double PointwiseModel::predict(const FeatureVector& features) const {
  double z = bias;
  for (const auto& [idx, value] : features.entries) z += weights[idx] * value;
  return sigmoid(z);
}

double predict_relevance(const PointwiseModel& model, const std::string& query,
                         const Document& doc) {
  return model.predict(featurize(query, doc));
}

double batch_loss(const PointwiseModel& model, const std::vector<FeatureVector>& features,
                  const std::vector<int>& targets, double l2) {
  double loss = 0.0;
  for (size_t i = 0; i < features.size(); ++i) {
    double z = model.bias;
    for (const auto& [idx, value] : features[i].entries) z += model.weights[idx] * value;
    // log(1 + exp(-y*z)) in a numerically stable form
    double yz = (targets[i] == 1 ? 1.0 : -1.0) * z;
    loss += yz > 0 ? std::log1p(std::exp(-yz)) : -yz + std::log1p(std::exp(yz));
  }
  loss /= static_cast<double>(features.size());
  double reg = 0.0;
  for (double w : model.weights) reg += w * w;
  return loss + 0.5 * l2 * reg;
}

void batch_gradient(const PointwiseModel& model, const std::vector<FeatureVector>& features,
                    const std::vector<int>& targets, double l2, std::vector<double>& grad_w,
                    double& grad_b) {
  grad_w.assign(kFeatureDim, 0.0);
  grad_b = 0.0;
  double inv_n = 1.0 / static_cast<double>(features.size());
  for (size_t i = 0; i < features.size(); ++i) {
    double z = model.bias;
    for (const auto& [idx, value] : features[i].entries) z += model.weights[idx] * value;
    double err = sigmoid(z) - static_cast<double>(targets[i]);
    for (const auto& [idx, value] : features[i].entries) grad_w[idx] += err * value * inv_n;
    grad_b += err * inv_n;
  }
  for (uint32_t i = 0; i < kFeatureDim; ++i) grad_w[i] += l2 * model.weights[i];
}

std::pair<PointwiseModel, TrainReport> train(const std::vector<TrainingRow>& rows,
                                             const LabelSet& labels, const Hyperparams& hp,
                                             const std::vector<TrainingRow>* validation) {
  std::vector<FeatureVector> features;
  std::vector<int> targets;
  features.reserve(rows.size());
  targets.reserve(rows.size());
  for (const auto& row : rows) {
    Document doc;
    doc.id = row.doc_id;
    doc.text = row.doc_text;
    features.push_back(featurize(row.query, doc));
    targets.push_back(binarize(row.label, labels, hp.positive_rank_threshold));
  }
  if (std::set<int>(targets.begin(), targets.end()).size() < 2) throw SingleClassDataError();

  PointwiseModel model = PointwiseModel::zero(hp);
  TrainReport report;

  std::vector<size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  SplitMix64 rng(hp.shuffle_seed);

  std::vector<double> grad_w;
  double grad_b = 0.0;
  for (size_t epoch = 0; epoch < hp.epochs; ++epoch) {
    // Fisher-Yates reshuffle per epoch, same seed stream every run
    for (size_t i = 0; i + 1 < order.size(); ++i) {
      size_t j = i + static_cast<size_t>(rng.bounded(order.size() - i));
      std::swap(order[i], order[j]);
    }
    for (size_t start = 0; start < order.size(); start += hp.batch_size) {
      size_t end = std::min(start + hp.batch_size, order.size());
      std::vector<FeatureVector> batch_f;
      std::vector<int> batch_t;
      batch_f.reserve(end - start);
      for (size_t i = start; i < end; ++i) {
        batch_f.push_back(features[order[i]]);
        batch_t.push_back(targets[order[i]]);
      }
      batch_gradient(model, batch_f, batch_t, hp.l2, grad_w, grad_b);
      for (uint32_t i = 0; i < kFeatureDim; ++i) model.weights[i] -= hp.learning_rate * grad_w[i];
      model.bias -= hp.learning_rate * grad_b;
    }
    double loss = batch_loss(model, features, targets, hp.l2);
    if (!std::isfinite(loss)) throw NonFiniteLossError();
    report.epoch_losses.push_back(loss);
  }

  auto accuracy = [&](const std::vector<FeatureVector>& f, const std::vector<int>& t) {
    size_t hit = 0;
    for (size_t i = 0; i < f.size(); ++i) hit += (model.predict(f[i]) >= 0.5 ? 1 : 0) == t[i];
    return f.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(f.size());
  };
  report.train_accuracy = accuracy(features, targets);

  if (validation && !validation->empty()) {
    std::vector<FeatureVector> vf;
    std::vector<int> vt;
    for (const auto& row : *validation) {
      Document doc;
      doc.id = row.doc_id;
      doc.text = row.doc_text;
      vf.push_back(featurize(row.query, doc));
      vt.push_back(binarize(row.label, labels, hp.positive_rank_threshold));
    }
    report.validation_accuracy = accuracy(vf, vt);
  }
  return {std::move(model), std::move(report)};
}

void PointwiseModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model file: " + path);
  out << "qgen-model v1\n";
  out << "dim " << kFeatureDim << "\n";
  out.precision(17);
  out << "bias " << bias << "\n";
  size_t nonzero = 0;
  for (double w : weights) nonzero += w != 0.0;
  out << "weights " << nonzero << "\n";
  for (uint32_t i = 0; i < weights.size(); ++i)
    if (weights[i] != 0.0) out << i << " " << weights[i] << "\n";
}

PointwiseModel PointwiseModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "qgen-model v1")
    throw DataError("unrecognized model header in " + path);
  std::string tag;
  uint32_t dim = 0;
  in >> tag >> dim;
  if (tag != "dim" || dim != kFeatureDim)
    throw DataError("model dimension mismatch in " + path);
  PointwiseModel model = PointwiseModel::zero();
  in >> tag >> model.bias;
  if (tag != "bias") throw DataError("model file missing bias");
  size_t nonzero = 0;
  in >> tag >> nonzero;
  if (tag != "weights") throw DataError("model file missing weights");
  for (size_t i = 0; i < nonzero; ++i) {
    uint32_t idx = 0;
    double value = 0.0;
    in >> idx >> value;
    if (!in || idx >= kFeatureDim) throw DataError("model file truncated");
    model.weights[idx] = value;
  }
  return model;
}

std::vector<TrainingRow> make_training_rows(const std::vector<SyntheticExample>& examples,
                                            const DocumentCollection& corpus) {
  std::vector<TrainingRow> rows;
  for (const auto& ex : examples) {
    if (ex.verdict != FilterVerdict::Retained) continue;
    const Document* doc = corpus.find(ex.doc_id);
    if (!doc) throw DataError("synthetic example references unknown doc: " + ex.doc_id);
    rows.push_back({ex.query, ex.doc_id, doc->prompt_text(), ex.label, ex.variant});
  }
  return rows;
}

void export_training_data(const std::vector<TrainingRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write training data: " + path);
  for (const auto& row : rows) {
    json rec;
    rec["query"] = row.query;
    rec["doc_id"] = row.doc_id;
    rec["doc_text"] = row.doc_text;
    rec["label"] = row.label.name;
    rec["variant"] = row.variant;
    out << rec.dump() << "\n";
  }
}

std::vector<TrainingRow> import_training_data(const std::string& path, const LabelSet& labels) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open training data: " + path);
  std::vector<TrainingRow> rows;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded())
      throw DataError("training data line " + std::to_string(line_no) + ": malformed");
    auto label = labels.find_ci(rec.at("label").get<std::string>());
    if (!label)
      throw DataError("training data line " + std::to_string(line_no) + ": unknown label");
    rows.push_back({rec.at("query").get<std::string>(), rec.at("doc_id").get<std::string>(),
                    rec.at("doc_text").get<std::string>(), *label,
                    rec.value("variant", std::string())});
  }
  return rows;
}

ValidationSplit sample_validation_split(const std::vector<TrainingRow>& rows,
                                        const LabelSet& labels, size_t n, uint64_t seed,
                                        std::optional<int> positive_rank_threshold) {
  std::vector<size_t> positives, negatives;
  for (size_t i = 0; i < rows.size(); ++i) {
    if (binarize(rows[i].label, labels, positive_rank_threshold) == 1)
      positives.push_back(i);
    else
      negatives.push_back(i);
  }

  auto take = [&](std::vector<size_t>& pool, size_t want, uint64_t salt) {
    SplitMix64 rng(mix64(seed, salt));
    size_t count = std::min(want, pool.size());
    for (size_t i = 0; i < count; ++i) {
      size_t j = i + static_cast<size_t>(rng.bounded(pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    std::sort(pool.begin(), pool.end());
    return pool;
  };

  size_t per_bucket = n / 2;
  ValidationSplit split;
  auto pos = take(positives, per_bucket, 1);
  auto neg = take(negatives, per_bucket, 2);
  split.shortage = pos.size() < per_bucket || neg.size() < per_bucket;
  for (size_t i : pos) {
    split.rows.push_back(rows[i]);
    split.per_label[rows[i].label.name]++;
  }
  for (size_t i : neg) {
    split.rows.push_back(rows[i]);
    split.per_label[rows[i].label.name]++;
  }
  return split;
}

}  // namespace qgen
