#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qgen/corpus.hpp"
#include "qgen/synthgen.hpp"

namespace qgen {

// Hashed term space: 2^20 slots shared by three FNV-1a namespaces (query
// terms, document terms, intersection terms) plus 4 dense overlap features
// appended at the end.
constexpr uint32_t kHashedDim = 1u << 20;
constexpr uint32_t kDenseDim = 4;
constexpr uint32_t kFeatureDim = kHashedDim + kDenseDim;

struct FeatureVector {
  std::vector<std::pair<uint32_t, double>> entries;  // sorted by index, unique
};

FeatureVector featurize(const std::string& query, const Document& doc);

struct Hyperparams {
  double learning_rate = 0.05;
  size_t epochs = 20;
  size_t batch_size = 64;
  double l2 = 1e-6;
  uint64_t shuffle_seed = 7;
  // labels with rank >= threshold binarize to positive; unset = top rank only
  std::optional<int> positive_rank_threshold;
};

struct PointwiseModel {
  std::vector<double> weights;  // kFeatureDim
  double bias = 0.0;
  Hyperparams hyperparams;

  static PointwiseModel zero(Hyperparams hp = {});
  double predict(const FeatureVector& features) const;  // sigmoid(w.x + b)

  void save(const std::string& path) const;
  static PointwiseModel load(const std::string& path);
};

struct TrainReport {
  std::vector<double> epoch_losses;  // regularized mean loss after each epoch
  double train_accuracy = 0.0;
  std::optional<double> validation_accuracy;
};

struct TrainingRow {
  std::string query;
  std::string doc_id;
  std::string doc_text;
  RelevanceLabel label;
  std::string variant;
};

struct SingleClassDataError : DataError {
  SingleClassDataError() : DataError("training data contains a single class") {}
};

struct NonFiniteLossError : DataError {
  NonFiniteLossError() : DataError("training loss became non-finite") {}
};

// L2-regularized logistic regression by mini-batch gradient descent over a
// deterministically shuffled order.
std::pair<PointwiseModel, TrainReport> train(const std::vector<TrainingRow>& rows,
                                             const LabelSet& labels, const Hyperparams& hp,
                                             const std::vector<TrainingRow>* validation = nullptr);

double predict_relevance(const PointwiseModel& model, const std::string& query,
                         const Document& doc);

// loss/gradient of one batch, exposed for the finite-difference check
double batch_loss(const PointwiseModel& model, const std::vector<FeatureVector>& features,
                  const std::vector<int>& targets, double l2);
void batch_gradient(const PointwiseModel& model, const std::vector<FeatureVector>& features,
                    const std::vector<int>& targets, double l2, std::vector<double>& grad_w,
                    double& grad_b);

// Resolves synthetic examples against the corpus; only Retained examples
// become rows.
std::vector<TrainingRow> make_training_rows(const std::vector<SyntheticExample>& examples,
                                            const DocumentCollection& corpus);

// line-delimited {query, doc_id, doc_text, label, variant}
void export_training_data(const std::vector<TrainingRow>& rows, const std::string& path);
std::vector<TrainingRow> import_training_data(const std::string& path, const LabelSet& labels);

struct ValidationSplit {
  std::vector<TrainingRow> rows;
  std::map<std::string, size_t> per_label;
  bool shortage = false;  // a label ran out before n/2
};

// n/2 rows per binary bucket (positive = top rank unless threshold set),
// sampled deterministically.
ValidationSplit sample_validation_split(const std::vector<TrainingRow>& rows,
                                        const LabelSet& labels, size_t n, uint64_t seed,
                                        std::optional<int> positive_rank_threshold = {});

}  // namespace qgen
