#pragma once

#include <map>
#include <string>
#include <vector>

#include "qgen/corpus.hpp"
#include "qgen/synthgen.hpp"

namespace qgen {

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

struct Posting {
  uint32_t doc_ord = 0;  // index into doc_ids (sorted by id)
  uint32_t term_frequency = 0;
};

// Immutable lexical index. Tokenizer: lowercase, split on non-alphanumeric.
// idf = ln((N - df + 0.5) / (df + 0.5) + 1), always positive.
class Bm25Index {
 public:
  Bm25Index() = default;

  static Bm25Index build(const DocumentCollection& collection, Bm25Params params = {});

  // descending score, ties by ascending doc_id, zero scores omitted
  std::vector<std::pair<std::string, double>> search(const std::string& query_text,
                                                     size_t k) const;
  // score of one document for a query (same formula the search path uses)
  double score_doc(const std::string& query_text, const std::string& doc_id) const;

  size_t doc_count() const { return doc_ids_.size(); }
  double avg_doc_length() const { return avg_doc_length_; }
  const std::vector<std::string>& doc_ids() const { return doc_ids_; }
  uint64_t doc_length(const std::string& doc_id) const;

  void save(const std::string& path) const;
  static Bm25Index load(const std::string& path);

  Bm25Params params() const { return params_; }

 private:
  std::vector<double> scores_for(const std::vector<std::string>& terms) const;

  Bm25Params params_;
  std::vector<std::string> doc_ids_;          // sorted
  std::vector<uint64_t> doc_lengths_;         // aligned with doc_ids_
  std::map<std::string, std::vector<Posting>> postings_;  // postings sorted by doc_ord
  double avg_doc_length_ = 0.0;
};

// BM25-backed substitute for a dense hard-negative retriever: for each
// retained relevant example, returns the top-ranked documents other than the
// query's source document, labeled with the bottom label.
class Bm25NegativeMiner : public HardNegativeMiner {
 public:
  Bm25NegativeMiner(const Bm25Index& index, RelevanceLabel negative_label, size_t per_query = 1)
      : index_(index), negative_label_(std::move(negative_label)), per_query_(per_query) {}

  std::vector<SyntheticExample> mine(const std::vector<SyntheticExample>& relevant) override;

 private:
  const Bm25Index& index_;
  RelevanceLabel negative_label_;
  size_t per_query_;
};

struct EvalPool {
  // query_id -> (doc_id, grade), deduped, every gold-positive included
  std::map<std::string, std::vector<std::pair<std::string, int>>> entries;
};

// pool(q) = top-k retrieved ∪ gold-positive docs; grades come from qrels
// where judged, else 0.
EvalPool augment_eval_pool(const Bm25Index& index, const std::vector<TestQuery>& queries,
                           const Qrels& gold, size_t k = 20);

// pool(q) = exactly the judged documents (datasets with gold negatives)
EvalPool judged_eval_pool(const std::vector<TestQuery>& queries, const Qrels& gold);

}  // namespace qgen
