#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qgen/corpus.hpp"
#include "qgen/retrieval.hpp"

namespace qgen {

// per query: (doc_id, score) descending by score, ties by ascending doc_id
struct RankedRun {
  std::map<std::string, std::vector<std::pair<std::string, double>>> rankings;
};

enum class GainFunction { Exponential, Linear };  // 2^r - 1 vs r

struct NdcgConfig {
  size_t k = 10;
  GainFunction gain = GainFunction::Exponential;
};

struct NdcgReport {
  std::map<std::string, double> per_query;
  double mean = 0.0;
  size_t evaluated = 0;   // queries present in the run
  size_t missing = 0;     // qrels queries absent from the run; contribute 0
  size_t zero_ideal = 0;  // queries whose judged grades are all zero
  std::vector<std::string> zero_ideal_queries;
};

// DCG@k = sum_{i=1..k} gain(rel_i) / log2(i + 1); NDCG = DCG / IDCG with the
// ideal ordering of the query's judged grades. Queries with IDCG = 0 score 0
// and are flagged; qrels queries missing from the run score 0 and count in
// the mean.
NdcgReport ndcg_at_k(const RankedRun& run, const Qrels& qrels, const NdcgConfig& cfg);

using Scorer = std::function<double(const std::string& query_text, const Document& doc)>;

struct ScorerFailure : DataError {
  ScorerFailure(const std::string& query_id, const std::string& doc_id)
      : DataError("scorer failed on (" + query_id + ", " + doc_id + ")") {}
};

// Scores every pooled document for every query; resolves documents through
// the collection. Missing pooled documents raise ScorerFailure.
RankedRun rank_with_scorer(const Scorer& scorer, const EvalPool& pool,
                           const std::vector<TestQuery>& queries,
                           const DocumentCollection& corpus);

// TREC run format: "qid Q0 docid rank score tag"
void save_run(const RankedRun& run, const std::string& path, const std::string& tag);
RankedRun load_run(const std::string& path);

// JSON lines: one {query_id, ndcg} record per query plus a trailing summary.
void save_ndcg_report(const NdcgReport& report, const NdcgConfig& cfg, const std::string& path,
                      double mean_exponential, double mean_linear);

}  // namespace qgen
