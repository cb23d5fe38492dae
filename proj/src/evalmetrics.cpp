#include "qgen/evalmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "qgen/text_util.hpp"

namespace qgen {

using nlohmann::json;

namespace {

double gain_of(int grade, GainFunction gain) {
  if (gain == GainFunction::Linear) return static_cast<double>(grade);
  return std::exp2(static_cast<double>(grade)) - 1.0;
}

double dcg(const std::vector<int>& grades, size_t k, GainFunction gain) {
  double total = 0.0;
  size_t depth = std::min(k, grades.size());
  for (size_t i = 0; i < depth; ++i)
    total += gain_of(grades[i], gain) / std::log2(static_cast<double>(i) + 2.0);
  return total;
}

}  // namespace

NdcgReport ndcg_at_k(const RankedRun& run, const Qrels& qrels, const NdcgConfig& cfg) {
  if (run.rankings.empty()) throw DataError("empty run");

  NdcgReport report;
  double total = 0.0;
  for (const auto& [query_id, ranking] : run.rankings) {
    auto judged = qrels.judged(query_id);

    std::vector<int> run_grades;
    run_grades.reserve(ranking.size());
    for (const auto& [doc_id, score] : ranking)
      run_grades.push_back(qrels.grade(query_id, doc_id));

    std::vector<int> ideal;
    ideal.reserve(judged.size());
    for (const auto& [doc_id, grade] : judged) ideal.push_back(grade);
    std::sort(ideal.begin(), ideal.end(), std::greater<int>());

    double idcg = dcg(ideal, cfg.k, cfg.gain);
    double value = 0.0;
    if (idcg > 0.0) {
      value = dcg(run_grades, cfg.k, cfg.gain) / idcg;
    } else {
      report.zero_ideal++;
      report.zero_ideal_queries.push_back(query_id);
    }
    report.per_query[query_id] = value;
    total += value;
    report.evaluated++;
  }

  // qrels queries the run skipped: contribute 0 so dropping hard queries
  // cannot inflate the mean
  for (const auto& query_id : qrels.query_ids())
    if (!run.rankings.count(query_id)) report.missing++;

  size_t denom = report.evaluated + report.missing;
  report.mean = denom == 0 ? 0.0 : total / static_cast<double>(denom);
  return report;
}

RankedRun rank_with_scorer(const Scorer& scorer, const EvalPool& pool,
                           const std::vector<TestQuery>& queries,
                           const DocumentCollection& corpus) {
  std::map<std::string, const TestQuery*> by_id;
  for (const auto& q : queries) by_id[q.id] = &q;

  RankedRun run;
  for (const auto& [query_id, entries] : pool.entries) {
    auto qit = by_id.find(query_id);
    if (qit == by_id.end()) continue;  // pool rows without query text are skipped
    const std::string& text = qit->second->text;

    std::vector<std::pair<std::string, double>> scored;
    scored.reserve(entries.size());
    for (const auto& [doc_id, grade] : entries) {
      const Document* doc = corpus.find(doc_id);
      if (!doc) throw ScorerFailure(query_id, doc_id);
      double s = 0.0;
      try {
        s = scorer(text, *doc);
      } catch (const std::exception&) {
        throw ScorerFailure(query_id, doc_id);
      }
      if (!std::isfinite(s)) throw ScorerFailure(query_id, doc_id);
      scored.emplace_back(doc_id, s);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    run.rankings[query_id] = std::move(scored);
  }
  return run;
}

void save_run(const RankedRun& run, const std::string& path, const std::string& tag) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write run file: " + path);
  for (const auto& [query_id, ranking] : run.rankings) {
    size_t rank = 1;
    for (const auto& [doc_id, score] : ranking) {
      std::ostringstream line;
      line.precision(6);
      line << std::fixed;
      line << query_id << " Q0 " << doc_id << " " << rank << " " << score << " " << tag;
      out << line.str() << "\n";
      ++rank;
    }
  }
}

RankedRun load_run(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open run file: " + path);
  RankedRun run;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::istringstream ss(line);
    std::string qid, q0, doc_id, tag;
    size_t rank = 0;
    double score = 0.0;
    if (!(ss >> qid >> q0 >> doc_id >> rank >> score >> tag))
      throw DataError("run line " + std::to_string(line_no) + ": malformed");
    run.rankings[qid].emplace_back(doc_id, score);
  }
  for (auto& [qid, ranking] : run.rankings) {
    std::sort(ranking.begin(), ranking.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
  }
  return run;
}

void save_ndcg_report(const NdcgReport& report, const NdcgConfig& cfg, const std::string& path,
                      double mean_exponential, double mean_linear) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write metrics report: " + path);
  for (const auto& [query_id, value] : report.per_query) {
    json rec;
    rec["query_id"] = query_id;
    rec["ndcg"] = value;
    out << rec.dump() << "\n";
  }
  json summary;
  summary["mean_ndcg"] = report.mean;
  summary["k"] = cfg.k;
  summary["gain"] = cfg.gain == GainFunction::Exponential ? "exponential" : "linear";
  summary["evaluated"] = report.evaluated;
  summary["missing"] = report.missing;
  summary["zero_ideal"] = report.zero_ideal;
  summary["mean_ndcg_exponential"] = mean_exponential;
  summary["mean_ndcg_linear"] = mean_linear;
  out << summary.dump() << "\n";
}

}  // namespace qgen
