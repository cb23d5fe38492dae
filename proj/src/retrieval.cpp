#include "qgen/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "qgen/errors.hpp"
#include "qgen/text_util.hpp"

namespace qgen {

Bm25Index Bm25Index::build(const DocumentCollection& collection, Bm25Params params) {
  if (collection.documents.empty()) throw DataError("cannot index an empty collection");
  if (params.k1 <= 0.0 || params.b < 0.0 || params.b > 1.0)
    throw ConfigError("bm25 parameters out of range");

  Bm25Index index;
  index.params_ = params;

  std::vector<size_t> order(collection.documents.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return collection.documents[a].id < collection.documents[b].id;
  });

  uint64_t total_len = 0;
  for (size_t ord = 0; ord < order.size(); ++ord) {
    const Document& doc = collection.documents[order[ord]];
    auto tokens = tokenize(doc.prompt_text());
    index.doc_ids_.push_back(doc.id);
    index.doc_lengths_.push_back(tokens.size());
    total_len += tokens.size();

    std::map<std::string, uint32_t> tf;
    for (const auto& t : tokens) tf[t]++;
    for (const auto& [term, freq] : tf)
      index.postings_[term].push_back({static_cast<uint32_t>(ord), freq});
  }
  index.avg_doc_length_ =
      index.doc_ids_.empty() ? 0.0 : static_cast<double>(total_len) / index.doc_ids_.size();
  return index;
}

uint64_t Bm25Index::doc_length(const std::string& doc_id) const {
  auto it = std::lower_bound(doc_ids_.begin(), doc_ids_.end(), doc_id);
  if (it == doc_ids_.end() || *it != doc_id) throw DataError("unknown doc id: " + doc_id);
  return doc_lengths_[static_cast<size_t>(it - doc_ids_.begin())];
}

std::vector<double> Bm25Index::scores_for(const std::vector<std::string>& terms) const {
  std::vector<double> scores(doc_ids_.size(), 0.0);
  const double n = static_cast<double>(doc_ids_.size());
  for (const auto& term : terms) {
    auto it = postings_.find(term);
    if (it == postings_.end()) continue;
    const auto& list = it->second;
    double df = static_cast<double>(list.size());
    double idf = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
    for (const Posting& p : list) {
      double tf = p.term_frequency;
      double norm = params_.k1 * (1.0 - params_.b +
                                  params_.b * static_cast<double>(doc_lengths_[p.doc_ord]) /
                                      (avg_doc_length_ > 0.0 ? avg_doc_length_ : 1.0));
      scores[p.doc_ord] += idf * tf * (params_.k1 + 1.0) / (tf + norm);
    }
  }
  return scores;
}

std::vector<std::pair<std::string, double>> Bm25Index::search(const std::string& query_text,
                                                              size_t k) const {
  if (k == 0) return {};
  auto scores = scores_for(tokenize(query_text));
  std::vector<size_t> hits;
  for (size_t i = 0; i < scores.size(); ++i)
    if (scores[i] > 0.0) hits.push_back(i);
  std::sort(hits.begin(), hits.end(), [&](size_t a, size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return doc_ids_[a] < doc_ids_[b];
  });
  if (hits.size() > k) hits.resize(k);
  std::vector<std::pair<std::string, double>> out;
  out.reserve(hits.size());
  for (size_t i : hits) out.emplace_back(doc_ids_[i], scores[i]);
  return out;
}

double Bm25Index::score_doc(const std::string& query_text, const std::string& doc_id) const {
  auto it = std::lower_bound(doc_ids_.begin(), doc_ids_.end(), doc_id);
  if (it == doc_ids_.end() || *it != doc_id) return 0.0;
  auto ord = static_cast<uint32_t>(it - doc_ids_.begin());
  double total = 0.0;
  const double n = static_cast<double>(doc_ids_.size());
  for (const auto& term : tokenize(query_text)) {
    auto pit = postings_.find(term);
    if (pit == postings_.end()) continue;
    const auto& list = pit->second;
    auto p = std::lower_bound(list.begin(), list.end(), ord,
                              [](const Posting& a, uint32_t b) { return a.doc_ord < b; });
    if (p == list.end() || p->doc_ord != ord) continue;
    double df = static_cast<double>(list.size());
    double idf = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
    double tf = p->term_frequency;
    double norm = params_.k1 * (1.0 - params_.b +
                                params_.b * static_cast<double>(doc_lengths_[ord]) /
                                    (avg_doc_length_ > 0.0 ? avg_doc_length_ : 1.0));
    total += idf * tf * (params_.k1 + 1.0) / (tf + norm);
  }
  return total;
}

void Bm25Index::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write index file: " + path);
  out << "qgen-bm25-index v1\n";
  out << "params " << params_.k1 << " " << params_.b << "\n";
  out << "docs " << doc_ids_.size() << "\n";
  for (size_t i = 0; i < doc_ids_.size(); ++i)
    out << "doc " << doc_ids_[i] << " " << doc_lengths_[i] << "\n";
  out << "terms " << postings_.size() << "\n";
  for (const auto& [term, list] : postings_) {
    out << "term " << term << " " << list.size();
    for (const Posting& p : list) out << " " << p.doc_ord << ":" << p.term_frequency;
    out << "\n";
  }
}

Bm25Index Bm25Index::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open index file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "qgen-bm25-index v1")
    throw DataError("unrecognized index header in " + path);

  Bm25Index index;
  std::string tag;
  {
    std::getline(in, line);
    std::istringstream ss(line);
    ss >> tag >> index.params_.k1 >> index.params_.b;
    if (tag != "params") throw DataError("index file missing params line");
  }
  size_t n_docs = 0;
  {
    std::getline(in, line);
    std::istringstream ss(line);
    ss >> tag >> n_docs;
    if (tag != "docs") throw DataError("index file missing docs line");
  }
  uint64_t total_len = 0;
  for (size_t i = 0; i < n_docs; ++i) {
    std::getline(in, line);
    std::istringstream ss(line);
    std::string id;
    uint64_t len = 0;
    ss >> tag >> id >> len;
    if (tag != "doc") throw DataError("index file truncated in doc section");
    index.doc_ids_.push_back(id);
    index.doc_lengths_.push_back(len);
    total_len += len;
  }
  size_t n_terms = 0;
  {
    std::getline(in, line);
    std::istringstream ss(line);
    ss >> tag >> n_terms;
    if (tag != "terms") throw DataError("index file missing terms line");
  }
  for (size_t i = 0; i < n_terms; ++i) {
    std::getline(in, line);
    std::istringstream ss(line);
    std::string term;
    size_t count = 0;
    ss >> tag >> term >> count;
    if (tag != "term") throw DataError("index file truncated in term section");
    auto& list = index.postings_[term];
    for (size_t p = 0; p < count; ++p) {
      std::string pair;
      ss >> pair;
      size_t colon = pair.find(':');
      if (colon == std::string::npos) throw DataError("malformed posting: " + pair);
      list.push_back({static_cast<uint32_t>(std::stoul(pair.substr(0, colon))),
                      static_cast<uint32_t>(std::stoul(pair.substr(colon + 1)))});
    }
  }
  index.avg_doc_length_ =
      n_docs == 0 ? 0.0 : static_cast<double>(total_len) / static_cast<double>(n_docs);
  return index;
}

std::vector<SyntheticExample> Bm25NegativeMiner::mine(
    const std::vector<SyntheticExample>& relevant) {
  std::vector<SyntheticExample> out;
  for (const auto& ex : relevant) {
    auto hits = index_.search(ex.query, per_query_ + 1);
    size_t taken = 0;
    for (const auto& [doc_id, score] : hits) {
      if (doc_id == ex.doc_id) continue;  // never the query's own source
      SyntheticExample neg;
      neg.query = ex.query;
      neg.doc_id = doc_id;
      neg.label = negative_label_;
      neg.variant = ex.variant;
      neg.verdict = FilterVerdict::Retained;
      neg.stage = "negatives";
      out.push_back(std::move(neg));
      if (++taken == per_query_) break;
    }
  }
  return out;
}

EvalPool augment_eval_pool(const Bm25Index& index, const std::vector<TestQuery>& queries,
                           const Qrels& gold, size_t k) {
  if (k == 0) throw ConfigError("pool depth k must be >= 1");
  EvalPool pool;
  for (const auto& q : queries) {
    if (trim(q.text).empty()) throw DataError("test query without text: " + q.id);
    std::vector<std::pair<std::string, int>> entry;
    std::unordered_set<std::string> seen;
    for (const auto& [doc_id, score] : index.search(q.text, k)) {
      if (seen.insert(doc_id).second) entry.emplace_back(doc_id, gold.grade(q.id, doc_id));
    }
    for (const auto& [doc_id, grade] : gold.judged(q.id)) {
      if (grade > 0 && seen.insert(doc_id).second) entry.emplace_back(doc_id, grade);
    }
    pool.entries[q.id] = std::move(entry);
  }
  return pool;
}

EvalPool judged_eval_pool(const std::vector<TestQuery>& queries, const Qrels& gold) {
  EvalPool pool;
  for (const auto& q : queries) pool.entries[q.id] = gold.judged(q.id);
  return pool;
}

}  // namespace qgen
