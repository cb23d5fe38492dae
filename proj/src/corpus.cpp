#include "qgen/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "qgen/errors.hpp"
#include "qgen/rng.hpp"
#include "qgen/text_util.hpp"

namespace qgen {

using nlohmann::json;

std::string Document::prompt_text() const {
  if (title && !title->empty()) return *title + ". " + text;
  return text;
}

const Document* DocumentCollection::find(const std::string& id) const {
  if (index_.size() != documents.size()) {
    index_.clear();
    index_.reserve(documents.size());
    for (size_t i = 0; i < documents.size(); ++i) index_.emplace(documents[i].id, i);
  }
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &documents[it->second];
}

CorpusLoadResult load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file: " + path);

  CorpusLoadResult result;
  result.collection.source_path = path;
  std::unordered_set<std::string> seen;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object()) {
      result.errors.push_back({LineErrorKind::MalformedRecord, line_no, {}});
      continue;
    }
    if (!rec.contains("_id") || !rec["_id"].is_string() || rec["_id"].get<std::string>().empty()) {
      result.errors.push_back({LineErrorKind::MissingField, line_no, "_id"});
      continue;
    }
    if (!rec.contains("text") || !rec["text"].is_string()) {
      result.errors.push_back({LineErrorKind::MissingField, line_no, "text"});
      continue;
    }
    Document doc;
    doc.id = rec["_id"].get<std::string>();
    doc.text = rec["text"].get<std::string>();
    if (rec.contains("title") && rec["title"].is_string() && !rec["title"].get<std::string>().empty())
      doc.title = rec["title"].get<std::string>();
    if (!seen.insert(doc.id).second) {
      result.errors.push_back({LineErrorKind::DuplicateId, line_no, doc.id});
      continue;
    }
    result.collection.documents.push_back(std::move(doc));
  }
  return result;
}

void save_corpus(const DocumentCollection& collection, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write corpus file: " + path);
  for (const auto& doc : collection.documents) {
    json rec;
    rec["_id"] = doc.id;
    if (doc.title) rec["title"] = *doc.title;
    rec["text"] = doc.text;
    out << rec.dump() << "\n";
  }
}

DocumentCollection sample_documents(const DocumentCollection& collection, size_t n,
                                    uint64_t seed) {
  std::vector<size_t> order(collection.documents.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return collection.documents[a].id < collection.documents[b].id;
  });

  size_t take = std::min(n, order.size());
  SplitMix64 rng(seed);
  for (size_t i = 0; i < take; ++i) {
    size_t j = i + static_cast<size_t>(rng.bounded(order.size() - i));
    std::swap(order[i], order[j]);
  }
  order.resize(take);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return collection.documents[a].id < collection.documents[b].id;
  });

  DocumentCollection out;
  out.source_path = collection.source_path;
  out.sample_seed = seed;
  out.documents.reserve(take);
  for (size_t idx : order) out.documents.push_back(collection.documents[idx]);
  return out;
}

QueryLoadResult load_queries(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open queries file: " + path);

  QueryLoadResult result;
  std::unordered_set<std::string> seen;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object()) {
      result.errors.push_back({LineErrorKind::MalformedRecord, line_no, {}});
      continue;
    }
    if (!rec.contains("_id") || !rec["_id"].is_string()) {
      result.errors.push_back({LineErrorKind::MissingField, line_no, "_id"});
      continue;
    }
    if (!rec.contains("text") || !rec["text"].is_string()) {
      result.errors.push_back({LineErrorKind::MissingField, line_no, "text"});
      continue;
    }
    std::string id = rec["_id"].get<std::string>();
    if (!seen.insert(id).second) {
      result.errors.push_back({LineErrorKind::DuplicateId, line_no, id});
      continue;
    }
    result.queries.push_back({std::move(id), rec["text"].get<std::string>()});
  }
  return result;
}

int Qrels::grade(const std::string& query_id, const std::string& doc_id) const {
  auto it = judgments.find({query_id, doc_id});
  return it == judgments.end() ? 0 : it->second;
}

std::vector<std::pair<std::string, int>> Qrels::judged(const std::string& query_id) const {
  std::vector<std::pair<std::string, int>> out;
  auto it = judgments.lower_bound({query_id, std::string()});
  for (; it != judgments.end() && it->first.first == query_id; ++it)
    out.emplace_back(it->first.second, it->second);
  return out;
}

std::vector<std::string> Qrels::query_ids() const {
  std::vector<std::string> out;
  for (const auto& [key, grade] : judgments) {
    if (out.empty() || out.back() != key.first) out.push_back(key.first);
  }
  return out;
}

Qrels load_qrels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open qrels file: " + path);

  Qrels qrels;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, '\t')) cols.push_back(col);
    if (line_no == 1 && cols.size() == 3 && cols[0] == "query-id" && cols[1] == "corpus-id" &&
        cols[2] == "score")
      continue;  // header
    if (cols.size() != 3)
      throw DataError("qrels line " + std::to_string(line_no) + ": expected 3 tab-separated columns");
    int grade = 0;
    try {
      size_t used = 0;
      grade = std::stoi(cols[2], &used);
      if (used != cols[2].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw DataError("qrels line " + std::to_string(line_no) + ": malformed grade '" + cols[2] + "'");
    }
    if (grade < 0)
      throw DataError("qrels line " + std::to_string(line_no) + ": negative grade " + cols[2]);
    auto key = std::make_pair(cols[0], cols[1]);
    if (!qrels.judgments.emplace(key, grade).second)
      throw DataError("qrels line " + std::to_string(line_no) + ": duplicate judgment (" + cols[0] +
                      ", " + cols[1] + ")");
  }
  return qrels;
}

}  // namespace qgen
