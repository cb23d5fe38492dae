#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace qgen {

struct Document {
  std::string id;
  std::optional<std::string> title;
  std::string text;

  // Text as it appears in prompts: "title. text" when a title is present.
  std::string prompt_text() const;
};

struct DocumentCollection {
  std::vector<Document> documents;
  std::string source_path;
  std::optional<uint64_t> sample_seed;

  size_t size() const { return documents.size(); }
  const Document* find(const std::string& id) const;

 private:
  mutable std::unordered_map<std::string, size_t> index_;
};

enum class LineErrorKind { MissingField, DuplicateId, MalformedRecord };

struct LineError {
  LineErrorKind kind;
  size_t line_no;      // 1-based
  std::string detail;  // field name or duplicated id
};

struct CorpusLoadResult {
  DocumentCollection collection;
  std::vector<LineError> errors;
};

// Line-delimited records with keys _id, title (optional), text. Bad lines are
// reported and skipped; the collection holds exactly the valid lines in file
// order.
CorpusLoadResult load_corpus(const std::string& path);

void save_corpus(const DocumentCollection& collection, const std::string& path);

// Deterministic sample without replacement: sort ids lexicographically, run a
// partial Fisher-Yates driven by SplitMix64(seed), then sort the selection by
// id. n >= |collection| returns the whole collection (sorted by id).
DocumentCollection sample_documents(const DocumentCollection& collection, size_t n,
                                    uint64_t seed);

struct TestQuery {
  std::string id;
  std::string text;
};

struct QueryLoadResult {
  std::vector<TestQuery> queries;
  std::vector<LineError> errors;
};

// Same line-delimited format with keys _id, text.
QueryLoadResult load_queries(const std::string& path);

struct Qrels {
  // (query_id, doc_id) -> grade >= 0
  std::map<std::pair<std::string, std::string>, int> judgments;

  int grade(const std::string& query_id, const std::string& doc_id) const;
  // judged (doc_id, grade) pairs for one query, in insertion-independent
  // (sorted) order
  std::vector<std::pair<std::string, int>> judged(const std::string& query_id) const;
  std::vector<std::string> query_ids() const;
};

// TSV columns query-id, corpus-id, score; a single header line is detected
// and skipped. Malformed lines, negative grades, and duplicate judgments
// throw DataError naming the line.
Qrels load_qrels(const std::string& path);

}  // namespace qgen
