#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qgen/backend.hpp"
#include "qgen/corpus.hpp"
#include "qgen/labels.hpp"
#include "qgen/prompting.hpp"

namespace qgen {

struct InvalidReason {
  enum class Kind { MissingPrefix, GarbageContinuation, EmptyQuery, ArityMismatch, UnknownLabel };

  Kind kind;
  std::string detail;  // expected prefix or offending label text
  int got = 0;
  int want = 0;

  std::string describe() const;
};

struct Candidate {
  std::string query;
  RelevanceLabel intended_label;
};

struct ParseResult {
  std::vector<Candidate> candidates;
  std::optional<InvalidReason> invalid;

  bool valid() const { return !invalid.has_value(); }
};

// Parses a cue-completed block (prompt cue + completion text). Valid results
// carry exactly the variant's arity of trimmed single-line queries with their
// intended labels; anything that re-opens a document field becomes
// GarbageContinuation.
ParseResult parse_completion(const Variant& variant, const std::string& text,
                             const LabelSet& labels);

struct GenerationRecord {
  std::string doc_id;
  std::string variant;   // instance name, e.g. "pairwise-pair[Exact,Complement]"
  std::string item_key;  // unique per (doc, variant, stage) work item
  std::string stage;
  int output_index = 0;
  std::string raw_text;
  ParseResult parse;
};

enum class FilterVerdict { Retained, DroppedLabelMismatch, DroppedTie, DroppedDuplicateConflict };

std::string to_string(FilterVerdict v);
FilterVerdict verdict_from_string(const std::string& s);

struct SyntheticExample {
  std::string query;
  std::string doc_id;
  RelevanceLabel label;
  std::string variant;
  FilterVerdict verdict = FilterVerdict::Retained;
  std::string stage;
};

struct LabelPrediction {
  enum class Kind { Label, Tie, Unknown };
  Kind kind = Kind::Unknown;
  std::optional<RelevanceLabel> label;

  static LabelPrediction tie() { return {Kind::Tie, {}}; }
  static LabelPrediction unknown() { return {Kind::Unknown, {}}; }
  static LabelPrediction of(RelevanceLabel l) { return {Kind::Label, std::move(l)}; }
};

// Scores every label name as a continuation of the filter prompt and takes
// the argmax; an exact tie for the maximum returns Tie. Backend failures
// propagate as BackendError so callers can count them.
LabelPrediction predict_label_scoring(Backend& backend, const ExemplarSet& filter_set,
                                      const std::string& query, const Document& doc,
                                      const LabelSet& labels, const TemplateConfig& templates);

// Generates the label (one output, temperature 0) and matches the first line
// case-insensitively against the label set; "X Query: ..." outputs match X.
LabelPrediction predict_label_generation(Backend& backend, const ExemplarSet& filter_set,
                                         const std::string& query, const Document& doc,
                                         const LabelSet& labels, const TemplateConfig& templates);

struct FilterInput {
  std::string query;
  std::string doc_id;
  RelevanceLabel intended_label;
};

// Retained iff prediction matches the intended label; ties and unparseable
// predictions drop as DroppedTie; order is preserved.
std::vector<SyntheticExample> consistency_filter(const std::vector<FilterInput>& candidates,
                                                 const std::vector<LabelPrediction>& predictions,
                                                 const std::string& variant_name,
                                                 const std::string& stage);

struct DedupCounters {
  uint64_t conflict_dropped = 0;     // all instances of multi-label (query, doc) keys
  uint64_t duplicates_collapsed = 0; // same-label repeats beyond the first
};

// Key = (lowercased whitespace-collapsed query, doc_id) over Retained
// examples. Keys carrying >= 2 distinct labels have every instance
// re-verdicted DroppedDuplicateConflict; same-label repeats are removed,
// keeping the first. Counters are reported per stage.
std::map<std::string, DedupCounters> dedup(std::vector<SyntheticExample>& examples);

struct StageStats {
  uint64_t prompt_inputs = 0;
  uint64_t requested_queries = 0;
  uint64_t failed_generations = 0;
  uint64_t invalid_outputs = 0;
  uint64_t valid_query_outputs = 0;
  uint64_t retained = 0;
  uint64_t dropped_label_mismatch = 0;
  uint64_t dropped_tie = 0;
  uint64_t filter_backend_errors = 0;
  uint64_t dropped_duplicate_conflict = 0;
  uint64_t duplicates_collapsed = 0;
  uint64_t filtered_query_outputs = 0;
  uint64_t train_examples = 0;
  uint64_t queries_per_completion = 1;
  // requested_queries x queries_per_completion, the denominator of the
  // percent-valid columns; summed across stages on merge
  uint64_t requested_candidates = 0;
  std::map<std::string, uint64_t> per_label_counts;

  void merge(const StageStats& other);
};

enum class FilterMode { Scoring, Generation };

struct ExemplarSuite {
  ExemplarSet generation;
  std::optional<ExemplarSet> stage2;  // pairwise set for the iterative flow
  ExemplarSet filter;
};

struct RunConfig {
  VariantKind variant = VariantKind::Pairwise;
  LabelSet label_set = LabelSet::binary();
  GenerationParams params;
  FilterMode filter_mode = FilterMode::Scoring;
  // fine-grained pairwise schedule as (first, second) label names
  std::vector<std::pair<std::string, std::string>> label_pair_schedule;
  TemplateConfig templates;
  int workers = 1;
};

class HardNegativeMiner {
 public:
  virtual ~HardNegativeMiner() = default;
  virtual std::vector<SyntheticExample> mine(const std::vector<SyntheticExample>& relevant) = 0;
};

// Everything needed to replay one work item without touching the backend.
struct ItemOutcome {
  std::string key;
  bool failed = false;
  std::vector<GenerationRecord> records;
  std::vector<SyntheticExample> examples;
  uint64_t filter_backend_errors = 0;
};

class ProgressSink {
 public:
  virtual ~ProgressSink() = default;
  virtual bool lookup(const std::string& key, ItemOutcome& out) = 0;
  virtual void store(const ItemOutcome& outcome) = 0;  // invoked in item order
};

struct VariantRunResult {
  std::vector<SyntheticExample> examples;   // every verdict, plus mined negatives
  std::vector<GenerationRecord> records;
  std::map<std::string, StageStats> stages;
};

// Runs the full generate -> parse -> filter -> dedup flow for one variant.
// Per-document work items execute on `config.workers` threads but results
// are committed in item order, so output is identical for any worker count.
VariantRunResult run_variant(Backend& backend, const DocumentCollection& sample,
                             const ExemplarSuite& exemplars, const RunConfig& config,
                             HardNegativeMiner* miner = nullptr,
                             ProgressSink* progress = nullptr);

// ItemOutcome <-> JSON, shared by the progress log and tests.
std::string item_outcome_to_json(const ItemOutcome& outcome);
ItemOutcome item_outcome_from_json(const std::string& line);

}  // namespace qgen
