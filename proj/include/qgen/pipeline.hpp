#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qgen/backend.hpp"
#include "qgen/baseline.hpp"
#include "qgen/corpus.hpp"
#include "qgen/evalmetrics.hpp"
#include "qgen/retrieval.hpp"
#include "qgen/synthgen.hpp"

namespace qgen {

constexpr const char* kToolVersion = "0.1.0";

struct BackendConfig {
  BackendKind kind = BackendKind::Mock;
  std::string model_name = "mock";
  std::optional<std::string> endpoint;
  int timeout_ms = 30000;
  int max_in_flight = 4;
  int max_attempts = 3;
  int retry_backoff_ms = 1000;
  double invalid_rate = 0.0;  // mock only
  double fail_rate = 0.0;     // mock only
};

struct TrainerConfig {
  double learning_rate = 0.05;
  size_t epochs = 20;
  size_t batch_size = 64;
  double l2 = 1e-6;
  std::optional<int> positive_rank_threshold;
};

// One structured config file drives every subcommand; flags override fields,
// env vars carry only secrets (QGEN_BACKEND_URL / QGEN_BACKEND_TOKEN).
struct PipelineConfig {
  std::string corpus_path;
  std::string queries_path;
  std::string qrels_path;
  std::string exemplars_path;
  std::string filter_exemplars_path;  // defaults to exemplars_path

  std::string variant = "pairwise";  // relevant-only | label-conditioned | pairwise |
                                     // iterative-pairwise | all-labels
  LabelSet label_set = LabelSet::binary();
  std::vector<std::pair<std::string, std::string>> label_pairs;
  std::string doc_field = "passage";
  std::map<std::string, std::string> template_overrides;
  size_t max_doc_chars = 4000;

  BackendConfig backend;
  GenerationParams generation;
  FilterMode filter_mode = FilterMode::Scoring;

  size_t sample_size = 0;  // 0 = whole corpus
  uint64_t seed = 42;
  int workers = 1;

  Bm25Params bm25;
  size_t hard_negatives_per_query = 1;
  size_t eval_k = 10;
  size_t pool_k = 20;
  bool gold_negatives = true;
  GainFunction gain = GainFunction::Exponential;

  TrainerConfig trainer;
  size_t validation_n = 0;

  std::string out_dir = "out";

  static PipelineConfig from_file(const std::string& path);
  static PipelineConfig from_json_text(const std::string& text);
  std::string to_canonical_json() const;
  std::string config_hash() const;

  VariantKind variant_kind() const;  // resolves fine-grained pairwise
  TemplateConfig templates() const;
  // validates paths needed by the given subcommand
  void require_paths(const std::vector<std::string>& which) const;
};

struct RunManifest {
  std::string config_hash;
  std::string tool_version;
  std::string started_at;
  std::string finished_at;
  std::map<std::string, StageStats> stages;
  std::map<std::string, std::string> output_digests;  // file name -> fnv1a64 hex

  std::string to_json_text() const;
  static RunManifest from_file(const std::string& path);
};

uint64_t file_digest(const std::string& path);
std::string file_digest_hex(const std::string& path);

// "0.89"-style fixed 2-decimal formatting of num/den: round half up, but a
// true value below 1 never displays as 1.00; zero denominators yield "n/a".
std::string format_fraction(uint64_t numerator, uint64_t denominator);

// Appendix-style statistics table, one row per stage plus a total row.
std::string format_stats_table(const std::map<std::string, StageStats>& stages,
                               const LabelSet& labels);

// stage stats <-> json
std::string stage_stats_to_json_text(const std::map<std::string, StageStats>& stages,
                                     const LabelSet& labels, const std::string& variant);
std::map<std::string, StageStats> stage_stats_from_json_text(const std::string& text,
                                                             LabelSet* labels_out = nullptr);

void save_synthetic_examples(const std::vector<SyntheticExample>& examples,
                             const std::string& path);
std::vector<SyntheticExample> load_synthetic_examples(const std::string& path,
                                                      const LabelSet& labels);
void save_audit_records(const std::vector<GenerationRecord>& records, const std::string& path);

struct GenerateOutcome {
  VariantRunResult run;
  RunManifest manifest;
  std::string synthetic_path;
  std::string audit_path;
  std::string stats_path;
  std::string manifest_path;
};

// sample -> prompt -> generate -> parse -> filter -> dedup, resumable per
// work item through the progress log in out_dir.
GenerateOutcome cmd_generate(const PipelineConfig& config);

DocumentCollection cmd_sample(const PipelineConfig& config, const std::string& out_path);
void cmd_index(const PipelineConfig& config, const std::string& out_path);
size_t cmd_negatives(const PipelineConfig& config, const std::string& synthetic_path,
                     const std::string& out_path);
TrainReport cmd_train(const PipelineConfig& config, const std::string& synthetic_path,
                      const std::string& model_path, const std::string& report_path);
void cmd_export(const PipelineConfig& config, const std::string& synthetic_path,
                const std::string& out_path, const std::string& validation_path = {});
std::string cmd_stats(const std::string& stats_path);

struct EvaluateOutcome {
  NdcgReport report;
  std::string run_path;
  std::string report_path;
};

// scorer_spec: "bm25" | "model:<path>" | "oracle" | "random:<seed>"; or pass
// run_path to score an existing TREC run.
EvaluateOutcome cmd_evaluate(const PipelineConfig& config, const std::string& scorer_spec,
                             const std::string& run_path = {});

std::string cmd_report(const std::string& run_dir);

}  // namespace qgen
