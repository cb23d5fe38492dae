#include "qgen/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "qgen/http_backend.hpp"
#include "qgen/mock_backend.hpp"
#include "qgen/rng.hpp"
#include "qgen/text_util.hpp"

namespace qgen {

namespace fs = std::filesystem;
using nlohmann::json;

// ---- config ------------------------------------------------------------------

namespace {

LabelSet label_set_from_json(const json& j) {
  std::vector<RelevanceLabel> labels;
  for (const auto& item : j)
    labels.push_back({item.at("name").get<std::string>(), item.at("rank").get<int>()});
  return LabelSet(std::move(labels));
}

json label_set_to_json(const LabelSet& set) {
  json out = json::array();
  for (const auto& l : set.labels()) out.push_back({{"name", l.name}, {"rank", l.rank}});
  return out;
}

std::string now_iso8601() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

}  // namespace

PipelineConfig PipelineConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

PipelineConfig PipelineConfig::from_json_text(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ConfigError("config is not a JSON object");

  PipelineConfig c;
  c.corpus_path = j.value("corpus", std::string());
  c.queries_path = j.value("queries", std::string());
  c.qrels_path = j.value("qrels", std::string());
  c.exemplars_path = j.value("exemplars", std::string());
  c.filter_exemplars_path = j.value("filter_exemplars", c.exemplars_path);

  c.variant = j.value("variant", std::string("pairwise"));
  if (j.contains("label_set")) c.label_set = label_set_from_json(j["label_set"]);
  if (j.contains("label_pairs")) {
    for (const auto& pair : j["label_pairs"]) {
      if (!pair.is_array() || pair.size() != 2)
        throw ConfigError("label_pairs entries must be [first, second]");
      c.label_pairs.emplace_back(pair[0].get<std::string>(), pair[1].get<std::string>());
    }
  }
  c.doc_field = j.value("doc_field", std::string("passage"));
  if (j.contains("templates")) {
    for (const auto& [key, value] : j["templates"].items())
      c.template_overrides[key] = value.get<std::string>();
  }
  c.max_doc_chars = j.value("max_doc_chars", static_cast<size_t>(4000));

  if (j.contains("backend")) {
    const auto& b = j["backend"];
    std::string kind = b.value("kind", std::string("mock"));
    if (kind == "mock")
      c.backend.kind = BackendKind::Mock;
    else if (kind == "remote")
      c.backend.kind = BackendKind::Remote;
    else
      throw ConfigError("unknown backend kind: " + kind);
    c.backend.model_name = b.value("model_name", std::string("mock"));
    if (b.contains("endpoint")) c.backend.endpoint = b["endpoint"].get<std::string>();
    c.backend.timeout_ms = b.value("timeout_ms", 30000);
    c.backend.max_in_flight = b.value("max_in_flight", 4);
    c.backend.max_attempts = b.value("max_attempts", 3);
    c.backend.retry_backoff_ms = b.value("retry_backoff_ms", 1000);
    c.backend.invalid_rate = b.value("invalid_rate", 0.0);
    c.backend.fail_rate = b.value("fail_rate", 0.0);
  }

  if (j.contains("generation")) {
    const auto& g = j["generation"];
    c.generation.temperature = g.value("temperature", 0.6);
    c.generation.num_outputs = g.value("num_outputs", 2);
    c.generation.max_tokens = g.value("max_tokens", 64);
    if (g.contains("stop")) c.generation.stop_sequences = g["stop"].get<std::vector<std::string>>();
  }
  {
    std::string mode = j.value("filter_mode", std::string("scoring"));
    if (mode == "scoring")
      c.filter_mode = FilterMode::Scoring;
    else if (mode == "generation")
      c.filter_mode = FilterMode::Generation;
    else
      throw ConfigError("unknown filter_mode: " + mode);
  }

  c.sample_size = j.value("sample_size", static_cast<size_t>(0));
  c.seed = j.value("seed", static_cast<uint64_t>(42));
  c.workers = j.value("workers", 1);
  if (c.workers < 1) throw ConfigError("workers must be >= 1");

  if (j.contains("bm25")) {
    c.bm25.k1 = j["bm25"].value("k1", 1.2);
    c.bm25.b = j["bm25"].value("b", 0.75);
  }
  c.hard_negatives_per_query = j.value("hard_negatives_per_query", static_cast<size_t>(1));
  c.eval_k = j.value("eval_k", static_cast<size_t>(10));
  c.pool_k = j.value("pool_k", static_cast<size_t>(20));
  c.gold_negatives = j.value("gold_negatives", true);
  {
    std::string gain = j.value("gain", std::string("exponential"));
    if (gain == "exponential")
      c.gain = GainFunction::Exponential;
    else if (gain == "linear")
      c.gain = GainFunction::Linear;
    else
      throw ConfigError("unknown gain: " + gain);
  }

  if (j.contains("trainer")) {
    const auto& t = j["trainer"];
    c.trainer.learning_rate = t.value("learning_rate", 0.05);
    c.trainer.epochs = t.value("epochs", static_cast<size_t>(20));
    c.trainer.batch_size = t.value("batch_size", static_cast<size_t>(64));
    c.trainer.l2 = t.value("l2", 1e-6);
    if (t.contains("positive_rank_threshold"))
      c.trainer.positive_rank_threshold = t["positive_rank_threshold"].get<int>();
  }
  c.validation_n = j.value("validation_n", static_cast<size_t>(0));
  c.out_dir = j.value("out", std::string("out"));

  static const char* known_variants[] = {"relevant-only", "label-conditioned", "pairwise",
                                         "iterative-pairwise", "all-labels"};
  if (std::find_if(std::begin(known_variants), std::end(known_variants),
                   [&](const char* v) { return c.variant == v; }) == std::end(known_variants))
    throw ConfigError("unknown variant: " + c.variant);
  return c;
}

std::string PipelineConfig::to_canonical_json() const {
  json j;
  j["corpus"] = corpus_path;
  j["queries"] = queries_path;
  j["qrels"] = qrels_path;
  j["exemplars"] = exemplars_path;
  j["filter_exemplars"] = filter_exemplars_path;
  j["variant"] = variant;
  j["label_set"] = label_set_to_json(label_set);
  json pairs = json::array();
  for (const auto& [a, b] : label_pairs) pairs.push_back({a, b});
  j["label_pairs"] = pairs;
  j["doc_field"] = doc_field;
  j["templates"] = template_overrides;
  j["max_doc_chars"] = max_doc_chars;
  j["backend"] = {{"kind", backend.kind == BackendKind::Mock ? "mock" : "remote"},
                  {"model_name", backend.model_name},
                  {"endpoint", backend.endpoint ? json(*backend.endpoint) : json()},
                  {"timeout_ms", backend.timeout_ms},
                  {"max_in_flight", backend.max_in_flight},
                  {"max_attempts", backend.max_attempts},
                  {"retry_backoff_ms", backend.retry_backoff_ms},
                  {"invalid_rate", backend.invalid_rate},
                  {"fail_rate", backend.fail_rate}};
  j["generation"] = {{"temperature", generation.temperature},
                     {"num_outputs", generation.num_outputs},
                     {"max_tokens", generation.max_tokens},
                     {"stop", generation.stop_sequences}};
  j["filter_mode"] = filter_mode == FilterMode::Scoring ? "scoring" : "generation";
  j["sample_size"] = sample_size;
  j["seed"] = seed;
  j["workers"] = workers;
  j["bm25"] = {{"k1", bm25.k1}, {"b", bm25.b}};
  j["hard_negatives_per_query"] = hard_negatives_per_query;
  j["eval_k"] = eval_k;
  j["pool_k"] = pool_k;
  j["gold_negatives"] = gold_negatives;
  j["gain"] = gain == GainFunction::Exponential ? "exponential" : "linear";
  j["trainer"] = {{"learning_rate", trainer.learning_rate},
                  {"epochs", trainer.epochs},
                  {"batch_size", trainer.batch_size},
                  {"l2", trainer.l2}};
  j["validation_n"] = validation_n;
  j["out"] = out_dir;
  return j.dump();
}

std::string PipelineConfig::config_hash() const {
  // workers and out_dir do not change the artifact
  json j = json::parse(to_canonical_json());
  j.erase("workers");
  j.erase("out");
  std::ostringstream hex;
  hex << std::hex << fnv1a64(j.dump());
  return hex.str();
}

VariantKind PipelineConfig::variant_kind() const {
  if (variant == "relevant-only") return VariantKind::RelevantOnly;
  if (variant == "label-conditioned") return VariantKind::LabelConditioned;
  if (variant == "iterative-pairwise") return VariantKind::IterativeStage2;
  if (variant == "all-labels") return VariantKind::AllLabels;
  if (variant == "pairwise")
    return label_set.is_binary() ? VariantKind::Pairwise : VariantKind::PairwiseLabelPair;
  throw ConfigError("unknown variant: " + variant);
}

TemplateConfig PipelineConfig::templates() const {
  TemplateConfig t;
  t.doc_field = doc_field;
  t.instruction_overrides = template_overrides;
  t.max_doc_chars = max_doc_chars;
  return t;
}

void PipelineConfig::require_paths(const std::vector<std::string>& which) const {
  auto check = [](const std::string& what, const std::string& path) {
    if (path.empty()) throw ConfigError("config missing required path: " + what);
    if (!fs::exists(path)) throw ConfigError(what + " path does not exist: " + path);
  };
  for (const auto& w : which) {
    if (w == "corpus") check("corpus", corpus_path);
    else if (w == "queries") check("queries", queries_path);
    else if (w == "qrels") check("qrels", qrels_path);
    else if (w == "exemplars") check("exemplars", exemplars_path);
    else if (w == "filter_exemplars") check("filter_exemplars", filter_exemplars_path);
  }
}

// ---- digests & stats formatting -----------------------------------------------

uint64_t file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file for digest: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return fnv1a64(ss.str());
}

std::string file_digest_hex(const std::string& path) {
  std::ostringstream hex;
  hex << std::hex << file_digest(path);
  return hex.str();
}

std::string format_fraction(uint64_t numerator, uint64_t denominator) {
  if (denominator == 0) return "n/a";
  double value = static_cast<double>(numerator) / static_cast<double>(denominator);
  double rounded = std::floor(value * 100.0 + 0.5) / 100.0;
  if (rounded >= 1.0 && numerator < denominator) rounded = 0.99;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", rounded);
  return buf;
}

namespace {

uint64_t pct_denominator(const StageStats& s) {
  return s.requested_candidates ? s.requested_candidates
                                : s.requested_queries * s.queries_per_completion;
}

}  // namespace

std::string format_stats_table(const std::map<std::string, StageStats>& stages,
                               const LabelSet& labels) {
  std::vector<std::string> label_names;
  for (const auto& l : labels.labels()) label_names.push_back(l.name);

  std::vector<std::string> header = {"Stage",          "Prompt Inputs",  "Requested Queries",
                                     "Valid Query Outputs", "Filtered Query Outputs",
                                     "Train Examples"};
  for (const auto& name : label_names) header.push_back(name + " Examples");
  header.push_back("% Valid Queries");
  header.push_back("% Valid Examples");
  header.push_back(labels.bottom().name + "/" + labels.top().name);

  auto row_of = [&](const std::string& name, const StageStats& s) {
    std::vector<std::string> row = {name,
                                    std::to_string(s.prompt_inputs),
                                    std::to_string(s.requested_queries),
                                    std::to_string(s.valid_query_outputs),
                                    std::to_string(s.filtered_query_outputs),
                                    std::to_string(s.train_examples)};
    for (const auto& label : label_names) {
      auto it = s.per_label_counts.find(label);
      row.push_back(std::to_string(it == s.per_label_counts.end() ? 0 : it->second));
    }
    uint64_t denom = pct_denominator(s);
    row.push_back(format_fraction(s.valid_query_outputs, denom));
    row.push_back(format_fraction(s.filtered_query_outputs, denom));
    uint64_t bottom = 0, top = 0;
    if (auto it = s.per_label_counts.find(labels.bottom().name); it != s.per_label_counts.end())
      bottom = it->second;
    if (auto it = s.per_label_counts.find(labels.top().name); it != s.per_label_counts.end())
      top = it->second;
    row.push_back(format_fraction(bottom, top));
    return row;
  };

  std::vector<std::vector<std::string>> rows;
  rows.push_back(header);
  StageStats total;
  total.queries_per_completion = 0;
  for (const auto& [name, s] : stages) {
    rows.push_back(row_of(name, s));
    total.merge(s);
  }
  if (stages.size() > 1) rows.push_back(row_of("total", total));

  std::vector<size_t> widths(header.size(), 0);
  for (const auto& row : rows)
    for (size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());

  std::ostringstream out;
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << "  ";
      out << row[i];
      if (i + 1 < row.size()) out << std::string(widths[i] - row[i].size(), ' ');
    }
    out << "\n";
  }
  return out.str();
}

// ---- stage stats json ----------------------------------------------------------

namespace {

json stage_to_json(const StageStats& s) {
  json j;
  j["prompt_inputs"] = s.prompt_inputs;
  j["requested_queries"] = s.requested_queries;
  j["failed_generations"] = s.failed_generations;
  j["invalid_outputs"] = s.invalid_outputs;
  j["valid_query_outputs"] = s.valid_query_outputs;
  j["retained"] = s.retained;
  j["dropped_label_mismatch"] = s.dropped_label_mismatch;
  j["dropped_tie"] = s.dropped_tie;
  j["filter_backend_errors"] = s.filter_backend_errors;
  j["dropped_duplicate_conflict"] = s.dropped_duplicate_conflict;
  j["duplicates_collapsed"] = s.duplicates_collapsed;
  j["filtered_query_outputs"] = s.filtered_query_outputs;
  j["train_examples"] = s.train_examples;
  j["queries_per_completion"] = s.queries_per_completion;
  j["requested_candidates"] = s.requested_candidates;
  j["per_label_counts"] = s.per_label_counts;
  return j;
}

StageStats stage_from_json(const json& j) {
  StageStats s;
  s.prompt_inputs = j.value("prompt_inputs", 0ULL);
  s.requested_queries = j.value("requested_queries", 0ULL);
  s.failed_generations = j.value("failed_generations", 0ULL);
  s.invalid_outputs = j.value("invalid_outputs", 0ULL);
  s.valid_query_outputs = j.value("valid_query_outputs", 0ULL);
  s.retained = j.value("retained", 0ULL);
  s.dropped_label_mismatch = j.value("dropped_label_mismatch", 0ULL);
  s.dropped_tie = j.value("dropped_tie", 0ULL);
  s.filter_backend_errors = j.value("filter_backend_errors", 0ULL);
  s.dropped_duplicate_conflict = j.value("dropped_duplicate_conflict", 0ULL);
  s.duplicates_collapsed = j.value("duplicates_collapsed", 0ULL);
  s.filtered_query_outputs = j.value("filtered_query_outputs", 0ULL);
  s.train_examples = j.value("train_examples", 0ULL);
  s.queries_per_completion = j.value("queries_per_completion", 1ULL);
  s.requested_candidates = j.value("requested_candidates", 0ULL);
  if (j.contains("per_label_counts"))
    s.per_label_counts = j["per_label_counts"].get<std::map<std::string, uint64_t>>();
  return s;
}

}  // namespace

std::string stage_stats_to_json_text(const std::map<std::string, StageStats>& stages,
                                     const LabelSet& labels, const std::string& variant) {
  json j;
  j["variant"] = variant;
  j["label_set"] = label_set_to_json(labels);
  json st;
  for (const auto& [name, s] : stages) st[name] = stage_to_json(s);
  j["stages"] = st;
  return j.dump(2);
}

std::map<std::string, StageStats> stage_stats_from_json_text(const std::string& text,
                                                             LabelSet* labels_out) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw DataError("malformed stats json");
  if (labels_out && j.contains("label_set")) *labels_out = label_set_from_json(j["label_set"]);
  std::map<std::string, StageStats> out;
  for (const auto& [name, s] : j.at("stages").items()) out[name] = stage_from_json(s);
  return out;
}

// ---- data files ----------------------------------------------------------------

void save_synthetic_examples(const std::vector<SyntheticExample>& examples,
                             const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write synthetic data: " + path);
  for (const auto& ex : examples) {
    json rec;
    rec["query"] = ex.query;
    rec["doc_id"] = ex.doc_id;
    rec["label"] = ex.label.name;
    rec["label_rank"] = ex.label.rank;
    rec["variant"] = ex.variant;
    rec["verdict"] = to_string(ex.verdict);
    rec["stage"] = ex.stage;
    out << rec.dump() << "\n";
  }
}

std::vector<SyntheticExample> load_synthetic_examples(const std::string& path,
                                                      const LabelSet& labels) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open synthetic data: " + path);
  std::vector<SyntheticExample> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded())
      throw DataError("synthetic data line " + std::to_string(line_no) + ": malformed");
    SyntheticExample ex;
    ex.query = rec.at("query").get<std::string>();
    ex.doc_id = rec.at("doc_id").get<std::string>();
    auto label = labels.find_ci(rec.at("label").get<std::string>());
    if (!label)
      throw DataError("synthetic data line " + std::to_string(line_no) + ": unknown label");
    ex.label = *label;
    ex.variant = rec.value("variant", std::string());
    ex.verdict = verdict_from_string(rec.value("verdict", std::string("retained")));
    ex.stage = rec.value("stage", std::string("generate"));
    out.push_back(std::move(ex));
  }
  return out;
}

void save_audit_records(const std::vector<GenerationRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write audit file: " + path);
  for (const auto& rec : records) {
    if (rec.parse.valid()) continue;
    json j;
    j["doc_id"] = rec.doc_id;
    j["variant"] = rec.variant;
    j["item_key"] = rec.item_key;
    j["stage"] = rec.stage;
    j["output_index"] = rec.output_index;
    j["reason"] = rec.parse.invalid->describe();
    j["raw_text_truncated_200"] = rec.raw_text.substr(0, 200);
    out << j.dump() << "\n";
  }
}

// ---- manifest -------------------------------------------------------------------

std::string RunManifest::to_json_text() const {
  json j;
  j["config_hash"] = config_hash;
  j["tool_version"] = tool_version;
  j["started_at"] = started_at;
  j["finished_at"] = finished_at;
  json st;
  for (const auto& [name, s] : stages) st[name] = stage_to_json(s);
  j["stages"] = st;
  j["outputs"] = output_digests;
  return j.dump(2);
}

RunManifest RunManifest::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  json j = json::parse(ss.str(), nullptr, false);
  if (j.is_discarded()) throw DataError("malformed manifest: " + path);
  RunManifest m;
  m.config_hash = j.value("config_hash", std::string());
  m.tool_version = j.value("tool_version", std::string());
  m.started_at = j.value("started_at", std::string());
  m.finished_at = j.value("finished_at", std::string());
  for (const auto& [name, s] : j.at("stages").items()) m.stages[name] = stage_from_json(s);
  if (j.contains("outputs"))
    m.output_digests = j["outputs"].get<std::map<std::string, std::string>>();
  return m;
}

// ---- progress log -----------------------------------------------------------------

namespace {

class FileProgressSink : public ProgressSink {
 public:
  explicit FileProgressSink(const std::string& path) : path_(path) {
    if (fs::exists(path_)) {
      std::ifstream in(path_);
      std::string line;
      std::vector<std::string> good_lines;
      while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        try {
          ItemOutcome outcome = item_outcome_from_json(line);
          completed_[outcome.key] = std::move(outcome);
          good_lines.push_back(line);
        } catch (const std::exception&) {
          break;  // truncated trailing line from an interrupted run
        }
      }
      // rewrite without the truncated tail so appends stay consistent
      std::ofstream out(path_, std::ios::trunc);
      for (const auto& l : good_lines) out << l << "\n";
    }
    append_.open(path_, std::ios::app);
    if (!append_) throw DataError("cannot open progress log: " + path_);
  }

  bool lookup(const std::string& key, ItemOutcome& out) override {
    auto it = completed_.find(key);
    if (it == completed_.end()) return false;
    out = it->second;
    return true;
  }

  void store(const ItemOutcome& outcome) override {
    append_ << item_outcome_to_json(outcome) << "\n";
    append_.flush();
  }

 private:
  std::string path_;
  std::map<std::string, ItemOutcome> completed_;
  std::ofstream append_;
};

std::unique_ptr<Backend> make_backend(const PipelineConfig& config) {
  if (config.backend.kind == BackendKind::Mock) {
    MockBehavior behavior;
    behavior.invalid_rate = config.backend.invalid_rate;
    behavior.fail_rate = config.backend.fail_rate;
    behavior.label_set = config.label_set;
    return std::make_unique<MockBackend>(config.seed, behavior);
  }
  BackendDescriptor desc;
  desc.kind = BackendKind::Remote;
  desc.model_name = config.backend.model_name;
  desc.endpoint = config.backend.endpoint;
  if (const char* env = std::getenv("QGEN_BACKEND_URL")) desc.endpoint = std::string(env);
  desc.request_timeout = std::chrono::milliseconds(config.backend.timeout_ms);
  desc.max_in_flight = config.backend.max_in_flight;
  desc.max_attempts = config.backend.max_attempts;
  desc.retry_backoff = std::chrono::milliseconds(config.backend.retry_backoff_ms);
  std::string token;
  if (const char* env = std::getenv("QGEN_BACKEND_TOKEN")) token = env;
  auto backend = std::make_unique<RemoteBackend>(desc, token);
  if (!backend->reachable()) {
    BackendError e(BackendError::Kind::Unreachable,
                   "backend unreachable: " + desc.endpoint.value_or("<unset>"));
    throw e;
  }
  return backend;
}

ExemplarSuite build_suite(const PipelineConfig& config) {
  TemplateConfig templates = config.templates();
  auto examples = load_exemplar_file(config.exemplars_path, config.label_set);
  auto filter_examples = config.filter_exemplars_path == config.exemplars_path
                             ? examples
                             : load_exemplar_file(config.filter_exemplars_path, config.label_set);

  ExemplarSuite suite;
  VariantKind kind = config.variant_kind();
  switch (kind) {
    case VariantKind::IterativeStage2:
      suite.generation =
          build_exemplar_set(examples, Variant::relevant_only(), config.label_set, templates);
      suite.stage2 =
          build_exemplar_set(examples, Variant::iterative_stage2(), config.label_set, templates);
      break;
    case VariantKind::PairwiseLabelPair: {
      // composition is validated here; per-pair instances are bound in run_variant
      Variant generic{VariantKind::PairwiseLabelPair, config.label_set.top(),
                      config.label_set.bottom()};
      suite.generation = build_exemplar_set(examples, generic, config.label_set, templates);
      break;
    }
    default:
      suite.generation =
          build_exemplar_set(examples, Variant{kind, {}, {}}, config.label_set, templates);
      break;
  }
  suite.filter = build_filter_exemplar_set(filter_examples, config.label_set, templates);
  return suite;
}

std::vector<std::pair<std::string, std::string>> default_label_pairs(const LabelSet& labels) {
  // the fine-grained schedule: skip-adjacent pairs covering both positions
  // per label
  if (labels.find("Exact") && labels.find("Substitute") && labels.find("Complement") &&
      labels.find("Irrelevant")) {
    return {{"Exact", "Complement"},
            {"Complement", "Exact"},
            {"Substitute", "Irrelevant"},
            {"Irrelevant", "Substitute"}};
  }
  return {};
}

}  // namespace

// ---- commands ---------------------------------------------------------------------

GenerateOutcome cmd_generate(const PipelineConfig& config) {
  config.require_paths({"corpus", "exemplars", "filter_exemplars"});
  std::unique_ptr<Backend> backend = make_backend(config);  // fails fast if unreachable

  auto loaded = load_corpus(config.corpus_path);
  DocumentCollection sample =
      config.sample_size > 0
          ? sample_documents(loaded.collection, config.sample_size, config.seed)
          : sample_documents(loaded.collection, loaded.collection.size(), config.seed);

  ExemplarSuite suite = build_suite(config);

  RunConfig run_config;
  run_config.variant = config.variant_kind();
  run_config.label_set = config.label_set;
  run_config.params = config.generation;
  run_config.filter_mode = config.filter_mode;
  run_config.label_pair_schedule = config.label_pairs;
  if (run_config.variant == VariantKind::PairwiseLabelPair &&
      run_config.label_pair_schedule.empty()) {
    run_config.label_pair_schedule = default_label_pairs(config.label_set);
    if (run_config.label_pair_schedule.empty())
      throw ConfigError("label_pairs must be configured for this label set");
  }
  run_config.templates = config.templates();
  run_config.workers = config.workers;

  Bm25Index index;
  std::unique_ptr<Bm25NegativeMiner> miner;
  if (run_config.variant == VariantKind::RelevantOnly) {
    index = Bm25Index::build(sample, config.bm25);
    miner = std::make_unique<Bm25NegativeMiner>(index, config.label_set.bottom(),
                                                config.hard_negatives_per_query);
  }

  fs::create_directories(config.out_dir);
  FileProgressSink progress((fs::path(config.out_dir) / "progress.jsonl").string());

  RunManifest manifest;
  manifest.config_hash = config.config_hash();
  manifest.tool_version = kToolVersion;
  manifest.started_at = now_iso8601();

  VariantRunResult run =
      run_variant(*backend, sample, suite, run_config, miner.get(), &progress);

  // deterministic output order regardless of scheduling
  std::stable_sort(run.examples.begin(), run.examples.end(),
                   [](const SyntheticExample& a, const SyntheticExample& b) {
                     if (a.doc_id != b.doc_id) return a.doc_id < b.doc_id;
                     if (a.stage != b.stage) return a.stage < b.stage;
                     return a.variant < b.variant;
                   });
  std::stable_sort(run.records.begin(), run.records.end(),
                   [](const GenerationRecord& a, const GenerationRecord& b) {
                     if (a.doc_id != b.doc_id) return a.doc_id < b.doc_id;
                     if (a.stage != b.stage) return a.stage < b.stage;
                     if (a.variant != b.variant) return a.variant < b.variant;
                     if (a.item_key != b.item_key) return a.item_key < b.item_key;
                     return a.output_index < b.output_index;
                   });

  GenerateOutcome outcome;
  outcome.run = std::move(run);
  outcome.synthetic_path = (fs::path(config.out_dir) / "synthetic.jsonl").string();
  outcome.audit_path = (fs::path(config.out_dir) / "audit.jsonl").string();
  outcome.stats_path = (fs::path(config.out_dir) / "stats.json").string();
  outcome.manifest_path = (fs::path(config.out_dir) / "manifest.json").string();

  save_synthetic_examples(outcome.run.examples, outcome.synthetic_path);
  save_audit_records(outcome.run.records, outcome.audit_path);
  {
    std::ofstream out(outcome.stats_path);
    out << stage_stats_to_json_text(outcome.run.stages, config.label_set, config.variant);
  }

  manifest.finished_at = now_iso8601();
  manifest.stages = outcome.run.stages;
  manifest.output_digests["synthetic.jsonl"] = file_digest_hex(outcome.synthetic_path);
  manifest.output_digests["audit.jsonl"] = file_digest_hex(outcome.audit_path);
  manifest.output_digests["stats.json"] = file_digest_hex(outcome.stats_path);
  {
    std::ofstream out(outcome.manifest_path);
    out << manifest.to_json_text();
  }
  outcome.manifest = std::move(manifest);
  return outcome;
}

DocumentCollection cmd_sample(const PipelineConfig& config, const std::string& out_path) {
  config.require_paths({"corpus"});
  auto loaded = load_corpus(config.corpus_path);
  size_t n = config.sample_size > 0 ? config.sample_size : loaded.collection.size();
  DocumentCollection sample = sample_documents(loaded.collection, n, config.seed);
  save_corpus(sample, out_path);
  return sample;
}

void cmd_index(const PipelineConfig& config, const std::string& out_path) {
  config.require_paths({"corpus"});
  auto loaded = load_corpus(config.corpus_path);
  Bm25Index::build(loaded.collection, config.bm25).save(out_path);
}

size_t cmd_negatives(const PipelineConfig& config, const std::string& synthetic_path,
                     const std::string& out_path) {
  config.require_paths({"corpus"});
  auto loaded = load_corpus(config.corpus_path);
  auto examples = load_synthetic_examples(synthetic_path, config.label_set);

  Bm25Index index = Bm25Index::build(loaded.collection, config.bm25);
  Bm25NegativeMiner miner(index, config.label_set.bottom(), config.hard_negatives_per_query);
  std::vector<SyntheticExample> relevant;
  for (const auto& ex : examples)
    if (ex.verdict == FilterVerdict::Retained && ex.label.name == config.label_set.top().name)
      relevant.push_back(ex);
  auto mined = miner.mine(relevant);
  size_t mined_count = mined.size();
  for (auto& ex : mined) examples.push_back(std::move(ex));
  dedup(examples);
  save_synthetic_examples(examples, out_path);
  return mined_count;
}

TrainReport cmd_train(const PipelineConfig& config, const std::string& synthetic_path,
                      const std::string& model_path, const std::string& report_path) {
  config.require_paths({"corpus"});
  auto loaded = load_corpus(config.corpus_path);
  auto examples = load_synthetic_examples(synthetic_path, config.label_set);
  auto rows = make_training_rows(examples, loaded.collection);

  Hyperparams hp;
  hp.learning_rate = config.trainer.learning_rate;
  hp.epochs = config.trainer.epochs;
  hp.batch_size = config.trainer.batch_size;
  hp.l2 = config.trainer.l2;
  hp.shuffle_seed = config.seed;
  hp.positive_rank_threshold = config.trainer.positive_rank_threshold;

  std::vector<TrainingRow> validation;
  const std::vector<TrainingRow>* validation_ptr = nullptr;
  if (config.validation_n > 0) {
    auto split = sample_validation_split(rows, config.label_set, config.validation_n, config.seed,
                                         config.trainer.positive_rank_threshold);
    validation = std::move(split.rows);
    validation_ptr = &validation;
  }

  auto [model, report] = train(rows, config.label_set, hp, validation_ptr);
  model.save(model_path);
  if (!report_path.empty()) {
    json j;
    j["epoch_losses"] = report.epoch_losses;
    j["train_accuracy"] = report.train_accuracy;
    if (report.validation_accuracy) j["validation_accuracy"] = *report.validation_accuracy;
    std::ofstream out(report_path);
    out << j.dump(2) << "\n";
  }
  return report;
}

void cmd_export(const PipelineConfig& config, const std::string& synthetic_path,
                const std::string& out_path, const std::string& validation_path) {
  config.require_paths({"corpus"});
  auto loaded = load_corpus(config.corpus_path);
  auto examples = load_synthetic_examples(synthetic_path, config.label_set);
  auto rows = make_training_rows(examples, loaded.collection);
  export_training_data(rows, out_path);
  if (!validation_path.empty() && config.validation_n > 0) {
    auto split = sample_validation_split(rows, config.label_set, config.validation_n, config.seed,
                                         config.trainer.positive_rank_threshold);
    export_training_data(split.rows, validation_path);
  }
}

std::string cmd_stats(const std::string& stats_path) {
  std::ifstream in(stats_path);
  if (!in) throw DataError("cannot open stats file: " + stats_path);
  std::stringstream ss;
  ss << in.rdbuf();
  LabelSet labels = LabelSet::binary();
  auto stages = stage_stats_from_json_text(ss.str(), &labels);
  if (stages.empty()) throw DataError("stats file has no stages: " + stats_path);
  return format_stats_table(stages, labels);
}

EvaluateOutcome cmd_evaluate(const PipelineConfig& config, const std::string& scorer_spec,
                             const std::string& run_path) {
  config.require_paths({"queries", "qrels"});
  Qrels qrels = load_qrels(config.qrels_path);
  auto queries = load_queries(config.queries_path).queries;

  fs::create_directories(config.out_dir);
  EvaluateOutcome outcome;
  outcome.report_path = (fs::path(config.out_dir) / "metrics.jsonl").string();

  RankedRun run;
  if (!run_path.empty()) {
    run = load_run(run_path);
    outcome.run_path = run_path;
  } else {
    config.require_paths({"corpus"});
    auto loaded = load_corpus(config.corpus_path);

    Bm25Index index = Bm25Index::build(loaded.collection, config.bm25);
    EvalPool pool = config.gold_negatives
                        ? judged_eval_pool(queries, qrels)
                        : augment_eval_pool(index, queries, qrels, config.pool_k);

    Scorer scorer;
    if (scorer_spec == "bm25") {
      scorer = [&index](const std::string& q, const Document& d) {
        return index.score_doc(q, d.id);
      };
    } else if (starts_with(scorer_spec, "model:")) {
      auto model = std::make_shared<PointwiseModel>(PointwiseModel::load(scorer_spec.substr(6)));
      scorer = [model](const std::string& q, const Document& d) {
        return predict_relevance(*model, q, d);
      };
    } else if (scorer_spec == "oracle") {
      // ranks by gold grade; sanity ceiling for the metric plumbing
      std::map<std::string, const TestQuery*> texts;
      for (const auto& q : queries) texts[q.text.empty() ? q.id : q.text] = &q;
      auto qrels_copy = std::make_shared<Qrels>(qrels);
      std::map<std::string, std::string> text_to_id;
      for (const auto& q : queries) text_to_id[q.text] = q.id;
      auto lookup = std::make_shared<std::map<std::string, std::string>>(std::move(text_to_id));
      scorer = [qrels_copy, lookup](const std::string& q, const Document& d) {
        auto it = lookup->find(q);
        if (it == lookup->end()) return 0.0;
        return static_cast<double>(qrels_copy->grade(it->second, d.id));
      };
    } else if (starts_with(scorer_spec, "random:")) {
      uint64_t seed = std::stoull(scorer_spec.substr(7));
      scorer = [seed](const std::string& q, const Document& d) {
        return SplitMix64(mix64(seed, fnv1a64(q + "\x1f" + d.id))).unit();
      };
    } else {
      throw ConfigError("unknown scorer: " + scorer_spec);
    }

    run = rank_with_scorer(scorer, pool, queries, loaded.collection);
    outcome.run_path = (fs::path(config.out_dir) / "run.trec").string();
    save_run(run, outcome.run_path, scorer_spec);
  }

  NdcgConfig cfg{config.eval_k, config.gain};
  outcome.report = ndcg_at_k(run, qrels, cfg);
  double mean_exp = ndcg_at_k(run, qrels, {config.eval_k, GainFunction::Exponential}).mean;
  double mean_lin = ndcg_at_k(run, qrels, {config.eval_k, GainFunction::Linear}).mean;
  save_ndcg_report(outcome.report, cfg, outcome.report_path, mean_exp, mean_lin);
  return outcome;
}

std::string cmd_report(const std::string& run_dir) {
  fs::path dir(run_dir);
  if (!fs::exists(dir / "manifest.json")) throw DataError("no manifest.json in " + run_dir);
  RunManifest manifest = RunManifest::from_file((dir / "manifest.json").string());

  std::ostringstream out;
  out << "# Run report\n\n";
  out << "config_hash: " << manifest.config_hash << "\n";
  out << "tool_version: " << manifest.tool_version << "\n";
  out << "started_at: " << manifest.started_at << "\n";
  out << "finished_at: " << manifest.finished_at << "\n\n";

  out << "## Output digests\n\n";
  bool all_match = true;
  for (const auto& [name, digest] : manifest.output_digests) {
    std::string actual = fs::exists(dir / name) ? file_digest_hex((dir / name).string()) : "missing";
    bool ok = actual == digest;
    all_match = all_match && ok;
    out << name << ": " << digest << (ok ? " (verified)" : " (MISMATCH: " + actual + ")") << "\n";
  }
  out << "digest_check: " << (all_match ? "ok" : "failed") << "\n\n";

  if (fs::exists(dir / "stats.json")) {
    out << "## Generation statistics\n\n";
    out << cmd_stats((dir / "stats.json").string());
    out << "\n";
  }
  if (fs::exists(dir / "metrics.jsonl")) {
    out << "## Evaluation\n\n";
    std::ifstream in(dir / "metrics.jsonl");
    std::string line, last;
    while (std::getline(in, line))
      if (!trim(line).empty()) last = line;
    out << last << "\n";
  }
  return out.str();
}

}  // namespace qgen
