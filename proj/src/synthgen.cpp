#include "qgen/synthgen.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "json.hpp"
#include "qgen/text_util.hpp"

namespace qgen {

using nlohmann::json;

std::string InvalidReason::describe() const {
  switch (kind) {
    case Kind::MissingPrefix: return "missing-prefix(" + detail + ")";
    case Kind::GarbageContinuation: return "garbage-continuation";
    case Kind::EmptyQuery: return "empty-query";
    case Kind::ArityMismatch:
      return "arity-mismatch(" + std::to_string(got) + "," + std::to_string(want) + ")";
    case Kind::UnknownLabel: return "unknown-label(" + detail + ")";
  }
  return "invalid";
}

namespace {

bool reopens_document_field(const std::string& line) {
  return starts_with(line, "passage:") || starts_with(line, "product:");
}

ParseResult invalid(InvalidReason::Kind kind, std::string detail = {}, int got = 0, int want = 0) {
  ParseResult r;
  r.invalid = InvalidReason{kind, std::move(detail), got, want};
  return r;
}

}  // namespace

ParseResult parse_completion(const Variant& variant, const std::string& text,
                             const LabelSet& labels) {
  std::vector<std::string> lines = split_lines(text);
  const size_t want = variant.arity(labels);

  // expected (prefix, intended label) per line
  std::vector<std::pair<std::string, RelevanceLabel>> expected;
  switch (variant.kind) {
    case VariantKind::RelevantOnly:
      expected.emplace_back("query:", labels.top());
      break;
    case VariantKind::LabelConditioned:
      expected.emplace_back("query:", variant.first ? *variant.first : labels.top());
      break;
    case VariantKind::Pairwise:
      expected.emplace_back("query1:", labels.top());
      expected.emplace_back("query2:", labels.bottom());
      break;
    case VariantKind::IterativeStage2:
      expected.emplace_back("query2:", labels.bottom());
      break;
    case VariantKind::PairwiseLabelPair:
      expected.emplace_back("query1:", *variant.first);
      expected.emplace_back("query2:", *variant.second);
      break;
    case VariantKind::AllLabels:
      for (const auto& label : labels.labels()) expected.emplace_back("Label:", label);
      break;
  }

  ParseResult result;
  for (size_t i = 0; i < expected.size(); ++i) {
    // trailing empty lines do not satisfy arity
    while (i < lines.size() && i + 1 == lines.size() && trim(lines[i]).empty()) lines.pop_back();
    if (i >= lines.size())
      return invalid(InvalidReason::Kind::ArityMismatch, {}, static_cast<int>(i),
                     static_cast<int>(want));
    const std::string& line = lines[i];
    if (i > 0 && reopens_document_field(line))
      return invalid(InvalidReason::Kind::GarbageContinuation);

    const auto& [prefix, label] = expected[i];
    if (!starts_with(line, prefix))
      return invalid(InvalidReason::Kind::MissingPrefix, prefix);
    std::string rest = line.substr(prefix.size());

    if (variant.kind == VariantKind::AllLabels) {
      size_t qpos = rest.find("Query:");
      if (qpos == std::string::npos)
        return invalid(InvalidReason::Kind::MissingPrefix, "Query:");
      std::string name = trim(rest.substr(0, qpos));
      std::string query = collapse_whitespace(rest.substr(qpos + 6));
      if (!iequals(name, label.name)) return invalid(InvalidReason::Kind::UnknownLabel, name);
      if (query.empty()) return invalid(InvalidReason::Kind::EmptyQuery);
      result.candidates.push_back({std::move(query), label});
    } else {
      std::string query = collapse_whitespace(rest);
      if (query.empty()) return invalid(InvalidReason::Kind::EmptyQuery);
      result.candidates.push_back({std::move(query), label});
    }
  }
  for (size_t i = expected.size(); i < lines.size(); ++i) {
    if (reopens_document_field(lines[i])) return invalid(InvalidReason::Kind::GarbageContinuation);
  }
  return result;
}

LabelPrediction predict_label_scoring(Backend& backend, const ExemplarSet& filter_set,
                                      const std::string& query, const Document& doc,
                                      const LabelSet& labels, const TemplateConfig& templates) {
  RenderedPrompt prompt = render_filter_prompt(filter_set, query, doc, labels, templates);
  std::vector<std::string> names;
  names.reserve(labels.size());
  for (const auto& label : labels.labels()) names.push_back(label.name);
  std::vector<double> scores = backend.score(prompt, names);

  size_t best = 0;
  for (size_t i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best]) best = i;
  for (size_t i = 0; i < scores.size(); ++i)
    if (i != best && scores[i] == scores[best]) return LabelPrediction::tie();
  return LabelPrediction::of(labels.labels()[best]);
}

LabelPrediction predict_label_generation(Backend& backend, const ExemplarSet& filter_set,
                                         const std::string& query, const Document& doc,
                                         const LabelSet& labels, const TemplateConfig& templates) {
  RenderedPrompt prompt = render_filter_prompt(filter_set, query, doc, labels, templates);
  GenerationParams params;
  params.temperature = 0.0;
  params.num_outputs = 1;
  params.max_tokens = 16;
  params.stop_sequences = {"\n"};
  std::vector<Completion> completions = backend.generate(prompt, params);
  if (completions.empty()) return LabelPrediction::unknown();

  std::string first_line = split_lines(completions[0].text)[0];
  size_t qpos = first_line.find("Query:");
  if (qpos != std::string::npos) first_line = first_line.substr(0, qpos);
  std::string name = trim(first_line);
  auto label = labels.find_ci(name);
  if (!label) return LabelPrediction::unknown();
  return LabelPrediction::of(*label);
}

std::vector<SyntheticExample> consistency_filter(const std::vector<FilterInput>& candidates,
                                                 const std::vector<LabelPrediction>& predictions,
                                                 const std::string& variant_name,
                                                 const std::string& stage) {
  if (candidates.size() != predictions.size())
    throw std::invalid_argument("consistency_filter: misaligned inputs");
  std::vector<SyntheticExample> out;
  out.reserve(candidates.size());
  for (size_t i = 0; i < candidates.size(); ++i) {
    SyntheticExample ex;
    ex.query = candidates[i].query;
    ex.doc_id = candidates[i].doc_id;
    ex.label = candidates[i].intended_label;
    ex.variant = variant_name;
    ex.stage = stage;
    const LabelPrediction& pred = predictions[i];
    if (pred.kind == LabelPrediction::Kind::Label) {
      ex.verdict = pred.label->name == ex.label.name ? FilterVerdict::Retained
                                                     : FilterVerdict::DroppedLabelMismatch;
    } else {
      ex.verdict = FilterVerdict::DroppedTie;
    }
    out.push_back(std::move(ex));
  }
  return out;
}

std::map<std::string, DedupCounters> dedup(std::vector<SyntheticExample>& examples) {
  std::map<std::string, DedupCounters> counters;

  // distinct labels per (normalized query, doc_id) over retained examples
  std::unordered_map<std::string, std::string> first_label;
  std::unordered_map<std::string, bool> conflicted;
  auto key_of = [](const SyntheticExample& ex) {
    return normalize_query(ex.query) + "\x1f" + ex.doc_id;
  };
  for (const auto& ex : examples) {
    if (ex.verdict != FilterVerdict::Retained) continue;
    std::string key = key_of(ex);
    auto [it, inserted] = first_label.emplace(key, ex.label.name);
    if (!inserted && it->second != ex.label.name) conflicted[key] = true;
  }

  std::vector<SyntheticExample> kept;
  kept.reserve(examples.size());
  std::unordered_map<std::string, bool> seen;
  for (auto& ex : examples) {
    if (ex.verdict != FilterVerdict::Retained) {
      kept.push_back(std::move(ex));
      continue;
    }
    std::string key = key_of(ex);
    if (conflicted.count(key)) {
      ex.verdict = FilterVerdict::DroppedDuplicateConflict;
      counters[ex.stage].conflict_dropped++;
      kept.push_back(std::move(ex));
    } else if (seen[key]) {
      counters[ex.stage].duplicates_collapsed++;  // removed, first kept
    } else {
      seen[key] = true;
      kept.push_back(std::move(ex));
    }
  }
  examples = std::move(kept);
  return counters;
}

void StageStats::merge(const StageStats& other) {
  prompt_inputs += other.prompt_inputs;
  requested_queries += other.requested_queries;
  failed_generations += other.failed_generations;
  invalid_outputs += other.invalid_outputs;
  valid_query_outputs += other.valid_query_outputs;
  retained += other.retained;
  dropped_label_mismatch += other.dropped_label_mismatch;
  dropped_tie += other.dropped_tie;
  filter_backend_errors += other.filter_backend_errors;
  dropped_duplicate_conflict += other.dropped_duplicate_conflict;
  duplicates_collapsed += other.duplicates_collapsed;
  filtered_query_outputs += other.filtered_query_outputs;
  train_examples += other.train_examples;
  if (queries_per_completion != other.queries_per_completion) queries_per_completion = 0;
  requested_candidates += other.requested_candidates;
  for (const auto& [label, count] : other.per_label_counts) per_label_counts[label] += count;
}

std::string to_string(FilterVerdict v) {
  switch (v) {
    case FilterVerdict::Retained: return "retained";
    case FilterVerdict::DroppedLabelMismatch: return "dropped-label-mismatch";
    case FilterVerdict::DroppedTie: return "dropped-tie";
    case FilterVerdict::DroppedDuplicateConflict: return "dropped-duplicate-conflict";
  }
  return "unknown";
}

FilterVerdict verdict_from_string(const std::string& s) {
  if (s == "retained") return FilterVerdict::Retained;
  if (s == "dropped-label-mismatch") return FilterVerdict::DroppedLabelMismatch;
  if (s == "dropped-tie") return FilterVerdict::DroppedTie;
  if (s == "dropped-duplicate-conflict") return FilterVerdict::DroppedDuplicateConflict;
  throw DataError("unknown filter verdict: " + s);
}

namespace {

struct WorkItem {
  std::string key;
  const Document* doc = nullptr;
  const ExemplarSet* set = nullptr;
  std::string stage;
  std::optional<RelevanceLabel> target_label;
  std::optional<std::string> prior_query;
};

// Runs work(i) on `workers` threads, invoking commit(i, outcome) strictly in
// index order on the calling thread.
void for_each_ordered(size_t n, int workers, const std::function<ItemOutcome(size_t)>& work,
                      const std::function<void(size_t, ItemOutcome&&)>& commit) {
  if (n == 0) return;
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) commit(i, work(i));
    return;
  }

  std::vector<std::optional<ItemOutcome>> results(n);
  std::mutex mutex;
  std::condition_variable ready;
  std::atomic<size_t> next{0};
  std::exception_ptr error;

  auto body = [&] {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        ItemOutcome outcome = work(i);
        std::lock_guard lock(mutex);
        results[i] = std::move(outcome);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!error) error = std::current_exception();
        results[i] = ItemOutcome{};  // unblocks the committer; error rethrown below
      }
      ready.notify_all();
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (size_t i = 0; i < n; ++i) {
    std::unique_lock lock(mutex);
    ready.wait(lock, [&] { return results[i].has_value(); });
    ItemOutcome outcome = std::move(*results[i]);
    results[i].reset();
    lock.unlock();
    commit(i, std::move(outcome));
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

ItemOutcome process_item(Backend& backend, const WorkItem& item, const ExemplarSet& filter_set,
                         const RunConfig& config) {
  ItemOutcome out;
  out.key = item.key;

  RenderedPrompt prompt = render_generation_prompt(*item.set, *item.doc, config.templates,
                                                   item.target_label, item.prior_query);
  std::vector<Completion> completions;
  try {
    completions = backend.generate(prompt, config.params);
  } catch (const BackendError&) {
    out.failed = true;
    return out;
  }

  for (const auto& comp : completions) {
    GenerationRecord rec;
    rec.doc_id = item.doc->id;
    rec.variant = prompt.expected_parse.name();
    rec.item_key = item.key;
    rec.stage = item.stage;
    rec.output_index = comp.output_index;
    rec.raw_text = comp.text;
    rec.parse = parse_completion(prompt.expected_parse, prompt.cue + comp.text, config.label_set);

    if (rec.parse.valid()) {
      std::vector<FilterInput> inputs;
      std::vector<LabelPrediction> predictions;
      for (const auto& cand : rec.parse.candidates) {
        LabelPrediction pred;
        try {
          pred = config.filter_mode == FilterMode::Scoring
                     ? predict_label_scoring(backend, filter_set, cand.query, *item.doc,
                                             config.label_set, config.templates)
                     : predict_label_generation(backend, filter_set, cand.query, *item.doc,
                                                config.label_set, config.templates);
        } catch (const BackendError&) {
          out.filter_backend_errors++;
          continue;
        }
        inputs.push_back({cand.query, item.doc->id, cand.intended_label});
        predictions.push_back(pred);
      }
      auto filtered = consistency_filter(inputs, predictions, rec.variant, item.stage);
      out.examples.insert(out.examples.end(), filtered.begin(), filtered.end());
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

void accumulate(StageStats& stats, const ItemOutcome& outcome, int num_outputs) {
  stats.prompt_inputs++;
  if (outcome.failed) {
    stats.failed_generations++;
    return;
  }
  stats.requested_queries += static_cast<uint64_t>(num_outputs);
  for (const auto& rec : outcome.records) {
    if (rec.parse.valid())
      stats.valid_query_outputs += rec.parse.candidates.size();
    else
      stats.invalid_outputs++;
  }
  stats.filter_backend_errors += outcome.filter_backend_errors;
  for (const auto& ex : outcome.examples) {
    switch (ex.verdict) {
      case FilterVerdict::Retained: stats.retained++; break;
      case FilterVerdict::DroppedLabelMismatch: stats.dropped_label_mismatch++; break;
      case FilterVerdict::DroppedTie: stats.dropped_tie++; break;
      default: break;
    }
  }
}

// runs one stage's items, honoring the progress sink for resume
void run_stage(Backend& backend, std::vector<WorkItem>& items, const ExemplarSet& filter_set,
               const RunConfig& config, StageStats& stats, VariantRunResult& result,
               ProgressSink* progress) {
  std::vector<ItemOutcome> loaded(items.size());
  std::vector<bool> have(items.size(), false);
  if (progress) {
    for (size_t i = 0; i < items.size(); ++i) have[i] = progress->lookup(items[i].key, loaded[i]);
  }

  auto work = [&](size_t i) -> ItemOutcome {
    if (have[i]) return std::move(loaded[i]);
    return process_item(backend, items[i], filter_set, config);
  };
  auto commit = [&](size_t i, ItemOutcome&& outcome) {
    if (progress && !have[i] && !outcome.key.empty()) progress->store(outcome);
    accumulate(stats, outcome, config.params.num_outputs);
    result.records.insert(result.records.end(), outcome.records.begin(), outcome.records.end());
    result.examples.insert(result.examples.end(), outcome.examples.begin(),
                           outcome.examples.end());
  };
  for_each_ordered(items.size(), config.workers, work, commit);
}

void apply_dedup_counters(std::map<std::string, StageStats>& stages,
                          const std::map<std::string, DedupCounters>& counters) {
  for (const auto& [stage, c] : counters) {
    std::string key = stage == "negatives" ? "negatives" : stage;
    stages[key].dropped_duplicate_conflict += c.conflict_dropped;
    stages[key].duplicates_collapsed += c.duplicates_collapsed;
  }
}

}  // namespace

VariantRunResult run_variant(Backend& backend, const DocumentCollection& sample,
                             const ExemplarSuite& exemplars, const RunConfig& config,
                             HardNegativeMiner* miner, ProgressSink* progress) {
  VariantRunResult result;
  const LabelSet& labels = config.label_set;

  // variant-instance exemplar sets for the fine-grained pairwise schedule
  std::vector<ExemplarSet> pair_sets;
  if (config.variant == VariantKind::PairwiseLabelPair) {
    auto schedule = config.label_pair_schedule;
    if (schedule.empty()) throw ConfigError("pairwise label-pair schedule is empty");
    for (const auto& [first, second] : schedule) {
      auto l1 = labels.find(first);
      auto l2 = labels.find(second);
      if (!l1 || !l2) throw ConfigError("schedule label not in label set: " + first + "/" + second);
      if (l1->name == l2->name) throw ConfigError("schedule pair labels must be distinct");
      ExemplarSet set = exemplars.generation;
      set.variant = Variant::pairwise_label_pair(*l1, *l2);
      pair_sets.push_back(std::move(set));
    }
  }

  const bool iterative = config.variant == VariantKind::IterativeStage2;
  const std::string first_stage = iterative ? "stage1" : "generate";

  std::vector<WorkItem> items;
  for (const auto& doc : sample.documents) {
    switch (config.variant) {
      case VariantKind::RelevantOnly:
      case VariantKind::Pairwise:
      case VariantKind::AllLabels:
        items.push_back({"g|" + doc.id, &doc, &exemplars.generation, first_stage, {}, {}});
        break;
      case VariantKind::IterativeStage2:
        items.push_back({"s1|" + doc.id, &doc, &exemplars.generation, first_stage, {}, {}});
        break;
      case VariantKind::LabelConditioned:
        for (const auto& label : labels.labels())
          items.push_back(
              {"g|" + doc.id + "|" + label.name, &doc, &exemplars.generation, first_stage, label, {}});
        break;
      case VariantKind::PairwiseLabelPair:
        for (const auto& set : pair_sets)
          items.push_back({"g|" + doc.id + "|" + set.variant.first->name + "-" +
                               set.variant.second->name,
                           &doc, &set, first_stage, {}, {}});
        break;
    }
  }

  auto& first_stats = result.stages[first_stage];
  first_stats.queries_per_completion =
      iterative ? 1 : Variant{config.variant, {}, {}}.arity(labels);
  run_stage(backend, items, exemplars.filter, config, first_stats, result, progress);

  apply_dedup_counters(result.stages, dedup(result.examples));

  if (iterative) {
    if (!exemplars.stage2) throw ConfigError("iterative flow requires a stage-2 exemplar set");
    std::vector<SyntheticExample> stage1_retained;
    for (const auto& ex : result.examples)
      if (ex.verdict == FilterVerdict::Retained && ex.label.name == labels.top().name)
        stage1_retained.push_back(ex);

    std::vector<WorkItem> stage2_items;
    std::map<std::string, size_t> per_doc;
    for (const auto& ex : stage1_retained) {
      const Document* doc = sample.find(ex.doc_id);
      if (!doc) continue;
      size_t ordinal = per_doc[ex.doc_id]++;
      stage2_items.push_back({"s2|" + ex.doc_id + "#" + std::to_string(ordinal), doc,
                              &*exemplars.stage2, "stage2", {}, ex.query});
    }
    auto& stage2_stats = result.stages["stage2"];
    stage2_stats.queries_per_completion = 1;
    run_stage(backend, stage2_items, exemplars.filter, config, stage2_stats, result, progress);
    apply_dedup_counters(result.stages, dedup(result.examples));
  }

  if (config.variant == VariantKind::RelevantOnly && miner) {
    std::vector<SyntheticExample> relevant;
    for (const auto& ex : result.examples)
      if (ex.verdict == FilterVerdict::Retained && ex.label.name == labels.top().name)
        relevant.push_back(ex);
    std::vector<SyntheticExample> mined = miner->mine(relevant);
    auto& neg_stats = result.stages["negatives"];
    neg_stats.prompt_inputs = relevant.size();
    neg_stats.retained = mined.size();
    neg_stats.queries_per_completion = 1;
    for (auto& ex : mined) {
      ex.variant = Variant::relevant_only().name();
      ex.stage = "negatives";
      ex.verdict = FilterVerdict::Retained;
      result.examples.push_back(std::move(ex));
    }
    apply_dedup_counters(result.stages, dedup(result.examples));
  }

  for (auto& [stage, stats] : result.stages)
    stats.requested_candidates = stats.requested_queries * stats.queries_per_completion;

  // final per-stage training counters from the surviving examples; mined
  // negatives count as training data but not as query outputs
  for (const auto& ex : result.examples) {
    if (ex.verdict != FilterVerdict::Retained) continue;
    StageStats& stats = result.stages[ex.stage];
    if (ex.stage != "negatives") stats.filtered_query_outputs++;
    stats.train_examples++;
    stats.per_label_counts[ex.label.name]++;
  }
  return result;
}

// ---- progress serialization -------------------------------------------------

namespace {

json label_to_json(const RelevanceLabel& label) {
  return json{{"name", label.name}, {"rank", label.rank}};
}

RelevanceLabel label_from_json(const json& j) {
  return {j.at("name").get<std::string>(), j.at("rank").get<int>()};
}

const char* reason_kind_name(InvalidReason::Kind kind) {
  switch (kind) {
    case InvalidReason::Kind::MissingPrefix: return "missing-prefix";
    case InvalidReason::Kind::GarbageContinuation: return "garbage-continuation";
    case InvalidReason::Kind::EmptyQuery: return "empty-query";
    case InvalidReason::Kind::ArityMismatch: return "arity-mismatch";
    case InvalidReason::Kind::UnknownLabel: return "unknown-label";
  }
  return "unknown";
}

InvalidReason::Kind reason_kind_from(const std::string& s) {
  if (s == "missing-prefix") return InvalidReason::Kind::MissingPrefix;
  if (s == "garbage-continuation") return InvalidReason::Kind::GarbageContinuation;
  if (s == "empty-query") return InvalidReason::Kind::EmptyQuery;
  if (s == "arity-mismatch") return InvalidReason::Kind::ArityMismatch;
  return InvalidReason::Kind::UnknownLabel;
}

}  // namespace

std::string item_outcome_to_json(const ItemOutcome& outcome) {
  json j;
  j["key"] = outcome.key;
  j["failed"] = outcome.failed;
  j["filter_backend_errors"] = outcome.filter_backend_errors;
  j["records"] = json::array();
  for (const auto& rec : outcome.records) {
    json r;
    r["doc_id"] = rec.doc_id;
    r["variant"] = rec.variant;
    r["item_key"] = rec.item_key;
    r["stage"] = rec.stage;
    r["output_index"] = rec.output_index;
    r["raw_text"] = rec.raw_text;
    if (rec.parse.invalid) {
      r["invalid"] = {{"kind", reason_kind_name(rec.parse.invalid->kind)},
                      {"detail", rec.parse.invalid->detail},
                      {"got", rec.parse.invalid->got},
                      {"want", rec.parse.invalid->want}};
    } else {
      json cands = json::array();
      for (const auto& c : rec.parse.candidates)
        cands.push_back({{"query", c.query}, {"label", label_to_json(c.intended_label)}});
      r["candidates"] = std::move(cands);
    }
    j["records"].push_back(std::move(r));
  }
  j["examples"] = json::array();
  for (const auto& ex : outcome.examples) {
    j["examples"].push_back({{"query", ex.query},
                             {"doc_id", ex.doc_id},
                             {"label", label_to_json(ex.label)},
                             {"variant", ex.variant},
                             {"verdict", to_string(ex.verdict)},
                             {"stage", ex.stage}});
  }
  return j.dump();
}

ItemOutcome item_outcome_from_json(const std::string& line) {
  json j = json::parse(line);
  ItemOutcome outcome;
  outcome.key = j.at("key").get<std::string>();
  outcome.failed = j.at("failed").get<bool>();
  outcome.filter_backend_errors = j.at("filter_backend_errors").get<uint64_t>();
  for (const auto& r : j.at("records")) {
    GenerationRecord rec;
    rec.doc_id = r.at("doc_id").get<std::string>();
    rec.variant = r.at("variant").get<std::string>();
    rec.item_key = r.at("item_key").get<std::string>();
    rec.stage = r.at("stage").get<std::string>();
    rec.output_index = r.at("output_index").get<int>();
    rec.raw_text = r.at("raw_text").get<std::string>();
    if (r.contains("invalid")) {
      const auto& inv = r.at("invalid");
      rec.parse.invalid = InvalidReason{reason_kind_from(inv.at("kind").get<std::string>()),
                                        inv.at("detail").get<std::string>(),
                                        inv.at("got").get<int>(), inv.at("want").get<int>()};
    } else {
      for (const auto& c : r.at("candidates"))
        rec.parse.candidates.push_back(
            {c.at("query").get<std::string>(), label_from_json(c.at("label"))});
    }
    outcome.records.push_back(std::move(rec));
  }
  for (const auto& e : j.at("examples")) {
    SyntheticExample ex;
    ex.query = e.at("query").get<std::string>();
    ex.doc_id = e.at("doc_id").get<std::string>();
    ex.label = label_from_json(e.at("label"));
    ex.variant = e.at("variant").get<std::string>();
    ex.verdict = verdict_from_string(e.at("verdict").get<std::string>());
    ex.stage = e.at("stage").get<std::string>();
    outcome.examples.push_back(std::move(ex));
  }
  return outcome;
}

}  // namespace qgen
