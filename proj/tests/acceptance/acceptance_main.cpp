// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion is self-contained and uses only public library
// surfaces plus the checked-in fixtures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "qgen/baseline.hpp"
#include "qgen/evalmetrics.hpp"
#include "qgen/mock_backend.hpp"
#include "qgen/pipeline.hpp"
#include "qgen/retrieval.hpp"
#include "qgen/rng.hpp"
#include "qgen/synthgen.hpp"
#include "../golden_prompts.hpp"
#include "../testutil.hpp"

using namespace qgen;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Check {
  std::vector<std::string> failures;

  void require(bool ok, const std::string& message) {
    if (!ok) failures.push_back(message);
  }
  template <typename A, typename B>
  void equal(const A& a, const B& b, const std::string& message) {
    if (!(a == b)) {
      std::ostringstream ss;
      ss << message << " (got " << a << ", want " << b << ")";
      failures.push_back(ss.str());
    }
  }
};

// ---- criterion 1: stats arithmetic ------------------------------------------------

void stats_arithmetic(Check& check) {
  check.equal(format_fraction(457072, 515284), std::string("0.89"), "pairwise % valid queries");
  check.equal(format_fraction(85385, 171819), std::string("0.50"), "pairwise irrelevant/relevant");
  check.equal(format_fraction(257497, 257642), std::string("0.99"),
              "relevant-only % valid queries");

  std::map<std::string, StageStats> stages;
  StageStats& s = stages["generate"];
  s.prompt_inputs = 128821;
  s.requested_queries = 257642;
  s.valid_query_outputs = 457072;
  s.filtered_query_outputs = 257204;
  s.train_examples = 257204;
  s.queries_per_completion = 2;
  s.per_label_counts["relevant"] = 171819;
  s.per_label_counts["irrelevant"] = 85385;
  std::string table = format_stats_table(stages, LabelSet::binary());
  check.require(table.find("0.89") != std::string::npos, "table lacks 0.89");
  check.require(table.find("0.50") != std::string::npos, "table lacks 0.50");
}

// ---- criterion 2: ndcg oracle ------------------------------------------------------

double oracle_dcg(const std::vector<int>& grades, size_t k, GainFunction gain) {
  double total = 0.0;
  for (size_t i = 0; i < std::min(k, grades.size()); ++i) {
    double g = gain == GainFunction::Linear ? grades[i] : std::pow(2.0, grades[i]) - 1.0;
    total += g / (std::log(static_cast<double>(i) + 2.0) / std::log(2.0));
  }
  return total;
}

void ndcg_oracle(Check& check) {
  SplitMix64 rng(20240615);
  size_t checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    size_t n = 1 + rng.bounded(6);
    size_t k = 1 + rng.bounded(6);
    GainFunction gain = rng.bounded(2) ? GainFunction::Exponential : GainFunction::Linear;

    Qrels qrels;
    std::vector<std::pair<std::string, double>> scored;
    std::vector<int> judged;
    for (size_t i = 0; i < n; ++i) {
      std::string doc_id = "d" + std::to_string(i);
      int grade = static_cast<int>(rng.bounded(3));
      qrels.judgments[{"q", doc_id}] = grade;
      judged.push_back(grade);
      scored.emplace_back(doc_id, rng.unit());
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });

    RankedRun run;
    run.rankings["q"] = scored;
    double actual = ndcg_at_k(run, qrels, {k, gain}).per_query.at("q");

    std::vector<int> run_grades;
    for (const auto& [doc_id, score] : scored) run_grades.push_back(qrels.grade("q", doc_id));
    std::vector<int> perm = judged;
    std::sort(perm.begin(), perm.end());
    double best = 0.0;
    do {
      best = std::max(best, oracle_dcg(perm, k, gain));
    } while (std::next_permutation(perm.begin(), perm.end()));
    double expected = best == 0.0 ? 0.0 : oracle_dcg(run_grades, k, gain) / best;

    if (std::abs(actual - expected) >= 1e-12) {
      check.require(false, "brute-force mismatch at trial " + std::to_string(trial));
      return;
    }
    ++checked;

    // the ideal ordering of the same pool scores exactly 1.0
    std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
      int ga = qrels.grade("q", a.first), gb = qrels.grade("q", b.first);
      if (ga != gb) return ga > gb;
      return a.first < b.first;
    });
    for (size_t i = 0; i < scored.size(); ++i) scored[i].second = double(scored.size() - i);
    RankedRun ideal;
    ideal.rankings["q"] = scored;
    auto report = ndcg_at_k(ideal, qrels, {k, gain});
    bool zero_pool = best == 0.0;
    if (!zero_pool && report.per_query.at("q") != 1.0) {
      check.require(false, "ideal ordering did not score exactly 1.0");
      return;
    }
  }
  check.equal(checked, size_t(1000), "pool count");
}

// ---- criterion 3: bm25 oracle ------------------------------------------------------

void bm25_oracle(Check& check) {
  DocumentCollection corpus;
  Document d1, d2, d3;
  d1.id = "d1";
  d1.text = "the cat sat on the mat";
  d2.id = "d2";
  d2.text = "the dog chased the cat";
  d3.id = "d3";
  d3.text = "birds fly high";
  corpus.documents = {d1, d2, d3};
  auto index = Bm25Index::build(corpus);

  // hand-evaluated with k1=1.2, b=0.75, idf = ln((N-df+0.5)/(df+0.5)+1)
  struct Expected {
    const char* query;
    const char* doc;
    double score;
  };
  const Expected expected[] = {
      {"cat", "d1", 0.420817202929321},      {"cat", "d2", 0.456659677626772},
      {"the cat", "d1", 1.019003640151167},  {"the cat", "d2", 1.090187545494109},
      {"birds", "d3", 1.148651748774189},
  };
  for (const auto& e : expected) {
    double got = index.score_doc(e.query, e.doc);
    if (std::abs(got - e.score) >= 1e-9)
      check.require(false, std::string("score mismatch for '") + e.query + "' on " + e.doc);
  }

  // prefix property on 100 random corpora of <= 50 docs
  SplitMix64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    size_t n = 2 + rng.bounded(49);
    auto random_corpus = qgen::test::make_fixture_corpus(n, 5000 + trial);
    auto rindex = Bm25Index::build(random_corpus);
    const auto& probe = random_corpus.documents[rng.bounded(n)].text;
    std::string query = probe.substr(0, std::min<size_t>(probe.size(), 25));
    for (size_t k = 1; k < 6; ++k) {
      auto small = rindex.search(query, k);
      auto large = rindex.search(query, k + 1);
      if (small.size() > large.size()) {
        check.require(false, "prefix property violated (size)");
        return;
      }
      for (size_t i = 0; i < small.size(); ++i) {
        if (small[i] != large[i]) {
          check.require(false, "prefix property violated at trial " + std::to_string(trial));
          return;
        }
      }
    }
  }
}

// ---- criterion 4: filtration and dedup properties ----------------------------------

void filter_dedup_properties(Check& check) {
  auto exemplars = qgen::test::make_binary_exemplars();
  ExemplarSuite suite;
  suite.generation = build_exemplar_set(exemplars, Variant::pairwise(), LabelSet::binary());
  suite.filter = build_filter_exemplar_set(exemplars, LabelSet::binary());

  // conservation identity across 1000 randomized mock runs
  SplitMix64 rng(314159);
  for (int run_idx = 0; run_idx < 1000; ++run_idx) {
    auto corpus = qgen::test::make_fixture_corpus(2 + rng.bounded(7), 9000 + run_idx);
    MockBehavior behavior;
    behavior.invalid_rate = rng.unit() * 0.6;
    behavior.fail_rate = rng.unit() * 0.1;
    MockBackend backend(rng.next(), behavior);

    RunConfig config;
    config.variant = VariantKind::Pairwise;
    config.label_set = LabelSet::binary();
    auto result = run_variant(backend, corpus, suite, config);
    const auto& s = result.stages.at("generate");
    if (s.valid_query_outputs !=
        s.retained + s.dropped_label_mismatch + s.dropped_tie + s.filter_backend_errors) {
      check.require(false, "conservation violated at run " + std::to_string(run_idx));
      return;
    }
    if (s.retained !=
        s.filtered_query_outputs + s.dropped_duplicate_conflict + s.duplicates_collapsed) {
      check.require(false, "dedup accounting violated at run " + std::to_string(run_idx));
      return;
    }
    uint64_t label_total = 0;
    for (const auto& [label, count] : s.per_label_counts) label_total += count;
    if (s.train_examples != label_total) {
      check.require(false, "per-label totals violated at run " + std::to_string(run_idx));
      return;
    }
  }

  // conflicting-label pairs are always fully removed
  RelevanceLabel rel{"relevant", 1}, irrel{"irrelevant", 0};
  SplitMix64 crng(777);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<SyntheticExample> examples;
    size_t n = 2 + crng.bounded(10);
    for (size_t i = 0; i < n; ++i) {
      SyntheticExample ex;
      ex.query = "query " + std::to_string(crng.bounded(4));
      ex.doc_id = "d" + std::to_string(crng.bounded(3));
      ex.label = crng.bounded(2) ? rel : irrel;
      ex.variant = "pairwise";
      ex.verdict = FilterVerdict::Retained;
      ex.stage = "generate";
      examples.push_back(ex);
    }
    dedup(examples);
    std::map<std::pair<std::string, std::string>, std::set<std::string>> retained_labels;
    for (const auto& ex : examples)
      if (ex.verdict == FilterVerdict::Retained)
        retained_labels[{ex.query, ex.doc_id}].insert(ex.label.name);
    for (const auto& [key, labels] : retained_labels) {
      if (labels.size() > 1) {
        check.require(false, "conflicting labels survived dedup");
        return;
      }
    }
  }

  // a stubbed scorer retains exactly the label-matching candidates; exact
  // ties always drop
  struct ScriptedBackend : Backend {
    std::vector<std::vector<double>> script;
    size_t cursor = 0;
    std::vector<Completion> generate(const RenderedPrompt&, const GenerationParams&) override {
      return {};
    }
    std::vector<double> score(const RenderedPrompt&, const std::vector<std::string>&) override {
      return script[cursor++ % script.size()];
    }
  };
  ScriptedBackend scripted;
  scripted.script = {{-1.0, -2.0}, {-2.0, -1.0}, {-1.5, -1.5}, {-0.5, -3.0}};
  ExemplarSet filter_set = suite.filter;
  TemplateConfig templates;
  Document target;
  target.id = "t";
  target.text = "target text";

  std::vector<FilterInput> inputs = {{"q0", "t", rel},   // argmax rel, intended rel -> retained
                                     {"q1", "t", rel},   // argmax irrel -> mismatch
                                     {"q2", "t", rel},   // tie -> dropped
                                     {"q3", "t", irrel}};  // argmax rel -> mismatch
  std::vector<LabelPrediction> predictions;
  for (const auto& input : inputs)
    predictions.push_back(predict_label_scoring(scripted, filter_set, input.query, target,
                                                LabelSet::binary(), templates));
  auto filtered = consistency_filter(inputs, predictions, "pairwise", "generate");
  check.equal(to_string(filtered[0].verdict), std::string("retained"), "matching candidate");
  check.equal(to_string(filtered[1].verdict), std::string("dropped-label-mismatch"),
              "mismatching candidate");
  check.equal(to_string(filtered[2].verdict), std::string("dropped-tie"), "tie candidate");
  check.equal(to_string(filtered[3].verdict), std::string("dropped-label-mismatch"),
              "mismatching negative candidate");
}

// ---- criterion 5: prompt golden files ----------------------------------------------

void prompt_goldens(Check& check) {
  auto goldens = qgen::test::build_golden_prompts();
  check.equal(goldens.size(), size_t(10), "golden prompt count");
  for (const auto& g : goldens) {
    std::string want = qgen::test::read_file(qgen::test::golden(g.file));
    if (g.prompt.text != want)
      check.require(false, "golden mismatch: " + g.file);
  }
}

// ---- criterion 6: parser corpus and invalid-rate reproduction ----------------------

void parser_corpus(Check& check) {
  std::ifstream in(qgen::test::fixture("parser_corpus.jsonl"));
  check.require(in.good(), "missing parser corpus fixture");
  std::string line;
  size_t total = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json rec = json::parse(line);
    ++total;

    LabelSet labels =
        rec.at("labels") == "shopping" ? LabelSet::shopping() : LabelSet::binary();
    std::string vname = rec.at("variant");
    Variant variant;
    if (vname == "pairwise") variant = Variant::pairwise();
    else if (vname == "relevant-only") variant = Variant::relevant_only();
    else if (vname == "iterative-stage2") variant = Variant::iterative_stage2();
    else if (vname == "all-labels") variant = Variant::all_labels();
    else if (vname == "label-conditioned")
      variant = Variant::label_conditioned(*labels.find_ci(rec.at("first").get<std::string>()));
    else if (vname == "pairwise-pair")
      variant = Variant::pairwise_label_pair(*labels.find_ci(rec.at("first").get<std::string>()),
                                             *labels.find_ci(rec.at("second").get<std::string>()));

    auto parse = parse_completion(variant, rec.at("text").get<std::string>(), labels);
    std::string got = parse.valid() ? "valid" : [&] {
      switch (parse.invalid->kind) {
        case InvalidReason::Kind::MissingPrefix: return std::string("missing-prefix");
        case InvalidReason::Kind::GarbageContinuation: return std::string("garbage-continuation");
        case InvalidReason::Kind::EmptyQuery: return std::string("empty-query");
        case InvalidReason::Kind::ArityMismatch: return std::string("arity-mismatch");
        case InvalidReason::Kind::UnknownLabel: return std::string("unknown-label");
      }
      return std::string("unknown");
    }();
    if (got != rec.at("expected").get<std::string>())
      check.require(false, "completion " + std::to_string(total) + " classified as " + got +
                               ", want " + rec.at("expected").get<std::string>());
  }
  check.equal(total, size_t(50), "parser corpus size");

  // the mock at invalid_rate 0.46 reproduces that invalid fraction
  MockBehavior behavior;
  behavior.invalid_rate = 0.46;
  MockBackend backend(123, behavior);
  GenerationParams params;
  params.num_outputs = 1;
  LabelSet binary = LabelSet::binary();

  ExemplarSet set;
  set.variant = Variant::pairwise();
  set.instruction = default_instruction("pairwise", "passage");
  TemplateConfig templates;
  size_t invalid = 0;
  const size_t prompts = 10000;
  for (size_t i = 0; i < prompts; ++i) {
    Document doc;
    doc.id = "d" + std::to_string(i);
    doc.text = "coastal reef survey migration plankton sample number " + std::to_string(i);
    auto prompt = render_generation_prompt(set, doc, templates);
    auto completions = backend.generate(prompt, params);
    auto parse = parse_completion(prompt.expected_parse, prompt.cue + completions[0].text, binary);
    invalid += !parse.valid();
  }
  double fraction = static_cast<double>(invalid) / static_cast<double>(prompts);
  if (std::abs(fraction - 0.46) > 0.02) {
    std::ostringstream ss;
    ss << "invalid fraction " << fraction << " outside 0.46 +/- 0.02";
    check.require(false, ss.str());
  }
}

// ---- criterion 7: end-to-end determinism -------------------------------------------

void e2e_determinism(Check& check) {
  qgen::test::TempDir dir("acceptance_e2e");
  auto corpus = qgen::test::make_fixture_corpus(500, 20240101);
  save_corpus(corpus, dir.file("corpus.jsonl"));

  auto config_for = [&](const std::string& out, int workers) {
    json j;
    j["corpus"] = dir.file("corpus.jsonl");
    j["exemplars"] = qgen::test::fixture("exemplars_binary.jsonl");
    j["variant"] = "pairwise";
    j["backend"] = {{"kind", "mock"}, {"invalid_rate", 0.2}, {"fail_rate", 0.02}};
    j["sample_size"] = 500;
    j["seed"] = 4242;
    j["workers"] = workers;
    j["out"] = dir.file(out);
    return PipelineConfig::from_json_text(j.dump());
  };

  auto a = cmd_generate(config_for("run_a", 1));
  auto b = cmd_generate(config_for("run_b", 1));
  auto c = cmd_generate(config_for("run_c", 8));

  auto same = [&](const std::string& x, const std::string& y) {
    return qgen::test::read_file(x) == qgen::test::read_file(y);
  };
  check.require(same(a.synthetic_path, b.synthetic_path), "rerun synthetic differs");
  check.require(same(a.audit_path, b.audit_path), "rerun audit differs");
  check.require(same(a.stats_path, b.stats_path), "rerun stats differs");
  check.require(same(a.synthetic_path, c.synthetic_path), "8-worker synthetic differs");
  check.require(same(a.audit_path, c.audit_path), "8-worker audit differs");
  check.require(same(a.stats_path, c.stats_path), "8-worker stats differs");
  check.require(a.manifest.config_hash == c.manifest.config_hash, "config hash differs");

  const auto& s = a.run.stages.at("generate");
  check.require(s.failed_generations > 0, "fail injection produced no failed items");
  check.require(s.invalid_outputs > 0, "invalid injection produced no invalid outputs");
}

// ---- criterion 8: iterative flow arity ----------------------------------------------

void iterative_arity(Check& check) {
  auto exemplars = qgen::test::make_binary_exemplars();
  ExemplarSuite suite;
  suite.generation = build_exemplar_set(exemplars, Variant::relevant_only(), LabelSet::binary());
  suite.stage2 = build_exemplar_set(exemplars, Variant::iterative_stage2(), LabelSet::binary());
  suite.filter = build_filter_exemplar_set(exemplars, LabelSet::binary());

  auto corpus = qgen::test::make_fixture_corpus(60, 5150);
  MockBehavior behavior;
  behavior.fail_rate = 0.1;  // injected item failures
  MockBackend backend(61, behavior);

  RunConfig config;
  config.variant = VariantKind::IterativeStage2;
  config.label_set = LabelSet::binary();
  auto result = run_variant(backend, corpus, suite, config);

  const auto& s1 = result.stages.at("stage1");
  const auto& s2 = result.stages.at("stage2");
  // stage-2 prompts one item per retained stage-1 relevant query...
  check.equal(s2.prompt_inputs, s1.filtered_query_outputs, "stage2 items vs stage1 retained");
  // ...requesting two outputs each, minus the injected item failures, exactly
  check.equal(s2.requested_queries, 2 * (s2.prompt_inputs - s2.failed_generations),
              "stage2 requested arity");
  check.require(s2.failed_generations > 0, "no stage-2 failures were injected");
  check.require(s1.filtered_query_outputs > 0, "stage1 retained nothing");
}

// ---- criterion 9: baseline trainer ---------------------------------------------------

void baseline_trainer(Check& check) {
  // gradient vs central finite differences
  {
    std::vector<FeatureVector> features;
    std::vector<int> targets;
    SplitMix64 rng(17);
    for (int i = 0; i < 10; ++i) {
      Document doc;
      doc.id = "d" + std::to_string(i);
      doc.text = "marker" + std::to_string(rng.bounded(40)) + " payload body text";
      std::string query = i % 2 ? "offtopic" + std::to_string(rng.bounded(40))
                                : doc.text.substr(0, doc.text.find(' '));
      features.push_back(featurize(query, doc));
      targets.push_back(i % 2 ? 0 : 1);
    }
    auto model = PointwiseModel::zero();
    std::vector<uint32_t> active;
    for (const auto& fv : features)
      for (const auto& [idx, value] : fv.entries) active.push_back(idx);
    for (uint32_t idx : active) model.weights[idx] = rng.unit() - 0.5;
    model.bias = -0.125;

    const double l2 = 1e-3, h = 1e-5;
    std::vector<double> grad_w;
    double grad_b = 0.0;
    batch_gradient(model, features, targets, l2, grad_w, grad_b);
    double max_rel = 0.0;
    auto probe = [&](double* slot, double analytic) {
      double saved = *slot;
      *slot = saved + h;
      double up = batch_loss(model, features, targets, l2);
      *slot = saved - h;
      double down = batch_loss(model, features, targets, l2);
      *slot = saved;
      double numeric = (up - down) / (2 * h);
      double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
      max_rel = std::max(max_rel, std::abs(analytic - numeric) / denom);
    };
    for (size_t i = 0; i < std::min<size_t>(active.size(), 50); ++i)
      probe(&model.weights[active[i]], grad_w[active[i]]);
    probe(&model.bias, grad_b);
    check.require(max_rel < 1e-4, "gradient finite-difference relative error >= 1e-4");
  }

  // separable fixture accuracy
  {
    std::vector<TrainingRow> rows;
    SplitMix64 rng(23);
    RelevanceLabel rel{"relevant", 1}, irrel{"irrelevant", 0};
    for (int i = 0; i < 200; ++i) {
      bool positive = i % 2 == 0;
      std::string doc_text = "marker" + std::to_string(rng.bounded(50)) + " payload tokens";
      std::string query = positive ? doc_text.substr(0, doc_text.find(' '))
                                   : "offtopic" + std::to_string(rng.bounded(50));
      rows.push_back({query, "doc" + std::to_string(i), doc_text, positive ? rel : irrel, "x"});
    }
    Hyperparams hp;
    hp.epochs = 50;
    auto [model, report] = train(rows, LabelSet::binary(), hp);
    check.require(report.train_accuracy >= 0.99, "separable fixture accuracy below 0.99");
  }

  // trained on the mock pipeline's pairwise output, the baseline out-ranks
  // the random-scorer mean over 20 seeds
  {
    auto corpus = qgen::test::make_fixture_corpus(120, 777);
    auto exemplars = qgen::test::make_binary_exemplars();
    ExemplarSuite suite;
    suite.generation = build_exemplar_set(exemplars, Variant::pairwise(), LabelSet::binary());
    suite.filter = build_filter_exemplar_set(exemplars, LabelSet::binary());
    MockBehavior behavior;
    behavior.invalid_rate = 0.1;
    MockBackend backend(888, behavior);
    RunConfig run_config;
    run_config.variant = VariantKind::Pairwise;
    run_config.label_set = LabelSet::binary();
    auto result = run_variant(backend, corpus, suite, run_config);

    auto rows = make_training_rows(result.examples, corpus);
    check.require(rows.size() > 100, "mock pipeline produced too little training data");
    Hyperparams hp;
    hp.epochs = 20;
    auto [model, report] = train(rows, LabelSet::binary(), hp);

    std::vector<TestQuery> queries;
    Qrels qrels;
    for (int i = 0; i < 12; ++i) {
      const auto& doc = corpus.documents[static_cast<size_t>(i) * 9];
      std::string qid = "q" + std::to_string(i);
      queries.push_back({qid, doc.text.substr(0, 40)});
      qrels.judgments[{qid, doc.id}] = 2;
    }
    auto index = Bm25Index::build(corpus);
    auto pool = augment_eval_pool(index, queries, qrels, 20);
    NdcgConfig cfg{10, GainFunction::Exponential};

    auto model_run = rank_with_scorer(
        [&](const std::string& q, const Document& d) { return predict_relevance(model, q, d); },
        pool, queries, corpus);
    double model_ndcg = ndcg_at_k(model_run, qrels, cfg).mean;

    double random_total = 0.0;
    for (uint64_t seed = 0; seed < 20; ++seed) {
      auto random_run = rank_with_scorer(
          [&](const std::string& q, const Document& d) {
            return SplitMix64(mix64(seed, fnv1a64(q + "\x1f" + d.id))).unit();
          },
          pool, queries, corpus);
      random_total += ndcg_at_k(random_run, qrels, cfg).mean;
    }
    double random_mean = random_total / 20.0;
    std::ostringstream detail;
    detail << "baseline ndcg " << model_ndcg << " vs random mean " << random_mean;
    check.require(model_ndcg > random_mean, "baseline does not beat random: " + detail.str());
    std::cout << "    (" << detail.str() << ")\n";
  }
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<void(Check&)> run;
  };
  const std::vector<Criterion> criteria = {
      {"stats-arithmetic", stats_arithmetic},
      {"ndcg-oracle", ndcg_oracle},
      {"bm25-oracle", bm25_oracle},
      {"filter-dedup-properties", filter_dedup_properties},
      {"prompt-goldens", prompt_goldens},
      {"parser-corpus", parser_corpus},
      {"e2e-determinism", e2e_determinism},
      {"iterative-arity", iterative_arity},
      {"baseline-trainer", baseline_trainer},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    Check check;
    auto start = std::chrono::steady_clock::now();
    try {
      criterion.run(check);
    } catch (const std::exception& e) {
      check.failures.push_back(std::string("exception: ") + e.what());
    }
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();
    if (check.failures.empty()) {
      std::printf("[PASS] %-24s (%lld ms)\n", criterion.name, static_cast<long long>(elapsed));
    } else {
      ++failures;
      std::printf("[FAIL] %-24s (%lld ms)\n", criterion.name, static_cast<long long>(elapsed));
      for (const auto& f : check.failures) std::printf("       - %s\n", f.c_str());
    }
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
