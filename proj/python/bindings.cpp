#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "json.hpp"
#include "qgen/baseline.hpp"
#include "qgen/evalmetrics.hpp"
#include "qgen/mock_backend.hpp"
#include "qgen/pipeline.hpp"
#include "qgen/retrieval.hpp"
#include "qgen/synthgen.hpp"
#include "qgen/text_util.hpp"

namespace py = pybind11;
using namespace qgen;

namespace {

LabelSet labels_from(const std::vector<std::pair<std::string, int>>& labels) {
  if (labels.empty()) return LabelSet::binary();
  std::vector<RelevanceLabel> out;
  for (const auto& [name, rank] : labels) out.push_back({name, rank});
  return LabelSet(std::move(out));
}

Variant variant_from(const std::string& name, const LabelSet& labels,
                     const std::optional<std::string>& first,
                     const std::optional<std::string>& second) {
  if (name == "relevant-only") return Variant::relevant_only();
  if (name == "pairwise") return Variant::pairwise();
  if (name == "iterative-stage2") return Variant::iterative_stage2();
  if (name == "all-labels") return Variant::all_labels();
  if (name == "label-conditioned") {
    std::optional<RelevanceLabel> target;
    if (first) target = labels.find_ci(*first);
    return Variant::label_conditioned(target);
  }
  if (name == "pairwise-pair") {
    if (!first || !second)
      throw ConfigError("pairwise-pair needs 'first' and 'second' label names");
    auto l1 = labels.find_ci(*first);
    auto l2 = labels.find_ci(*second);
    if (!l1 || !l2) throw ConfigError("pair labels not in label set");
    return Variant::pairwise_label_pair(*l1, *l2);
  }
  throw ConfigError("unknown variant: " + name);
}

DocumentCollection collection_from(const std::vector<Document>& docs) {
  DocumentCollection out;
  out.documents = docs;
  return out;
}

py::dict stage_to_dict(const StageStats& s) {
  py::dict d;
  d["prompt_inputs"] = s.prompt_inputs;
  d["requested_queries"] = s.requested_queries;
  d["failed_generations"] = s.failed_generations;
  d["invalid_outputs"] = s.invalid_outputs;
  d["valid_query_outputs"] = s.valid_query_outputs;
  d["retained"] = s.retained;
  d["dropped_label_mismatch"] = s.dropped_label_mismatch;
  d["dropped_tie"] = s.dropped_tie;
  d["filter_backend_errors"] = s.filter_backend_errors;
  d["dropped_duplicate_conflict"] = s.dropped_duplicate_conflict;
  d["duplicates_collapsed"] = s.duplicates_collapsed;
  d["filtered_query_outputs"] = s.filtered_query_outputs;
  d["train_examples"] = s.train_examples;
  d["queries_per_completion"] = s.queries_per_completion;
  d["per_label_counts"] = s.per_label_counts;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Synthetic query generation, filtering, and evaluation pipeline";
  m.attr("__version__") = kToolVersion;

  py::class_<Document>(m, "Document")
      .def(py::init([](std::string id, std::string text, std::optional<std::string> title) {
             Document d;
             d.id = std::move(id);
             d.text = std::move(text);
             d.title = std::move(title);
             return d;
           }),
           py::arg("id"), py::arg("text"), py::arg("title") = py::none())
      .def_readwrite("id", &Document::id)
      .def_readwrite("text", &Document::text)
      .def_property(
          "title", [](const Document& d) { return d.title; },
          [](Document& d, std::optional<std::string> t) { d.title = std::move(t); })
      .def("prompt_text", &Document::prompt_text)
      .def("__repr__", [](const Document& d) { return "Document(id='" + d.id + "')"; });

  m.def(
      "load_corpus",
      [](const std::string& path) {
        auto result = load_corpus(path);
        std::vector<std::string> errors;
        for (const auto& e : result.errors) {
          std::string kind = e.kind == LineErrorKind::MissingField  ? "missing-field"
                             : e.kind == LineErrorKind::DuplicateId ? "duplicate-id"
                                                                    : "malformed-record";
          errors.push_back(kind + " at line " + std::to_string(e.line_no) +
                           (e.detail.empty() ? "" : " (" + e.detail + ")"));
        }
        return py::make_tuple(result.collection.documents, errors);
      },
      py::arg("path"), "Load a line-delimited corpus; returns (documents, errors).");

  m.def(
      "save_corpus",
      [](const std::vector<Document>& docs, const std::string& path) {
        save_corpus(collection_from(docs), path);
      },
      py::arg("documents"), py::arg("path"));

  m.def(
      "sample_documents",
      [](const std::vector<Document>& docs, size_t n, uint64_t seed) {
        return sample_documents(collection_from(docs), n, seed).documents;
      },
      py::arg("documents"), py::arg("n"), py::arg("seed"),
      "Seeded sample without replacement, sorted by id.");

  m.def("tokenize", [](const std::string& text) { return tokenize(text); }, py::arg("text"));

  m.def(
      "parse_completion",
      [](const std::string& variant, const std::string& text,
         const std::vector<std::pair<std::string, int>>& labels,
         const std::optional<std::string>& first, const std::optional<std::string>& second) {
        LabelSet label_set = labels_from(labels);
        auto result =
            parse_completion(variant_from(variant, label_set, first, second), text, label_set);
        py::dict out;
        out["valid"] = result.valid();
        if (result.valid()) {
          py::list candidates;
          for (const auto& c : result.candidates)
            candidates.append(py::make_tuple(c.query, c.intended_label.name));
          out["candidates"] = candidates;
        } else {
          out["reason"] = result.invalid->describe();
        }
        return out;
      },
      py::arg("variant"), py::arg("text"),
      py::arg("labels") = std::vector<std::pair<std::string, int>>{},
      py::arg("first") = py::none(), py::arg("second") = py::none(),
      "Parse a cue-completed LLM output into candidate (query, label) pairs.");

  m.def(
      "render_prompt",
      [](const std::string& exemplars_path, const std::string& variant, const Document& target,
         const std::vector<std::pair<std::string, int>>& labels, const std::string& field,
         const std::optional<std::string>& target_label,
         const std::optional<std::string>& prior_query, size_t max_doc_chars) {
        LabelSet label_set = labels_from(labels);
        TemplateConfig templates;
        templates.doc_field = field;
        templates.max_doc_chars = max_doc_chars;
        auto examples = load_exemplar_file(exemplars_path, label_set);
        Variant v = variant_from(variant, label_set, target_label, {});
        auto set = build_exemplar_set(examples, v, label_set, templates);
        std::optional<RelevanceLabel> label;
        if (target_label) label = label_set.find_ci(*target_label);
        return render_generation_prompt(set, target, templates, label, prior_query).text;
      },
      py::arg("exemplars_path"), py::arg("variant"), py::arg("target"),
      py::arg("labels") = std::vector<std::pair<std::string, int>>{},
      py::arg("field") = "passage", py::arg("target_label") = py::none(),
      py::arg("prior_query") = py::none(), py::arg("max_doc_chars") = 4000);

  py::class_<Bm25Index>(m, "Bm25Index")
      .def_static(
          "build",
          [](const std::vector<Document>& docs, double k1, double b) {
            return Bm25Index::build(collection_from(docs), {k1, b});
          },
          py::arg("documents"), py::arg("k1") = 1.2, py::arg("b") = 0.75)
      .def_static("load", &Bm25Index::load, py::arg("path"))
      .def("save", &Bm25Index::save, py::arg("path"))
      .def("search", &Bm25Index::search, py::arg("query"), py::arg("k"))
      .def("score_doc", &Bm25Index::score_doc, py::arg("query"), py::arg("doc_id"))
      .def_property_readonly("doc_count", &Bm25Index::doc_count)
      .def_property_readonly("avg_doc_length", &Bm25Index::avg_doc_length);

  m.def(
      "ndcg_at_k",
      [](const std::map<std::string, std::vector<std::pair<std::string, double>>>& rankings,
         const std::vector<std::tuple<std::string, std::string, int>>& qrels, size_t k,
         const std::string& gain) {
        RankedRun run;
        run.rankings = rankings;
        Qrels gold;
        for (const auto& [qid, did, grade] : qrels) gold.judgments[{qid, did}] = grade;
        NdcgConfig cfg{k, gain == "linear" ? GainFunction::Linear : GainFunction::Exponential};
        auto report = ndcg_at_k(run, gold, cfg);
        py::dict out;
        out["per_query"] = report.per_query;
        out["mean"] = report.mean;
        out["evaluated"] = report.evaluated;
        out["missing"] = report.missing;
        out["zero_ideal"] = report.zero_ideal;
        return out;
      },
      py::arg("rankings"), py::arg("qrels"), py::arg("k") = 10, py::arg("gain") = "exponential");

  m.def(
      "generate",
      [](const std::string& config_json) {
        auto config = PipelineConfig::from_json_text(config_json);
        GenerateOutcome outcome;
        {
          py::gil_scoped_release release;
          outcome = cmd_generate(config);
        }
        py::dict out;
        out["synthetic"] = outcome.synthetic_path;
        out["audit"] = outcome.audit_path;
        out["stats"] = outcome.stats_path;
        out["manifest"] = outcome.manifest_path;
        out["config_hash"] = outcome.manifest.config_hash;
        py::dict stages;
        for (const auto& [name, s] : outcome.run.stages) stages[name.c_str()] = stage_to_dict(s);
        out["stages"] = stages;
        return out;
      },
      py::arg("config_json"),
      "Run the full sample -> prompt -> generate -> parse -> filter -> dedup pipeline.");

  m.def(
      "evaluate",
      [](const std::string& config_json, const std::string& scorer) {
        auto config = PipelineConfig::from_json_text(config_json);
        EvaluateOutcome outcome;
        {
          py::gil_scoped_release release;
          outcome = cmd_evaluate(config, scorer);
        }
        py::dict out;
        out["mean_ndcg"] = outcome.report.mean;
        out["evaluated"] = outcome.report.evaluated;
        out["missing"] = outcome.report.missing;
        out["zero_ideal"] = outcome.report.zero_ideal;
        out["per_query"] = outcome.report.per_query;
        out["run_path"] = outcome.run_path;
        out["report_path"] = outcome.report_path;
        return out;
      },
      py::arg("config_json"), py::arg("scorer") = "bm25");

  m.def("stats_table", &cmd_stats, py::arg("stats_path"),
        "Render the per-stage statistics table from a stats.json file.");

  m.def(
      "train_model",
      [](const std::string& config_json, const std::string& synthetic_path,
         const std::string& model_path) {
        auto config = PipelineConfig::from_json_text(config_json);
        TrainReport report;
        {
          py::gil_scoped_release release;
          report = cmd_train(config, synthetic_path, model_path, "");
        }
        py::dict out;
        out["epoch_losses"] = report.epoch_losses;
        out["train_accuracy"] = report.train_accuracy;
        if (report.validation_accuracy) out["validation_accuracy"] = *report.validation_accuracy;
        return out;
      },
      py::arg("config_json"), py::arg("synthetic_path"), py::arg("model_path"));

  m.def(
      "predict_relevance",
      [](const std::string& model_path, const std::string& query, const Document& doc) {
        auto model = PointwiseModel::load(model_path);
        return predict_relevance(model, query, doc);
      },
      py::arg("model_path"), py::arg("query"), py::arg("doc"));

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<DataError>(m, "DataError");
  py::register_exception<BackendError>(m, "BackendError");
}
