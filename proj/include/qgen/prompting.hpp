#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qgen/corpus.hpp"
#include "qgen/errors.hpp"
#include "qgen/labels.hpp"

namespace qgen {

enum class VariantKind {
  RelevantOnly,
  LabelConditioned,
  Pairwise,
  IterativeStage2,
  PairwiseLabelPair,
  AllLabels,
};

// A generation variant instance. LabelConditioned carries the requested
// label once a prompt has been rendered for it; PairwiseLabelPair carries
// its (first, second) label pair.
struct Variant {
  VariantKind kind = VariantKind::Pairwise;
  std::optional<RelevanceLabel> first;
  std::optional<RelevanceLabel> second;

  static Variant relevant_only() { return {VariantKind::RelevantOnly, {}, {}}; }
  static Variant label_conditioned(std::optional<RelevanceLabel> target = {}) {
    return {VariantKind::LabelConditioned, std::move(target), {}};
  }
  static Variant pairwise() { return {VariantKind::Pairwise, {}, {}}; }
  static Variant iterative_stage2() { return {VariantKind::IterativeStage2, {}, {}}; }
  static Variant pairwise_label_pair(RelevanceLabel l1, RelevanceLabel l2) {
    return {VariantKind::PairwiseLabelPair, std::move(l1), std::move(l2)};
  }
  static Variant all_labels() { return {VariantKind::AllLabels, {}, {}}; }

  // candidate queries produced by one completion
  size_t arity(const LabelSet& labels) const;
  // canonical name used in files and template-config keys, e.g.
  // "pairwise", "label-conditioned[relevant]", "pairwise-pair[Exact,Complement]"
  std::string name() const;
  // config-key name without parameters
  std::string base_name() const;
};

struct Exemplar {
  Document document;
  std::vector<std::pair<RelevanceLabel, std::string>> entries;  // (label, query)
};

struct ExemplarSet {
  Variant variant;
  std::vector<Exemplar> exemplars;
  std::string instruction;
};

// One row of an exemplar file: {query, doc_title, doc_text, label}.
struct LabeledExample {
  std::string query;
  Document document;
  RelevanceLabel label;
};

struct TemplateConfig {
  std::string doc_field = "passage";  // "product" for shopping corpora
  std::map<std::string, std::string> instruction_overrides;  // keyed by base variant name / "filter"
  size_t max_doc_chars = 4000;
};

struct TruncationEvent {
  std::string doc_id;
  size_t original_chars = 0;
  size_t kept_chars = 0;
};

struct RenderedPrompt {
  std::string text;
  Variant expected_parse;
  std::string target_doc_id;
  std::string cue;  // trailing unanswered cue token; prepend to completions before parsing
  bool is_filter = false;
  std::vector<TruncationEvent> truncations;
};

struct InsufficientExemplarsError : ConfigError {
  std::string label;
  explicit InsufficientExemplarsError(std::string l)
      : ConfigError("insufficient exemplars for label: " + l), label(std::move(l)) {}
};

struct WrongLabelSetError : ConfigError {
  explicit WrongLabelSetError(const std::string& name)
      : ConfigError("exemplar label not in configured label set: " + name) {}
};

struct MissingLabelError : ConfigError {
  MissingLabelError() : ConfigError("label-conditioned prompt requires a target label") {}
};

struct MissingPriorQueryError : ConfigError {
  MissingPriorQueryError() : ConfigError("iterative stage-2 prompt requires the prior query") {}
};

struct MissingQueryError : ConfigError {
  MissingQueryError() : ConfigError("filter prompt requires a non-empty query") {}
};

// Selects and arranges exemplars per the variant's composition rule:
// 10 top-label exemplars for RelevantOnly; 5 per label (binary) or 10 with
// at least 2 per label for LabelConditioned; 10 (relevant, irrelevant)
// pairs for Pairwise/IterativeStage2; up to 10 two-label exemplars covering
// every label for PairwiseLabelPair; up to 10 full-coverage exemplars for
// AllLabels.
ExemplarSet build_exemplar_set(const std::vector<LabeledExample>& examples,
                               const Variant& variant, const LabelSet& labels,
                               const TemplateConfig& templates = {});

// Filtration exemplars: same 10-exemplar composition as LabelConditioned
// (5/5 for binary sets), rendered as query/document/label blocks.
ExemplarSet build_filter_exemplar_set(const std::vector<LabeledExample>& examples,
                                      const LabelSet& labels,
                                      const TemplateConfig& templates = {});

RenderedPrompt render_generation_prompt(const ExemplarSet& set, const Document& target,
                                        const TemplateConfig& templates,
                                        std::optional<RelevanceLabel> target_label = {},
                                        std::optional<std::string> prior_query = {});

RenderedPrompt render_filter_prompt(const ExemplarSet& filter_set, const std::string& query,
                                    const Document& doc, const LabelSet& labels,
                                    const TemplateConfig& templates);

// {query, doc_title, doc_text, label} line-delimited records.
std::vector<LabeledExample> load_exemplar_file(const std::string& path, const LabelSet& labels);

// Default instruction for a variant key ("pairwise", "filter", ...) and
// document field.
std::string default_instruction(const std::string& variant_key, const std::string& doc_field);

}  // namespace qgen
