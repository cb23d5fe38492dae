#include "qgen/prompting.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <unordered_map>

#include "json.hpp"
#include "qgen/text_util.hpp"

namespace qgen {

using nlohmann::json;

LabelSet::LabelSet(std::vector<RelevanceLabel> labels) : labels_(std::move(labels)) {
  if (labels_.size() < 2) throw ConfigError("label set needs at least 2 labels");
  for (size_t i = 0; i < labels_.size(); ++i) {
    for (size_t j = i + 1; j < labels_.size(); ++j) {
      if (labels_[i].name == labels_[j].name)
        throw ConfigError("duplicate label name: " + labels_[i].name);
    }
    if (i + 1 < labels_.size() && labels_[i].rank <= labels_[i + 1].rank)
      throw ConfigError("label ranks must be strictly descending");
  }
}

std::optional<RelevanceLabel> LabelSet::find(const std::string& name) const {
  for (const auto& l : labels_)
    if (l.name == name) return l;
  return std::nullopt;
}

std::optional<RelevanceLabel> LabelSet::find_ci(const std::string& name) const {
  for (const auto& l : labels_)
    if (iequals(l.name, name)) return l;
  return std::nullopt;
}

LabelSet LabelSet::binary() {
  return LabelSet({{"relevant", 1}, {"irrelevant", 0}});
}

LabelSet LabelSet::shopping() {
  return LabelSet({{"Exact", 3}, {"Substitute", 2}, {"Complement", 1}, {"Irrelevant", 0}});
}

size_t Variant::arity(const LabelSet& labels) const {
  switch (kind) {
    case VariantKind::RelevantOnly:
    case VariantKind::LabelConditioned:
    case VariantKind::IterativeStage2:
      return 1;
    case VariantKind::Pairwise:
    case VariantKind::PairwiseLabelPair:
      return 2;
    case VariantKind::AllLabels:
      return labels.size();
  }
  return 1;
}

std::string Variant::base_name() const {
  switch (kind) {
    case VariantKind::RelevantOnly: return "relevant-only";
    case VariantKind::LabelConditioned: return "label-conditioned";
    case VariantKind::Pairwise: return "pairwise";
    case VariantKind::IterativeStage2: return "iterative-stage2";
    case VariantKind::PairwiseLabelPair: return "pairwise-pair";
    case VariantKind::AllLabels: return "all-labels";
  }
  return "unknown";
}

std::string Variant::name() const {
  std::string n = base_name();
  if (kind == VariantKind::LabelConditioned && first) {
    n += "[" + first->name + "]";
  } else if (kind == VariantKind::PairwiseLabelPair && first && second) {
    n += "[" + first->name + "," + second->name + "]";
  }
  return n;
}

namespace {

const char* kFourLabelDescription =
    "The four relevance labels are 'Exact' which means that the item is relevant for the "
    "query, and satisfies all the query specifications. 'Substitute' means that the item is "
    "somewhat relevant, i.e., it fails to fulfill some aspects of the query but the item can "
    "be used as a functional substitute. 'Complement' means that the item does not fulfill "
    "the query, but could be used in combination with an exact item. 'Irrelevant' means that "
    "the item is irrelevant, or it fails to fulfill a central aspect of the query.";

std::string truncate_doc(const Document& doc, const TemplateConfig& templates,
                         std::vector<TruncationEvent>& events) {
  std::string text = collapse_whitespace(doc.prompt_text());
  if (templates.max_doc_chars > 0 && text.size() > templates.max_doc_chars) {
    events.push_back({doc.id, text.size(), templates.max_doc_chars});
    text.resize(templates.max_doc_chars);
  }
  return text;
}

std::string instruction_for(const std::string& key, const TemplateConfig& templates) {
  auto it = templates.instruction_overrides.find(key);
  if (it != templates.instruction_overrides.end()) return it->second;
  return default_instruction(key, templates.doc_field);
}

// groups examples by document id, keeping first-appearance order
struct DocGroup {
  Document document;
  std::vector<std::pair<RelevanceLabel, std::string>> entries;
};

std::vector<DocGroup> group_by_document(const std::vector<LabeledExample>& examples) {
  std::vector<DocGroup> groups;
  std::unordered_map<std::string, size_t> by_id;
  for (const auto& ex : examples) {
    auto [it, inserted] = by_id.emplace(ex.document.id, groups.size());
    if (inserted) groups.push_back({ex.document, {}});
    groups[it->second].entries.emplace_back(ex.label, ex.query);
  }
  return groups;
}

std::optional<std::string> first_entry_for(const DocGroup& g, const RelevanceLabel& label) {
  for (const auto& [l, q] : g.entries)
    if (l.name == label.name) return q;
  return std::nullopt;
}

// round-robin over labels in descending rank: quota per label, then fill to
// `total` while capped at `cap` per label (0 = uncapped)
std::vector<Exemplar> pick_per_label(const std::vector<LabeledExample>& examples,
                                     const LabelSet& labels, size_t required, size_t cap,
                                     size_t total) {
  std::map<std::string, std::vector<const LabeledExample*>> pool;
  for (const auto& ex : examples) pool[ex.label.name].push_back(&ex);
  for (const auto& label : labels.labels()) {
    if (pool[label.name].size() < required) throw InsufficientExemplarsError(label.name);
  }
  std::vector<Exemplar> out;
  for (size_t round = 0; out.size() < total; ++round) {
    bool any = false;
    for (const auto& label : labels.labels()) {
      if (out.size() >= total) break;
      if (cap > 0 && round >= cap) continue;
      const auto& candidates = pool[label.name];
      if (round >= candidates.size()) continue;
      const LabeledExample* ex = candidates[round];
      out.push_back({ex->document, {{ex->label, ex->query}}});
      any = true;
    }
    if (!any) break;
  }
  return out;
}

}  // namespace

std::string default_instruction(const std::string& variant_key, const std::string& doc_field) {
  const bool product = doc_field == "product";
  if (variant_key == "relevant-only") {
    if (product) return "Given a product generate a query that exactly matches the product specifications:";
    return "Given a passage from a web page, generate a search query for which the passage can "
           "be a perfect answer.";
  }
  if (variant_key == "label-conditioned") {
    if (product)
      return std::string("Given a product and desired relevance label generate a query that is "
                         "appropriate for that relevance label. ") +
             kFourLabelDescription + " Some examples are:";
    return "Given a passage from a web page and a relevance label, generate a search query "
           "appropriate for that relevance level for that passage. If the label is \"relevant\", "
           "the query should be such that the passage can be a perfect answer and if the label "
           "is \"irrelevant\" the query should be such that the passage is not a perfect answer.";
  }
  if (variant_key == "pairwise" || variant_key == "iterative-stage2") {
    if (product)
      return std::string("Given a product and a desired relevance label, the task is to generate "
                         "two unique query for each relevance label. ") +
             kFourLabelDescription;
    return "Given a passage from a web page, generate a search query for which the passage can "
           "be a perfect answer and a search query for which the passage is not a perfect answer.";
  }
  if (variant_key == "pairwise-pair") {
    return std::string("Given a product and a desired relevance label, the task is to generate "
                       "two unique query for each relevance label. ") +
           kFourLabelDescription;
  }
  if (variant_key == "all-labels") {
    return std::string("Given a product and a desired relevance label, the task is to generate "
                       "a unique query for each relevance label. ") +
           kFourLabelDescription;
  }
  if (variant_key == "filter") {
    if (product)
      return std::string("Given a search query and a product, generate the relevance label for "
                         "the query. ") +
             kFourLabelDescription;
    return "Given a search query and a passage from a web page, generate the relevance label "
           "for the query. The label is 'relevant' if the passage can be a perfect answer for "
           "the query and 'irrelevant' if the passage is not a perfect answer for the query.";
  }
  throw ConfigError("no default instruction for variant key: " + variant_key);
}

ExemplarSet build_exemplar_set(const std::vector<LabeledExample>& examples,
                               const Variant& variant, const LabelSet& labels,
                               const TemplateConfig& templates) {
  for (const auto& ex : examples) {
    if (!labels.find(ex.label.name)) throw WrongLabelSetError(ex.label.name);
    if (collapse_whitespace(ex.query).empty())
      throw ConfigError("exemplar query must be non-empty: doc " + ex.document.id);
  }

  ExemplarSet set;
  set.variant = variant;
  set.instruction = instruction_for(variant.base_name(), templates);

  switch (variant.kind) {
    case VariantKind::RelevantOnly: {
      const auto& top = labels.top();
      for (const auto& ex : examples) {
        if (set.exemplars.size() == 10) break;
        if (ex.label.name == top.name)
          set.exemplars.push_back({ex.document, {{ex.label, collapse_whitespace(ex.query)}}});
      }
      if (set.exemplars.size() < 10) throw InsufficientExemplarsError(top.name);
      break;
    }
    case VariantKind::LabelConditioned: {
      size_t required = labels.is_binary() ? 5 : 2;
      size_t cap = labels.is_binary() ? 5 : 0;
      set.exemplars = pick_per_label(examples, labels, required, cap, 10);
      for (auto& ex : set.exemplars)
        for (auto& [l, q] : ex.entries) q = collapse_whitespace(q);
      break;
    }
    case VariantKind::Pairwise:
    case VariantKind::IterativeStage2: {
      const auto& top = labels.top();
      const auto& bottom = labels.bottom();
      size_t missing_top = 0, missing_bottom = 0;
      for (const auto& g : group_by_document(examples)) {
        if (set.exemplars.size() == 10) break;
        auto rel = first_entry_for(g, top);
        auto irrel = first_entry_for(g, bottom);
        if (rel && irrel) {
          set.exemplars.push_back({g.document,
                                   {{top, collapse_whitespace(*rel)},
                                    {bottom, collapse_whitespace(*irrel)}}});
        } else {
          missing_top += !rel;
          missing_bottom += !irrel;
        }
      }
      if (set.exemplars.size() < 10)
        throw InsufficientExemplarsError(missing_bottom > missing_top ? bottom.name : top.name);
      break;
    }
    case VariantKind::PairwiseLabelPair: {
      for (const auto& g : group_by_document(examples)) {
        if (set.exemplars.size() == 10) break;
        // first two distinct-label entries in file order form the pair
        std::vector<std::pair<RelevanceLabel, std::string>> pair;
        for (const auto& [l, q] : g.entries) {
          if (!pair.empty() && pair[0].first.name == l.name) continue;
          pair.emplace_back(l, collapse_whitespace(q));
          if (pair.size() == 2) break;
        }
        if (pair.size() == 2) set.exemplars.push_back({g.document, std::move(pair)});
      }
      for (const auto& label : labels.labels()) {
        bool covered = false;
        for (const auto& ex : set.exemplars)
          for (const auto& [l, q] : ex.entries) covered = covered || l.name == label.name;
        if (!covered) throw InsufficientExemplarsError(label.name);
      }
      break;
    }
    case VariantKind::AllLabels: {
      for (const auto& g : group_by_document(examples)) {
        if (set.exemplars.size() == 10) break;
        std::vector<std::pair<RelevanceLabel, std::string>> entries;
        for (const auto& label : labels.labels()) {
          auto q = first_entry_for(g, label);
          if (!q) break;
          entries.emplace_back(label, collapse_whitespace(*q));
        }
        if (entries.size() == labels.size()) set.exemplars.push_back({g.document, std::move(entries)});
      }
      if (set.exemplars.empty()) {
        // name the label with the weakest coverage across candidate groups
        const RelevanceLabel* worst = &labels.top();
        size_t worst_count = SIZE_MAX;
        for (const auto& label : labels.labels()) {
          size_t count = 0;
          for (const auto& g : group_by_document(examples))
            count += first_entry_for(g, label).has_value();
          if (count < worst_count) {
            worst_count = count;
            worst = &label;
          }
        }
        throw InsufficientExemplarsError(worst->name);
      }
      break;
    }
  }
  return set;
}

ExemplarSet build_filter_exemplar_set(const std::vector<LabeledExample>& examples,
                                      const LabelSet& labels, const TemplateConfig& templates) {
  for (const auto& ex : examples)
    if (!labels.find(ex.label.name)) throw WrongLabelSetError(ex.label.name);
  ExemplarSet set;
  set.variant = Variant::label_conditioned();
  set.instruction = instruction_for("filter", templates);
  size_t required = labels.is_binary() ? 5 : 2;
  size_t cap = labels.is_binary() ? 5 : 0;
  set.exemplars = pick_per_label(examples, labels, required, cap, 10);
  for (auto& ex : set.exemplars)
    for (auto& [l, q] : ex.entries) q = collapse_whitespace(q);
  return set;
}

namespace {

void render_exemplar_block(std::string& out, const Exemplar& ex, const Variant& variant,
                           const TemplateConfig& templates,
                           std::vector<TruncationEvent>& truncations) {
  const std::string& field = templates.doc_field;
  out += field + ": " + truncate_doc(ex.document, templates, truncations) + "\n";
  switch (variant.kind) {
    case VariantKind::RelevantOnly:
      out += "query: " + ex.entries[0].second + "\n";
      break;
    case VariantKind::LabelConditioned:
      out += "label: " + ex.entries[0].first.name + "\n";
      out += "query: " + ex.entries[0].second + "\n";
      break;
    case VariantKind::Pairwise:
    case VariantKind::IterativeStage2:
      out += "query1: " + ex.entries[0].second + "\n";
      out += "query2: " + ex.entries[1].second + "\n";
      break;
    case VariantKind::PairwiseLabelPair:
      out += "task: generate query1 for " + ex.entries[0].first.name + " and query2 for " +
             ex.entries[1].first.name + "\n";
      out += "query1: " + ex.entries[0].second + "\n";
      out += "query2: " + ex.entries[1].second + "\n";
      break;
    case VariantKind::AllLabels:
      for (const auto& [label, query] : ex.entries)
        out += "Label: " + label.name + " Query: " + query + "\n";
      break;
  }
}

}  // namespace

RenderedPrompt render_generation_prompt(const ExemplarSet& set, const Document& target,
                                        const TemplateConfig& templates,
                                        std::optional<RelevanceLabel> target_label,
                                        std::optional<std::string> prior_query) {
  const Variant& variant = set.variant;
  if (variant.kind == VariantKind::LabelConditioned && !target_label) throw MissingLabelError();
  if (variant.kind == VariantKind::IterativeStage2 && !prior_query) throw MissingPriorQueryError();

  RenderedPrompt prompt;
  prompt.expected_parse = variant;
  if (variant.kind == VariantKind::LabelConditioned) prompt.expected_parse.first = target_label;
  prompt.target_doc_id = target.id;

  std::string& out = prompt.text;
  out = set.instruction + "\n";
  for (const auto& ex : set.exemplars) {
    out += "\n";
    render_exemplar_block(out, ex, variant, templates, prompt.truncations);
  }
  out += "\n";

  const std::string& field = templates.doc_field;
  out += field + ": " + truncate_doc(target, templates, prompt.truncations) + "\n";
  switch (variant.kind) {
    case VariantKind::RelevantOnly:
      prompt.cue = "query:";
      break;
    case VariantKind::LabelConditioned:
      out += "label: " + target_label->name + "\n";
      prompt.cue = "query:";
      break;
    case VariantKind::Pairwise:
      prompt.cue = "query1:";
      break;
    case VariantKind::IterativeStage2:
      out += "query1: " + collapse_whitespace(*prior_query) + "\n";
      prompt.cue = "query2:";
      break;
    case VariantKind::PairwiseLabelPair:
      out += "task: generate query1 for " + variant.first->name + " and query2 for " +
             variant.second->name + "\n";
      prompt.cue = "query1:";
      break;
    case VariantKind::AllLabels:
      prompt.cue = "Label:";
      break;
  }
  out += prompt.cue;
  return prompt;
}

RenderedPrompt render_filter_prompt(const ExemplarSet& filter_set, const std::string& query,
                                    const Document& doc, const LabelSet& labels,
                                    const TemplateConfig& templates) {
  std::string q = collapse_whitespace(query);
  if (q.empty()) throw MissingQueryError();
  for (const auto& label : labels.labels()) {
    bool covered = false;
    for (const auto& ex : filter_set.exemplars)
      covered = covered || ex.entries[0].first.name == label.name;
    if (!covered) throw InsufficientExemplarsError(label.name);
  }

  RenderedPrompt prompt;
  prompt.is_filter = true;
  prompt.target_doc_id = doc.id;
  prompt.cue = "label:";

  const std::string& field = templates.doc_field;
  std::string& out = prompt.text;
  out = filter_set.instruction + "\n";
  for (const auto& ex : filter_set.exemplars) {
    out += "\n";
    out += "query: " + ex.entries[0].second + "\n";
    out += field + ": " + truncate_doc(ex.document, templates, prompt.truncations) + "\n";
    out += "label: " + ex.entries[0].first.name + "\n";
  }
  out += "\n";
  out += "query: " + q + "\n";
  out += field + ": " + truncate_doc(doc, templates, prompt.truncations) + "\n";
  out += prompt.cue;
  return prompt;
}

std::vector<LabeledExample> load_exemplar_file(const std::string& path, const LabelSet& labels) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open exemplar file: " + path);
  std::vector<LabeledExample> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object())
      throw DataError("exemplar line " + std::to_string(line_no) + ": malformed record");
    for (const char* key : {"query", "doc_text", "label"})
      if (!rec.contains(key) || !rec[key].is_string())
        throw DataError("exemplar line " + std::to_string(line_no) + ": missing field " + key);
    auto label = labels.find_ci(rec["label"].get<std::string>());
    if (!label)
      throw WrongLabelSetError(rec["label"].get<std::string>());
    LabeledExample ex;
    ex.query = rec["query"].get<std::string>();
    ex.label = *label;
    ex.document.id = "exemplar-" + std::to_string(line_no);
    if (rec.contains("doc_id") && rec["doc_id"].is_string())
      ex.document.id = rec["doc_id"].get<std::string>();
    if (rec.contains("doc_title") && rec["doc_title"].is_string() &&
        !rec["doc_title"].get<std::string>().empty())
      ex.document.title = rec["doc_title"].get<std::string>();
    ex.document.text = rec["doc_text"].get<std::string>();
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace qgen
