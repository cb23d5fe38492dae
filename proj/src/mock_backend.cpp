#include "qgen/mock_backend.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "qgen/rng.hpp"
#include "qgen/text_util.hpp"

namespace qgen {

namespace {

const char* kLexicon[] = {
    "quartz",  "nebula",   "saffron", "tundra",  "viola",   "obsidian", "mariner", "solstice",
    "juniper", "cobalt",   "ember",   "falcon",  "glacier", "harbor",   "isotope", "jasmine",
    "krypton", "lagoon",   "meridian", "nacre",  "orchid",  "pendulum", "quiver",  "rosette",
    "sextant", "talon",    "umber",   "vellum",  "willow",  "xenon",    "yarrow",  "zephyr"};
constexpr size_t kLexiconSize = sizeof(kLexicon) / sizeof(kLexicon[0]);

// value of the last "<field>: ..." line in the prompt
std::string last_field_line(const std::string& prompt, const std::string& field) {
  std::string marker = "\n" + field + ": ";
  size_t begin;
  size_t pos = prompt.rfind(marker);
  if (pos != std::string::npos) {
    begin = pos + marker.size();
  } else if (starts_with(prompt, field + ": ")) {
    begin = field.size() + 2;
  } else {
    return {};
  }
  size_t end = prompt.find('\n', begin);
  if (end == std::string::npos) end = prompt.size();
  return prompt.substr(begin, end - begin);
}

std::string target_doc_text(const std::string& prompt) {
  std::string text = last_field_line(prompt, "passage");
  if (text.empty()) text = last_field_line(prompt, "product");
  return text;
}

// maps rank to the intended query/document overlap fraction
double band_center(const RelevanceLabel& label, const LabelSet& labels) {
  int hi = labels.top().rank;
  int lo = labels.bottom().rank;
  if (hi == lo) return 1.0;
  return static_cast<double>(label.rank - lo) / static_cast<double>(hi - lo);
}

std::string make_query(SplitMix64& rng, const std::vector<std::string>& doc_tokens,
                       double center) {
  size_t words = 4 + rng.bounded(3);
  size_t from_doc = static_cast<size_t>(std::lround(center * static_cast<double>(words)));
  from_doc = std::min(from_doc, doc_tokens.size());
  std::vector<std::string> parts;
  if (from_doc > 0) {
    size_t start = rng.bounded(doc_tokens.size() - from_doc + 1);
    for (size_t i = 0; i < from_doc; ++i) parts.push_back(doc_tokens[start + i]);
  }
  while (parts.size() < words) parts.push_back(kLexicon[rng.bounded(kLexiconSize)]);
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(' ');
    out += parts[i];
  }
  return out;
}

std::string lexicon_sentence(SplitMix64& rng, size_t words) {
  std::string out;
  for (size_t i = 0; i < words; ++i) {
    if (i) out.push_back(' ');
    out += kLexicon[rng.bounded(kLexiconSize)];
  }
  return out;
}

}  // namespace

double MockBackend::token_overlap(const std::string& query, const std::string& doc_text) {
  auto q = tokenize(query);
  if (q.empty()) return 0.0;
  auto d = tokenize(doc_text);
  std::unordered_set<std::string> doc_set(d.begin(), d.end());
  size_t hit = 0;
  for (const auto& t : q) hit += doc_set.count(t);
  return static_cast<double>(hit) / static_cast<double>(q.size());
}

std::vector<Completion> MockBackend::generate(const RenderedPrompt& prompt,
                                              const GenerationParams& params) {
  uint64_t h = mix64(seed_, fnv1a64(prompt.text));
  if (behavior_.fail_rate > 0.0) {
    SplitMix64 fail_rng(mix64(h, 0xFA17));
    if (fail_rng.unit() < behavior_.fail_rate)
      throw BackendError(BackendError::Kind::Timeout, "injected mock backend failure");
  }

  const LabelSet& labels = behavior_.label_set;
  const std::string doc_text = target_doc_text(prompt.text);
  const auto doc_tokens = tokenize(doc_text);

  std::vector<Completion> out;
  for (int i = 0; i < params.num_outputs; ++i) {
    SplitMix64 rng(mix64(h, 2 * static_cast<uint64_t>(i) + 1));
    bool invalid = false;
    if (behavior_.invalid_rate > 0.0) {
      SplitMix64 draw(mix64(h, 1000 + static_cast<uint64_t>(i)));
      invalid = draw.unit() < behavior_.invalid_rate;
    }

    std::string text;
    if (prompt.is_filter) {
      if (invalid) {
        text = " " + lexicon_sentence(rng, 2);
      } else {
        double o = 0.0;
        {
          std::string q = last_field_line(prompt.text, "query");
          o = token_overlap(q, doc_text);
        }
        const RelevanceLabel* best = &labels.top();
        double best_dist = 2.0;
        for (const auto& label : labels.labels()) {
          double dist = std::abs(o - band_center(label, labels));
          if (dist < best_dist) {
            best_dist = dist;
            best = &label;
          }
        }
        text = " " + best->name;
      }
      out.push_back({apply_stop_sequences(std::move(text), params.stop_sequences), i});
      continue;
    }

    const Variant& variant = prompt.expected_parse;
    auto query_for = [&](const RelevanceLabel& label) {
      return make_query(rng, doc_tokens, band_center(label, labels));
    };

    if (!invalid) {
      switch (variant.kind) {
        case VariantKind::RelevantOnly:
          text = " " + query_for(labels.top());
          break;
        case VariantKind::LabelConditioned:
          text = " " + query_for(variant.first ? *variant.first : labels.top());
          break;
        case VariantKind::Pairwise:
          text = " " + query_for(labels.top()) + "\nquery2: " + query_for(labels.bottom());
          break;
        case VariantKind::IterativeStage2:
          text = " " + query_for(labels.bottom());
          break;
        case VariantKind::PairwiseLabelPair:
          text = " " + query_for(*variant.first) + "\nquery2: " + query_for(*variant.second);
          break;
        case VariantKind::AllLabels: {
          bool first_line = true;
          for (const auto& label : labels.labels()) {
            if (!first_line) text += "\nLabel:";
            text += " " + label.name + " Query: " + query_for(label);
            first_line = false;
          }
          break;
        }
      }
    } else {
      // malformed output families observed in practice: re-opened document
      // fields, dropped prefixes, empty or truncated output, bogus labels
      size_t arity = variant.arity(labels);
      std::string field = prompt.text.find("\nproduct: ") != std::string::npos ? "product" : "passage";
      uint64_t pick = rng.bounded(arity >= 2 ? 4 : 2);
      switch (pick) {
        case 0:  // new fabricated document after a plausible first line
          if (variant.kind == VariantKind::AllLabels)
            text = " " + labels.top().name + " Query: " + make_query(rng, doc_tokens, 1.0);
          else
            text = " " + make_query(rng, doc_tokens, 1.0);
          text += "\n" + field + ": " + lexicon_sentence(rng, 8);
          break;
        case 1:  // empty output
          text = "";
          break;
        case 2:  // second line lost its prefix
          text = " " + make_query(rng, doc_tokens, 1.0) + "\n" + lexicon_sentence(rng, 4);
          break;
        default:  // stops after the first query
          if (variant.kind == VariantKind::AllLabels)
            text = " " + labels.top().name + " Query: " + make_query(rng, doc_tokens, 1.0);
          else
            text = " " + make_query(rng, doc_tokens, 1.0);
          break;
      }
    }
    out.push_back({apply_stop_sequences(std::move(text), params.stop_sequences), i});
  }
  return out;
}

std::vector<double> MockBackend::score(const RenderedPrompt& prompt,
                                       const std::vector<std::string>& continuations) {
  if (continuations.empty())
    throw BackendError(BackendError::Kind::EmptyContinuations, "no continuations to score");
  for (const auto& c : continuations)
    if (trim(c).empty())
      throw BackendError(BackendError::Kind::EmptyContinuations, "empty continuation");

  const std::string doc_text = target_doc_text(prompt.text);
  const std::string query = last_field_line(prompt.text, "query");
  double o = token_overlap(query, doc_text);

  std::vector<double> scores;
  scores.reserve(continuations.size());
  for (const auto& c : continuations) {
    auto label = behavior_.label_set.find_ci(trim(c));
    if (label) {
      scores.push_back(-std::abs(o - band_center(*label, behavior_.label_set)));
    } else {
      SplitMix64 rng(mix64(fnv1a64(c), fnv1a64(prompt.text)));
      scores.push_back(-2.0 - rng.unit());
    }
  }
  return scores;
}

}  // namespace qgen
