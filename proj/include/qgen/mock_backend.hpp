#pragma once

#include <cstdint>

#include "qgen/backend.hpp"
#include "qgen/labels.hpp"

namespace qgen {

// Deterministic stand-in for the remote LLM. Generation output is a pure
// function of (seed, prompt hash, output_index): relevant-intended queries
// copy a window of the target document, irrelevant-intended queries draw
// from a fixed off-topic lexicon, and intermediate labels blend the two at
// the fraction implied by their rank. Scoring rates each label by how close
// the query/document token overlap sits to that label's blend fraction, so
// the round-trip filter behaves the way it would against a real model.
struct MockBehavior {
  double invalid_rate = 0.0;  // malformed completions, drawn per (prompt, output)
  double fail_rate = 0.0;     // whole-call failures, drawn per prompt
  LabelSet label_set = LabelSet::binary();
};

class MockBackend : public Backend {
 public:
  MockBackend(uint64_t seed, MockBehavior behavior)
      : seed_(seed), behavior_(std::move(behavior)) {}

  std::vector<Completion> generate(const RenderedPrompt& prompt,
                                   const GenerationParams& params) override;
  std::vector<double> score(const RenderedPrompt& prompt,
                            const std::vector<std::string>& continuations) override;

  // fraction of query tokens present in the document
  static double token_overlap(const std::string& query, const std::string& doc_text);

 private:
  uint64_t seed_;
  MockBehavior behavior_;
};

}  // namespace qgen
