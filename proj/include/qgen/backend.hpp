#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qgen/errors.hpp"
#include "qgen/prompting.hpp"

namespace qgen {

struct GenerationParams {
  double temperature = 0.6;
  int num_outputs = 2;
  int max_tokens = 64;
  std::vector<std::string> stop_sequences = {"\n\n"};
};

struct Completion {
  std::string text;
  int output_index = 0;
};

enum class BackendKind { Remote, Mock };

struct BackendDescriptor {
  BackendKind kind = BackendKind::Mock;
  std::optional<std::string> endpoint;  // required for Remote
  std::string model_name = "mock";
  std::chrono::milliseconds request_timeout{30000};
  int max_in_flight = 4;
  // retry schedule for Timeout/5xx; scaled down in tests
  int max_attempts = 3;
  std::chrono::milliseconds retry_backoff{1000};
};

// Uniform text generation + label scoring contract. Implementations must be
// safe to share across worker threads.
class Backend {
 public:
  virtual ~Backend() = default;

  // Returns exactly params.num_outputs completions, each truncated at the
  // first stop sequence. Fewer outputs from a remote backend raise
  // BackendError{PartialResponse}.
  virtual std::vector<Completion> generate(const RenderedPrompt& prompt,
                                           const GenerationParams& params) = 0;

  // One finite log-likelihood per continuation, order-aligned with input.
  virtual std::vector<double> score(const RenderedPrompt& prompt,
                                    const std::vector<std::string>& continuations) = 0;
};

// Cut at the first occurrence of any stop sequence, earliest match wins.
std::string apply_stop_sequences(std::string text, const std::vector<std::string>& stops);

}  // namespace qgen
