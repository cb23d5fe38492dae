#pragma once

#include <condition_variable>
#include <mutex>
#include <string>

#include "qgen/backend.hpp"

namespace qgen {

// JSON-over-HTTP client for the generation service:
//   POST /v1/generate {"model","prompt","temperature","num_outputs","max_tokens","stop"}
//     -> {"outputs":[{"text": ...}, ...]}
//   POST /v1/score {"model","prompt","continuations":[...]}
//     -> {"log_likelihoods":[...]}
// Timeouts and 5xx responses are retried with exponential backoff; at most
// descriptor.max_in_flight requests are outstanding at any time.
class RemoteBackend : public Backend {
 public:
  explicit RemoteBackend(BackendDescriptor descriptor, std::string bearer_token = {});

  std::vector<Completion> generate(const RenderedPrompt& prompt,
                                   const GenerationParams& params) override;
  std::vector<double> score(const RenderedPrompt& prompt,
                            const std::vector<std::string>& continuations) override;

  // TCP-level reachability probe; used by the pipeline to fail fast before
  // any output is written.
  bool reachable() const;

 private:
  std::string post_with_retries(const std::string& path, const std::string& body);

  BackendDescriptor descriptor_;
  std::string token_;
  std::string scheme_host_port_;

  // bounded-concurrency gate
  std::mutex mutex_;
  std::condition_variable slot_free_;
  int in_flight_ = 0;
};

}  // namespace qgen
