#include "qgen/http_backend.hpp"

#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace qgen {

using nlohmann::json;

namespace {

class InFlightGuard {
 public:
  InFlightGuard(std::mutex& m, std::condition_variable& cv, int& count, int limit)
      : mutex_(m), cv_(cv), count_(count) {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return count_ < limit; });
    ++count_;
  }
  ~InFlightGuard() {
    {
      std::lock_guard lock(mutex_);
      --count_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex& mutex_;
  std::condition_variable& cv_;
  int& count_;
};

}  // namespace

RemoteBackend::RemoteBackend(BackendDescriptor descriptor, std::string bearer_token)
    : descriptor_(std::move(descriptor)), token_(std::move(bearer_token)) {
  if (!descriptor_.endpoint || descriptor_.endpoint->empty())
    throw ConfigError("remote backend requires an endpoint URL");
  scheme_host_port_ = *descriptor_.endpoint;
  // httplib wants scheme://host:port without a trailing slash
  while (!scheme_host_port_.empty() && scheme_host_port_.back() == '/')
    scheme_host_port_.pop_back();
}

bool RemoteBackend::reachable() const {
  httplib::Client client(scheme_host_port_);
  client.set_connection_timeout(std::chrono::milliseconds(2000));
  auto res = client.Get("/");
  return res || res.error() != httplib::Error::Connection;
}

std::string RemoteBackend::post_with_retries(const std::string& path, const std::string& body) {
  InFlightGuard guard(mutex_, slot_free_, in_flight_, descriptor_.max_in_flight);

  httplib::Client client(scheme_host_port_);
  auto timeout = descriptor_.request_timeout;
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  httplib::Headers headers;
  if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);

  std::string last_error;
  for (int attempt = 0; attempt < descriptor_.max_attempts; ++attempt) {
    if (attempt > 0) {
      auto backoff = descriptor_.retry_backoff * (1 << (attempt - 1));
      std::this_thread::sleep_for(backoff);
    }
    auto res = client.Post(path, headers, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;  // timeout / connection failure -> retry
    }
    if (res->status >= 500) {
      last_error = "server error " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      BackendError e(BackendError::Kind::Http,
                     "backend returned status " + std::to_string(res->status));
      e.http_status = res->status;
      throw e;
    }
    return res->body;
  }
  throw BackendError(BackendError::Kind::Timeout,
                     "backend unavailable after " + std::to_string(descriptor_.max_attempts) +
                         " attempts: " + last_error);
}

std::vector<Completion> RemoteBackend::generate(const RenderedPrompt& prompt,
                                                const GenerationParams& params) {
  json req;
  req["model"] = descriptor_.model_name;
  req["prompt"] = prompt.text;
  req["temperature"] = params.temperature;
  req["num_outputs"] = params.num_outputs;
  req["max_tokens"] = params.max_tokens;
  req["stop"] = params.stop_sequences;

  std::string body = post_with_retries("/v1/generate", req.dump());
  json res = json::parse(body, nullptr, false);
  if (res.is_discarded() || !res.contains("outputs") || !res["outputs"].is_array())
    throw BackendError(BackendError::Kind::Protocol, "malformed generate response");

  std::vector<Completion> out;
  for (const auto& item : res["outputs"]) {
    if (!item.contains("text") || !item["text"].is_string())
      throw BackendError(BackendError::Kind::Protocol, "generate output missing text");
    out.push_back({apply_stop_sequences(item["text"].get<std::string>(), params.stop_sequences),
                   static_cast<int>(out.size())});
  }
  if (static_cast<int>(out.size()) < params.num_outputs)
    throw partial_response_error(static_cast<int>(out.size()), params.num_outputs);
  out.resize(params.num_outputs);
  return out;
}

std::vector<double> RemoteBackend::score(const RenderedPrompt& prompt,
                                         const std::vector<std::string>& continuations) {
  if (continuations.empty())
    throw BackendError(BackendError::Kind::EmptyContinuations, "no continuations to score");
  for (const auto& c : continuations)
    if (c.empty())
      throw BackendError(BackendError::Kind::EmptyContinuations, "empty continuation");

  json req;
  req["model"] = descriptor_.model_name;
  req["prompt"] = prompt.text;
  req["continuations"] = continuations;

  std::string body = post_with_retries("/v1/score", req.dump());
  json res = json::parse(body, nullptr, false);
  if (res.is_discarded() || !res.contains("log_likelihoods") || !res["log_likelihoods"].is_array())
    throw BackendError(BackendError::Kind::Protocol, "malformed score response");

  std::vector<double> out;
  for (const auto& v : res["log_likelihoods"]) {
    if (!v.is_number()) throw BackendError(BackendError::Kind::Protocol, "non-numeric score");
    out.push_back(v.get<double>());
  }
  if (out.size() != continuations.size())
    throw BackendError(BackendError::Kind::Protocol,
                       "score count mismatch: got " + std::to_string(out.size()) + ", want " +
                           std::to_string(continuations.size()));
  for (double v : out)
    if (!std::isfinite(v)) throw BackendError(BackendError::Kind::Protocol, "non-finite score");
  return out;
}

}  // namespace qgen
