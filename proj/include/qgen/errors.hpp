#pragma once

#include <stdexcept>
#include <string>

namespace qgen {

// Bad or inconsistent configuration; the CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input data (corpus, qrels, run files, ...); exit code 4.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Failures talking to a generation/scoring backend; exit code 3 when fatal.
struct BackendError : std::runtime_error {
  enum class Kind { Timeout, Http, PartialResponse, Protocol, Unreachable, EmptyContinuations };

  Kind kind;
  int http_status = 0;
  int got = 0;
  int want = 0;

  BackendError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

inline BackendError partial_response_error(int got, int want) {
  BackendError e(BackendError::Kind::PartialResponse,
                 "partial response: got " + std::to_string(got) + " of " +
                     std::to_string(want) + " outputs");
  e.got = got;
  e.want = want;
  return e;
}

}  // namespace qgen
