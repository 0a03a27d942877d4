#pragma once

#include <stdexcept>
#include <string>

namespace fokker {

// Error categories mirrored one-to-one by the C API status codes.
enum class ErrorCode {
  invalid_argument,
  domain,       // parameter outside its mathematical domain
  support,      // support mismatch / absolute-continuity failure
  degenerate,   // zero-mass density, degenerate ensemble, zero bandwidth
  numeric,      // non-finite data, loss of positive definiteness
  blowup,       // diverging particle or state
  sample,       // not enough samples for the requested estimator
  solver,       // linear solve or time-stepping failure
  positivity,   // density went negative beyond tolerance
  unsupported,  // model lacks the required closed form
  io,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool cond, ErrorCode code, const std::string& msg) {
  if (!cond) fail(code, msg);
}

}  // namespace fokker
