// Copyright 2026 hlsep authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef HLSEP_ERROR_HPP
#define HLSEP_ERROR_HPP

#include <stdexcept>
#include <string>

namespace hlsep {

// Error taxonomy shared with the C API status codes. Keep the numeric
// values in sync with include/hlsep.h.
enum class ErrorCode {
  kOk = 0,
  kBadArgument = 1,    // invalid parameter / precondition violation
  kFileNotFound = 2,   // missing or unreadable file
  kBadFormat = 3,      // unsupported encoding or malformed container
  kEmptyAudio = 4,     // zero-length audio
  kOutOfRange = 5,     // segment window outside the buffer
  kShapeMismatch = 6,  // matrix/spectrogram dimension mismatch
  kEmptyDatabase = 7,  // exemplar database required but empty
  kDegenerate = 8,     // statistically degenerate input
  kNumeric = 9,        // non-finite value where a finite one is required
  kIo = 10,            // write failure
  kUnknownKey = 11,    // unknown configuration key or name
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool ok, ErrorCode code, const std::string& message) {
  if (!ok) fail(code, message);
}

}  // namespace hlsep

#endif  // HLSEP_ERROR_HPP
