// Copyright 2026 The qauction Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QAUCTION_ERROR_HPP_
#define QAUCTION_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace qauction {

enum class ErrorKind {
  kInvalidConfig,
  kInvalidBid,
  kFeedbackUnavailable,
  kLengthMismatch,
  kIo,
  kParse,
};

inline const char* ToString(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidConfig: return "invalid-config";
    case ErrorKind::kInvalidBid: return "invalid-bid";
    case ErrorKind::kFeedbackUnavailable: return "feedback-unavailable";
    case ErrorKind::kLengthMismatch: return "length-mismatch";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kParse: return "parse";
  }
  return "unknown";
}

// All library failures surface as this exception; callers switch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(ToString(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void Fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void Require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) Fail(kind, what);
}

}  // namespace qauction

#endif  // QAUCTION_ERROR_HPP_
