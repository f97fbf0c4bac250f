/******************************************************************************
 * Copyright 2026 The seedslam Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/

#pragma once

#include <stdexcept>
#include <string>

namespace seedslam {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (detection files, configs, CSV artifacts).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  explicit ParseError(const std::string& what) : Error(what) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_ = 0;
};

/// Well-formed input that violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A caller broke an operation's precondition.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Stereo geometry could not be evaluated (zero/negative disparity, point behind camera).
class GeometryError : public Error {
 public:
  enum class Kind { DegenerateDisparity, UnreliableDepth, BehindCamera };

  GeometryError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

enum class FailureReason { None, TooFewMatches, TranslationBound, OptimizerDivergence };

inline const char* to_string(FailureReason r) {
  switch (r) {
    case FailureReason::None: return "none";
    case FailureReason::TooFewMatches: return "too_few_matches";
    case FailureReason::TranslationBound: return "translation_bound";
    case FailureReason::OptimizerDivergence: return "optimizer_divergence";
  }
  return "none";
}

inline FailureReason failure_reason_from_string(const std::string& s) {
  if (s == "none") return FailureReason::None;
  if (s == "too_few_matches") return FailureReason::TooFewMatches;
  if (s == "translation_bound") return FailureReason::TranslationBound;
  if (s == "optimizer_divergence") return FailureReason::OptimizerDivergence;
  throw ParseError("unknown failure reason '" + s + "'");
}

/// Hard stop of frame-to-frame tracking. Drives the distance-mapped metric.
class TrackingFailure : public Error {
 public:
  TrackingFailure(FailureReason reason, const std::string& what) : Error(what), reason_(reason) {}
  FailureReason reason() const { return reason_; }

 private:
  FailureReason reason_;
};

}  // namespace seedslam
