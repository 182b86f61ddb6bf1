// Copyright 2026 The v4r Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace v4r
{

enum class ErrorCode {
  Io,
  Decode,
  DimensionMismatch,
  InvalidParams,
  InvalidArgument,
  TooFewFrames,
  TooFewSamples,
  EmptyCandidates,
  MaskTooSmall,
  EmptyMask,
  InvalidRle,
  DuplicateRecord,
  Parse,
  CountMismatch,
  NumericalFailure,
  Alignment,
  Sidecar,
  Config,
  NoScenes,
  Validation,
};

const char * to_string(ErrorCode code) noexcept;

/// Every failure raised by the core carries one of the codes above; the C API
/// maps them one-to-one onto its status enum.
class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, const std::string & message)
  : std::runtime_error(message), code_(code)
  {
  }

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

/// Malformed JSON Lines input; line is 1-based.
class ParseError : public Error
{
public:
  ParseError(std::size_t line, const std::string & message)
  : Error(ErrorCode::Parse, "line " + std::to_string(line) + ": " + message), line_(line)
  {
  }

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

}  // namespace v4r
