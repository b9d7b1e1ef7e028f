// Copyright (C) 2026 The LIC Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lic {

/// Coarse failure class. The CLI prints it verbatim as the machine-parseable
/// part of its one-line error message.
enum class ErrorCode {
  kInvalidArgument,
  kShape,
  kFormat,
  kTruncated,
  kUnsupported,
  kModelMismatch,
  kIo,
  kAssertion,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lic
