// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace climadash {

// Request-level failure categories. Each maps onto one HTTP status and one
// CLI exit code, so callers never have to parse messages.
enum class ErrorKind {
  kInvalid,   // 400 / exit 1
  kNotFound,  // 404 / exit 1
  kConflict,  // 409 / exit 1
  kGeometry,  // 422 / exit 1
  kIo,        // 500 / exit 3
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

std::string_view to_string(ErrorKind kind) noexcept;
int http_status(ErrorKind kind) noexcept;

}  // namespace climadash
