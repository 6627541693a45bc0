// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#include "climadash/error.hpp"

namespace climadash {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kInvalid:
      return "invalid";
    case ErrorKind::kNotFound:
      return "not_found";
    case ErrorKind::kConflict:
      return "conflict";
    case ErrorKind::kGeometry:
      return "geometry";
    case ErrorKind::kIo:
      return "io";
  }
  return "invalid";
}

int http_status(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kInvalid:
      return 400;
    case ErrorKind::kNotFound:
      return 404;
    case ErrorKind::kConflict:
      return 409;
    case ErrorKind::kGeometry:
      return 422;
    case ErrorKind::kIo:
      return 500;
  }
  return 500;
}

}  // namespace climadash
