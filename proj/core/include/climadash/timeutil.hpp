// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace climadash {

// Milliseconds since 1970-01-01T00:00:00Z. All timestamps in the system are
// UTC; there is no calendar or DST handling anywhere.
using EpochMs = std::int64_t;

// Parses RFC 3339 date-time text ("2024-06-01T00:00:00Z",
// "2024-06-01T02:00:00.250+02:00"). Fractional seconds beyond millisecond
// precision are truncated. Returns nullopt for anything malformed.
std::optional<EpochMs> parse_rfc3339(std::string_view text);

// Canonical UTC form: "YYYY-MM-DDTHH:MM:SSZ", with ".mmm" only when the
// millisecond part is non-zero.
std::string format_rfc3339(EpochMs ms);

EpochMs wall_clock_ms();

}  // namespace climadash
