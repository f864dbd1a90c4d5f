#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace migmine {

std::string to_lower(std::string_view s);

std::string_view trim(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);

// Splits a commit message (or any prose) into lowercase tokens. A token is a
// run of alphanumerics possibly joined by '-', '_' or '.'; joiners at token
// edges are trimmed, so "catch2." yields "catch2".
std::vector<std::string> tokenize_message(std::string_view message);

// Replaces invalid UTF-8 byte sequences with U+FFFD so downstream JSON
// emission never chokes on garbage bytes from old blobs.
std::string utf8_sanitize(std::string_view bytes);

// Epoch seconds -> "YYYY-MM-DDTHH:MM:SSZ".
std::string iso8601_utc(std::int64_t epoch_seconds);

// Epoch seconds -> {year, month} in UTC.
struct YearMonth {
    int year;
    int month;
};
YearMonth year_month_utc(std::int64_t epoch_seconds);

// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_escape(std::string_view field);

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 1469598103934665603ull);

} // namespace migmine
