#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace pemsig {

// Calendar dates are carried as a day count relative to 1970-01-01 so that
// window arithmetic is plain integer math.
using Day = std::int32_t;

// Strict ISO-8601 (YYYY-MM-DD). Rejects anything else, including dates that
// do not exist on the civil calendar.
std::optional<Day> parse_date(std::string_view iso) noexcept;

std::string format_date(Day day);

}  // namespace pemsig
