#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace patsim {

/// Calendar date as days since 1970-01-01.
using Days = std::int32_t;

Days days_from_civil(int year, unsigned month, unsigned day);

/// Parses strict `YYYY-MM-DD`; nullopt for malformed or impossible dates.
std::optional<Days> parse_iso_date(std::string_view text);

std::string format_iso_date(Days days);

int year_of(Days days);

/// Today in UTC.
Days today_utc();

/// 1976-01-01, origin of the publication-date covariate.
inline constexpr Days kCovariateEpoch = 2191;

}  // namespace patsim
