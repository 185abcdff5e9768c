#pragma once

#include <string>

// UTC timestamp handling. Timestamps are unix seconds as double (no leap
// seconds). ISO 8601 parsing covers the "YYYY-MM-DDThh:mm:ssZ" form and a
// few relaxed variants (space separator, missing Z, fractional seconds).

namespace lli::timeutil {

// Days between 1970-01-01 and y-m-d in the proleptic Gregorian calendar.
long days_from_civil(int y, int m, int d);

// Parse ISO 8601 UTC. Throws std::invalid_argument on malformed input.
double parse_utc(const std::string& iso);

// Format unix seconds as "YYYY-MM-DDThh:mm:ssZ" (seconds floored).
std::string format_utc(double utc_s);

}  // namespace lli::timeutil
