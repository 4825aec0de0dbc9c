#pragma once

#include <chrono>
#include <functional>
#include <string>
#include <string_view>

namespace guardsec {

using Timestamp = std::chrono::sys_seconds;
using Date = std::chrono::sys_days;

// Source of "now". Injected everywhere wall-clock time affects a result so
// tests and golden replays can pin it.
using Clock = std::function<Timestamp()>;

Clock system_clock();
Clock fixed_clock(Timestamp at);

// "YYYY-MM-DD". Throws Error{ParseError} on anything else.
Date parse_date(std::string_view text);
std::string format_date(Date d);

// "YYYY-MM-DDTHH:MM:SSZ", also accepting a bare date (midnight UTC).
Timestamp parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp t);

// Whole days from `from` to `to`; negative when `to` precedes `from`.
long days_between(Date from, Date to);

// Fractional days elapsed between two instants.
double age_in_days(Timestamp event, Timestamp as_of);

}  // namespace guardsec
