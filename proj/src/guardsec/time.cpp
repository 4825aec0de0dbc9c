#include "guardsec/time.hpp"

#include <cctype>
#include <cstdio>

#include "guardsec/error.hpp"

namespace guardsec {

namespace {

int parse_fixed_int(std::string_view text, std::size_t pos, std::size_t len, std::string_view whole) {
  int value = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i]))) {
      throw Error(ErrorCode::ParseError, "invalid date/time: '" + std::string(whole) + "'");
    }
    value = value * 10 + (text[i] - '0');
  }
  return value;
}

}  // namespace

Clock system_clock() {
  return [] { return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()); };
}

Clock fixed_clock(Timestamp at) {
  return [at] { return at; };
}

Date parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw Error(ErrorCode::ParseError, "expected YYYY-MM-DD, got '" + std::string(text) + "'");
  }
  const int y = parse_fixed_int(text, 0, 4, text);
  const int m = parse_fixed_int(text, 5, 2, text);
  const int d = parse_fixed_int(text, 8, 2, text);
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) {
    throw Error(ErrorCode::ParseError, "not a calendar date: '" + std::string(text) + "'");
  }
  return Date{ymd};
}

std::string format_date(Date d) {
  const std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

Timestamp parse_timestamp(std::string_view text) {
  if (text.size() == 10) {
    return Timestamp{parse_date(text)};
  }
  // 2025-03-10T12:34:56Z
  if (text.size() != 20 || text[10] != 'T' || text[13] != ':' || text[16] != ':' || text[19] != 'Z') {
    throw Error(ErrorCode::ParseError, "expected YYYY-MM-DDTHH:MM:SSZ, got '" + std::string(text) + "'");
  }
  const Date day = parse_date(text.substr(0, 10));
  const int hh = parse_fixed_int(text, 11, 2, text);
  const int mm = parse_fixed_int(text, 14, 2, text);
  const int ss = parse_fixed_int(text, 17, 2, text);
  if (hh > 23 || mm > 59 || ss > 60) {
    throw Error(ErrorCode::ParseError, "time of day out of range: '" + std::string(text) + "'");
  }
  return Timestamp{day} + std::chrono::hours{hh} + std::chrono::minutes{mm} + std::chrono::seconds{ss};
}

std::string format_timestamp(Timestamp t) {
  const Date day = std::chrono::floor<std::chrono::days>(t);
  const std::chrono::hh_mm_ss tod{t - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%sT%02ld:%02ld:%02ldZ", format_date(day).c_str(),
                static_cast<long>(tod.hours().count()), static_cast<long>(tod.minutes().count()),
                static_cast<long>(tod.seconds().count()));
  return buf;
}

long days_between(Date from, Date to) {
  return static_cast<long>((to - from).count());
}

double age_in_days(Timestamp event, Timestamp as_of) {
  return static_cast<double>((as_of - event).count()) / 86400.0;
}

}  // namespace guardsec
