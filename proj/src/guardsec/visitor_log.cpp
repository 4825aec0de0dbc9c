#include "guardsec/visitor_log.hpp"

#include <algorithm>
#include <utility>

#include "guardsec/error.hpp"

namespace guardsec {

using nlohmann::json;

namespace {

[[noreturn]] void schema_fail(std::string_view field, const std::string& what) {
  throw Error(ErrorCode::SchemaViolation, "visitor record field '" + std::string(field) + "': " + what);
}

json to_value(const std::string& v) { return v; }
json to_value(bool v) { return v; }
json to_value(double v) { return v; }
json to_value(std::int64_t v) { return v; }
json to_value(Timestamp t) { return format_timestamp(t); }
template <class T>
json to_value(const std::optional<T>& v) {
  return v ? to_value(*v) : json(nullptr);
}

void from_value(const json& j, std::string_view f, std::string& out) {
  if (!j.is_string()) schema_fail(f, "expected a string");
  out = j.get<std::string>();
}
void from_value(const json& j, std::string_view f, bool& out) {
  if (!j.is_boolean()) schema_fail(f, "expected a boolean");
  out = j.get<bool>();
}
void from_value(const json& j, std::string_view f, double& out) {
  if (!j.is_number()) schema_fail(f, "expected a number");
  out = j.get<double>();
}
void from_value(const json& j, std::string_view f, std::int64_t& out) {
  if (!j.is_number_integer()) schema_fail(f, "expected an integer");
  out = j.get<std::int64_t>();
}
void from_value(const json& j, std::string_view f, Timestamp& out) {
  if (!j.is_string()) schema_fail(f, "expected a timestamp string");
  try {
    out = parse_timestamp(j.get<std::string>());
  } catch (const Error& e) {
    schema_fail(f, e.what());
  }
}
template <class T>
void from_value(const json& j, std::string_view f, std::optional<T>& out) {
  if (j.is_null()) {
    out.reset();
    return;
  }
  T v{};
  from_value(j, f, v);
  out = std::move(v);
}

template <std::size_t... I>
json to_json_impl(const VisitorRecord& r, std::index_sequence<I...>) {
  json j = json::object();
  const auto fields = visitor_fields(r);
  ((j[std::string(kVisitorFields[I])] = to_value(std::get<I>(fields))), ...);
  return j;
}

template <std::size_t... I>
void from_json_impl(const json& j, VisitorRecord& r, std::index_sequence<I...>) {
  auto fields = visitor_fields(r);
  auto read = [&](std::string_view name, auto& slot) {
    const auto it = j.find(std::string(name));
    if (it == j.end()) schema_fail(name, "missing");
    from_value(*it, name, slot);
  };
  (read(kVisitorFields[I], std::get<I>(fields)), ...);
}

}  // namespace

json visitor_record_to_json(const VisitorRecord& r) {
  return to_json_impl(r, std::make_index_sequence<kVisitorFields.size()>{});
}

VisitorRecord visitor_record_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::SchemaViolation, "visitor record must be an object");
  for (const auto& [key, _] : j.items()) {
    // "id" and "type" are the record store envelope.
    if (key == "id" || key == "type") continue;
    if (std::find(kVisitorFields.begin(), kVisitorFields.end(), key) == kVisitorFields.end()) {
      throw Error(ErrorCode::SchemaViolation, "visitor record: unknown field '" + key + "'");
    }
  }
  VisitorRecord r;
  from_json_impl(j, r, std::make_index_sequence<kVisitorFields.size()>{});
  return r;
}

AggregateStats aggregate_stats(const std::vector<VisitorRecord>& records, Timestamp from, Timestamp to) {
  if (from > to) throw Error(ErrorCode::InvalidArgument, "aggregate window has from > to");
  AggregateStats s;
  for (const auto& r : records) {
    if (r.recorded_at < from || r.recorded_at > to) continue;
    ++s.total;
    if (r.vpn_flag) {
      ++s.vpn;
      if (r.dns_leak_flag) ++s.dns_leak_among_vpn;
    }
    if (r.hosting_flag) ++s.datacenter;
    if (r.abuse_score > 0.0) ++s.abuse_nonzero;
  }
  if (s.total > 0) {
    const double n = static_cast<double>(s.total);
    s.vpn_rate = static_cast<double>(s.vpn) / n;
    s.datacenter_rate = static_cast<double>(s.datacenter) / n;
    s.abuse_nonzero_rate = static_cast<double>(s.abuse_nonzero) / n;
  }
  if (s.vpn > 0) s.dns_leak_rate_among_vpn = static_cast<double>(s.dns_leak_among_vpn) / static_cast<double>(s.vpn);
  return s;
}

std::int64_t VisitorLog::log_interaction(const VisitorRecord& record) {
  return store_.append(kVisitRecordType, visitor_record_to_json(record));
}

std::vector<VisitorRecord> VisitorLog::records() const {
  std::vector<VisitorRecord> out;
  store_.for_each(kVisitRecordType, [&](const json& j) { out.push_back(visitor_record_from_json(j)); });
  return out;
}

AggregateStats VisitorLog::aggregate_stats(Timestamp from, Timestamp to) const {
  return guardsec::aggregate_stats(records(), from, to);
}

}  // namespace guardsec
