#include "guardsec/record_store.hpp"

#include <fstream>

#include "guardsec/error.hpp"

namespace guardsec {

using nlohmann::json;

RecordStore::RecordStore(std::string path) : path_(std::move(path)) {
  if (path_.empty()) return;
  std::ifstream in(path_);
  if (!in) return;  // created on first append
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::StoreUnavailable, path_ + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_number_integer()) {
      throw Error(ErrorCode::StoreUnavailable, path_ + ":" + std::to_string(lineno) + ": record without id");
    }
    next_id_ = std::max(next_id_, j["id"].get<std::int64_t>() + 1);
    records_.push_back(std::move(j));
  }
}

std::int64_t RecordStore::append(std::string_view type, json body) {
  if (!body.is_object()) throw Error(ErrorCode::InvalidArgument, "records must be objects");
  std::unique_lock lock(mu_);
  body["id"] = next_id_;
  body["type"] = std::string(type);
  if (!path_.empty()) {
    std::ofstream out(path_, std::ios::app);
    out << body.dump() << '\n';
    out.flush();
    if (!out) throw Error(ErrorCode::StoreUnavailable, "cannot append to '" + path_ + "'");
  }
  records_.push_back(std::move(body));
  return next_id_++;
}

void RecordStore::for_each(std::string_view type, const std::function<void(const json&)>& fn) const {
  std::shared_lock lock(mu_);
  for (const auto& r : records_) {
    if (type.empty() || r.value("type", "") == type) fn(r);
  }
}

std::size_t RecordStore::size() const {
  std::shared_lock lock(mu_);
  return records_.size();
}

}  // namespace guardsec
