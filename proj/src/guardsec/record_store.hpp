#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace guardsec {

// Append-only log of JSON records, one per line. Each stored record carries a
// strictly increasing "id" and a "type" tag. An empty path keeps the log in
// memory only.
class RecordStore {
 public:
  // Loads any existing records. Throws Error{StoreUnavailable} if the file
  // exists but cannot be read or holds a corrupt line.
  explicit RecordStore(std::string path = "");

  RecordStore(const RecordStore&) = delete;
  RecordStore& operator=(const RecordStore&) = delete;

  // Returns the new id. Throws Error{StoreUnavailable} when the write fails;
  // the record is then not visible to readers either.
  std::int64_t append(std::string_view type, nlohmann::json body);

  // Visits records of `type` (all records when empty) in id order.
  void for_each(std::string_view type, const std::function<void(const nlohmann::json&)>& fn) const;

  std::size_t size() const;
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  mutable std::shared_mutex mu_;
  std::vector<nlohmann::json> records_;
  std::int64_t next_id_ = 1;
};

}  // namespace guardsec
