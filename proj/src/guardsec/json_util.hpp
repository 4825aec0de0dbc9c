#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "guardsec/error.hpp"
#include "json.hpp"

namespace guardsec {

// Strict reader for a JSON object: typed field access, and finish() rejects
// fields that were never read.
class ObjectReader {
 public:
  ObjectReader(const nlohmann::json& j, std::string context, ErrorCode code = ErrorCode::SchemaViolation)
      : j_(j), context_(std::move(context)), code_(code) {
    if (!j_.is_object()) fail("expected an object");
  }
  // The reader keeps a reference; temporaries would dangle.
  ObjectReader(nlohmann::json&&, std::string, ErrorCode = ErrorCode::SchemaViolation) = delete;

  template <class T>
  T required(const char* name) {
    seen_.insert(name);
    const auto it = j_.find(name);
    if (it == j_.end() || it->is_null()) fail(std::string("missing field '") + name + "'");
    return convert<T>(*it, name);
  }

  template <class T>
  std::optional<T> optional(const char* name) {
    seen_.insert(name);
    const auto it = j_.find(name);
    if (it == j_.end() || it->is_null()) return std::nullopt;
    return convert<T>(*it, name);
  }

  template <class T>
  T value_or(const char* name, T fallback) {
    return optional<T>(name).value_or(std::move(fallback));
  }

  bool has(const char* name) const { return j_.contains(name) && !j_.at(name).is_null(); }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (seen_.count(key) == 0) fail("unknown field '" + key + "'");
    }
  }

  [[noreturn]] void fail(const std::string& what) const { throw Error(code_, context_ + ": " + what); }

 private:
  template <class T>
  T convert(const nlohmann::json& v, const char* name) const {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) fail(std::string("field '") + name + "' must be a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) fail(std::string("field '") + name + "' must be an integer");
      return v.get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) fail(std::string("field '") + name + "' must be a number");
      return v.get<T>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) fail(std::string("field '") + name + "' must be a string");
      return v.get<std::string>();
    } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
      if (!v.is_array()) fail(std::string("field '") + name + "' must be an array");
      std::vector<std::string> out;
      for (const auto& e : v) {
        if (!e.is_string()) fail(std::string("field '") + name + "' must hold strings");
        out.push_back(e.get<std::string>());
      }
      return out;
    } else {
      static_assert(std::is_same_v<T, nlohmann::json>, "unsupported field type");
      return v;
    }
  }

  const nlohmann::json& j_;
  std::string context_;
  ErrorCode code_;
  std::set<std::string> seen_;
};

template <class T>
void put_optional(nlohmann::json& j, const char* name, const std::optional<T>& v) {
  j[name] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace guardsec
