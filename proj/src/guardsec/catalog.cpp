#include "guardsec/catalog.hpp"

#include <fstream>

#include "guardsec/error.hpp"
#include "json.hpp"

namespace guardsec {

Catalogs Catalogs::load(const std::string& dir, const std::vector<std::string>& locales, std::string default_locale) {
  Catalogs c(std::move(default_locale));
  for (const auto& locale : locales) {
    const std::string path = dir + "/" + locale + ".json";
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open catalog '" + path + "'");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::ParseError, path + ": " + e.what());
    }
    if (!j.is_object()) throw Error(ErrorCode::SchemaViolation, path + ": expected an object");
    std::map<std::string, std::string> entries;
    for (const auto& [key, value] : j.items()) {
      if (!value.is_string()) throw Error(ErrorCode::SchemaViolation, path + ": '" + key + "' is not a string");
      entries[key] = value.get<std::string>();
    }
    c.add(locale, std::move(entries));
  }
  if (!c.has_locale(c.default_locale_)) {
    throw Error(ErrorCode::UnknownLocale, "default locale '" + c.default_locale_ + "' has no catalog");
  }
  return c;
}

void Catalogs::add(std::string locale, std::map<std::string, std::string> entries) {
  tables_[std::move(locale)] = std::move(entries);
}

bool Catalogs::has_locale(std::string_view locale) const {
  return tables_.find(locale) != tables_.end();
}

std::vector<std::string> Catalogs::locales() const {
  std::vector<std::string> out;
  for (const auto& [k, _] : tables_) out.push_back(k);
  return out;
}

const std::string& Catalogs::resolve(std::string_view locale) const {
  const auto it = tables_.find(locale);
  if (it == tables_.end()) throw Error(ErrorCode::UnknownLocale, "no catalog for locale '" + std::string(locale) + "'");
  return it->first;
}

bool Catalogs::has_key(std::string_view locale, std::string_view key) const {
  const auto it = tables_.find(locale);
  return it != tables_.end() && it->second.count(std::string(key)) > 0;
}

std::string Catalogs::text(std::string_view locale, std::string_view key,
                           const std::map<std::string, std::string>& args) const {
  for (std::string_view loc : {locale, std::string_view(default_locale_)}) {
    const auto it = tables_.find(loc);
    if (it == tables_.end()) continue;
    const auto entry = it->second.find(std::string(key));
    if (entry != it->second.end()) return substitute(entry->second, args);
  }
  return std::string(key);
}

std::string substitute(std::string_view tmpl, const std::map<std::string, std::string>& args) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const std::size_t close = tmpl.find('}', i + 1);
      if (close != std::string_view::npos) {
        const auto it = args.find(std::string(tmpl.substr(i + 1, close - i - 1)));
        if (it != args.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += tmpl[i++];
  }
  return out;
}

}  // namespace guardsec
