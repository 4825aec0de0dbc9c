#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace guardsec {

// Key -> template tables, one per locale. Templates use {name} placeholders.
class Catalogs {
 public:
  explicit Catalogs(std::string default_locale = "en") : default_locale_(std::move(default_locale)) {}

  // Reads <dir>/<locale>.json for each locale. Throws Error{ParseError | SchemaViolation}.
  static Catalogs load(const std::string& dir, const std::vector<std::string>& locales,
                       std::string default_locale = "en");

  void add(std::string locale, std::map<std::string, std::string> entries);

  bool has_locale(std::string_view locale) const;
  const std::string& default_locale() const { return default_locale_; }
  std::vector<std::string> locales() const;

  // Returns `locale` if loaded, otherwise throws Error{UnknownLocale}.
  const std::string& resolve(std::string_view locale) const;

  // Looks the key up in `locale`, then the default locale; the key itself if
  // neither has it. Placeholders are substituted from `args`.
  std::string text(std::string_view locale, std::string_view key,
                   const std::map<std::string, std::string>& args = {}) const;

  bool has_key(std::string_view locale, std::string_view key) const;

 private:
  std::string default_locale_;
  std::map<std::string, std::map<std::string, std::string>, std::less<>> tables_;
};

std::string substitute(std::string_view tmpl, const std::map<std::string, std::string>& args);

}  // namespace guardsec
