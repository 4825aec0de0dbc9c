#include <fstream>
#include <sstream>

#include "guardsec/error.hpp"
#include "guardsec/intel.hpp"
#include "guardsec/json_util.hpp"

namespace guardsec {

using nlohmann::json;

void FixtureSet::add(FixtureEntry entry) {
  if (find(entry.provider, entry.key) != nullptr) {
    throw Error(ErrorCode::DuplicateKey, "duplicate fixture (" + std::string(to_string(entry.provider)) + ", '" +
                                             entry.key + "')");
  }
  entries_.push_back(std::move(entry));
}

const FixtureEntry* FixtureSet::find(ProviderKind provider, std::string_view key) const {
  for (const auto& e : entries_) {
    if (e.provider == provider && e.key == key) return &e;
  }
  return nullptr;
}

namespace {

FixtureEntry parse_entry(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  FixtureEntry e;
  const auto provider = r.required<std::string>("provider");
  try {
    e.provider = provider_from_string(provider);
  } catch (const Error& err) {
    r.fail(err.what());
  }
  e.key = r.required<std::string>("key");
  if (e.key.empty()) r.fail("key must not be empty");
  e.delay_ms = r.value_or<int>("delay_ms", 0);
  if (e.delay_ms < 0) r.fail("delay_ms must be >= 0");
  e.fail = r.value_or<bool>("fail", false);
  const auto response = r.optional<json>("response");
  if (response) {
    try {
      e.response = payload_from_json(e.provider, *response);
    } catch (const Error& err) {
      r.fail(err.what());
    }
  } else if (!e.fail) {
    r.fail("response is required unless fail is true");
  }
  r.finish();
  return e;
}

void parse_into(FixtureSet& set, std::string_view text, std::string_view source) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const std::string where = std::string(source) + ":" + std::to_string(lineno);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::ParseError, where + ": " + e.what());
    }
    set.add(parse_entry(j, where));
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

FixtureSet parse_fixtures(std::string_view text, std::string_view source_name) {
  FixtureSet set;
  parse_into(set, text, source_name);
  return set;
}

FixtureSet load_fixtures(const std::string& path) {
  FixtureSet set;
  load_fixtures_into(set, path);
  return set;
}

void load_fixtures_into(FixtureSet& set, const std::string& path) {
  parse_into(set, read_file(path), path);
}

json fixture_to_json(const FixtureEntry& entry) {
  json j;
  j["provider"] = std::string(to_string(entry.provider));
  j["key"] = entry.key;
  j["delay_ms"] = entry.delay_ms;
  j["fail"] = entry.fail;
  j["response"] = entry.response ? payload_to_json(*entry.response) : json(nullptr);
  return j;
}

std::unordered_set<std::string> load_domain_list(const std::string& path) {
  std::unordered_set<std::string> out;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    std::string d = line.substr(first, last - first + 1);
    for (char& c : d) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    out.insert(std::move(d));
  }
  return out;
}

}  // namespace guardsec
