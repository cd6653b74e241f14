#include "trackscope/run_config.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

#include "trackscope/digest.h"
#include "trackscope/error.h"
#include "trackscope/uri.h"

extern char** environ;

namespace trackscope {
namespace {

std::string Trim(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string CanonicalKey(std::string_view key) {
  std::string out = ToLowerAscii(Trim(key));
  std::replace(out.begin(), out.end(), '-', '_');
  return out;
}

std::vector<std::string> SplitList(std::string_view text) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= text.size()) {
    size_t comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    std::string item = Trim(text.substr(start, comma - start));
    if (!item.empty()) out.push_back(item);
    start = comma + 1;
  }
  return out;
}

template <typename T>
T ParseNumber(const std::string& key, const std::string& value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty())
    throw Error(ErrorCode::kConfigError, key + ": not a number: '" + value + "'");
  return out;
}

int ParseCount(const std::string& key, const std::string& value) {
  int n = ParseNumber<int>(key, value);
  if (n < 1) throw Error(ErrorCode::kConfigError, key + " must be >= 1");
  return n;
}

bool ParseBool(const std::string& key, const std::string& value) {
  std::string v = ToLowerAscii(value);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error(ErrorCode::kConfigError, key + ": not a boolean: '" + value + "'");
}

std::string DefaultValue(const std::string& key, const std::string& data_dir) {
  const RunConfig d;
  if (key == "settle_seconds") return std::to_string(d.settle_seconds);
  if (key == "hard_timeout_seconds") return std::to_string(d.hard_timeout_seconds);
  if (key == "parallel_captures") return std::to_string(d.parallel_captures);
  if (key == "top_n") return std::to_string(d.top_n);
  if (key == "sample_n") return std::to_string(d.sample_n);
  if (key == "seed") return std::to_string(d.seed);
  if (key == "ruleset") return data_dir + "/public_suffix_list.dat";
  if (key == "ownership_db") return data_dir + "/owners.txt";
  if (key == "lexicon") return data_dir + "/lexicon.txt";
  if (key == "run_root") return d.run_root;
  if (key == "endpoint") return d.endpoint;
  if (key == "binary_extensions")
    return "pdf,doc,xls,docx,xlsx,ppt,pptx";
  if (key == "dynamic_extensions") return "php,asp,aspx,jsp,cgi,pl";
  if (key == "include_host" || key == "tolerant") return "false";
  return "";
}

}  // namespace

std::string_view ConfigOriginName(ConfigOrigin origin) {
  switch (origin) {
    case ConfigOrigin::kDefault: return "default";
    case ConfigOrigin::kFile: return "file";
    case ConfigOrigin::kEnv: return "env";
    case ConfigOrigin::kFlag: return "flag";
  }
  return "default";
}

std::vector<std::string> ConfigResolver::Keys() {
  return {"binary_extensions", "dynamic_extensions", "endpoint",
          "har_dir", "hard_timeout_seconds", "include_host",
          "lexicon", "ownership_db", "page_list",
          "parallel_captures", "records", "result_sets",
          "ruleset", "run_dir", "run_root",
          "sample_n", "seed", "settle_seconds",
          "tolerant", "top_n"};
}

ConfigResolver::ConfigResolver(const std::string& data_dir) {
  for (const auto& key : Keys()) entries_[key].value = DefaultValue(key, data_dir);
}

void ConfigResolver::Set(std::string_view raw_key, std::string value,
                         ConfigOrigin origin) {
  std::string key = CanonicalKey(raw_key);
  auto it = entries_.find(key);
  if (it == entries_.end())
    throw Error(ErrorCode::kConfigError, "unknown key '" + std::string(raw_key) + "'");
  ConfigEntry& entry = it->second;
  if (origin < entry.origin) return;
  if (entry.origin != ConfigOrigin::kDefault)
    entry.overridden.emplace_back(entry.origin, entry.value);
  entry.value = Trim(value);
  entry.origin = origin;
}

void ConfigResolver::ApplyFile(std::string_view text, const std::string& name) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::string trimmed = Trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    size_t eq = trimmed.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::kConfigError,
                  name + ":" + std::to_string(line_number) + ": expected key = value");
    Set(trimmed.substr(0, eq), trimmed.substr(eq + 1), ConfigOrigin::kFile);
  }
}

void ConfigResolver::ApplyEnvironment(
    const std::map<std::string, std::string>& environment) {
  for (const auto& [name, value] : environment) {
    if (!name.starts_with(kEnvPrefix)) continue;
    std::string key = CanonicalKey(name.substr(kEnvPrefix.size()));
    if (!entries_.contains(key)) continue;
    Set(key, value, ConfigOrigin::kEnv);
  }
}

void ConfigResolver::ApplyFlag(std::string_view key, std::string value) {
  Set(key, std::move(value), ConfigOrigin::kFlag);
}

RunConfig ConfigResolver::Resolve() const {
  auto get = [this](const char* key) -> const std::string& {
    return entries_.at(key).value;
  };
  RunConfig c;
  c.settle_seconds = ParseCount("settle_seconds", get("settle_seconds"));
  c.hard_timeout_seconds =
      ParseCount("hard_timeout_seconds", get("hard_timeout_seconds"));
  c.parallel_captures = ParseCount("parallel_captures", get("parallel_captures"));
  c.top_n = ParseCount("top_n", get("top_n"));
  c.sample_n = ParseCount("sample_n", get("sample_n"));
  c.seed = ParseNumber<uint64_t>("seed", get("seed"));
  if (c.settle_seconds > c.hard_timeout_seconds)
    throw Error(ErrorCode::kConfigError,
                "settle_seconds exceeds hard_timeout_seconds");
  c.ruleset = get("ruleset");
  c.ownership_db = get("ownership_db");
  c.lexicon = get("lexicon");
  c.result_sets = SplitList(get("result_sets"));
  c.page_list = get("page_list");
  c.har_dir = get("har_dir");
  c.records = get("records");
  c.run_root = get("run_root");
  c.run_dir = get("run_dir");
  c.endpoint = get("endpoint");
  size_t colon = c.endpoint.rfind(':');
  if (colon == std::string::npos || colon == 0)
    throw Error(ErrorCode::kConfigError, "endpoint must be host:port");
  int port = ParseNumber<int>("endpoint", c.endpoint.substr(colon + 1));
  if (port < 1 || port > 65535)
    throw Error(ErrorCode::kConfigError, "endpoint port out of range");
  c.binary_extensions = SplitList(ToLowerAscii(get("binary_extensions")));
  c.dynamic_extensions = SplitList(ToLowerAscii(get("dynamic_extensions")));
  c.include_host = ParseBool("include_host", get("include_host"));
  c.tolerant = ParseBool("tolerant", get("tolerant"));
  return c;
}

std::string ConfigResolver::Describe() const {
  std::string out;
  for (const auto& [key, entry] : entries_) {
    out += key + "=" + entry.value + " (" +
           std::string(ConfigOriginName(entry.origin)) + ")";
    for (auto it = entry.overridden.rbegin(); it != entry.overridden.rend(); ++it)
      out += " [" + std::string(ConfigOriginName(it->first)) + ": " + it->second + "]";
    out += '\n';
  }
  return out;
}

std::string ConfigResolver::Digest() const {
  std::string canonical;
  for (const auto& [key, entry] : entries_) {
    if (key == "run_dir" || key == "run_root") continue;
    canonical += key + "=" + entry.value + "\n";
  }
  return Sha256Hex(canonical);
}

std::map<std::string, std::string> ProcessEnvironment() {
  std::map<std::string, std::string> out;
  for (char** e = environ; e != nullptr && *e != nullptr; ++e) {
    std::string_view entry(*e);
    size_t eq = entry.find('=');
    if (eq == std::string_view::npos) continue;
    out.emplace(entry.substr(0, eq), entry.substr(eq + 1));
  }
  return out;
}

}  // namespace trackscope
