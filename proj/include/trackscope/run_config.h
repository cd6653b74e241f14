#ifndef TRACKSCOPE_RUN_CONFIG_H_
#define TRACKSCOPE_RUN_CONFIG_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace trackscope {

enum class ConfigOrigin { kDefault, kFile, kEnv, kFlag };

std::string_view ConfigOriginName(ConfigOrigin origin);

struct RunConfig {
  int settle_seconds = 30;
  int hard_timeout_seconds = 60;
  int parallel_captures = 4;
  int top_n = 100;
  int sample_n = 500;
  uint64_t seed = 1;

  std::string ruleset;
  std::string ownership_db;
  std::string lexicon;

  std::vector<std::string> result_sets;
  std::string page_list;
  std::string har_dir;
  std::string records;
  std::string run_root = "runs";
  std::string run_dir;

  std::string endpoint = "127.0.0.1:9222";
  std::vector<std::string> binary_extensions;
  std::vector<std::string> dynamic_extensions;
  bool include_host = false;
  bool tolerant = false;
};

// One configurable key and where its effective value came from. Values a
// higher-precedence source replaced are kept in `overridden`.
struct ConfigEntry {
  std::string value;
  ConfigOrigin origin = ConfigOrigin::kDefault;
  std::vector<std::pair<ConfigOrigin, std::string>> overridden;
};

// Layers flags over environment over config file over defaults. Keys are
// snake_case ("sample_n"); the file and flags also accept kebab-case.
class ConfigResolver {
 public:
  // `data_dir` supplies the default ruleset, ownership db and lexicon paths.
  explicit ConfigResolver(const std::string& data_dir);

  // "key = value" lines, '#' comments. Throws Error(kConfigError) for
  // unknown keys or malformed lines.
  void ApplyFile(std::string_view text, const std::string& name = "config");
  // Every TRACKSCOPE_<KEY> variable in `environment`.
  void ApplyEnvironment(const std::map<std::string, std::string>& environment);
  void ApplyFlag(std::string_view key, std::string value);

  // Throws Error(kConfigError) for unparseable or out-of-range values.
  RunConfig Resolve() const;

  // "key=value (origin)" per line in key order; overridden values follow as
  // "[file: ...]".
  std::string Describe() const;

  // Digest over effective key=value pairs, used to name run directories.
  std::string Digest() const;

  const std::map<std::string, ConfigEntry>& entries() const { return entries_; }

  static std::vector<std::string> Keys();

 private:
  void Set(std::string_view key, std::string value, ConfigOrigin origin);

  std::map<std::string, ConfigEntry> entries_;
};

inline constexpr std::string_view kEnvPrefix = "TRACKSCOPE_";

std::map<std::string, std::string> ProcessEnvironment();

}  // namespace trackscope

#endif  // TRACKSCOPE_RUN_CONFIG_H_
