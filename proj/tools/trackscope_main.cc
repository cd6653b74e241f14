// Command-line entry point: pagelist, scan, analyze, report, leakage, config.

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "trackscope/digest.h"
#include "trackscope/error.h"
#include "trackscope/pipeline.h"
#include "trackscope/run_config.h"

#ifndef TRACKSCOPE_DATA_DIR
#define TRACKSCOPE_DATA_DIR "data"
#endif

namespace {

struct CommonFlags {
  std::string config_file;
  std::string data_dir = TRACKSCOPE_DATA_DIR;
  std::map<std::string, std::string> values;
};

std::string Kebab(std::string key) {
  for (char& c : key)
    if (c == '_') c = '-';
  return key;
}

void AddCommonFlags(CLI::App* command, CommonFlags& flags) {
  command->add_option("--config", flags.config_file, "key = value config file");
  command->add_option("--data-dir", flags.data_dir,
                      "directory holding the bundled ruleset, owners and lexicon");
  for (const std::string& key : trackscope::ConfigResolver::Keys()) {
    command->add_option_function<std::string>(
        "--" + Kebab(key),
        [&flags, key](const std::string& value) { flags.values[key] = value; },
        "overrides " + key);
  }
}

trackscope::ConfigResolver Resolve(const CommonFlags& flags) {
  trackscope::ConfigResolver resolver(flags.data_dir);
  if (!flags.config_file.empty())
    resolver.ApplyFile(trackscope::ReadFileToString(flags.config_file),
                       flags.config_file);
  resolver.ApplyEnvironment(trackscope::ProcessEnvironment());
  for (const auto& [key, value] : flags.values) resolver.ApplyFlag(key, value);
  return resolver;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trackscope: third-party tracking census over captured page loads"};
  app.require_subcommand(1);

  CommonFlags flags;
  struct Command {
    const char* name;
    const char* help;
    std::vector<trackscope::Stage> stages;
  };
  const std::vector<Command> commands = {
      {"pagelist", "build a page list from recorded search-result sets",
       {trackscope::Stage::kPageList}},
      {"scan", "capture every listed page through a DevTools endpoint",
       {trackscope::Stage::kScan}},
      {"analyze", "turn HAR captures into a census record log",
       {trackscope::Stage::kAnalyze}},
      {"report", "aggregate a record log into summary.json and CSV tables",
       {trackscope::Stage::kReport}},
      {"leakage", "sample page URIs and check them against the lexicon",
       {trackscope::Stage::kLeakage}},
  };
  std::map<CLI::App*, std::vector<trackscope::Stage>> stage_commands;
  for (const Command& command : commands) {
    CLI::App* sub = app.add_subcommand(command.name, command.help);
    AddCommonFlags(sub, flags);
    stage_commands[sub] = command.stages;
  }
  std::vector<std::string> run_stages;
  CLI::App* run = app.add_subcommand("run", "run several stages in order");
  run->add_option("--stages", run_stages, "stage names")->delimiter(',')->required();
  AddCommonFlags(run, flags);
  CLI::App* config = app.add_subcommand("config", "print the effective configuration");
  AddCommonFlags(config, flags);

  CLI11_PARSE(app, argc, argv);

  try {
    trackscope::ConfigResolver resolver = Resolve(flags);
    if (config->parsed()) {
      resolver.Resolve();
      std::cout << resolver.Describe();
      return 0;
    }
    std::vector<trackscope::Stage> stages;
    if (run->parsed()) {
      for (const std::string& name : run_stages) {
        bool found = false;
        for (auto s : {trackscope::Stage::kPageList, trackscope::Stage::kScan,
                       trackscope::Stage::kAnalyze, trackscope::Stage::kReport,
                       trackscope::Stage::kLeakage}) {
          if (trackscope::StageName(s) == name) {
            stages.push_back(s);
            found = true;
          }
        }
        if (!found)
          throw trackscope::Error(trackscope::ErrorCode::kConfigError,
                                  "unknown stage '" + name + "'");
      }
    } else {
      for (const auto& [sub, sub_stages] : stage_commands)
        if (sub->parsed()) stages = sub_stages;
    }
    trackscope::RunConfig run_config = resolver.Resolve();
    trackscope::PipelineOutcome outcome =
        trackscope::RunPipeline(run_config, stages, resolver.Digest(), std::cerr);
    if (outcome.exit_code != 0) return outcome.exit_code;
    std::cout << "run_dir=" << outcome.run_dir << "\n";
    for (const std::string& artifact : outcome.artifacts)
      std::cout << "artifact=" << artifact << "\n";
    return 0;
  } catch (const trackscope::Error& e) {
    std::cerr << "config:" << e.what() << "\n";
    return 2;
  }
}
