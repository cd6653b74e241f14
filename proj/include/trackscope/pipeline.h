#ifndef TRACKSCOPE_PIPELINE_H_
#define TRACKSCOPE_PIPELINE_H_

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "trackscope/run_config.h"

namespace trackscope {

enum class Stage { kPageList, kScan, kAnalyze, kReport, kLeakage };

// Name used on the command line ("scan").
std::string_view StageName(Stage stage);
// Prefix used when reporting a failure ("capture").
std::string_view StageLabel(Stage stage);

// Artifact names inside a run directory.
inline constexpr std::string_view kPageListFile = "pages.txt";
inline constexpr std::string_view kHarDir = "har";
inline constexpr std::string_view kRecordsFile = "records.jsonl";
inline constexpr std::string_view kReportDir = "report";
inline constexpr std::string_view kSummaryFile = "summary.json";
inline constexpr std::string_view kCsvDir = "csv";
inline constexpr std::string_view kLeakageFile = "leakage.json";

struct PipelineOutcome {
  int exit_code = 0;
  std::string failure;  // "<stage>:<code>", empty on success
  std::string message;
  std::string run_dir;
  std::vector<std::string> artifacts;
};

// `<run_root>/<UTC yyyymmddThhmmssZ>-<first 8 digest chars>`, or
// config.run_dir when set.
std::string ResolveRunDir(const RunConfig& config, std::string_view config_digest);

// Runs the stages in order, each reading its predecessor's artifact from the
// run directory unless an explicit input path is configured. Stops at the
// first failure; progress and the failure line go to `log`.
PipelineOutcome RunPipeline(const RunConfig& config,
                            const std::vector<Stage>& stages,
                            std::string_view config_digest, std::ostream& log);

}  // namespace trackscope

#endif  // TRACKSCOPE_PIPELINE_H_
