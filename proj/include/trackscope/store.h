#ifndef TRACKSCOPE_STORE_H_
#define TRACKSCOPE_STORE_H_

#include <optional>
#include <string>
#include <vector>

#include "trackscope/census.h"
#include "trackscope/leakage.h"

namespace trackscope {

inline constexpr std::string_view kRecordSchemaVersion = "trackscope.records/1";
inline constexpr std::string_view kSummarySchemaVersion = "trackscope.summary/1";

// Provenance carried by the header line of a record log.
struct Provenance {
  std::string schema_version = std::string(kRecordSchemaVersion);
  std::string ruleset_id;
  std::string ownership_version;
  std::string lexicon_id;

  bool operator==(const Provenance&) const = default;
};

struct RecordLog {
  Provenance provenance;
  std::vector<CensusRecord> records;
  size_t corrupt_lines = 0;
};

// One JSON object per line; the header line comes first and records follow
// sorted by (page_uri, requested_uri). Returns the number of records.
std::string SerializeRecords(std::vector<CensusRecord> records,
                             const Provenance& provenance);
size_t WriteRecords(const std::vector<CensusRecord>& records,
                    const Provenance& provenance, const std::string& path);

struct ReadOptions {
  // Skip and count corrupt lines instead of failing on the first one.
  bool tolerant = false;
};

// Throws Error(kSchemaVersionMismatch) for a foreign header and
// Error(kCorruptLine) ("line N") for a bad record in fail-fast mode.
RecordLog ParseRecords(std::string_view text, ReadOptions options = {});
RecordLog ReadRecords(const std::string& path, ReadOptions options = {});

std::string SerializeRecord(const CensusRecord& record);
CensusRecord DeserializeRecord(std::string_view line);

enum class SummaryFormat { kJson, kCsv };

struct ReportBundle {
  CensusSummary summary;
  Provenance provenance;
  std::optional<LeakageSampleReport> leakage;
};

// Structured summary document with sorted keys.
std::string SummaryToJson(const ReportBundle& bundle);

std::string LeakageReportToJson(const LeakageSampleReport& report);

// CSV tables keyed by file name: overview.csv, prevalence_by_tld.csv,
// extension_histogram.csv, owner_ranking.csv, top_elements.csv,
// load_failures.csv and, with a leakage report, leakage.csv. Each table
// starts with '#' provenance comment lines followed by the header row.
std::vector<std::pair<std::string, std::string>> SummaryToCsvTables(
    const ReportBundle& bundle);

// kJson writes `destination` as a file; kCsv treats it as a directory.
void ExportSummary(const ReportBundle& bundle, SummaryFormat format,
                   const std::string& destination);

}  // namespace trackscope

#endif  // TRACKSCOPE_STORE_H_
