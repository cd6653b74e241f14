#include "trackscope/pipeline.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <cstdio>
#include <ctime>
#include <mutex>
#include <thread>

#include "trackscope/census.h"
#include "trackscope/devtools_capture.h"
#include "trackscope/digest.h"
#include "trackscope/error.h"
#include "trackscope/har.h"
#include "trackscope/leakage.h"
#include "trackscope/ownership.h"
#include "trackscope/page_list.h"
#include "trackscope/public_suffix.h"
#include "trackscope/store.h"

namespace trackscope {
namespace {

namespace fs = std::filesystem;

constexpr size_t kPagesPerHarFile = 100;

struct StageContext {
  const RunConfig& config;
  fs::path run_dir;
  std::ostream& log;
  std::vector<std::string>& artifacts;
};

void RequireFile(const std::string& path, std::string_view what) {
  if (path.empty() || !fs::is_regular_file(path))
    throw Error(ErrorCode::kMissingInput,
                std::string(what) + " not found: '" + path + "'");
}

std::string InputOr(const std::string& configured, const fs::path& fallback) {
  return configured.empty() ? fallback.string() : configured;
}

unsigned WorkerCount(size_t jobs) {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<size_t>(hw, std::max<size_t>(jobs, 1)));
}

// Calls fn(i) for i in [0, n) from a small pool; rethrows the first failure.
template <typename Fn>
void ParallelFor(size_t n, Fn&& fn) {
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned w = 1; w < WorkerCount(n); ++w) pool.emplace_back(worker);
  worker();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

ExtensionTaxonomy TaxonomyFor(const RunConfig& config) {
  ExtensionTaxonomy taxonomy;
  taxonomy.dynamic_page = {config.dynamic_extensions.begin(),
                           config.dynamic_extensions.end()};
  return taxonomy;
}

void RunPageListStage(StageContext& ctx) {
  if (ctx.config.result_sets.empty())
    throw Error(ErrorCode::kMissingInput, "no result sets configured");
  std::vector<SearchResult> results;
  size_t malformed = 0;
  for (const std::string& path : ctx.config.result_sets) {
    RequireFile(path, "result set");
    std::string id = fs::path(path).filename().string();
    auto rows = ParseResultSet(ReadFileToString(path), id, &malformed);
    results.insert(results.end(), rows.begin(), rows.end());
  }
  std::set<std::string, std::less<>> binary(ctx.config.binary_extensions.begin(),
                                            ctx.config.binary_extensions.end());
  PageList list = BuildPageList(results, binary);
  list.dropped_malformed += malformed;
  fs::path out = ctx.run_dir / kPageListFile;
  WritePageList(list, out.string());
  ctx.log << "pagelist: " << list.entries.size() << " pages ("
          << list.duplicates << " duplicates, " << list.dropped_binary
          << " binary, " << list.dropped_malformed << " malformed dropped)\n";
  ctx.artifacts.push_back(out.string());
  ctx.artifacts.push_back(ProvenancePath(out.string()));
}

void RunScanStage(StageContext& ctx) {
  std::string input = InputOr(ctx.config.page_list, ctx.run_dir / kPageListFile);
  RequireFile(input, "page list");
  std::vector<PageListEntry> entries = ReadPageList(input);

  CaptureSettings settings;
  size_t colon = ctx.config.endpoint.rfind(':');
  settings.endpoint_host = ctx.config.endpoint.substr(0, colon);
  settings.endpoint_port =
      static_cast<uint16_t>(std::stoi(ctx.config.endpoint.substr(colon + 1)));
  settings.settle_seconds = ctx.config.settle_seconds;
  settings.hard_timeout_seconds = ctx.config.hard_timeout_seconds;

  std::vector<PageLoadResult> results =
      CaptureAll(entries, settings, ctx.config.parallel_captures);
  for (const PageLoadResult& result : results) {
    if (result.status == LoadStatus::Failed("endpoint"))
      throw Error(ErrorCode::kEndpoint,
                  "browser endpoint " + ctx.config.endpoint + " unreachable");
  }

  fs::path har_dir = ctx.run_dir / kHarDir;
  for (size_t begin = 0, part = 1; begin < results.size();
       begin += kPagesPerHarFile, ++part) {
    size_t end = std::min(results.size(), begin + kPagesPerHarFile);
    std::vector<PageLoadResult> chunk(results.begin() + begin,
                                      results.begin() + end);
    char name[32];
    std::snprintf(name, sizeof(name), "capture-%05zu.har", part);
    fs::path out = har_dir / name;
    WriteStringToFile(out.string(), WriteHar(chunk));
    ctx.artifacts.push_back(out.string());
  }
  size_t loaded = std::count_if(results.begin(), results.end(), [](const auto& r) {
    return r.status.kind == LoadStatus::Kind::kLoaded;
  });
  ctx.log << "scan: " << loaded << "/" << results.size() << " pages loaded\n";
}

std::vector<fs::path> ListHarFiles(const std::string& dir) {
  if (dir.empty() || !fs::is_directory(dir))
    throw Error(ErrorCode::kMissingInput, "HAR directory not found: '" + dir + "'");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".har")
      files.push_back(entry.path());
  }
  if (files.empty())
    throw Error(ErrorCode::kMissingInput, "no .har files in '" + dir + "'");
  std::sort(files.begin(), files.end());
  return files;
}

void RunAnalyzeStage(StageContext& ctx) {
  std::vector<fs::path> files =
      ListHarFiles(InputOr(ctx.config.har_dir, ctx.run_dir / kHarDir));
  RequireFile(ctx.config.ruleset, "public suffix ruleset");
  RequireFile(ctx.config.ownership_db, "ownership db");
  RequireFile(ctx.config.lexicon, "lexicon");
  PublicSuffixRuleset ruleset = PublicSuffixRuleset::LoadFile(ctx.config.ruleset);
  OwnershipDb db = OwnershipDb::LoadFile(ctx.config.ownership_db);
  Lexicon lexicon = Lexicon::LoadFile(ctx.config.lexicon);
  ExtensionTaxonomy taxonomy = TaxonomyFor(ctx.config);

  std::vector<std::vector<CensusRecord>> per_file(files.size());
  ParallelFor(files.size(), [&](size_t i) {
    for (const PageLoadResult& page : IngestHarFile(files[i].string()))
      per_file[i].push_back(BuildCensusRecord(page, ruleset, taxonomy));
  });
  std::vector<CensusRecord> records;
  for (auto& chunk : per_file)
    std::move(chunk.begin(), chunk.end(), std::back_inserter(records));

  Provenance provenance;
  provenance.ruleset_id = ruleset.snapshot_id();
  provenance.ownership_version = db.version();
  provenance.lexicon_id = lexicon.source_id();
  fs::path out = InputOr(ctx.config.records, ctx.run_dir / kRecordsFile);
  WriteRecords(records, provenance, out.string());
  ctx.log << "analyze: " << records.size() << " records from " << files.size()
          << " HAR files\n";
  ctx.artifacts.push_back(out.string());
}

std::vector<std::string> LoadedPageUris(const std::vector<CensusRecord>& records) {
  std::vector<std::string> uris;
  for (const CensusRecord& record : records) {
    if (record.load_status.kind == LoadStatus::Kind::kLoaded)
      uris.push_back(record.page_uri);
  }
  return uris;
}

void RunReportStage(StageContext& ctx) {
  std::string input = InputOr(ctx.config.records, ctx.run_dir / kRecordsFile);
  RequireFile(input, "record log");
  RequireFile(ctx.config.ownership_db, "ownership db");
  RequireFile(ctx.config.lexicon, "lexicon");
  RecordLog log = ReadRecords(input, ReadOptions{.tolerant = ctx.config.tolerant});
  OwnershipDb db = OwnershipDb::LoadFile(ctx.config.ownership_db);
  if (db.version() != log.provenance.ownership_version)
    throw Error(ErrorCode::kVersionMismatch,
                "record log was built with ownership db '" +
                    log.provenance.ownership_version + "', loaded '" +
                    db.version() + "'");
  Lexicon lexicon = Lexicon::LoadFile(ctx.config.lexicon);

  CensusConfig census_config{static_cast<size_t>(ctx.config.top_n),
                             log.provenance.ruleset_id, db.version()};
  size_t shards = WorkerCount(log.records.size() / 1000 + 1);
  std::vector<CensusAccumulator> partial(shards, CensusAccumulator(census_config));
  ParallelFor(shards, [&](size_t shard) {
    for (size_t i = shard; i < log.records.size(); i += shards)
      partial[shard].Add(log.records[i], db);
  });
  CensusAccumulator total(census_config);
  for (const CensusAccumulator& part : partial) total.Merge(part);

  ReportBundle bundle;
  bundle.summary = total.Finalize(db);
  bundle.provenance = log.provenance;
  bundle.provenance.lexicon_id = lexicon.source_id();
  bundle.leakage = AssessSample(LoadedPageUris(log.records),
                                static_cast<size_t>(ctx.config.sample_n),
                                ctx.config.seed, lexicon,
                                TextOptions{ctx.config.include_host});

  fs::path report_dir = ctx.run_dir / kReportDir;
  fs::path summary = report_dir / kSummaryFile;
  ExportSummary(bundle, SummaryFormat::kJson, summary.string());
  ExportSummary(bundle, SummaryFormat::kCsv, (report_dir / kCsvDir).string());
  if (log.corrupt_lines > 0)
    ctx.log << "report: skipped " << log.corrupt_lines << " corrupt lines\n";
  ctx.log << "report: " << bundle.summary.pages_loaded << " loaded pages, "
          << "third-party requests " << bundle.summary.all.third_party_requests.ToInteger()
          << "%\n";
  ctx.artifacts.push_back(summary.string());
  ctx.artifacts.push_back((report_dir / kCsvDir).string());
}

void RunLeakageStage(StageContext& ctx) {
  RequireFile(ctx.config.lexicon, "lexicon");
  Lexicon lexicon = Lexicon::LoadFile(ctx.config.lexicon);
  std::vector<std::string> uris;
  if (!ctx.config.page_list.empty()) {
    RequireFile(ctx.config.page_list, "page list");
    for (const PageListEntry& entry : ReadPageList(ctx.config.page_list))
      uris.push_back(entry.normalized_uri);
  } else {
    std::string input = InputOr(ctx.config.records, ctx.run_dir / kRecordsFile);
    RequireFile(input, "record log");
    uris = LoadedPageUris(
        ReadRecords(input, ReadOptions{.tolerant = ctx.config.tolerant}).records);
  }
  LeakageSampleReport report =
      AssessSample(uris, static_cast<size_t>(ctx.config.sample_n),
                   ctx.config.seed, lexicon, TextOptions{ctx.config.include_host});
  fs::path out = ctx.run_dir / kLeakageFile;
  WriteStringToFile(out.string(), LeakageReportToJson(report));
  ctx.log << "leakage: " << report.sensitive_count << "/" << report.sample_size
          << " sampled URIs sensitive (" << report.sensitive_share.ToFixed2()
          << "%), https " << HttpsShareOfUris(uris).ToFixed2() << "%\n";
  ctx.artifacts.push_back(out.string());
}

}  // namespace

std::string_view StageName(Stage stage) {
  switch (stage) {
    case Stage::kPageList: return "pagelist";
    case Stage::kScan: return "scan";
    case Stage::kAnalyze: return "analyze";
    case Stage::kReport: return "report";
    case Stage::kLeakage: return "leakage";
  }
  return "unknown";
}

std::string_view StageLabel(Stage stage) {
  return stage == Stage::kScan ? "capture" : StageName(stage);
}

std::string ResolveRunDir(const RunConfig& config, std::string_view config_digest) {
  if (!config.run_dir.empty()) return config.run_dir;
  std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y%m%dT%H%M%SZ", &utc);
  return (fs::path(config.run_root) /
          (std::string(stamp) + "-" + std::string(config_digest.substr(0, 8))))
      .string();
}

PipelineOutcome RunPipeline(const RunConfig& config,
                            const std::vector<Stage>& stages,
                            std::string_view config_digest, std::ostream& log) {
  PipelineOutcome outcome;
  outcome.run_dir = ResolveRunDir(config, config_digest);
  StageContext ctx{config, outcome.run_dir, log, outcome.artifacts};
  for (Stage stage : stages) {
    try {
      fs::create_directories(ctx.run_dir);
      switch (stage) {
        case Stage::kPageList: RunPageListStage(ctx); break;
        case Stage::kScan: RunScanStage(ctx); break;
        case Stage::kAnalyze: RunAnalyzeStage(ctx); break;
        case Stage::kReport: RunReportStage(ctx); break;
        case Stage::kLeakage: RunLeakageStage(ctx); break;
      }
    } catch (const Error& e) {
      outcome.failure =
          std::string(StageLabel(stage)) + ":" + std::string(ErrorCodeName(e.code()));
      outcome.message = e.what();
    } catch (const fs::filesystem_error& e) {
      outcome.failure = std::string(StageLabel(stage)) + ":IoError";
      outcome.message = std::string("IoError: ") + e.what();
    }
    if (!outcome.failure.empty()) {
      log << StageLabel(stage) << ":" << outcome.message << "\n";
      outcome.exit_code = 1;
      return outcome;
    }
  }
  return outcome;
}

}  // namespace trackscope
