#ifndef TRACKSCOPE_CENSUS_H_
#define TRACKSCOPE_CENSUS_H_

#include <map>
#include <set>
#include <string>
#include <vector>

#include "trackscope/capture.h"
#include "trackscope/classify.h"
#include "trackscope/ownership.h"
#include "trackscope/percent.h"
#include "trackscope/public_suffix.h"
#include "trackscope/uri.h"

namespace trackscope {

// Per-page analysis unit. Only third-party elements are kept.
struct CensusRecord {
  std::string page_uri;       // final URI when loaded, else requested URI
  std::string requested_uri;
  TldCategory tld_category;
  PageFlags flags;
  std::set<RegistrableDomain> third_party_domains;
  std::vector<ElementRecord> elements;
  bool https = false;
  LoadStatus load_status;
  size_t malformed_requests = 0;

  bool operator==(const CensusRecord&) const = default;
};

CensusRecord BuildCensusRecord(const PageLoadResult& result,
                               const PublicSuffixRuleset& ruleset,
                               const ExtensionTaxonomy& taxonomy =
                                   DefaultTaxonomy());

inline constexpr size_t kDefaultTopN = 100;

// Provenance every accumulator and report is pinned to.
struct CensusConfig {
  size_t top_n = kDefaultTopN;
  std::string ruleset_id;
  std::string ownership_version;

  bool operator==(const CensusConfig&) const = default;
};

struct CategoryPrevalence {
  uint64_t loaded_pages = 0;
  uint64_t third_party_request_pages = 0;
  uint64_t third_party_javascript_pages = 0;
  uint64_t third_party_cookie_pages = 0;
  Percent third_party_requests;
  Percent third_party_javascript;
  Percent third_party_cookies;

  bool operator==(const CategoryPrevalence&) const = default;
};

struct ElementPrevalence {
  std::string stripped_uri;
  ExtensionClass extension_class;
  uint64_t pages = 0;
  Percent percent;

  bool operator==(const ElementPrevalence&) const = default;
};

struct FailureRow {
  std::string page_uri;
  std::string status;

  auto operator<=>(const FailureRow&) const = default;
};

using ExtensionHistogram = std::map<ExtensionClass::Kind, int64_t>;

struct CensusSummary {
  CensusConfig config;
  uint64_t pages_total = 0;
  uint64_t pages_loaded = 0;
  uint64_t pages_timeout = 0;
  uint64_t pages_error = 0;
  uint64_t malformed_requests = 0;
  CategoryPrevalence all;
  std::map<TldCategory, CategoryPrevalence> per_category;
  std::vector<ElementPrevalence> top_elements;  // at most top_n
  ExtensionHistogram extension_histogram;
  OwnerRanking owner_ranking;
  uint64_t https_pages = 0;
  Percent https_share;
  std::vector<FailureRow> failures;  // sorted

  bool operator==(const CensusSummary&) const = default;
};

// Integer shares of each class among the listed elements: every class but
// Other rounds half-up, Other takes the residual so the total is exactly
// 100. If rounding overshoots, the classes that rounded up the most give
// back one point each (largest first, ties by class order).
ExtensionHistogram ComputeExtensionHistogram(
    const std::vector<ElementPrevalence>& top_elements);

// Count-only partial summary. Accumulators built with the same config merge
// by addition; percentages appear only in Finalize().
class CensusAccumulator {
 public:
  CensusAccumulator() = default;
  explicit CensusAccumulator(CensusConfig config) : config_(std::move(config)) {}

  void Add(const CensusRecord& record, const OwnershipDb& db);

  // Throws Error(kVersionMismatch) when the configs differ.
  void Merge(const CensusAccumulator& other);

  // Throws Error(kEmptyCorpus) with no loaded pages, Error(kVersionMismatch)
  // when db is not the version the accumulator was configured with.
  CensusSummary Finalize(const OwnershipDb& db) const;

  const CensusConfig& config() const { return config_; }
  uint64_t pages_total() const { return pages_total_; }

  bool operator==(const CensusAccumulator&) const = default;

 private:
  struct Counts {
    uint64_t loaded = 0;
    uint64_t requests = 0;
    uint64_t javascript = 0;
    uint64_t cookies = 0;
    bool operator==(const Counts&) const = default;
  };
  struct ElementCount {
    ExtensionClass extension_class;
    uint64_t pages = 0;
    bool operator==(const ElementCount&) const = default;
  };

  CensusConfig config_;
  uint64_t pages_total_ = 0;
  uint64_t pages_timeout_ = 0;
  uint64_t pages_error_ = 0;
  uint64_t malformed_requests_ = 0;
  uint64_t https_pages_ = 0;
  std::map<TldCategory, Counts> categories_;
  std::map<std::string, ElementCount> elements_;
  OwnerTally owners_;
  std::vector<FailureRow> failures_;
};

CensusSummary Summarize(const std::vector<CensusRecord>& records,
                        const OwnershipDb& db, const CensusConfig& config);

}  // namespace trackscope

#endif  // TRACKSCOPE_CENSUS_H_
