#include "trackscope/census.h"

#include <algorithm>
#include <tuple>

#include "trackscope/error.h"

namespace trackscope {

CensusRecord BuildCensusRecord(const PageLoadResult& result,
                               const PublicSuffixRuleset& ruleset,
                               const ExtensionTaxonomy& taxonomy) {
  CensusRecord record;
  record.requested_uri = result.requested_uri;
  record.load_status = result.status;

  std::optional<ParsedUri> final_uri;
  if (result.status.kind == LoadStatus::Kind::kLoaded) {
    final_uri = TryParseUri(result.final_uri);
    if (!final_uri) record.load_status = LoadStatus::Failed("malformed_final_uri");
  }
  if (record.load_status.kind != LoadStatus::Kind::kLoaded) {
    record.page_uri =
        result.requested_uri.empty() ? result.final_uri : result.requested_uri;
    if (auto uri = TryParseUri(record.page_uri))
      record.tld_category = CategorizeTld(uri->host);
    return record;
  }

  PageAnalysis analysis = AnalyzePage(result, ruleset, taxonomy);
  record.page_uri = result.final_uri;
  record.tld_category = CategorizeTld(final_uri->host);
  record.https = final_uri->scheme == "https";
  record.flags = analysis.flags;
  record.third_party_domains = std::move(analysis.third_party_domains);
  record.elements = std::move(analysis.third_party_elements);
  record.malformed_requests = analysis.diagnostics.malformed_requests;
  return record;
}

ExtensionHistogram ComputeExtensionHistogram(
    const std::vector<ElementPrevalence>& top_elements) {
  using Kind = ExtensionClass::Kind;
  constexpr Kind kRounded[] = {Kind::kNoExtension, Kind::kJavascript,
                               Kind::kImage, Kind::kDynamicPage};
  ExtensionHistogram histogram;
  for (Kind kind : kRounded) histogram[kind] = 0;
  histogram[Kind::kOther] = 0;
  const uint64_t total = top_elements.size();
  if (total == 0) return histogram;

  std::map<Kind, uint64_t> counts;
  for (const ElementPrevalence& element : top_elements)
    ++counts[element.extension_class.kind];

  int64_t assigned = 0;
  // Rounding excess in units of 1/(2*total) percent, used to pick which
  // class gives a point back on overshoot.
  std::vector<std::pair<int64_t, Kind>> excess;
  for (Kind kind : kRounded) {
    uint64_t count = counts[kind];
    int64_t rounded = static_cast<int64_t>((200 * count + total) / (2 * total));
    histogram[kind] = rounded;
    assigned += rounded;
    excess.emplace_back(
        rounded * 2 * static_cast<int64_t>(total) - 200 * static_cast<int64_t>(count),
        kind);
  }
  int64_t residual = 100 - assigned;
  if (residual < 0) {
    std::stable_sort(excess.begin(), excess.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (size_t i = 0; residual < 0 && i < excess.size(); ++i) {
      --histogram[excess[i].second];
      ++residual;
    }
  }
  histogram[Kind::kOther] = residual;
  return histogram;
}

void CensusAccumulator::Add(const CensusRecord& record, const OwnershipDb& db) {
  ++pages_total_;
  switch (record.load_status.kind) {
    case LoadStatus::Kind::kTimeout:
      ++pages_timeout_;
      failures_.push_back({record.page_uri, record.load_status.ToString()});
      return;
    case LoadStatus::Kind::kError:
      ++pages_error_;
      failures_.push_back({record.page_uri, record.load_status.ToString()});
      return;
    case LoadStatus::Kind::kLoaded:
      break;
  }
  Counts& counts = categories_[record.tld_category];
  ++counts.loaded;
  if (record.flags.has_third_party_request) ++counts.requests;
  if (record.flags.has_third_party_javascript) ++counts.javascript;
  if (record.flags.has_third_party_cookie) ++counts.cookies;
  if (record.https) ++https_pages_;
  malformed_requests_ += record.malformed_requests;

  std::set<std::string_view> seen;
  for (const ElementRecord& element : record.elements) {
    if (!seen.insert(element.stripped_uri).second) continue;
    ElementCount& count = elements_[element.stripped_uri];
    count.extension_class = element.extension_class;
    ++count.pages;
  }
  owners_.AddPage(record.third_party_domains, db);
}

void CensusAccumulator::Merge(const CensusAccumulator& other) {
  if (other.pages_total_ == 0) return;
  if (pages_total_ == 0 && config_ == CensusConfig{}) {
    *this = other;
    return;
  }
  if (!(config_ == other.config_)) {
    throw Error(ErrorCode::kVersionMismatch,
                "cannot merge accumulators built with different top_n, "
                "ruleset or ownership versions");
  }
  pages_total_ += other.pages_total_;
  pages_timeout_ += other.pages_timeout_;
  pages_error_ += other.pages_error_;
  malformed_requests_ += other.malformed_requests_;
  https_pages_ += other.https_pages_;
  for (const auto& [category, counts] : other.categories_) {
    Counts& mine = categories_[category];
    mine.loaded += counts.loaded;
    mine.requests += counts.requests;
    mine.javascript += counts.javascript;
    mine.cookies += counts.cookies;
  }
  for (const auto& [uri, count] : other.elements_) {
    ElementCount& mine = elements_[uri];
    mine.extension_class = count.extension_class;
    mine.pages += count.pages;
  }
  owners_.Merge(other.owners_);
  failures_.insert(failures_.end(), other.failures_.begin(), other.failures_.end());
}

namespace {

CategoryPrevalence MakePrevalence(uint64_t loaded, uint64_t requests,
                                  uint64_t javascript, uint64_t cookies) {
  CategoryPrevalence row;
  row.loaded_pages = loaded;
  row.third_party_request_pages = requests;
  row.third_party_javascript_pages = javascript;
  row.third_party_cookie_pages = cookies;
  if (loaded > 0) {
    row.third_party_requests = Percent::Of(requests, loaded);
    row.third_party_javascript = Percent::Of(javascript, loaded);
    row.third_party_cookies = Percent::Of(cookies, loaded);
  }
  return row;
}

}  // namespace

CensusSummary CensusAccumulator::Finalize(const OwnershipDb& db) const {
  if (!config_.ownership_version.empty() &&
      config_.ownership_version != db.version()) {
    throw Error(ErrorCode::kVersionMismatch,
                "records were built against ownership db " +
                    config_.ownership_version + ", got " + db.version());
  }
  CensusSummary summary;
  summary.config = config_;
  summary.pages_total = pages_total_;
  summary.pages_timeout = pages_timeout_;
  summary.pages_error = pages_error_;
  summary.malformed_requests = malformed_requests_;

  uint64_t loaded = 0, requests = 0, javascript = 0, cookies = 0;
  for (const auto& [category, counts] : categories_) {
    summary.per_category[category] = MakePrevalence(
        counts.loaded, counts.requests, counts.javascript, counts.cookies);
    loaded += counts.loaded;
    requests += counts.requests;
    javascript += counts.javascript;
    cookies += counts.cookies;
  }
  if (loaded == 0) throw Error(ErrorCode::kEmptyCorpus, "no loaded pages");
  summary.pages_loaded = loaded;
  summary.all = MakePrevalence(loaded, requests, javascript, cookies);

  std::vector<ElementPrevalence> ranked;
  ranked.reserve(elements_.size());
  for (const auto& [uri, count] : elements_) {
    ranked.push_back(
        {uri, count.extension_class, count.pages, Percent::Of(count.pages, loaded)});
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const ElementPrevalence& a, const ElementPrevalence& b) {
                     if (a.pages != b.pages) return a.pages > b.pages;
                     return a.stripped_uri < b.stripped_uri;
                   });
  if (ranked.size() > config_.top_n) ranked.resize(config_.top_n);
  summary.top_elements = std::move(ranked);
  summary.extension_histogram = ComputeExtensionHistogram(summary.top_elements);

  summary.owner_ranking = owners_.Rank(db);
  summary.https_pages = https_pages_;
  summary.https_share = Percent::Of(https_pages_, loaded);
  summary.failures = failures_;
  std::sort(summary.failures.begin(), summary.failures.end());
  return summary;
}

CensusSummary Summarize(const std::vector<CensusRecord>& records,
                        const OwnershipDb& db, const CensusConfig& config) {
  if (config.top_n == 0)
    throw Error(ErrorCode::kInvalidArgument, "top_n must be >= 1");
  CensusAccumulator accumulator(config);
  for (const CensusRecord& record : records) accumulator.Add(record, db);
  return accumulator.Finalize(db);
}

}  // namespace trackscope
