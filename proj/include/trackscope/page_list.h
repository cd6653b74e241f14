#ifndef TRACKSCOPE_PAGE_LIST_H_
#define TRACKSCOPE_PAGE_LIST_H_

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace trackscope {

// One row of a recorded search-result set.
struct SearchResult {
  std::string term;
  int rank = 0;
  std::string uri;
  std::string provenance;  // result-set id
};

struct PageListEntry {
  std::string normalized_uri;
  std::string source_term;
  int rank = 0;  // 1..50
  std::string provenance;

  bool operator==(const PageListEntry&) const = default;
};

struct PageList {
  std::vector<PageListEntry> entries;
  size_t dropped_malformed = 0;
  size_t dropped_binary = 0;
  size_t duplicates = 0;
};

constexpr int kMaxSearchRank = 50;

const std::set<std::string, std::less<>>& DefaultBinaryExtensions();

// Normalizes, drops binary documents, and dedupes on the normalized URI
// keeping the best (lowest) rank. Output is ordered by (term, rank, uri).
PageList BuildPageList(const std::vector<SearchResult>& results,
                       const std::set<std::string, std::less<>>&
                           binary_extensions = DefaultBinaryExtensions());

// Tab-separated "term<TAB>rank<TAB>uri[<TAB>title]" per line, UTF-8. Lines
// that do not split into at least three fields, or whose rank is not an
// integer in [1, 50], are counted in `malformed` and skipped. Blank lines
// and lines starting with '#' are ignored.
std::vector<SearchResult> ParseResultSet(std::string_view text,
                                         const std::string& provenance,
                                         size_t* malformed = nullptr);

// The page-list file holds one normalized URI per line; the sidecar holds
// "uri<TAB>term<TAB>rank<TAB>provenance" rows in the same order.
std::string FormatPageList(const PageList& list);
std::string FormatProvenance(const PageList& list);
void WritePageList(const PageList& list, const std::string& path);
std::string ProvenancePath(const std::string& page_list_path);

// Reads a page list, joining provenance from the sidecar when it exists.
std::vector<PageListEntry> ReadPageList(const std::string& path);

}  // namespace trackscope

#endif  // TRACKSCOPE_PAGE_LIST_H_
