#include "trackscope/page_list.h"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <map>
#include <tuple>

#include "trackscope/digest.h"
#include "trackscope/error.h"
#include "trackscope/uri.h"

namespace trackscope {

namespace {

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

template <typename Fn>
void ForEachLine(std::string_view text, Fn&& fn) {
  size_t pos = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(line);
    pos = eol + 1;
  }
}

std::optional<int> ParseRank(std::string_view text) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

bool Better(const PageListEntry& a, const PageListEntry& b) {
  return std::tie(a.rank, a.source_term, a.provenance) <
         std::tie(b.rank, b.source_term, b.provenance);
}

}  // namespace

const std::set<std::string, std::less<>>& DefaultBinaryExtensions() {
  static const std::set<std::string, std::less<>> extensions = {
      "pdf", "doc", "xls", "docx", "xlsx", "ppt", "pptx"};
  return extensions;
}

PageList BuildPageList(
    const std::vector<SearchResult>& results,
    const std::set<std::string, std::less<>>& binary_extensions) {
  PageList list;
  std::map<std::string, PageListEntry> best;
  for (const SearchResult& result : results) {
    if (result.rank < 1 || result.rank > kMaxSearchRank) {
      ++list.dropped_malformed;
      continue;
    }
    std::optional<ParsedUri> parsed = TryParseUri(result.uri);
    if (!parsed) {
      ++list.dropped_malformed;
      continue;
    }
    if (binary_extensions.contains(ExtensionToken(parsed->path))) {
      ++list.dropped_binary;
      continue;
    }
    PageListEntry entry{NormalizePageUri(result.uri), result.term, result.rank,
                        result.provenance};
    auto [it, inserted] = best.try_emplace(entry.normalized_uri, entry);
    if (!inserted) {
      ++list.duplicates;
      if (Better(entry, it->second)) it->second = std::move(entry);
    }
  }
  for (auto& [uri, entry] : best) list.entries.push_back(std::move(entry));
  std::sort(list.entries.begin(), list.entries.end(),
            [](const PageListEntry& a, const PageListEntry& b) {
              return std::tie(a.source_term, a.rank, a.normalized_uri) <
                     std::tie(b.source_term, b.rank, b.normalized_uri);
            });
  return list;
}

std::vector<SearchResult> ParseResultSet(std::string_view text,
                                         const std::string& provenance,
                                         size_t* malformed) {
  std::vector<SearchResult> results;
  size_t bad = 0;
  ForEachLine(text, [&](std::string_view line) {
    if (line.empty() || line.front() == '#') return;
    auto fields = SplitTabs(line);
    std::optional<int> rank =
        fields.size() >= 3 ? ParseRank(fields[1]) : std::nullopt;
    if (!rank || *rank < 1 || *rank > kMaxSearchRank || fields[2].empty()) {
      ++bad;
      return;
    }
    results.push_back({std::string(fields[0]), *rank, std::string(fields[2]),
                       provenance});
  });
  if (malformed) *malformed = bad;
  return results;
}

std::string FormatPageList(const PageList& list) {
  std::string out;
  for (const PageListEntry& entry : list.entries)
    out += entry.normalized_uri + "\n";
  return out;
}

std::string FormatProvenance(const PageList& list) {
  std::string out;
  for (const PageListEntry& entry : list.entries) {
    out += entry.normalized_uri + "\t" + entry.source_term + "\t" +
           std::to_string(entry.rank) + "\t" + entry.provenance + "\n";
  }
  return out;
}

std::string ProvenancePath(const std::string& page_list_path) {
  return page_list_path + ".provenance.tsv";
}

void WritePageList(const PageList& list, const std::string& path) {
  WriteStringToFile(path, FormatPageList(list));
  WriteStringToFile(ProvenancePath(path), FormatProvenance(list));
}

std::vector<PageListEntry> ReadPageList(const std::string& path) {
  std::string text = ReadFileToString(path);
  std::map<std::string, PageListEntry> provenance;
  std::string sidecar = ProvenancePath(path);
  if (std::filesystem::exists(sidecar)) {
    ForEachLine(ReadFileToString(sidecar), [&](std::string_view line) {
      auto fields = SplitTabs(line);
      if (fields.size() < 4) return;
      PageListEntry entry{std::string(fields[0]), std::string(fields[1]),
                          ParseRank(fields[2]).value_or(0),
                          std::string(fields[3])};
      provenance.emplace(entry.normalized_uri, std::move(entry));
    });
  }
  std::vector<PageListEntry> entries;
  ForEachLine(text, [&](std::string_view line) {
    if (line.empty() || line.front() == '#') return;
    auto it = provenance.find(std::string(line));
    if (it != provenance.end()) {
      entries.push_back(it->second);
    } else {
      entries.push_back({std::string(line), {}, 0, {}});
    }
  });
  return entries;
}

}  // namespace trackscope
