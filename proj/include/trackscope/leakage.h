#ifndef TRACKSCOPE_LEAKAGE_H_
#define TRACKSCOPE_LEAKAGE_H_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "trackscope/capture.h"
#include "trackscope/percent.h"
#include "trackscope/uri.h"

namespace trackscope {

// Sensitive condition / treatment / symptom terms. Terms are stored in the
// same normalized form as URI text, so "breast-lump" and "Breast Lump" are
// the same term.
class Lexicon {
 public:
  Lexicon() = default;
  Lexicon(std::set<std::string> terms, std::string source_id);

  // One term per line, '#' comments; source_id is the file digest.
  static Lexicon Parse(std::string_view text);
  static Lexicon LoadFile(const std::string& path);

  bool Contains(std::string_view term) const { return terms_.contains(std::string(term)); }
  const std::set<std::string>& terms() const { return terms_; }
  const std::string& source_id() const { return source_id_; }

  // Terms keyed by their first word.
  const std::multimap<std::string, std::vector<std::string>>& index() const {
    return index_;
  }

 private:
  std::set<std::string> terms_;
  std::string source_id_;
  std::multimap<std::string, std::vector<std::string>> index_;
};

// Percent-decodes, lowercases, turns the separator characters
// / - _ + . = & ? into spaces and collapses whitespace.
std::string NormalizeText(std::string_view text);

struct TextOptions {
  bool include_host = false;
};

// Path and query of the URI run through NormalizeText; the host is only
// prepended when requested.
std::string NormalizeUriText(const ParsedUri& uri, TextOptions options = {});

struct TermMatch {
  std::string term;
  size_t begin = 0;  // byte offsets into the normalized text
  size_t end = 0;

  bool operator==(const TermMatch&) const = default;
};

struct LeakageVerdict {
  std::string uri;
  std::string normalized_text;
  bool sensitive = false;
  std::vector<TermMatch> matches;  // ordered by (begin, term)
};

// A term matches where its words appear as a contiguous run of whole words.
LeakageVerdict DetectSensitive(const ParsedUri& uri, const Lexicon& lexicon,
                               TextOptions options = {});

// 100 * https pages / loaded pages. Throws Error(kEmptyCorpus).
Percent HttpsShare(const std::vector<PageLoadResult>& pages);
// Same ratio over a plain URI list; unparseable URIs are skipped.
Percent HttpsShareOfUris(const std::vector<std::string>& uris);

// Fixed, portable sampler: std::mt19937_64 seeded with `seed`, bounded draws
// by rejection, partial Fisher-Yates over population indices.
inline constexpr std::string_view kSamplerName =
    "mt19937_64/rejection-bounded/partial-fisher-yates";

std::vector<size_t> SampleIndices(size_t population, size_t n, uint64_t seed);

struct LeakageSampleReport {
  size_t population_size = 0;
  size_t sample_size = 0;
  uint64_t seed = 0;
  bool clamped = false;  // n exceeded the population
  size_t sensitive_count = 0;
  size_t https_count = 0;
  Percent sensitive_share;
  Percent https_share;
  std::string sampler = std::string(kSamplerName);
  std::string lexicon_id;

  bool operator==(const LeakageSampleReport&) const = default;
};

// Samples without replacement from the URI population. Throws
// Error(kEmptyCorpus) for an empty population and Error(kInvalidArgument)
// for n == 0.
LeakageSampleReport AssessSample(const std::vector<std::string>& uris, size_t n,
                                 uint64_t seed, const Lexicon& lexicon,
                                 TextOptions options = {});

// Population is the final URI of every loaded page.
LeakageSampleReport AssessSample(const std::vector<PageLoadResult>& pages,
                                 size_t n, uint64_t seed, const Lexicon& lexicon,
                                 TextOptions options = {});

}  // namespace trackscope

#endif  // TRACKSCOPE_LEAKAGE_H_
