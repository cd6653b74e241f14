#include "trackscope/leakage.h"

#include <algorithm>
#include <numeric>
#include <random>

#include "trackscope/digest.h"
#include "trackscope/error.h"

namespace trackscope {

namespace {

int HexValue(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

bool IsSeparator(char c) {
  switch (c) {
    case '/': case '-': case '_': case '+': case '.': case '=': case '&':
    case '?': case ' ': case '\t': case '\n': case '\r': case '\f': case '\v':
      return true;
    default:
      return false;
  }
}

struct Word {
  std::string_view text;
  size_t begin;
};

std::vector<Word> SplitWords(std::string_view normalized) {
  std::vector<Word> words;
  size_t pos = 0;
  while (pos < normalized.size()) {
    size_t space = normalized.find(' ', pos);
    if (space == std::string_view::npos) space = normalized.size();
    if (space > pos) words.push_back({normalized.substr(pos, space - pos), pos});
    pos = space + 1;
  }
  return words;
}

std::vector<std::string> WordsOf(std::string_view normalized) {
  std::vector<std::string> out;
  for (const Word& w : SplitWords(normalized)) out.emplace_back(w.text);
  return out;
}

}  // namespace

std::string NormalizeText(std::string_view text) {
  std::string decoded;
  decoded.reserve(text.size());
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '%' && i + 2 < text.size()) {
      int hi = HexValue(text[i + 1]);
      int lo = HexValue(text[i + 2]);
      if (hi >= 0 && lo >= 0) {
        decoded.push_back(static_cast<char>(hi * 16 + lo));
        i += 2;
        continue;
      }
    }
    decoded.push_back(text[i]);
  }
  std::string out;
  out.reserve(decoded.size());
  bool pending_space = false;
  for (char c : decoded) {
    if (IsSeparator(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
  }
  return out;
}

std::string NormalizeUriText(const ParsedUri& uri, TextOptions options) {
  std::string text;
  if (options.include_host) text = uri.host + " ";
  text += uri.path;
  if (uri.query) text += " " + *uri.query;
  return NormalizeText(text);
}

Lexicon::Lexicon(std::set<std::string> terms, std::string source_id)
    : source_id_(std::move(source_id)) {
  for (const std::string& raw : terms) {
    std::string term = NormalizeText(raw);
    if (term.empty()) continue;
    if (terms_.insert(term).second) {
      std::vector<std::string> words = WordsOf(term);
      index_.emplace(words.front(), std::move(words));
    }
  }
}

Lexicon Lexicon::Parse(std::string_view text) {
  std::set<std::string> terms;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    size_t begin = line.find_first_not_of(" \t\r");
    if (begin == std::string_view::npos || line[begin] == '#') continue;
    terms.emplace(line);
  }
  return Lexicon(std::move(terms), "sha256:" + Sha256Hex(text));
}

Lexicon Lexicon::LoadFile(const std::string& path) {
  return Parse(ReadFileToString(path));
}

LeakageVerdict DetectSensitive(const ParsedUri& uri, const Lexicon& lexicon,
                               TextOptions options) {
  LeakageVerdict verdict;
  verdict.uri = uri.raw.empty() ? uri.Serialize() : uri.raw;
  verdict.normalized_text = NormalizeUriText(uri, options);
  std::vector<Word> words = SplitWords(verdict.normalized_text);
  for (size_t i = 0; i < words.size(); ++i) {
    auto [first, last] = lexicon.index().equal_range(std::string(words[i].text));
    for (auto it = first; it != last; ++it) {
      const std::vector<std::string>& term_words = it->second;
      if (i + term_words.size() > words.size()) continue;
      bool match = true;
      for (size_t k = 1; k < term_words.size() && match; ++k)
        match = words[i + k].text == term_words[k];
      if (!match) continue;
      const Word& tail = words[i + term_words.size() - 1];
      std::string term;
      for (size_t k = 0; k < term_words.size(); ++k) {
        if (k) term.push_back(' ');
        term += term_words[k];
      }
      verdict.matches.push_back(
          {std::move(term), words[i].begin, tail.begin + tail.text.size()});
    }
  }
  std::sort(verdict.matches.begin(), verdict.matches.end(),
            [](const TermMatch& a, const TermMatch& b) {
              return std::tie(a.begin, a.term) < std::tie(b.begin, b.term);
            });
  verdict.sensitive = !verdict.matches.empty();
  return verdict;
}

Percent HttpsShare(const std::vector<PageLoadResult>& pages) {
  uint64_t loaded = 0;
  uint64_t secure = 0;
  for (const PageLoadResult& page : pages) {
    if (page.status.kind != LoadStatus::Kind::kLoaded) continue;
    ++loaded;
    if (auto uri = TryParseUri(page.final_uri); uri && uri->scheme == "https")
      ++secure;
  }
  if (loaded == 0) throw Error(ErrorCode::kEmptyCorpus, "no loaded pages");
  return Percent::Of(secure, loaded);
}

Percent HttpsShareOfUris(const std::vector<std::string>& uris) {
  uint64_t total = 0;
  uint64_t secure = 0;
  for (const std::string& raw : uris) {
    auto uri = TryParseUri(raw);
    if (!uri) continue;
    ++total;
    if (uri->scheme == "https") ++secure;
  }
  if (total == 0) throw Error(ErrorCode::kEmptyCorpus, "no parseable URIs");
  return Percent::Of(secure, total);
}

std::vector<size_t> SampleIndices(size_t population, size_t n, uint64_t seed) {
  n = std::min(n, population);
  std::vector<size_t> indices(population);
  std::iota(indices.begin(), indices.end(), size_t{0});
  std::mt19937_64 engine(seed);
  for (size_t i = 0; i < n; ++i) {
    uint64_t range = population - i;
    // Reject the low sliver that would bias the modulo.
    uint64_t threshold = (0 - range) % range;
    uint64_t draw;
    do {
      draw = engine();
    } while (draw < threshold);
    size_t j = i + static_cast<size_t>(draw % range);
    std::swap(indices[i], indices[j]);
  }
  indices.resize(n);
  return indices;
}

LeakageSampleReport AssessSample(const std::vector<std::string>& uris, size_t n,
                                 uint64_t seed, const Lexicon& lexicon,
                                 TextOptions options) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "sample size must be >= 1");
  std::vector<ParsedUri> population;
  population.reserve(uris.size());
  for (const std::string& raw : uris) {
    if (auto uri = TryParseUri(raw)) population.push_back(std::move(*uri));
  }
  if (population.empty()) throw Error(ErrorCode::kEmptyCorpus, "empty population");

  LeakageSampleReport report;
  report.population_size = population.size();
  report.seed = seed;
  report.clamped = n > population.size();
  report.lexicon_id = lexicon.source_id();
  std::vector<size_t> sample = SampleIndices(population.size(), n, seed);
  report.sample_size = sample.size();
  for (size_t index : sample) {
    const ParsedUri& uri = population[index];
    if (DetectSensitive(uri, lexicon, options).sensitive) ++report.sensitive_count;
    if (uri.scheme == "https") ++report.https_count;
  }
  report.sensitive_share = Percent::Of(report.sensitive_count, report.sample_size);
  report.https_share = Percent::Of(report.https_count, report.sample_size);
  return report;
}

LeakageSampleReport AssessSample(const std::vector<PageLoadResult>& pages,
                                 size_t n, uint64_t seed, const Lexicon& lexicon,
                                 TextOptions options) {
  std::vector<std::string> uris;
  for (const PageLoadResult& page : pages) {
    if (page.status.kind == LoadStatus::Kind::kLoaded) uris.push_back(page.final_uri);
  }
  return AssessSample(uris, n, seed, lexicon, options);
}

}  // namespace trackscope
