#include "trackscope/public_suffix.h"

#include <algorithm>
#include <cctype>

#include "trackscope/digest.h"
#include "trackscope/error.h"
#include "trackscope/uri.h"

namespace trackscope {

namespace {

std::string JoinFrom(const std::vector<std::string_view>& labels, size_t i) {
  std::string out;
  for (size_t j = i; j < labels.size(); ++j) {
    if (j > i) out.push_back('.');
    out.append(labels[j]);
  }
  return out;
}

}  // namespace

std::string CanonicalHost(std::string_view host) {
  while (!host.empty() && host.front() == '.') host.remove_prefix(1);
  while (!host.empty() && host.back() == '.') host.remove_suffix(1);
  return ToLowerAscii(host);
}

std::vector<std::string_view> SplitLabels(std::string_view host) {
  std::vector<std::string_view> labels;
  size_t start = 0;
  while (start <= host.size()) {
    size_t dot = host.find('.', start);
    if (dot == std::string_view::npos) dot = host.size();
    labels.push_back(host.substr(start, dot - start));
    start = dot + 1;
  }
  return labels;
}

bool IsIpLiteral(std::string_view host) {
  if (!host.empty() && host.front() == '[') return true;
  auto labels = SplitLabels(host);
  if (labels.size() != 4) return false;
  return std::all_of(labels.begin(), labels.end(), [](std::string_view l) {
    return !l.empty() && l.size() <= 3 &&
           std::all_of(l.begin(), l.end(), [](char c) {
             return std::isdigit(static_cast<unsigned char>(c));
           });
  });
}

PublicSuffixRuleset PublicSuffixRuleset::Parse(std::string_view text,
                                               std::string snapshot_id) {
  PublicSuffixRuleset ruleset;
  ruleset.snapshot_id_ = std::move(snapshot_id);
  size_t line_no = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    size_t begin = line.find_first_not_of(" \t\r");
    if (begin == std::string_view::npos) continue;
    line.remove_prefix(begin);
    if (line.substr(0, 2) == "//") continue;
    std::string_view token = line.substr(0, line.find_first_of(" \t\r"));

    std::unordered_set<std::string>* bucket = &ruleset.plain_;
    if (token.front() == '!') {
      bucket = &ruleset.exception_;
      token.remove_prefix(1);
    } else if (token.substr(0, 2) == "*.") {
      bucket = &ruleset.wildcard_;
      token.remove_prefix(2);
    }
    std::string rule = CanonicalHost(token);
    if (rule.empty() || rule.find('*') != std::string::npos) {
      throw Error(ErrorCode::kSchemaError,
                  "unsupported rule on line " + std::to_string(line_no));
    }
    if (!bucket->insert(rule).second) {
      throw Error(ErrorCode::kSchemaError, "duplicate rule '" +
                                               std::string(line) + "' on line " +
                                               std::to_string(line_no));
    }
    ++ruleset.rule_count_;
  }
  for (const std::string& exception : ruleset.exception_) {
    size_t dot = exception.find('.');
    if (dot == std::string::npos ||
        !ruleset.wildcard_.contains(exception.substr(dot + 1))) {
      throw Error(ErrorCode::kSchemaError,
                  "exception rule !" + exception + " shadows no wildcard");
    }
  }
  return ruleset;
}

PublicSuffixRuleset PublicSuffixRuleset::LoadFile(const std::string& path) {
  std::string text = ReadFileToString(path);
  return Parse(text, "sha256:" + Sha256Hex(text));
}

DomainLookup PublicSuffixRuleset::Lookup(std::string_view raw_host) const {
  std::string host = CanonicalHost(raw_host);
  if (host.empty()) throw Error(ErrorCode::kMalformedUri, "empty host");
  if (IsIpLiteral(host)) {
    return {LookupStatus::kIpLiteral, RegistrableDomain{host}, {}};
  }
  auto labels = SplitLabels(host);
  const size_t n = labels.size();

  std::vector<std::string> suffixes(n + 1);
  for (size_t i = 0; i < n; ++i) suffixes[i] = JoinFrom(labels, i);

  for (size_t i = 0; i < n; ++i) {
    if (exception_.contains(suffixes[i])) {
      return {LookupStatus::kMatched, RegistrableDomain{suffixes[i]},
              suffixes[i + 1]};
    }
  }
  for (size_t i = 0; i < n; ++i) {
    bool matches = plain_.contains(suffixes[i]) ||
                   (i + 1 < n && wildcard_.contains(suffixes[i + 1]));
    if (!matches) continue;
    if (i == 0) return {LookupStatus::kPublicSuffix, std::nullopt, host};
    return {LookupStatus::kMatched, RegistrableDomain{suffixes[i - 1]},
            suffixes[i]};
  }
  size_t start = n >= 2 ? n - 2 : 0;
  return {LookupStatus::kHeuristic, RegistrableDomain{suffixes[start]},
          n >= 2 ? suffixes[n - 1] : std::string()};
}

RegistrableDomain GetRegistrableDomain(std::string_view host,
                                       const PublicSuffixRuleset& ruleset) {
  DomainLookup lookup = ruleset.Lookup(host);
  if (!lookup.domain) {
    throw Error(ErrorCode::kHostIsPublicSuffix, std::string(host));
  }
  return *lookup.domain;
}

}  // namespace trackscope
