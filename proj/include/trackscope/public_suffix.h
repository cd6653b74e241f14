#ifndef TRACKSCOPE_PUBLIC_SUFFIX_H_
#define TRACKSCOPE_PUBLIC_SUFFIX_H_

#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace trackscope {

// The ownership unit used for every first/third-party decision: the public
// suffix of a host plus one label ("eTLD+1").
struct RegistrableDomain {
  std::string value;

  auto operator<=>(const RegistrableDomain&) const = default;
};

enum class LookupStatus {
  kMatched,       // a ruleset rule prevailed
  kHeuristic,     // no rule matched; last two labels used
  kIpLiteral,     // IPv4/IPv6 literal, which is its own domain
  kPublicSuffix,  // the host is itself a public suffix
};

struct DomainLookup {
  LookupStatus status = LookupStatus::kMatched;
  std::optional<RegistrableDomain> domain;  // empty for kPublicSuffix
  std::string public_suffix;
};

// Rules in the publicsuffix.org list format. Lookup follows the reference
// algorithm: an exception rule prevails over everything, otherwise the
// matching rule with the most labels wins. There is no implicit "*" rule.
class PublicSuffixRuleset {
 public:
  PublicSuffixRuleset() = default;

  // Throws Error(kSchemaError) on duplicate rules or an exception rule that
  // does not shadow a wildcard.
  static PublicSuffixRuleset Parse(std::string_view text,
                                   std::string snapshot_id);
  // snapshot_id is "sha256:<hex digest of the file>".
  static PublicSuffixRuleset LoadFile(const std::string& path);

  DomainLookup Lookup(std::string_view host) const;

  const std::string& snapshot_id() const { return snapshot_id_; }
  size_t size() const { return rule_count_; }

 private:
  std::unordered_set<std::string> plain_;
  std::unordered_set<std::string> wildcard_;   // stored without "*."
  std::unordered_set<std::string> exception_;  // stored without "!"
  size_t rule_count_ = 0;
  std::string snapshot_id_;
};

// Throws Error(kHostIsPublicSuffix) when the host is itself a public suffix.
// Heuristic fallbacks are returned without complaint; use Lookup() to see
// the status.
RegistrableDomain GetRegistrableDomain(std::string_view host,
                                       const PublicSuffixRuleset& ruleset);

bool IsIpLiteral(std::string_view host);

// Lowercases and drops leading/trailing dots.
std::string CanonicalHost(std::string_view host);

std::vector<std::string_view> SplitLabels(std::string_view host);

}  // namespace trackscope

#endif  // TRACKSCOPE_PUBLIC_SUFFIX_H_
