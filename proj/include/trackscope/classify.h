#ifndef TRACKSCOPE_CLASSIFY_H_
#define TRACKSCOPE_CLASSIFY_H_

#include <set>
#include <string>
#include <vector>

#include "trackscope/capture.h"
#include "trackscope/public_suffix.h"
#include "trackscope/uri.h"

namespace trackscope {

enum class PartyClass { kFirstParty, kThirdParty };

std::string_view PartyClassName(PartyClass party);

// First party iff the registrable domains are equal, ignoring case.
PartyClass ClassifyParty(const RegistrableDomain& page_domain,
                         const RegistrableDomain& request_domain);

struct CookieVerdict {
  PartyClass party = PartyClass::kThirdParty;
  bool domain_is_public_suffix = false;
};

// A cookie whose domain attribute is itself a public suffix is third party
// and flagged. Throws Error(kInvalidArgument) for an empty domain attribute.
CookieVerdict ClassifyCookie(const RegistrableDomain& page_domain,
                             const CapturedCookie& cookie,
                             const PublicSuffixRuleset& ruleset);

struct ElementRecord {
  std::string stripped_uri;
  ExtensionClass extension_class;
  RegistrableDomain request_domain;

  bool operator==(const ElementRecord&) const = default;
};

// Throws Error(kMalformedUri) when the request URI does not parse. A request
// host that is itself a public suffix is its own domain.
ElementRecord ClassifyElement(const CapturedRequest& request,
                              const PublicSuffixRuleset& ruleset,
                              const ExtensionTaxonomy& taxonomy =
                                  DefaultTaxonomy());

// Registrable domain of a host, with public-suffix hosts standing for
// themselves.
RegistrableDomain DomainOrSelf(std::string_view host,
                               const PublicSuffixRuleset& ruleset);

// Media type (parameters ignored) names a script.
bool IsScriptContentType(std::string_view content_type);

struct PageFlags {
  bool has_third_party_request = false;
  bool has_third_party_javascript = false;
  bool has_third_party_cookie = false;

  bool operator==(const PageFlags&) const = default;
};

struct PageDiagnostics {
  size_t malformed_requests = 0;
  size_t public_suffix_hosts = 0;      // requests or cookies
  size_t heuristic_domains = 0;        // no ruleset match
  size_t unclassifiable_cookies = 0;   // no domain could be determined
};

// Everything the census needs from one loaded page.
struct PageAnalysis {
  RegistrableDomain page_domain;
  PageFlags flags;
  std::set<RegistrableDomain> third_party_domains;
  std::vector<ElementRecord> third_party_elements;  // request order
  PageDiagnostics diagnostics;
};

// Party basis is the post-redirect final URI. Third-party Javascript is any
// third-party request with a Javascript extension or a script content type.
// Throws Error(kInvalidArgument) unless the page loaded, and
// Error(kMalformedUri) when its final URI does not parse.
PageAnalysis AnalyzePage(const PageLoadResult& result,
                         const PublicSuffixRuleset& ruleset,
                         const ExtensionTaxonomy& taxonomy = DefaultTaxonomy());

PageFlags DerivePageFlags(const PageLoadResult& result,
                          const PublicSuffixRuleset& ruleset);

}  // namespace trackscope

#endif  // TRACKSCOPE_CLASSIFY_H_
