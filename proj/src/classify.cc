#include "trackscope/classify.h"

#include "trackscope/error.h"

namespace trackscope {

std::string_view PartyClassName(PartyClass party) {
  return party == PartyClass::kFirstParty ? "first_party" : "third_party";
}

PartyClass ClassifyParty(const RegistrableDomain& page_domain,
                         const RegistrableDomain& request_domain) {
  return ToLowerAscii(page_domain.value) == ToLowerAscii(request_domain.value)
             ? PartyClass::kFirstParty
             : PartyClass::kThirdParty;
}

CookieVerdict ClassifyCookie(const RegistrableDomain& page_domain,
                             const CapturedCookie& cookie,
                             const PublicSuffixRuleset& ruleset) {
  if (CanonicalHost(cookie.domain_attribute).empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "cookie '" + cookie.name + "' has no domain");
  }
  DomainLookup lookup = ruleset.Lookup(cookie.domain_attribute);
  if (!lookup.domain) return {PartyClass::kThirdParty, true};
  return {ClassifyParty(page_domain, *lookup.domain), false};
}

RegistrableDomain DomainOrSelf(std::string_view host,
                               const PublicSuffixRuleset& ruleset) {
  DomainLookup lookup = ruleset.Lookup(host);
  if (lookup.domain) return *lookup.domain;
  return RegistrableDomain{CanonicalHost(host)};
}

ElementRecord ClassifyElement(const CapturedRequest& request,
                              const PublicSuffixRuleset& ruleset,
                              const ExtensionTaxonomy& taxonomy) {
  ParsedUri uri = ParseUri(request.uri);
  return {StripArguments(uri), ExtractExtension(uri, taxonomy),
          DomainOrSelf(uri.host, ruleset)};
}

bool IsScriptContentType(std::string_view content_type) {
  std::string media = ToLowerAscii(content_type.substr(0, content_type.find(';')));
  return media.find("script") != std::string::npos;
}

PageAnalysis AnalyzePage(const PageLoadResult& result,
                         const PublicSuffixRuleset& ruleset,
                         const ExtensionTaxonomy& taxonomy) {
  if (result.status.kind != LoadStatus::Kind::kLoaded) {
    throw Error(ErrorCode::kInvalidArgument,
                "page " + result.requested_uri + " did not load (" +
                    result.status.ToString() + ")");
  }
  ParsedUri page_uri = ParseUri(result.final_uri);

  PageAnalysis analysis;
  DomainLookup page_lookup = ruleset.Lookup(page_uri.host);
  if (page_lookup.status == LookupStatus::kPublicSuffix)
    ++analysis.diagnostics.public_suffix_hosts;
  if (page_lookup.status == LookupStatus::kHeuristic)
    ++analysis.diagnostics.heuristic_domains;
  analysis.page_domain = page_lookup.domain
                             ? *page_lookup.domain
                             : RegistrableDomain{CanonicalHost(page_uri.host)};

  for (const CapturedRequest& request : result.requests) {
    std::optional<ParsedUri> uri = TryParseUri(request.uri);
    if (!uri) {
      ++analysis.diagnostics.malformed_requests;
      continue;
    }
    DomainLookup lookup = ruleset.Lookup(uri->host);
    if (lookup.status == LookupStatus::kPublicSuffix)
      ++analysis.diagnostics.public_suffix_hosts;
    if (lookup.status == LookupStatus::kHeuristic)
      ++analysis.diagnostics.heuristic_domains;
    RegistrableDomain domain =
        lookup.domain ? *lookup.domain : RegistrableDomain{CanonicalHost(uri->host)};
    if (ClassifyParty(analysis.page_domain, domain) == PartyClass::kFirstParty)
      continue;

    ElementRecord element{StripArguments(*uri), ExtractExtension(*uri, taxonomy),
                          domain};
    analysis.flags.has_third_party_request = true;
    if (element.extension_class.kind == ExtensionClass::Kind::kJavascript ||
        (request.content_type && IsScriptContentType(*request.content_type))) {
      analysis.flags.has_third_party_javascript = true;
    }
    analysis.third_party_domains.insert(domain);
    analysis.third_party_elements.push_back(std::move(element));
  }

  for (const CapturedCookie& cookie : result.cookies) {
    if (CanonicalHost(cookie.domain_attribute).empty()) {
      ++analysis.diagnostics.unclassifiable_cookies;
      continue;
    }
    CookieVerdict verdict = ClassifyCookie(analysis.page_domain, cookie, ruleset);
    if (verdict.domain_is_public_suffix) ++analysis.diagnostics.public_suffix_hosts;
    if (verdict.party == PartyClass::kThirdParty)
      analysis.flags.has_third_party_cookie = true;
  }
  return analysis;
}

PageFlags DerivePageFlags(const PageLoadResult& result,
                          const PublicSuffixRuleset& ruleset) {
  return AnalyzePage(result, ruleset).flags;
}

}  // namespace trackscope
