#ifndef TRACKSCOPE_URI_H_
#define TRACKSCOPE_URI_H_

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>

namespace trackscope {

// An absolute URI split into its components. Percent-encoding is kept
// verbatim; only the scheme and host are case-normalized.
struct ParsedUri {
  std::string raw;
  std::string scheme;
  std::optional<std::string> userinfo;
  std::string host;
  std::optional<uint16_t> port;
  std::string path = "/";
  std::optional<std::string> query;
  std::optional<std::string> fragment;

  // Reassembles the components. Parsing the result yields the same
  // components (the raw field aside).
  std::string Serialize() const;

  bool operator==(const ParsedUri& other) const;
};

// Throws Error(kMalformedUri) for relative references and for input where no
// scheme or host can be delimited.
ParsedUri ParseUri(std::string_view raw);

std::optional<ParsedUri> TryParseUri(std::string_view raw);

std::optional<uint16_t> DefaultPort(std::string_view scheme);

// scheme://host[:port]/path with query and fragment removed. A port equal to
// the scheme default is elided.
std::string StripArguments(const ParsedUri& uri);

// Dedupe key for pages: lowercase scheme and host, default port elided,
// fragment dropped, query kept.
std::string NormalizePageUri(std::string_view raw);

// Top-level-domain category of a host, decided by its final label only.
struct TldCategory {
  enum class Kind { kCom, kOrg, kGov, kEdu, kOther };
  Kind kind = Kind::kOther;
  std::string label;  // only set for kOther

  static TldCategory FromName(std::string_view name);
  // "com", "org", "gov", "edu" or the other label itself.
  std::string Name() const;

  auto operator<=>(const TldCategory&) const = default;
};

TldCategory CategorizeTld(std::string_view host);

struct ExtensionClass {
  enum class Kind { kNoExtension, kJavascript, kImage, kDynamicPage, kOther };
  Kind kind = Kind::kNoExtension;
  std::string extension;  // lowercase token; empty for kNoExtension

  bool operator==(const ExtensionClass&) const = default;
};

std::string_view ExtensionKindName(ExtensionClass::Kind kind);
std::optional<ExtensionClass::Kind> ExtensionKindFromName(std::string_view name);

// Extension-to-class membership. Only the dynamic-page set is meant to be
// tuned from configuration.
struct ExtensionTaxonomy {
  std::set<std::string, std::less<>> javascript = {"js"};
  std::set<std::string, std::less<>> image = {"gif", "jpg", "jpeg", "png",
                                              "webp", "svg", "ico", "bmp"};
  std::set<std::string, std::less<>> dynamic_page = {"php", "asp", "aspx",
                                                     "jsp", "cgi", "pl"};

  ExtensionClass Classify(std::string_view extension) const;
};

const ExtensionTaxonomy& DefaultTaxonomy();

// Characters after the last '.' of the final path segment, lowercased, when
// they form a 1-6 character alphanumeric token. Empty otherwise.
std::string ExtensionToken(std::string_view path);

ExtensionClass ExtractExtension(const ParsedUri& uri,
                                const ExtensionTaxonomy& taxonomy =
                                    DefaultTaxonomy());

std::string ToLowerAscii(std::string_view s);

}  // namespace trackscope

#endif  // TRACKSCOPE_URI_H_
