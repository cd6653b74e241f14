#include "trackscope/uri.h"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "trackscope/error.h"

namespace trackscope {

namespace {

bool IsSchemeChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '+' ||
         c == '-' || c == '.';
}

bool IsForbiddenHostChar(char c) {
  auto uc = static_cast<unsigned char>(c);
  if (uc <= 0x20 || uc == 0x7f) return true;
  switch (c) {
    case '<': case '>': case '"': case '{': case '}': case '|':
    case '\\': case '^': case '`':
      return true;
    default:
      return false;
  }
}

std::string_view TrimAscii(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

[[noreturn]] void Malformed(std::string_view raw, std::string_view why) {
  throw Error(ErrorCode::kMalformedUri,
              std::string(why) + " in '" + std::string(raw) + "'");
}

}  // namespace

std::string ToLowerAscii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::optional<uint16_t> DefaultPort(std::string_view scheme) {
  if (scheme == "http" || scheme == "ws") return 80;
  if (scheme == "https" || scheme == "wss") return 443;
  if (scheme == "ftp") return 21;
  return std::nullopt;
}

ParsedUri ParseUri(std::string_view input) {
  std::string_view raw = TrimAscii(input);
  if (raw.empty()) Malformed(input, "empty URI");

  ParsedUri uri;
  uri.raw = std::string(raw);

  size_t colon = raw.find(':');
  size_t first_delim = raw.find_first_of("/?#");
  if (colon == std::string_view::npos || colon == 0 ||
      (first_delim != std::string_view::npos && first_delim < colon)) {
    Malformed(raw, "relative reference or missing scheme");
  }
  std::string_view scheme = raw.substr(0, colon);
  if (!std::isalpha(static_cast<unsigned char>(scheme.front())) ||
      !std::all_of(scheme.begin(), scheme.end(), IsSchemeChar)) {
    Malformed(raw, "invalid scheme");
  }
  uri.scheme = ToLowerAscii(scheme);

  std::string_view rest = raw.substr(colon + 1);
  if (rest.substr(0, 2) != "//") Malformed(raw, "no authority");
  rest.remove_prefix(2);

  size_t authority_end = rest.find_first_of("/?#");
  std::string_view authority = rest.substr(0, authority_end);
  rest = authority_end == std::string_view::npos ? std::string_view()
                                                 : rest.substr(authority_end);

  if (size_t at = authority.rfind('@'); at != std::string_view::npos) {
    uri.userinfo = std::string(authority.substr(0, at));
    authority.remove_prefix(at + 1);
  }

  std::string_view host;
  std::string_view port;
  if (!authority.empty() && authority.front() == '[') {
    size_t close = authority.find(']');
    if (close == std::string_view::npos) Malformed(raw, "unterminated IPv6");
    host = authority.substr(0, close + 1);
    std::string_view after = authority.substr(close + 1);
    if (!after.empty()) {
      if (after.front() != ':') Malformed(raw, "junk after IPv6 literal");
      port = after.substr(1);
    }
  } else {
    size_t port_colon = authority.rfind(':');
    host = authority.substr(0, port_colon);
    if (port_colon != std::string_view::npos)
      port = authority.substr(port_colon + 1);
  }
  if (host.empty()) Malformed(raw, "empty host");
  if (std::any_of(host.begin(), host.end(), IsForbiddenHostChar))
    Malformed(raw, "invalid host character");
  uri.host = ToLowerAscii(host);

  if (!port.empty()) {
    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(),
                                     value);
    if (ec != std::errc() || ptr != port.data() + port.size() ||
        value > 65535) {
      Malformed(raw, "invalid port");
    }
    uri.port = static_cast<uint16_t>(value);
  }

  size_t hash = rest.find('#');
  if (hash != std::string_view::npos) {
    uri.fragment = std::string(rest.substr(hash + 1));
    rest = rest.substr(0, hash);
  }
  size_t question = rest.find('?');
  if (question != std::string_view::npos) {
    uri.query = std::string(rest.substr(question + 1));
    rest = rest.substr(0, question);
  }
  uri.path = rest.empty() ? "/" : std::string(rest);
  return uri;
}

std::optional<ParsedUri> TryParseUri(std::string_view raw) {
  try {
    return ParseUri(raw);
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::string ParsedUri::Serialize() const {
  std::string out = scheme + "://";
  if (userinfo) out += *userinfo + "@";
  out += host;
  if (port) out += ":" + std::to_string(*port);
  out += path;
  if (query) out += "?" + *query;
  if (fragment) out += "#" + *fragment;
  return out;
}

bool ParsedUri::operator==(const ParsedUri& other) const {
  return scheme == other.scheme && userinfo == other.userinfo &&
         host == other.host && port == other.port && path == other.path &&
         query == other.query && fragment == other.fragment;
}

namespace {

std::string Origin(const ParsedUri& uri) {
  std::string out = uri.scheme + "://";
  if (uri.userinfo) out += *uri.userinfo + "@";
  out += uri.host;
  if (uri.port && uri.port != DefaultPort(uri.scheme))
    out += ":" + std::to_string(*uri.port);
  return out;
}

}  // namespace

std::string StripArguments(const ParsedUri& uri) {
  return Origin(uri) + uri.path;
}

std::string NormalizePageUri(std::string_view raw) {
  ParsedUri uri = ParseUri(raw);
  std::string out = Origin(uri) + uri.path;
  if (uri.query) out += "?" + *uri.query;
  return out;
}

TldCategory TldCategory::FromName(std::string_view name) {
  if (name == "com") return {Kind::kCom, {}};
  if (name == "org") return {Kind::kOrg, {}};
  if (name == "gov") return {Kind::kGov, {}};
  if (name == "edu") return {Kind::kEdu, {}};
  return {Kind::kOther, std::string(name)};
}

std::string TldCategory::Name() const {
  switch (kind) {
    case Kind::kCom: return "com";
    case Kind::kOrg: return "org";
    case Kind::kGov: return "gov";
    case Kind::kEdu: return "edu";
    case Kind::kOther: return label;
  }
  return label;
}

TldCategory CategorizeTld(std::string_view host) {
  while (!host.empty() && host.back() == '.') host.remove_suffix(1);
  size_t dot = host.rfind('.');
  std::string label =
      ToLowerAscii(dot == std::string_view::npos ? host : host.substr(dot + 1));
  return TldCategory::FromName(label);
}

std::string_view ExtensionKindName(ExtensionClass::Kind kind) {
  switch (kind) {
    case ExtensionClass::Kind::kNoExtension: return "no_extension";
    case ExtensionClass::Kind::kJavascript: return "javascript";
    case ExtensionClass::Kind::kImage: return "image";
    case ExtensionClass::Kind::kDynamicPage: return "dynamic_page";
    case ExtensionClass::Kind::kOther: return "other";
  }
  return "other";
}

std::optional<ExtensionClass::Kind> ExtensionKindFromName(
    std::string_view name) {
  using Kind = ExtensionClass::Kind;
  for (Kind kind : {Kind::kNoExtension, Kind::kJavascript, Kind::kImage,
                    Kind::kDynamicPage, Kind::kOther}) {
    if (ExtensionKindName(kind) == name) return kind;
  }
  return std::nullopt;
}

ExtensionClass ExtensionTaxonomy::Classify(std::string_view extension) const {
  using Kind = ExtensionClass::Kind;
  if (extension.empty()) return {Kind::kNoExtension, {}};
  std::string ext = ToLowerAscii(extension);
  if (javascript.contains(ext)) return {Kind::kJavascript, ext};
  if (image.contains(ext)) return {Kind::kImage, ext};
  if (dynamic_page.contains(ext)) return {Kind::kDynamicPage, ext};
  return {Kind::kOther, ext};
}

const ExtensionTaxonomy& DefaultTaxonomy() {
  static const ExtensionTaxonomy taxonomy;
  return taxonomy;
}

std::string ExtensionToken(std::string_view path) {
  size_t query = path.find_first_of("?#");
  path = path.substr(0, query);
  size_t slash = path.rfind('/');
  std::string_view segment =
      slash == std::string_view::npos ? path : path.substr(slash + 1);
  size_t dot = segment.rfind('.');
  if (dot == std::string_view::npos) return {};
  std::string_view token = segment.substr(dot + 1);
  if (token.empty() || token.size() > 6) return {};
  for (char c : token) {
    if (!std::isalnum(static_cast<unsigned char>(c))) return {};
  }
  return ToLowerAscii(token);
}

ExtensionClass ExtractExtension(const ParsedUri& uri,
                                const ExtensionTaxonomy& taxonomy) {
  return taxonomy.Classify(ExtensionToken(uri.path));
}

}  // namespace trackscope
