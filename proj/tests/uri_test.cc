#include "trackscope/uri.h"

#include <random>
#include <regex>

#include "gtest/gtest.h"
#include "trackscope/error.h"

namespace trackscope {
namespace {

TEST(ParseUriTest, SplitsComponents) {
  ParsedUri uri = ParseUri("http://www.cdc.gov/hiv/");
  EXPECT_EQ(uri.scheme, "http");
  EXPECT_EQ(uri.host, "www.cdc.gov");
  EXPECT_EQ(uri.path, "/hiv/");
  EXPECT_FALSE(uri.query);
  EXPECT_FALSE(uri.fragment);
}

TEST(ParseUriTest, LowercasesHost) {
  EXPECT_EQ(ParseUri("http://EXAMPLE.com/").host, "example.com");
}

TEST(ParseUriTest, QueryAndFragment) {
  ParsedUri uri = ParseUri("http://x.com/a?b=1#c");
  EXPECT_EQ(uri.path, "/a");
  EXPECT_EQ(uri.query, "b=1");
  EXPECT_EQ(uri.fragment, "c");
}

TEST(ParseUriTest, PortAndUserinfo) {
  ParsedUri uri = ParseUri("https://user:pw@Host.Example:8443/p");
  EXPECT_EQ(uri.userinfo, "user:pw");
  EXPECT_EQ(uri.host, "host.example");
  EXPECT_EQ(uri.port, 8443);
}

TEST(ParseUriTest, EmptyPathBecomesSlash) {
  EXPECT_EQ(ParseUri("http://example.com").path, "/");
  EXPECT_EQ(ParseUri("http://example.com?x=1").path, "/");
}

TEST(ParseUriTest, RejectsRelativeAndBroken) {
  for (const char* raw : {"/relative/path", "example.com/x", "http://", "http:///x",
                          "http://[broken/beacon", "://x.com", "http://x.com:99999/"}) {
    EXPECT_FALSE(TryParseUri(raw)) << raw;
  }
  try {
    ParseUri("no-scheme");
    FAIL() << "expected MalformedUri";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedUri);
  }
}

TEST(ParseUriTest, SerializeRoundTrips) {
  for (const char* raw :
       {"http://www.cdc.gov/hiv/", "https://a.b.c:444/x/y?z=1&w=2#frag",
        "http://u@h.com/", "http://x.com/a%20b?q=%2F", "http://[::1]:8080/x"}) {
    ParsedUri uri = ParseUri(raw);
    EXPECT_EQ(ParseUri(uri.Serialize()), uri) << raw;
  }
}

TEST(StripArgumentsTest, Examples) {
  EXPECT_EQ(StripArguments(ParseUri("http://t.co/ga.js?SITEID=123")),
            "http://t.co/ga.js");
  EXPECT_EQ(StripArguments(ParseUri("http://t.co/ga.js")), "http://t.co/ga.js");
  EXPECT_EQ(StripArguments(ParseUri("http://t.co/p?a=1#frag")), "http://t.co/p");
}

TEST(StripArgumentsTest, ElidesDefaultPortKeepsOthers) {
  EXPECT_EQ(StripArguments(ParseUri("http://a.com:80/x")), "http://a.com/x");
  EXPECT_EQ(StripArguments(ParseUri("https://a.com:443/x")), "https://a.com/x");
  EXPECT_EQ(StripArguments(ParseUri("http://a.com:8080/x?y")), "http://a.com:8080/x");
}

TEST(StripArgumentsTest, IdempotentOverRandomUris) {
  std::mt19937_64 rng(7);
  const std::vector<std::string> hosts = {"a.com", "WWW.Example.ORG", "t.co",
                                          "x.y.z.net", "127.0.0.1"};
  const std::vector<std::string> paths = {"", "/", "/ga.js", "/a/b/c.gif", "/p;x",
                                          "/%7Euser/", "/dir/"};
  const std::vector<std::string> tails = {"", "?", "?a=1", "#f", "?a=1&b=2#f", "#"};
  const std::vector<std::string> ports = {"", ":80", ":443", ":8080"};
  for (int i = 0; i < 2000; ++i) {
    std::string raw = std::string(rng() % 2 ? "http" : "HTTPS") + "://" +
                      hosts[rng() % hosts.size()] + ports[rng() % ports.size()] +
                      paths[rng() % paths.size()] + tails[rng() % tails.size()];
    std::string once = StripArguments(ParseUri(raw));
    EXPECT_EQ(StripArguments(ParseUri(once)), once) << raw;
  }
}

TEST(NormalizePageUriTest, Examples) {
  EXPECT_EQ(NormalizePageUri("HTTP://Www.CDC.gov/hiv/#top"), "http://www.cdc.gov/hiv/");
  EXPECT_EQ(NormalizePageUri("http://a.com:80/x"), "http://a.com/x");
  EXPECT_EQ(NormalizePageUri("http://a.com/x?q=1"), "http://a.com/x?q=1");
}

TEST(CategorizeTldTest, Examples) {
  EXPECT_EQ(CategorizeTld("www.cdc.gov").kind, TldCategory::Kind::kGov);
  EXPECT_EQ(CategorizeTld("example.com").kind, TldCategory::Kind::kCom);
  EXPECT_EQ(CategorizeTld("stanford.EDU").kind, TldCategory::Kind::kEdu);
  EXPECT_EQ(CategorizeTld("www.who.int.").kind, TldCategory::Kind::kOther);
  TldCategory uk = CategorizeTld("www.nhs.uk");
  EXPECT_EQ(uk.kind, TldCategory::Kind::kOther);
  EXPECT_EQ(uk.Name(), "uk");
  EXPECT_EQ(TldCategory::FromName("uk"), uk);
}

TEST(ExtractExtensionTest, Examples) {
  EXPECT_EQ(ExtractExtension(ParseUri("http://x.net/ga.js")).kind,
            ExtensionClass::Kind::kJavascript);
  EXPECT_EQ(ExtractExtension(ParseUri("http://x.net/__utm.gif")).kind,
            ExtensionClass::Kind::kImage);
  EXPECT_EQ(ExtractExtension(ParseUri("http://x.net/collect")).kind,
            ExtensionClass::Kind::kNoExtension);
  EXPECT_EQ(ExtractExtension(ParseUri("http://x.net/track.PHP?x=1")).kind,
            ExtensionClass::Kind::kDynamicPage);
  ExtensionClass css = ExtractExtension(ParseUri("http://x.net/a.css"));
  EXPECT_EQ(css.kind, ExtensionClass::Kind::kOther);
  EXPECT_EQ(css.extension, "css");
}

TEST(ExtractExtensionTest, ConfigurableDynamicSet) {
  ExtensionTaxonomy taxonomy;
  taxonomy.dynamic_page = {"do"};
  EXPECT_EQ(ExtractExtension(ParseUri("http://x.net/a.do"), taxonomy).kind,
            ExtensionClass::Kind::kDynamicPage);
  EXPECT_EQ(ExtractExtension(ParseUri("http://x.net/a.php"), taxonomy).kind,
            ExtensionClass::Kind::kOther);
}

// Regex oracle for the extension token of a path.
std::string OracleToken(const std::string& path) {
  std::string segment = path.substr(path.rfind('/') + 1);
  static const std::regex token(R"(.*\.([A-Za-z0-9]{1,6})$)");
  std::smatch m;
  if (!std::regex_match(segment, m, token)) return "";
  std::string out = m[1];
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

TEST(ExtensionTokenTest, MatchesRegexOracle) {
  std::mt19937_64 rng(11);
  const std::string alphabet = "abcXYZ019._-/%";
  for (int i = 0; i < 20000; ++i) {
    std::string path = "/";
    size_t len = rng() % 16;
    for (size_t j = 0; j < len; ++j) path += alphabet[rng() % alphabet.size()];
    EXPECT_EQ(ExtensionToken(path), OracleToken(path)) << path;
  }
}

TEST(ExtensionKindNameTest, RoundTrips) {
  for (auto kind : {ExtensionClass::Kind::kNoExtension, ExtensionClass::Kind::kJavascript,
                    ExtensionClass::Kind::kImage, ExtensionClass::Kind::kDynamicPage,
                    ExtensionClass::Kind::kOther}) {
    EXPECT_EQ(ExtensionKindFromName(ExtensionKindName(kind)), kind);
  }
}

}  // namespace
}  // namespace trackscope
