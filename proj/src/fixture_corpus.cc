#include "trackscope/fixture_corpus.h"

#include <array>
#include <cstdio>
#include <filesystem>
#include <map>

#include "trackscope/digest.h"
#include "trackscope/har.h"
#include "trackscope/page_list.h"

namespace trackscope {
namespace {

using std::chrono::milliseconds;
using std::chrono::seconds;

struct CategoryPlan {
  const char* tld;
  int pages;
  int requests;
  int javascript;
  int cookies;
};

// Indexed by page % 10: six .com slots, two .org, one .gov, one .edu.
constexpr std::array<CategoryPlan, 4> kPlans = {{
    {"com", 6000, 5580, 5460, 4920},
    {"org", 2000, 1860, 1600, 1570},
    {"gov", 1000, 900, 810, 210},
    {"edu", 1000, 760, 730, 400},
}};
constexpr std::array<int, 10> kSlotCategory = {0, 0, 0, 0, 0, 0, 1, 1, 2, 3};

constexpr int kLoadedPages = 10000;
constexpr int kHttpsPages = 324;
constexpr int kTimeoutPages = 40;
constexpr int kErrorPages = 25;
constexpr int kBlogPages = 150;
constexpr int kRedirectStride = 50;

enum class Kind { kAnchor, kScript, kImage, kDynamic, kOther };

struct Element {
  Kind kind;
  std::string uri;  // without arguments
  int pages;
  std::string query;  // appended per page; "{p}" is the page number
};

struct Owner {
  std::string id;
  std::string display_name;
  std::string revenue_model;
  std::vector<std::string> domains;
  int pages;
  int js_offset;
  std::vector<Element> elements;
};

std::string Fill(const std::string& pattern, int page) {
  std::string out;
  for (size_t i = 0; i < pattern.size(); ++i) {
    if (pattern.compare(i, 3, "{p}") == 0) {
      out += std::to_string(page);
      i += 2;
    } else {
      out += pattern[i];
    }
  }
  return out;
}

std::vector<Owner> Owners() {
  std::vector<Owner> owners = {
      {"google", "Google", "Advertising",
       {"google-analytics.com", "doubleclick.net", "2mdn.net", "googleapis.com",
        "youtube.com", "googlesyndication.com", "googletagservices.com"},
       7800, 0,
       {{Kind::kAnchor, "http://googleads.g.doubleclick.net/pagead/viewthroughconversion",
         7800, "?random={p}"},
        {Kind::kScript, "http://www.google-analytics.com/ga.js", 7300,
         "?SITEID={p}"},
        {Kind::kScript, "http://ajax.googleapis.com/ajax/libs/jquery/1.7.1/jquery.min.js",
         3000, ""},
        {Kind::kScript, "http://pagead2.googlesyndication.com/pagead/show_ads.js",
         2500, ""},
        {Kind::kScript, "http://www.googletagservices.com/tag/js/gpt.js", 1200, ""},
        {Kind::kImage, "http://www.google-analytics.com/__utm.gif", 4500,
         "?utmwv=5.4.2&utmn={p}"},
        {Kind::kOther, "http://www.youtube.com/embed/player.swf", 1200, ""}}},
      {"comscore", "comScore", "Advertising",
       {"scorecardresearch.com", "comscore.com"}, 3800, 7300,
       {{Kind::kAnchor, "http://b.scorecardresearch.com/b", 3800, "?c1=2&c2={p}"},
        {Kind::kScript, "http://b.scorecardresearch.com/beacon.js", 3300, ""},
        {Kind::kDynamic, "http://b.scorecardresearch.com/p.cgi", 2000, "?c2={p}"}}},
      {"facebook", "Facebook", "Advertising",
       {"facebook.com", "facebook.net", "fbcdn.net"}, 3100, 1511,
       {{Kind::kAnchor, "http://www.facebook.com/tr", 3100, "?id={p}&ev=PageView"},
        {Kind::kScript, "http://connect.facebook.net/en_US/all.js", 2600, ""},
        {Kind::kScript, "http://connect.facebook.net/en_US/fbevents.js", 900, ""},
        {Kind::kImage, "http://www.facebook.com/images/like_button.png", 1600, ""},
        {Kind::kOther, "http://static.ak.fbcdn.net/rsrc/like.css", 1500, ""}}},
      {"appnexus", "AppNexus", "Advertising", {"adnxs.com"}, 2200, 3022,
       {{Kind::kAnchor, "http://ib.adnxs.com/seg", 2200, "?add={p}"},
        {Kind::kScript, "http://cdn.adnxs.com/ast/ast.js", 1700, ""},
        {Kind::kScript, "http://cdn.adnxs.com/ttj.js", 650, "?id={p}"},
        {Kind::kImage, "http://ib.adnxs.com/px.gif", 1000, ""},
        {Kind::kOther, "http://cdn.adnxs.com/ast/ast.json", 900, ""}}},
      {"addthis", "AddThis", "Advertising", {"addthis.com", "addthisedge.com"},
       1800, 4533,
       {{Kind::kAnchor, "http://m.addthisedge.com/live/boost", 1800, "?pub={p}"},
        {Kind::kScript, "http://s7.addthis.com/js/300/addthis_widget.js", 1300, ""},
        {Kind::kScript, "http://s7.addthis.com/js/menu.js", 450, ""},
        {Kind::kImage, "http://s7.addthis.com/static/btn/sm-share-en.gif", 700, ""},
        {Kind::kOther, "http://s7.addthis.com/static/sh.html", 1000, ""}}},
      {"twitter", "Twitter", "Advertising", {"twitter.com", "twimg.com"}, 1800,
       6044,
       {{Kind::kAnchor, "http://syndication.twitter.com/i/jot", 1800, "?l={p}"},
        {Kind::kScript, "http://platform.twitter.com/widgets.js", 1300, ""},
        {Kind::kScript, "http://platform.twitter.com/oct.js", 350, ""},
        {Kind::kImage, "http://platform.twitter.com/images/bird.png", 900, ""},
        {Kind::kOther, "http://platform.twitter.com/widgets/tweet_button.html", 1250,
         "?url={p}"}}},
      {"quantcast", "Quantcast", "Advertising", {"quantserve.com"}, 1601, 7555,
       {{Kind::kAnchor, "http://pixel.quantserve.com/pixel", 1601, "?a=p-{p}"},
        {Kind::kScript, "http://edge.quantserve.com/quant.js", 1101, ""},
        {Kind::kImage, "http://pixel.quantserve.com/pixel.png", 800, ""},
        {Kind::kOther, "http://pixel.quantserve.com/seg.txt", 300, ""}}},
      {"amazon", "Amazon", "Retail & Hosting", {"amazon-adsystem.com", "amazon.com"},
       1600, 466,
       {{Kind::kAnchor, "http://aax.amazon-adsystem.com/x/getad", 1600, "?src={p}"},
        {Kind::kScript, "http://c.amazon-adsystem.com/aax2/apstag.js", 1100, ""},
        {Kind::kImage, "http://aax.amazon-adsystem.com/e/loi/imp.gif", 750, ""},
        {Kind::kOther, "http://aax.amazon-adsystem.com/e/feed.json", 500, ""}}},
      {"adobe", "Adobe", "Software & Services", {"demdex.net", "typekit.net", "adobe.com"},
       1100, 2977,
       {{Kind::kAnchor, "http://dpm.demdex.net/ibs", 1100, "?d_uuid={p}"},
        {Kind::kScript, "http://use.typekit.net/abc1def.js", 600, ""},
        {Kind::kDynamic, "http://www.adobe.com/track.php", 800, "?v={p}"}}},
      {"yahoo", "Yahoo!", "Advertising", {"yahoo.com", "yimg.com"}, 1100, 5488,
       {{Kind::kAnchor, "http://ads.yahoo.com/cms/v1", 1100, "?esig={p}"},
        {Kind::kScript, "http://l.yimg.com/rq/darla/boot.js", 600, ""},
        {Kind::kImage, "http://row.bc.yahoo.com/b.gif", 550, ""},
        {Kind::kOther, "http://l.yimg.com/style.css", 400, ""}}},
      {"experian", "Experian", "Data Broker", {"experian.com"}, 500, 0,
       {{Kind::kAnchor, "http://t.experian.com/sync", 500, "?uid={p}"},
        {Kind::kDynamic, "http://pixel.experian.com/collect.aspx", 400, ""}}},
      {"acxiom", "Acxiom", "Data Broker", {"acxiom.com"}, 300, 0,
       {{Kind::kAnchor, "http://tags.acxiom.com/match", 300, "?m={p}"},
        {Kind::kDynamic, "http://tags.acxiom.com/tag.jsp", 250, ""}}},
  };
  // Ranks 11-30 and 32-46 are held by smaller ad networks.
  for (int i = 0; i < 35; ++i) {
    int rank = i < 20 ? 11 + i : 12 + i;
    int pages = i < 20 ? 1099 - 25 * i : 499 - 13 * (i - 20);
    char id[32], name[32], domain[48];
    std::snprintf(id, sizeof(id), "adnet%02d", rank);
    std::snprintf(name, sizeof(name), "AdNet %02d", rank);
    std::snprintf(domain, sizeof(domain), "adnet%02d-media.net", rank);
    Owner owner{id, name, "Advertising", {domain}, pages, (rank * 977) % 8600, {}};
    owner.elements.push_back(
        {Kind::kAnchor, std::string("http://t.") + domain + "/track", pages, "?p={p}"});
    if (pages - 500 >= 200) {
      owner.elements.push_back({Kind::kScript,
                                std::string("http://cdn.") + domain + "/tag.js",
                                pages - 500, ""});
    }
    owners.push_back(std::move(owner));
  }
  return owners;
}

const char* ContentType(Kind kind, const std::string& uri) {
  switch (kind) {
    case Kind::kAnchor: return "image/gif";
    case Kind::kScript: return "application/javascript";
    case Kind::kImage: return uri.ends_with(".png") ? "image/png" : "image/gif";
    case Kind::kDynamic: return "text/html";
    case Kind::kOther: break;
  }
  if (uri.ends_with(".css")) return "text/css";
  if (uri.ends_with(".json")) return "application/json";
  if (uri.ends_with(".swf")) return "application/x-shockwave-flash";
  if (uri.ends_with(".txt")) return "text/plain";
  return "text/html";
}

constexpr std::array<const char*, 14> kConditionPaths = {
    "breast-lump", "diabetes",          "hiv",        "depression",
    "breast-cancer", "high-blood-pressure", "asthma", "multiple-sclerosis",
    "migraine",    "hepatitis",         "pregnancy",  "anxiety",
    "lung_cancer", "heart+disease"};

std::string SiteHost(int category, int local) {
  const int site = local / 4;
  switch (category) {
    case 0:
      if (local < kBlogPages) return "healthblog" + std::to_string(local) + ".blogspot.com";
      return "www.healthsite" + std::to_string(site) + ".com";
    case 1: return "www.foundation" + std::to_string(site) + ".org";
    case 2: return "www.ncbi.agency" + std::to_string(site) + ".gov";
    default: return "www.university" + std::to_string(site) + ".edu";
  }
}

std::string RegistrableOf(const std::string& host) {
  if (host.ends_with(".blogspot.com")) return host;
  size_t last = host.rfind('.');
  size_t prev = host.rfind('.', last - 1);
  return prev == std::string::npos ? host : host.substr(prev + 1);
}

std::string PagePath(int page) {
  if (page % 10 < 7) {
    return std::string("/conditions/") + kConditionPaths[(page / 10) % kConditionPaths.size()] +
           "/";
  }
  return "/pubmed/" + std::to_string(21722252 + page);
}

struct PagePlan {
  int category = 0;
  int local = 0;
  bool request = false;
  bool javascript = false;
  bool cookie = false;
  bool https = false;
  std::string host;
  std::string uri;
  // (element index within owner, owner index) in catalog order.
  std::vector<std::pair<int, int>> elements;
};

CapturedRequest MakeRequest(std::string uri, const char* content_type,
                            const std::string& referer, Timestamp ts) {
  CapturedRequest request;
  request.uri = std::move(uri);
  request.referer = referer;
  request.user_agent = "Mozilla/5.0 (X11; Linux x86_64) trackscope-fixture";
  request.response_status = 200;
  request.content_type = content_type;
  request.timestamp = ts;
  return request;
}

std::string OwnershipText(const std::vector<Owner>& owners) {
  std::string text =
      "# Owners of the fixture corpus domains.\n"
      "version: fixture-2026.10\n"
      "built_at: 2026-10-01T00:00:00Z\n";
  for (const Owner& owner : owners) {
    text += "\n[owner " + owner.id + "]\n";
    text += "display_name: " + owner.display_name + "\n";
    text += "revenue_model: " + owner.revenue_model + "\n";
    text += "domains: ";
    for (size_t i = 0; i < owner.domains.size(); ++i)
      text += (i ? ", " : "") + owner.domains[i];
    text += "\n";
  }
  return text;
}

}  // namespace

FixtureCorpus GenerateFixtureCorpus() {
  const Timestamp epoch = ParseIsoTimestamp("2014-02-01T00:00:00.000Z").value();
  std::vector<Owner> owners = Owners();

  std::vector<PagePlan> plans(kLoadedPages);
  std::array<int, 4> seen{};
  std::vector<int> js_pages;
  std::vector<int> request_only_pages;
  int https_left = kHttpsPages;
  for (int p = 0; p < kLoadedPages; ++p) {
    PagePlan& plan = plans[p];
    plan.category = kSlotCategory[p % 10];
    plan.local = seen[plan.category]++;
    const CategoryPlan& c = kPlans[plan.category];
    plan.javascript = plan.local < c.javascript;
    plan.request = plan.local < c.requests;
    plan.cookie = plan.local < c.cookies;
    if (!plan.request && https_left > 0) {
      plan.https = true;
      --https_left;
    }
    if (plan.javascript) js_pages.push_back(p);
    else if (plan.request) request_only_pages.push_back(p);
    plan.host = SiteHost(plan.category, plan.local);
    plan.uri = (plan.https ? "https://" : "http://") + plan.host + PagePath(p);
  }

  // Each owner reaches a prefix of its own page ordering: the pages with
  // third-party requests but no Javascript first, then the Javascript pages
  // rotated by the owner's offset. Script elements only use the Javascript
  // part so that they never land on a page without Javascript.
  const int js_count = static_cast<int>(js_pages.size());
  const int request_only = static_cast<int>(request_only_pages.size());
  for (int o = 0; o < static_cast<int>(owners.size()); ++o) {
    const Owner& owner = owners[o];
    for (int e = 0; e < static_cast<int>(owner.elements.size()); ++e) {
      const Element& element = owner.elements[e];
      const bool script = element.kind == Kind::kScript;
      for (int i = 0; i < element.pages; ++i) {
        int position = script ? request_only + i : i;
        int page = position < request_only
                       ? request_only_pages[position]
                       : js_pages[(owner.js_offset + position - request_only) % js_count];
        plans[page].elements.emplace_back(e, o);
      }
    }
  }

  FixtureCorpus corpus;
  corpus.ownership_db = OwnershipText(owners);
  int js_index = 0;
  int request_index = 0;
  for (int p = 0; p < kLoadedPages; ++p) {
    const PagePlan& plan = plans[p];
    PageLoadResult page;
    page.started_at = epoch + seconds(40 * p);
    page.final_uri = plan.uri;
    page.requested_uri = plan.uri;
    page.status = LoadStatus::Loaded();
    Timestamp ts = page.started_at;
    auto next_ts = [&ts] { return ts += milliseconds(12); };
    const std::string site = RegistrableOf(plan.host);

    const bool redirect = p % kRedirectStride == 7 && plan.host.starts_with("www.");
    if (redirect) {
      page.requested_uri = (plan.https ? "https://" : "http://") + plan.host.substr(4) +
                           PagePath(p);
      CapturedRequest hop = MakeRequest(page.requested_uri, "text/html", "", next_ts());
      hop.referer.reset();
      hop.response_status = 301;
      page.requests.push_back(std::move(hop));
    }
    CapturedRequest document = MakeRequest(plan.uri, "text/html; charset=utf-8", "", next_ts());
    document.referer.reset();
    if (!plan.cookie && p % 2 == 0) document.set_cookies.push_back("session=" + std::to_string(p) + "; Path=/; HttpOnly");
    page.requests.push_back(std::move(document));

    const std::string scheme = plan.https ? "https://" : "http://";
    if (plan.host.ends_with(".blogspot.com")) {
      page.requests.push_back(MakeRequest(scheme + plan.host + "/feeds/posts/default",
                                          "application/atom+xml", plan.uri, next_ts()));
    } else {
      page.requests.push_back(MakeRequest(scheme + "static." + site + "/css/site.css",
                                          "text/css", plan.uri, next_ts()));
      page.requests.push_back(MakeRequest(scheme + "images." + site + "/logo.png?v=3",
                                          "image/png", plan.uri, next_ts()));
    }
    if (p % 1000 == 999) {
      CapturedRequest broken = MakeRequest("http://[broken/beacon", "image/gif", plan.uri,
                                           next_ts());
      page.requests.push_back(std::move(broken));
    }

    bool cookie_set = false;
    for (const auto& [e, o] : plan.elements) {
      const Owner& owner = owners[o];
      const Element& element = owner.elements[e];
      CapturedRequest request = MakeRequest(element.uri + Fill(element.query, p),
                                            ContentType(element.kind, element.uri),
                                            plan.uri, next_ts());
      if (plan.cookie && !cookie_set) {
        request.set_cookies.push_back("uid=" + Sha256Hex(std::to_string(p)).substr(0, 16) +
                                      "; Domain=." + owner.domains.front() +
                                      "; Path=/; Expires=Sat, 01 Feb 2016 00:00:00 GMT");
        cookie_set = true;
      }
      page.requests.push_back(std::move(request));
      // Some pages fire the same element twice with fresh arguments.
      if (element.kind == Kind::kAnchor && p % 5 == 0) {
        page.requests.push_back(MakeRequest(element.uri + Fill(element.query, p) + "&n=2",
                                            ContentType(element.kind, element.uri),
                                            plan.uri, next_ts()));
      }
    }

    // Long tail: every element here appears on fewer than 200 pages.
    if (plan.javascript) {
      if (js_index % 4 == 0) {
        page.requests.push_back(MakeRequest(
            "http://widgets" + std::to_string((js_index / 4) % 60) + ".tailcdn.net/embed.js",
            "application/javascript", plan.uri, next_ts()));
      }
      ++js_index;
    }
    if (plan.request) {
      if (request_index % 3 == 0) {
        page.requests.push_back(MakeRequest(
            "http://px" + std::to_string((request_index / 3) % 50) + ".pixeltail.org/p.gif",
            "image/gif", plan.uri, next_ts()));
      }
      ++request_index;
    }
    if (plan.host.ends_with(".blogspot.com")) {
      page.requests.push_back(MakeRequest(
          "http://resources.blogblog.com/img/widgets/arrow_dropdown.gif", "image/gif",
          plan.uri, next_ts()));
      page.requests.push_back(MakeRequest(
          "http://healthblog" + std::to_string((plan.local + 1) % kBlogPages) +
              ".blogspot.com/favicon.ico",
          "image/x-icon", plan.uri, next_ts()));
    }

    for (const CapturedRequest& request : page.requests) {
      for (const std::string& header : request.set_cookies) {
        if (auto cookie = ParseSetCookie(header, request.uri, request.timestamp)) {
          cookie->source = CapturedCookie::Source::kHeader;
          page.cookies.push_back(std::move(*cookie));
        }
      }
    }
    if (plan.javascript) {
      CapturedCookie ga;
      ga.name = "_ga";
      ga.domain_attribute = site;
      ga.host_wide = true;
      ga.source = CapturedCookie::Source::kScript;
      ga.timestamp = ts;
      page.cookies.push_back(std::move(ga));
    }
    corpus.page_uris.push_back(page.final_uri);
    corpus.pages.push_back(std::move(page));
  }

  for (int i = 0; i < kTimeoutPages + kErrorPages; ++i) {
    PageLoadResult page;
    const bool timeout = i < kTimeoutPages;
    page.requested_uri = "http://www.slowclinic" + std::to_string(i) +
                         (timeout ? ".com" : ".invalid") + PagePath(i);
    page.started_at = epoch + seconds(40 * (kLoadedPages + i));
    page.status = timeout ? LoadStatus::Timeout() : LoadStatus::Failed("dns");
    if (timeout) {
      page.final_uri = page.requested_uri;
      page.requests.push_back(MakeRequest(page.requested_uri, "text/html", "",
                                          page.started_at + milliseconds(5)));
      page.requests.back().referer.reset();
      page.requests.back().response_status.reset();
    }
    corpus.pages.push_back(std::move(page));
  }
  return corpus;
}

FixtureLayout WriteFixtureCorpus(const FixtureCorpus& corpus, const std::string& dir,
                                 size_t pages_per_file) {
  namespace fs = std::filesystem;
  FixtureLayout layout;
  layout.har_dir = (fs::path(dir) / "har").string();
  layout.ownership_db = (fs::path(dir) / "owners.txt").string();
  layout.page_list = (fs::path(dir) / "pages.txt").string();
  fs::create_directories(layout.har_dir);
  if (pages_per_file == 0) pages_per_file = 1;
  for (size_t begin = 0, part = 1; begin < corpus.pages.size();
       begin += pages_per_file, ++part) {
    size_t end = std::min(corpus.pages.size(), begin + pages_per_file);
    std::vector<PageLoadResult> chunk(corpus.pages.begin() + begin,
                                      corpus.pages.begin() + end);
    char name[32];
    std::snprintf(name, sizeof(name), "fixture-%05zu.har", part);
    WriteStringToFile((fs::path(layout.har_dir) / name).string(),
                      WriteHar(chunk, "trackscope-fixture"));
  }
  WriteStringToFile(layout.ownership_db, corpus.ownership_db);
  std::string list;
  for (const std::string& uri : corpus.page_uris) list += uri + "\n";
  WriteStringToFile(layout.page_list, list);
  return layout;
}

}  // namespace trackscope
