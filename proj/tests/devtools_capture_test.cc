#include "trackscope/devtools_capture.h"

#include <algorithm>
#include <chrono>
#include <filesystem>

#include "fake_devtools.h"
#include "gtest/gtest.h"
#include "test_support.h"
#include "trackscope/classify.h"
#include "trackscope/digest.h"
#include "trackscope/har.h"

namespace trackscope {
namespace {

using testing::FakeDevTools;
using testing::FakePage;
using testing::FakeRequest;

const std::string kCli = TRACKSCOPE_CLI;

// Two-host site: a health page on one registrable domain that pulls a
// script and a beacon from a tracker on another.
FakePage HealthPage(const std::string& url) {
  FakePage page;
  page.url = url;
  page.document_set_cookie = "session=abc; Path=/";
  page.requests = {
      {"http://www.healthsite.com/static/site.css", "Stylesheet", 200, "text/css", ""},
      {"http://cdn.tracker-example.com/t.js", "Script", 200, "application/javascript",
       ""},
      {"http://px.tracker-example.com/b?u=1", "Image", 200, "image/gif",
       "uid=42; Domain=.tracker-example.com; Path=/\nseen=1; Path=/", true},
  };
  page.script_cookies = {{"_ga", ".healthsite.com"}};
  return page;
}

PageListEntry Entry(const std::string& uri) {
  PageListEntry entry;
  entry.normalized_uri = uri;
  return entry;
}

CaptureSettings Settings(const FakeDevTools& browser, int settle = 1, int hard = 5) {
  CaptureSettings settings;
  settings.endpoint_port = browser.port();
  settings.settle_seconds = settle;
  settings.hard_timeout_seconds = hard;
  return settings;
}

TEST(DevToolsCaptureTest, RecordsRequestsHeadersAndCookies) {
  const std::string url = "http://www.healthsite.com/conditions/hiv/";
  FakeDevTools browser({HealthPage(url)});
  PageLoadResult result = CaptureLive(Entry(url), Settings(browser));

  EXPECT_EQ(result.status, LoadStatus::Loaded());
  EXPECT_EQ(result.requested_uri, url);
  EXPECT_EQ(result.final_uri, url);
  EXPECT_EQ(result.settle_seconds, 1);
  ASSERT_EQ(result.requests.size(), 4u);
  EXPECT_EQ(result.requests[0].uri, url);
  EXPECT_EQ(result.requests[0].response_status, 200);
  EXPECT_EQ(result.requests[0].user_agent, "FakeChrome/1.0");
  EXPECT_EQ(result.requests[2].uri, "http://cdn.tracker-example.com/t.js");
  EXPECT_EQ(result.requests[2].referer, url);
  EXPECT_EQ(result.requests[2].content_type, "application/javascript");
  EXPECT_EQ(result.requests[3].set_cookies.size(), 2u);
  for (const CapturedRequest& request : result.requests)
    EXPECT_GE(request.timestamp, result.started_at);

  ASSERT_EQ(result.cookies.size(), 4u);
  EXPECT_EQ(result.cookies[0].name, "session");
  EXPECT_EQ(result.cookies[0].domain_attribute, "www.healthsite.com");
  EXPECT_EQ(result.cookies[1].name, "uid");
  EXPECT_EQ(result.cookies[1].domain_attribute, "tracker-example.com");
  EXPECT_TRUE(result.cookies[1].host_wide);
  EXPECT_EQ(result.cookies[1].source, CapturedCookie::Source::kHeader);
  EXPECT_EQ(result.cookies[1].setter_uri, "http://px.tracker-example.com/b?u=1");
  EXPECT_EQ(result.cookies[2].name, "seen");
  EXPECT_EQ(result.cookies[2].domain_attribute, "px.tracker-example.com");
  EXPECT_EQ(result.cookies[3].name, "_ga");
  EXPECT_EQ(result.cookies[3].source, CapturedCookie::Source::kScript);

  PageAnalysis analysis = AnalyzePage(result, testing::BundledRuleset());
  EXPECT_TRUE(analysis.flags.has_third_party_request);
  EXPECT_TRUE(analysis.flags.has_third_party_javascript);
  EXPECT_TRUE(analysis.flags.has_third_party_cookie);
  ASSERT_EQ(analysis.third_party_domains.size(), 1u);
  EXPECT_EQ(analysis.third_party_domains.begin()->value, "tracker-example.com");
}

TEST(DevToolsCaptureTest, FollowsRedirects) {
  FakePage page = HealthPage("http://healthsite.com/conditions/hiv/");
  page.redirect_to = "https://www.healthsite.com/conditions/hiv/";
  FakeDevTools browser({page});
  PageLoadResult result = CaptureLive(Entry(page.url), Settings(browser));
  EXPECT_EQ(result.status, LoadStatus::Loaded());
  EXPECT_EQ(result.requested_uri, "http://healthsite.com/conditions/hiv/");
  EXPECT_EQ(result.final_uri, "https://www.healthsite.com/conditions/hiv/");
  ASSERT_GE(result.requests.size(), 2u);
  EXPECT_EQ(result.requests[0].response_status, 301);
  EXPECT_EQ(result.requests[1].uri, page.redirect_to);
}

TEST(DevToolsCaptureTest, FreshContextPerPage) {
  std::vector<FakePage> pages;
  std::vector<PageListEntry> entries;
  for (int i = 0; i < 5; ++i) {
    std::string url = "http://www.healthsite.com/conditions/" + std::to_string(i) + "/";
    pages.push_back(HealthPage(url));
    entries.push_back(Entry(url));
  }
  FakeDevTools browser(pages);
  std::vector<size_t> reported;
  std::vector<PageLoadResult> results =
      CaptureAll(entries, Settings(browser), 2,
                 [&](size_t index, const PageLoadResult&) { reported.push_back(index); });
  ASSERT_EQ(results.size(), 5u);
  for (size_t i = 0; i < results.size(); ++i) {
    EXPECT_EQ(results[i].requested_uri, entries[i].normalized_uri);
    EXPECT_EQ(results[i].status, LoadStatus::Loaded());
    // Script cookies from earlier pages never leak into later captures.
    EXPECT_EQ(std::count_if(results[i].cookies.begin(), results[i].cookies.end(),
                            [](const CapturedCookie& c) { return c.name == "_ga"; }),
              1);
  }
  std::sort(reported.begin(), reported.end());
  EXPECT_EQ(reported, (std::vector<size_t>{0, 1, 2, 3, 4}));
  EXPECT_EQ(browser.contexts_created(), 5);
  EXPECT_EQ(browser.contexts_disposed(), 5);
}

TEST(DevToolsCaptureTest, DnsFailure) {
  FakeDevTools browser({});
  PageLoadResult result =
      CaptureLive(Entry("http://nowhere.invalid/"), Settings(browser));
  EXPECT_EQ(result.status, LoadStatus::Failed("dns"));
  EXPECT_EQ(browser.contexts_created(), browser.contexts_disposed());
}

TEST(DevToolsCaptureTest, OtherNavigationError) {
  FakePage page;
  page.url = "http://www.healthsite.com/refused/";
  page.navigate_error = "net::ERR_CONNECTION_REFUSED";
  FakeDevTools browser({page});
  EXPECT_EQ(CaptureLive(Entry(page.url), Settings(browser)).status,
            LoadStatus::Failed("ERR_CONNECTION_REFUSED"));
}

TEST(DevToolsCaptureTest, MissingLoadEventTimesOutKeepingPartialData) {
  FakePage page = HealthPage("http://www.healthsite.com/slow/");
  page.fire_load = false;
  FakeDevTools browser({page});
  auto start = std::chrono::steady_clock::now();
  PageLoadResult result = CaptureLive(Entry(page.url), Settings(browser, 1, 2));
  auto elapsed = std::chrono::steady_clock::now() - start;
  EXPECT_EQ(result.status, LoadStatus::Timeout());
  EXPECT_EQ(result.requests.size(), 4u);
  EXPECT_GE(elapsed, std::chrono::milliseconds(1900));
  EXPECT_LT(elapsed, std::chrono::seconds(6));
}

TEST(DevToolsCaptureTest, UnreachableEndpoint) {
  uint16_t port;
  {
    FakeDevTools closed({});
    port = closed.port();
  }
  CaptureSettings settings;
  settings.endpoint_port = port;
  settings.hard_timeout_seconds = 2;
  settings.settle_seconds = 1;
  PageLoadResult result = CaptureLive(Entry("http://www.healthsite.com/"), settings);
  EXPECT_EQ(result.status, LoadStatus::Failed("endpoint"));
}

TEST(DevToolsCaptureTest, ScanStageWritesHarThatAnalyzes) {
  std::vector<FakePage> pages;
  std::string list;
  for (int i = 0; i < 3; ++i) {
    std::string url = "http://www.healthsite.com/conditions/" + std::to_string(i) + "/";
    pages.push_back(HealthPage(url));
    list += url + "\n";
  }
  FakeDevTools browser(pages);
  testing::ScopedTempDir dir;
  WriteStringToFile((dir.path() / "pages.txt").string(), list);
  std::string output;
  int status = testing::RunCommand(
      kCli + " run --stages scan,analyze,report --settle-seconds 1 --hard-timeout-seconds 5" +
          " --endpoint " + browser.endpoint() + " --page-list '" +
          (dir.path() / "pages.txt").string() + "' --run-dir '" +
          (dir.path() / "run").string() + "'",
      &output);
  ASSERT_EQ(status, 0) << output;
  std::vector<PageLoadResult> captured;
  for (const auto& file : std::filesystem::directory_iterator(dir.path() / "run" / "har")) {
    for (PageLoadResult& page : IngestHarFile(file.path().string()))
      captured.push_back(std::move(page));
  }
  ASSERT_EQ(captured.size(), 3u);
  for (const PageLoadResult& page : captured) EXPECT_EQ(page.requests.size(), 4u);
  std::string summary = ReadFileToString((dir.path() / "run" / "report" / "summary.json").string());
  EXPECT_NE(summary.find("\"pct_third_party_cookies\": \"100.00\""), std::string::npos)
      << summary;
}

}  // namespace
}  // namespace trackscope
