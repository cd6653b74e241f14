// Acceptance checks for the census toolkit. Prints one line per criterion:
//   PASS|FAIL|SKIP <n> <name>: <detail>
// and exits non-zero when any criterion fails.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "psl_oracle.h"
#include "test_support.h"
#include "trackscope/classify.h"
#include "trackscope/devtools_capture.h"
#include "trackscope/digest.h"
#include "trackscope/fixture_corpus.h"
#include "trackscope/leakage.h"
#include "trackscope/ownership.h"
#include "trackscope/uri.h"

namespace trackscope {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::string kCli = TRACKSCOPE_CLI;

enum class Verdict { kPass, kFail, kSkip };

struct Outcome {
  Verdict verdict = Verdict::kPass;
  std::vector<std::string> problems;
  std::string detail;

  void Expect(bool ok, const std::string& what) {
    if (!ok) {
      verdict = Verdict::kFail;
      problems.push_back(what);
    }
  }
};

std::string Quote(const fs::path& path) { return "'" + path.string() + "'"; }

// Rows of a CSV table, skipping the '#' preamble and the header row.
std::vector<std::vector<std::string>> CsvRows(const fs::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(ReadFileToString(path.string()));
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream cell_stream(line);
    std::string cell;
    while (std::getline(cell_stream, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

// Generates the fixture corpus once; shared by criteria 1, 2 and 5.
struct FixtureOnDisk {
  testing::ScopedTempDir dir;
  FixtureLayout layout;
  double generate_seconds = 0;

  FixtureOnDisk() {
    auto start = std::chrono::steady_clock::now();
    layout = WriteFixtureCorpus(testing::Fixture(), (dir.path() / "fixture").string());
    generate_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

int RunOffline(const FixtureOnDisk& fixture, const fs::path& run_dir, std::string* output) {
  return testing::RunCommand(kCli + " run --stages analyze,report,leakage --har-dir " +
                                 Quote(fixture.layout.har_dir) + " --ownership-db " +
                                 Quote(fixture.layout.ownership_db) + " --page-list " +
                                 Quote(fixture.layout.page_list) + " --run-dir " +
                                 Quote(run_dir),
                             output);
}

Outcome FixtureExactness(const FixtureOnDisk& fixture) {
  Outcome outcome;
  fs::path run = fixture.dir.path() / "run-a";
  auto start = std::chrono::steady_clock::now();
  std::string output;
  int status = RunOffline(fixture, run, &output);
  double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() +
      fixture.generate_seconds;
  if (status != 0) {
    outcome.Expect(false, "cli exited " + std::to_string(status) + ": " + output);
    return outcome;
  }
  fs::path csv = run / "report" / "csv";

  const std::map<std::string, std::vector<std::string>> prevalence = {
      {"all", {"91", "86", "71"}}, {"com", {"93", "91", "82"}}};
  std::map<std::string, std::vector<std::string>> got;
  for (const auto& row : CsvRows(csv / "prevalence_by_tld.csv"))
    if (row.size() == 5) got[row[0]] = {row[2], row[3], row[4]};
  for (const auto& [category, expected] : prevalence)
    outcome.Expect(got[category] == expected, category + " prevalence");
  outcome.Expect(got["edu"].size() == 3 && got["edu"][0] == "76" && got["edu"][1] == "73",
                 "edu prevalence");
  outcome.Expect(got["gov"].size() == 3 && got["gov"][2] == "21", "gov cookies");

  const std::vector<std::pair<std::string, std::string>> top_owners = {
      {"google", "78"},  {"comscore", "38"},  {"facebook", "31"}, {"appnexus", "22"},
      {"addthis", "18"}, {"twitter", "18"},   {"quantcast", "16"}, {"amazon", "16"},
      {"adobe", "11"},   {"yahoo", "11"}};
  std::vector<std::vector<std::string>> owners = CsvRows(csv / "owner_ranking.csv");
  for (size_t i = 0; i < top_owners.size(); ++i) {
    bool ok = i < owners.size() && owners[i].size() == 2 &&
              owners[i][0] == top_owners[i].first && owners[i][1] == top_owners[i].second;
    outcome.Expect(ok, "owner rank " + std::to_string(i + 1));
  }
  auto rank_of = [&](const std::string& id) -> std::pair<size_t, std::string> {
    for (size_t i = 0; i < owners.size(); ++i)
      if (owners[i][0] == id) return {i + 1, owners[i][1]};
    return {0, ""};
  };
  outcome.Expect(rank_of("experian") == std::make_pair(size_t{31}, std::string("5")),
                 "experian rank 31 at 5");
  outcome.Expect(rank_of("acxiom") == std::make_pair(size_t{47}, std::string("3")),
                 "acxiom rank 47 at 3");

  std::map<std::string, std::string> histogram;
  for (const auto& row : CsvRows(csv / "extension_histogram.csv"))
    if (row.size() == 2) histogram[row[0]] = row[1];
  outcome.Expect(histogram == std::map<std::string, std::string>{{"no_extension", "47"},
                                                                 {"javascript", "33"},
                                                                 {"image", "8"},
                                                                 {"dynamic_page", "4"},
                                                                 {"other", "8"}},
                 "extension histogram");

  json summary = json::parse(ReadFileToString((run / "report" / "summary.json").string()));
  outcome.Expect(summary["https_share"] == "3.24", "https share");
  outcome.Expect(summary["pages_loaded"] == 10000, "10000 loaded pages");
  // Two-decimal rendering must agree with the integers: the fixture is exact.
  const json& all = summary["prevalence"]["all"];
  outcome.Expect(all["pct_third_party_requests"] == "91.00" &&
                     all["pct_third_party_javascript"] == "86.00" &&
                     all["pct_third_party_cookies"] == "71.00",
                 "two-decimal overall prevalence");
  outcome.Expect(summary["owner_ranking"]["owners"][0]["percent"] == "78.00",
                 "two-decimal google reach");

  outcome.Expect(seconds < 60, "runtime " + std::to_string(seconds) + " s");
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "%zu HAR pages, overall 91/86/71, google 78, histogram 47/33/8/4/8, "
                "https 3.24, %.1f s",
                testing::Fixture().pages.size(), seconds);
  outcome.detail = detail;
  return outcome;
}

Outcome PartyOracle() {
  Outcome outcome;
  testing::BruteForcePsl oracle(ReadFileToString(testing::DataPath("public_suffix_list.dat")));
  const PublicSuffixRuleset& ruleset = testing::BundledRuleset();
  std::map<std::string, std::string> oracle_cache;
  auto oracle_domain = [&](const std::string& host) -> const std::string& {
    auto it = oracle_cache.find(host);
    if (it != oracle_cache.end()) return it->second;
    return oracle_cache[host] = oracle.RegistrableDomain(host).value_or(host);
  };

  size_t compared = 0, mismatches = 0, unparseable = 0;
  std::string first_mismatch;
  for (const PageLoadResult& page : testing::Fixture().pages) {
    if (page.status.kind != LoadStatus::Kind::kLoaded) continue;
    ParsedUri page_uri = ParseUri(page.final_uri);
    RegistrableDomain page_domain = DomainOrSelf(page_uri.host, ruleset);
    const std::string& page_oracle = oracle_domain(page_uri.host);
    for (const CapturedRequest& request : page.requests) {
      auto uri = TryParseUri(request.uri);
      if (!uri) {
        ++unparseable;
        continue;
      }
      ++compared;
      PartyClass got = ClassifyParty(page_domain, DomainOrSelf(uri->host, ruleset));
      PartyClass want = page_oracle == oracle_domain(uri->host) ? PartyClass::kFirstParty
                                                               : PartyClass::kThirdParty;
      if (got != want) {
        if (mismatches++ == 0) first_mismatch = page.final_uri + " -> " + request.uri;
      }
    }
  }
  outcome.Expect(compared >= 5000, "fewer than 5000 requests compared");
  outcome.Expect(mismatches == 0, std::to_string(mismatches) + " mismatches, first " +
                                      first_mismatch);
  outcome.detail = std::to_string(compared) + " requests, " + std::to_string(mismatches) +
                   " mismatches, " + std::to_string(oracle_cache.size()) +
                   " distinct hosts, " + std::to_string(oracle.rule_count()) +
                   " rules, " + std::to_string(unparseable) + " unparseable skipped";
  return outcome;
}

Outcome WorkedExamples() {
  Outcome outcome;
  const PublicSuffixRuleset& ruleset = testing::BundledRuleset();
  const OwnershipDb& owners = testing::BundledOwners();
  Lexicon lexicon = Lexicon::LoadFile(testing::DataPath("lexicon.txt"));

  outcome.Expect(ClassifyParty(DomainOrSelf("example.com", ruleset),
                               DomainOrSelf("images.example.com", ruleset)) ==
                     PartyClass::kFirstParty,
                 "images.example.com first party");
  outcome.Expect(ClassifyParty(DomainOrSelf("example.com", ruleset),
                               DomainOrSelf("google-analytics.com", ruleset)) ==
                     PartyClass::kThirdParty,
                 "google-analytics.com third party");
  outcome.Expect(ResolveOwner({"2mdn.net"}, owners) == "google", "2mdn.net -> google");
  outcome.Expect(ResolveOwner({"fbcdn.net"}, owners) == "facebook", "fbcdn.net -> facebook");
  outcome.Expect(
      DetectSensitive(ParseUri("http://www.nhs.uk/conditions/breast-lump/pages/"
                               "introduction.aspx"),
                      lexicon)
          .sensitive,
      "nhs.uk breast-lump sensitive");
  outcome.Expect(
      !DetectSensitive(ParseUri("http://www.ncbi.nlm.nih.gov/pubmed/21722252"), lexicon)
           .sensitive,
      "pubmed numeric not sensitive");

  CapturedRequest ga;
  ga.uri = "http://www.google-analytics.com/ga.js?SITEID=UA-12345-1";
  ElementRecord ga_element = ClassifyElement(ga, ruleset);
  outcome.Expect(ga_element.stripped_uri == "http://www.google-analytics.com/ga.js" &&
                     ga_element.extension_class.kind == ExtensionClass::Kind::kJavascript,
                 "ga.js stripped javascript element");
  CapturedRequest pixel;
  pixel.uri = "http://www.google-analytics.com/__utm.gif?utmwv=5.4.3&utmn=123";
  outcome.Expect(ClassifyElement(pixel, ruleset).extension_class.kind ==
                     ExtensionClass::Kind::kImage,
                 "__utm.gif image");
  outcome.detail = "8 examples";
  return outcome;
}

Outcome PropertySuites() {
  Outcome outcome;
  struct Suite {
    const char* binary;
    const char* filter;
    const char* name;
  };
  const Suite suites[] = {
      {TRACKSCOPE_CENSUS_TEST, "CensusAccumulatorTest.MergeIsAssociativeAndCommutative",
       "merge associativity/commutativity"},
      {TRACKSCOPE_CENSUS_TEST, "CensusAccumulatorTest.MultiplicityInvariance",
       "multiplicity invariance"},
      {TRACKSCOPE_CLASSIFY_TEST, "AnalyzePageTest.JavascriptImpliesRequestAcrossFixture",
       "js implies request"},
      {TRACKSCOPE_URI_TEST, "StripArgumentsTest.IdempotentOverRandomUris",
       "strip idempotence"},
      {TRACKSCOPE_LEAKAGE_TEST, "DetectSensitiveTest.MonotoneInLexicon",
       "lexicon monotonicity"},
      {TRACKSCOPE_LEAKAGE_TEST, "SampleTest.ReproducibleAcrossProcesses",
       "cross-process sample"},
  };
  size_t passed = 0;
  for (const Suite& suite : suites) {
    std::string output;
    int status = testing::RunCommand(std::string(suite.binary) + " --gtest_filter=" +
                                         suite.filter + " --gtest_brief=1",
                                     &output);
    bool ran = output.find("1 test") != std::string::npos;
    outcome.Expect(status == 0 && ran, suite.name);
    if (status == 0 && ran) ++passed;
  }
  outcome.detail = std::to_string(passed) + "/" + std::to_string(std::size(suites)) +
                   " property suites";
  return outcome;
}

Outcome Determinism(const FixtureOnDisk& fixture) {
  Outcome outcome;
  fs::path a = fixture.dir.path() / "run-a";
  fs::path b = fixture.dir.path() / "run-b";
  std::string output;
  if (!fs::exists(a / "records.jsonl") && RunOffline(fixture, a, &output) != 0) {
    outcome.Expect(false, "first run failed: " + output);
    return outcome;
  }
  if (RunOffline(fixture, b, &output) != 0) {
    outcome.Expect(false, "second run failed: " + output);
    return outcome;
  }
  size_t compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    fs::path relative = fs::relative(entry.path(), a);
    fs::path other = b / relative;
    bool same = fs::exists(other) &&
                Sha256Hex(ReadFileToString(entry.path().string())) ==
                    Sha256Hex(ReadFileToString(other.string()));
    outcome.Expect(same, relative.string() + " differs");
    ++compared;
  }
  size_t in_b = 0;
  for (const auto& entry : fs::recursive_directory_iterator(b))
    if (entry.is_regular_file()) ++in_b;
  outcome.Expect(in_b == compared, "artifact sets differ");
  outcome.Expect(compared >= 9, "expected records, summary, csv tables and leakage");
  outcome.detail = std::to_string(compared) + " artifacts with identical sha256 digests";
  return outcome;
}

// Serves a two-host health site on loopback. Both hosts live under
// .localhost, which browsers resolve to 127.0.0.1.
class FixtureSite {
 public:
  FixtureSite() {
    server_.Get(R"(/.*)", [this](const httplib::Request& request, httplib::Response& response) {
      std::string host = request.get_header_value("Host");
      host = host.substr(0, host.find(':'));
      if (host == "www.healthsite.localhost" && request.path == "/conditions/hiv/") {
        response.set_content(
            "<!doctype html><html><head><meta name=\"referrer\" content=\"unsafe-url\">"
            "<link rel=\"icon\" href=\"data:,\">"
            "<link rel=\"stylesheet\" href=\"/static/site.css\">"
            "<script src=\"http://tracker.localhost:" + std::to_string(port_) +
                "/t.js\"></script></head><body><h1>HIV</h1>"
                "<img src=\"http://tracker.localhost:" + std::to_string(port_) +
                "/px.gif?u=1\"></body></html>",
            "text/html");
      } else if (host == "www.healthsite.localhost" && request.path == "/static/site.css") {
        response.set_content("h1{color:#333}", "text/css");
      } else if (host == "tracker.localhost" && request.path == "/t.js") {
        response.set_header("Set-Cookie", "uid=42; Path=/");
        response.set_content("var tracked=1;", "application/javascript");
      } else if (host == "tracker.localhost" && request.path == "/px.gif") {
        static const char kGif[] = "GIF89a\x01\0\x01\0\x80\0\0\0\0\0\xff\xff\xff!\xf9\x04"
                                   "\x01\0\0\0\0,\0\0\0\0\x01\0\x01\0\0\x02\x02\x44\x01\0;";
        response.set_content(std::string(kGif, sizeof(kGif) - 1), "image/gif");
      } else {
        response.status = 404;
      }
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FixtureSite() {
    server_.stop();
    thread_.join();
  }

  std::string Url(const std::string& host, const std::string& path) const {
    return "http://" + host + ":" + std::to_string(port_) + path;
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

Outcome LiveCapture() {
  Outcome outcome;
  const char* endpoint = std::getenv("TRACKSCOPE_CDP_ENDPOINT");
  if (endpoint == nullptr || *endpoint == '\0') {
    outcome.verdict = Verdict::kSkip;
    outcome.detail = "set TRACKSCOPE_CDP_ENDPOINT=host:port of a headless browser to run";
    return outcome;
  }
  std::string text = endpoint;
  size_t colon = text.rfind(':');
  CaptureSettings settings;
  settings.endpoint_host = text.substr(0, colon);
  settings.endpoint_port = static_cast<uint16_t>(std::stoi(text.substr(colon + 1)));
  settings.settle_seconds = 3;
  settings.hard_timeout_seconds = 20;

  FixtureSite site;
  const std::string page = site.Url("www.healthsite.localhost", "/conditions/hiv/");
  PageListEntry entry;
  entry.normalized_uri = page;
  PageLoadResult result = CaptureLive(entry, settings);
  outcome.Expect(result.status == LoadStatus::Loaded(), "status " + result.status.ToString());

  const std::set<std::string> expected = {
      page, site.Url("www.healthsite.localhost", "/static/site.css"),
      site.Url("tracker.localhost", "/t.js"), site.Url("tracker.localhost", "/px.gif?u=1")};
  std::set<std::string> observed;
  for (const CapturedRequest& request : result.requests) {
    if (request.uri.rfind("data:", 0) == 0) continue;
    observed.insert(request.uri);
    if (request.uri == site.Url("tracker.localhost", "/t.js"))
      outcome.Expect(request.referer == page, "script Referer " + request.referer.value_or("<none>"));
  }
  outcome.Expect(observed == expected, "request set differs (" +
                                           std::to_string(observed.size()) + " observed)");
  PageAnalysis analysis = AnalyzePage(result, testing::BundledRuleset());
  outcome.Expect(analysis.flags.has_third_party_javascript, "third-party script not flagged");
  outcome.detail = std::to_string(observed.size()) + " requests observed via " + text;
  return outcome;
}

}  // namespace
}  // namespace trackscope

int main() {
  using namespace trackscope;
  bool failed = false;
  auto report = [&](int number, const char* name, const Outcome& outcome) {
    const char* label = outcome.verdict == Verdict::kPass   ? "PASS"
                        : outcome.verdict == Verdict::kSkip ? "SKIP"
                                                            : "FAIL";
    std::cout << label << " " << number << " " << name << ": " << outcome.detail;
    for (const std::string& problem : outcome.problems) std::cout << " [" << problem << "]";
    std::cout << std::endl;
    failed = failed || outcome.verdict == Verdict::kFail;
  };
  auto guarded = [](auto&& check) {
    try {
      return check();
    } catch (const std::exception& e) {
      Outcome outcome;
      outcome.Expect(false, std::string("exception: ") + e.what());
      return outcome;
    }
  };

  std::unique_ptr<FixtureOnDisk> fixture;
  try {
    fixture = std::make_unique<FixtureOnDisk>();
  } catch (const std::exception& e) {
    std::cerr << "fixture generation failed: " << e.what() << "\n";
  }
  auto needs_fixture = [&](auto&& check) {
    return guarded([&] {
      if (!fixture) throw std::runtime_error("no fixture corpus");
      return check(*fixture);
    });
  };
  report(1, "fixture census exactness", needs_fixture(FixtureExactness));
  report(2, "party classification oracle", guarded(PartyOracle));
  report(3, "worked examples", guarded(WorkedExamples));
  report(4, "property suites", guarded(PropertySuites));
  report(5, "determinism", needs_fixture(Determinism));
  report(6, "live capture smoke test", guarded(LiveCapture));
  return failed ? 1 : 0;
}
