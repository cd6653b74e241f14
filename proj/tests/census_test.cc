#include "trackscope/census.h"

#include <random>

#include "gtest/gtest.h"
#include "test_support.h"
#include "trackscope/error.h"

namespace trackscope {
namespace {

using testing::BundledOwners;
using testing::BundledRuleset;
using testing::FixtureOwners;
using testing::FixtureRecords;

CensusConfig FixtureConfig() {
  return CensusConfig{kDefaultTopN, BundledRuleset().snapshot_id(),
                      FixtureOwners().version()};
}

ElementPrevalence Element(ExtensionClass::Kind kind) {
  return ElementPrevalence{"http://x/", {kind, ""}, 1, {}};
}

PageLoadResult GaPage() {
  PageLoadResult page;
  page.requested_uri = page.final_uri = "http://www.cdc.gov/hiv/";
  page.status = LoadStatus::Loaded();
  CapturedRequest document;
  document.uri = page.final_uri;
  CapturedRequest ga;
  ga.uri = "http://www.google-analytics.com/ga.js?SITEID=1";
  page.requests = {document, ga};
  return page;
}

TEST(ExtensionHistogramTest, Examples) {
  using K = ExtensionClass::Kind;
  ExtensionHistogram one = ComputeExtensionHistogram({Element(K::kJavascript)});
  EXPECT_EQ(one[K::kJavascript], 100);
  EXPECT_EQ(one[K::kOther], 0);
  ExtensionHistogram two =
      ComputeExtensionHistogram({Element(K::kJavascript), Element(K::kImage)});
  EXPECT_EQ(two[K::kJavascript], 50);
  EXPECT_EQ(two[K::kImage], 50);
}

TEST(ExtensionHistogramTest, SumsToHundredUnderRounding) {
  using K = ExtensionClass::Kind;
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<ElementPrevalence> elements(1 + rng() % 40);
    for (auto& e : elements) e = Element(static_cast<K>(rng() % 5));
    ExtensionHistogram h = ComputeExtensionHistogram(elements);
    int64_t total = 0;
    for (const auto& [kind, value] : h) {
      EXPECT_GE(value, 0);
      total += value;
    }
    EXPECT_EQ(total, 100);
  }
}

TEST(ExtensionHistogramTest, OvershootIsGivenBack) {
  using K = ExtensionClass::Kind;
  // 1/3 each rounds to 33; Other takes the residual.
  ExtensionHistogram h = ComputeExtensionHistogram(
      {Element(K::kJavascript), Element(K::kImage), Element(K::kDynamicPage)});
  EXPECT_EQ(h[K::kJavascript] + h[K::kImage] + h[K::kDynamicPage] + h[K::kOther], 100);
  // 3/8 + 3/8 + 1/8 + 1/8 rounds to 38 + 38 + 13 + 13 = 102.
  std::vector<ElementPrevalence> eight;
  for (K k : {K::kNoExtension, K::kNoExtension, K::kNoExtension, K::kJavascript,
              K::kJavascript, K::kJavascript, K::kImage, K::kDynamicPage})
    eight.push_back(Element(k));
  ExtensionHistogram g = ComputeExtensionHistogram(eight);
  EXPECT_EQ(g[K::kNoExtension], 37);
  EXPECT_EQ(g[K::kJavascript], 37);
  EXPECT_EQ(g[K::kImage], 13);
  EXPECT_EQ(g[K::kDynamicPage], 13);
  EXPECT_EQ(g[K::kOther], 0);
}

TEST(SummarizeTest, EmptyCorpus) {
  try {
    Summarize({}, BundledOwners(), {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyCorpus);
  }
}

TEST(SummarizeTest, SingleGaPage) {
  CensusRecord record = BuildCensusRecord(GaPage(), BundledRuleset());
  CensusSummary summary =
      Summarize({record}, BundledOwners(), {10, "r", BundledOwners().version()});
  EXPECT_EQ(summary.all.third_party_requests.ToInteger(), "100");
  EXPECT_EQ(summary.all.third_party_javascript.ToInteger(), "100");
  ASSERT_EQ(summary.top_elements.size(), 1u);
  EXPECT_EQ(summary.top_elements[0].stripped_uri, "http://www.google-analytics.com/ga.js");
  EXPECT_EQ(summary.per_category.begin()->first.kind, TldCategory::Kind::kGov);
  ASSERT_EQ(summary.owner_ranking.owners.size(), 1u);
  EXPECT_EQ(summary.owner_ranking.owners[0].id, "google");
}

TEST(SummarizeTest, FailuresAreCountedNotAnalyzed) {
  PageLoadResult timeout = GaPage();
  timeout.status = LoadStatus::Timeout();
  PageLoadResult failed = GaPage();
  failed.requested_uri = "http://nowhere.invalid/";
  failed.status = LoadStatus::Failed("dns");
  std::vector<CensusRecord> records = {BuildCensusRecord(GaPage(), BundledRuleset()),
                                       BuildCensusRecord(timeout, BundledRuleset()),
                                       BuildCensusRecord(failed, BundledRuleset())};
  CensusSummary summary = Summarize(records, BundledOwners(), {});
  EXPECT_EQ(summary.pages_total, 3u);
  EXPECT_EQ(summary.pages_loaded, 1u);
  EXPECT_EQ(summary.pages_timeout, 1u);
  EXPECT_EQ(summary.pages_error, 1u);
  ASSERT_EQ(summary.failures.size(), 2u);
  EXPECT_EQ(summary.failures[0].status, "error:dns");
}

TEST(SummarizeTest, FixtureFigures) {
  CensusSummary s = Summarize(FixtureRecords(), FixtureOwners(), FixtureConfig());
  EXPECT_EQ(s.pages_loaded, 10000u);
  EXPECT_EQ(s.all.third_party_requests.ToInteger(), "91");
  EXPECT_EQ(s.all.third_party_javascript.ToInteger(), "86");
  EXPECT_EQ(s.all.third_party_cookies.ToInteger(), "71");
  const auto& com = s.per_category.at(TldCategory::FromName("com"));
  EXPECT_EQ(com.third_party_requests.ToInteger(), "93");
  EXPECT_EQ(com.third_party_javascript.ToInteger(), "91");
  EXPECT_EQ(com.third_party_cookies.ToInteger(), "82");
  const auto& edu = s.per_category.at(TldCategory::FromName("edu"));
  EXPECT_EQ(edu.third_party_requests.ToInteger(), "76");
  EXPECT_EQ(edu.third_party_javascript.ToInteger(), "73");
  EXPECT_EQ(s.per_category.at(TldCategory::FromName("gov")).third_party_cookies.ToInteger(),
            "21");
  EXPECT_EQ(s.https_share.ToFixed2(), "3.24");
}

// Merging partial accumulators in any grouping and order gives the same
// summary as one sequential pass.
TEST(CensusAccumulatorTest, MergeIsAssociativeAndCommutative) {
  const auto& all = FixtureRecords();
  std::vector<CensusRecord> records;
  for (size_t i = 0; i < all.size(); i += 5) records.push_back(all[i]);
  const CensusConfig config = FixtureConfig();
  const CensusSummary expected = Summarize(records, FixtureOwners(), config);

  std::mt19937_64 rng(2014);
  for (int trial = 0; trial < 200; ++trial) {
    size_t parts = 2 + rng() % 7;
    std::vector<CensusAccumulator> partial(parts, CensusAccumulator(config));
    for (const CensusRecord& record : records)
      partial[rng() % parts].Add(record, FixtureOwners());
    std::shuffle(partial.begin(), partial.end(), rng);
    // Random binary merge tree.
    while (partial.size() > 1) {
      size_t i = rng() % (partial.size() - 1);
      partial[i].Merge(partial[i + 1]);
      partial.erase(partial.begin() + static_cast<long>(i) + 1);
    }
    ASSERT_EQ(partial[0].Finalize(FixtureOwners()), expected) << "trial " << trial;
  }
}

TEST(CensusAccumulatorTest, MergeWithEmptyIsIdentity) {
  CensusAccumulator a(FixtureConfig());
  a.Add(FixtureRecords()[0], FixtureOwners());
  CensusAccumulator copy = a;
  a.Merge(CensusAccumulator(FixtureConfig()));
  EXPECT_EQ(a, copy);
  CensusAccumulator empty;
  empty.Merge(copy);
  EXPECT_EQ(empty, copy);
}

TEST(CensusAccumulatorTest, DifferentConfigsRefuseToMerge) {
  CensusAccumulator a(FixtureConfig());
  a.Add(FixtureRecords()[0], FixtureOwners());
  CensusConfig other = FixtureConfig();
  other.ownership_version = "older";
  CensusAccumulator b(other);
  b.Add(FixtureRecords()[1], FixtureOwners());
  try {
    a.Merge(b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kVersionMismatch);
  }
  EXPECT_THROW(b.Finalize(FixtureOwners()), Error);
}

// Repeating requests on a page changes no percentage and no ranking.
TEST(CensusAccumulatorTest, MultiplicityInvariance) {
  const auto& pages = testing::Fixture().pages;
  std::vector<CensusRecord> original, duplicated;
  std::mt19937_64 rng(99);
  for (size_t i = 0; i < pages.size(); i += 7) {
    PageLoadResult page = pages[i];
    original.push_back(BuildCensusRecord(page, BundledRuleset()));
    std::vector<CapturedRequest> repeated;
    for (const CapturedRequest& request : page.requests) {
      size_t copies = 1 + rng() % 3;
      for (size_t c = 0; c < copies; ++c) repeated.push_back(request);
    }
    page.requests = std::move(repeated);
    duplicated.push_back(BuildCensusRecord(page, BundledRuleset()));
  }
  CensusSummary a = Summarize(original, FixtureOwners(), FixtureConfig());
  CensusSummary b = Summarize(duplicated, FixtureOwners(), FixtureConfig());
  EXPECT_GT(b.malformed_requests, 0u);
  b.malformed_requests = a.malformed_requests;
  EXPECT_EQ(a, b);
}

TEST(CensusRecordTest, OnlyThirdPartyElementsAreKept) {
  for (const CensusRecord& record : FixtureRecords()) {
    for (const ElementRecord& element : record.elements)
      ASSERT_NE(element.request_domain.value,
                GetRegistrableDomain(ParseUri(record.page_uri).host, BundledRuleset()).value);
  }
}

}  // namespace
}  // namespace trackscope
