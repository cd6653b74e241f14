#ifndef TRACKSCOPE_FIXTURE_CORPUS_H_
#define TRACKSCOPE_FIXTURE_CORPUS_H_

#include <string>
#include <vector>

#include "trackscope/capture.h"

namespace trackscope {

// Synthetic census corpus with known ground truth.
//
// 10,000 loaded pages (6,000 .com, 2,000 .org, 1,000 .gov, 1,000 .edu) plus
// timed-out and failed loads. Third-party requests, Javascript and cookies
// are placed so that the per-category page counts, the owner reach of 47
// owners, the class mix of the 100 most common elements and the HTTPS share
// are fixed by construction. Generation is deterministic.
struct FixtureCorpus {
  std::vector<PageLoadResult> pages;
  std::string ownership_db;            // file text
  std::vector<std::string> page_uris;  // final URI of every loaded page
};

FixtureCorpus GenerateFixtureCorpus();

struct FixtureLayout {
  std::string har_dir;
  std::string ownership_db;
  std::string page_list;
};

// Writes `<dir>/har/fixture-NNNNN.har` (pages_per_file pages each),
// `<dir>/owners.txt` and `<dir>/pages.txt`.
FixtureLayout WriteFixtureCorpus(const FixtureCorpus& corpus,
                                 const std::string& dir,
                                 size_t pages_per_file = 100);

}  // namespace trackscope

#endif  // TRACKSCOPE_FIXTURE_CORPUS_H_
