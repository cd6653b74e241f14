// Writes the synthetic census corpus: HAR files, ownership db and page list.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "trackscope/error.h"
#include "trackscope/fixture_corpus.h"

int main(int argc, char** argv) {
  CLI::App app{"trackscope_fixture: write the synthetic census corpus"};
  std::string out;
  size_t pages_per_file = 100;
  app.add_option("--out", out, "output directory")->required();
  app.add_option("--pages-per-file", pages_per_file, "pages per HAR file")
      ->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);
  try {
    trackscope::FixtureLayout layout = trackscope::WriteFixtureCorpus(
        trackscope::GenerateFixtureCorpus(), out, pages_per_file);
    std::cout << "har_dir=" << layout.har_dir << "\n"
              << "ownership_db=" << layout.ownership_db << "\n"
              << "page_list=" << layout.page_list << "\n";
  } catch (const trackscope::Error& e) {
    std::cerr << "fixture:" << e.what() << "\n";
    return 1;
  }
  return 0;
}
