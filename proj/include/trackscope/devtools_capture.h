#ifndef TRACKSCOPE_DEVTOOLS_CAPTURE_H_
#define TRACKSCOPE_DEVTOOLS_CAPTURE_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "trackscope/capture.h"
#include "trackscope/page_list.h"

namespace trackscope {

struct CaptureSettings {
  std::string endpoint_host = "127.0.0.1";
  uint16_t endpoint_port = 9222;
  int settle_seconds = 30;
  int hard_timeout_seconds = 60;
};

// Loads one page in a headless browser reached over the DevTools remote
// debugging protocol and records every network request observed between
// navigation and the settle deadline.
//
// Each capture runs in a fresh browser context that is disposed afterwards,
// so no cookies carry over between pages. If the load event has not fired
// by the settle deadline the capture keeps listening until the hard
// timeout, then reports Timeout with whatever was recorded.
//
// Failures are reported in the result status, never thrown:
//   Error("endpoint")  the browser endpoint is unreachable or misbehaves
//   Error("dns")       the page host did not resolve
//   Error(<net error>) any other navigation failure
PageLoadResult CaptureLive(const PageListEntry& entry,
                           const CaptureSettings& settings);

// Captures pages with up to `parallelism` concurrent browser contexts.
// Results keep the input order. `on_result` (optional) is called from a
// single thread as each capture finishes.
std::vector<PageLoadResult> CaptureAll(
    const std::vector<PageListEntry>& entries, const CaptureSettings& settings,
    int parallelism,
    const std::function<void(size_t, const PageLoadResult&)>& on_result = {});

}  // namespace trackscope

#endif  // TRACKSCOPE_DEVTOOLS_CAPTURE_H_
