#ifndef TRACKSCOPE_HAR_H_
#define TRACKSCOPE_HAR_H_

#include <string>
#include <string_view>
#include <vector>

#include "trackscope/capture.h"

namespace trackscope {

// Maps an HTTP Archive (1.1 or 1.2) document to one PageLoadResult per page
// object. Entries are attached through "pageref"; an archive without pages
// is treated as a single page. Cookies come from Set-Cookie response headers
// (source Header) plus the optional page-level "_cookies" extension.
//
// Extension fields read when present on a page: _requestedUrl, _finalUrl,
// _loadStatus ("loaded" | "timeout" | "error:<reason>"), _settleSeconds.
// Without them, the requested URI is the first entry and the final URI
// follows that entry's redirect chain.
//
// Throws Error(kSchemaError) for unparseable JSON or a missing log/entries.
std::vector<PageLoadResult> IngestHar(std::string_view document);

std::vector<PageLoadResult> IngestHarFile(const std::string& path);

// Inverse of IngestHar for results produced by this library: writes the
// extension fields so that IngestHar(WriteHar(pages)) == pages.
std::string WriteHar(const std::vector<PageLoadResult>& pages,
                     std::string_view creator = "trackscope");

}  // namespace trackscope

#endif  // TRACKSCOPE_HAR_H_
