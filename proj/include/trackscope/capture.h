#ifndef TRACKSCOPE_CAPTURE_H_
#define TRACKSCOPE_CAPTURE_H_

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace trackscope {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

// Accepts "YYYY-MM-DDTHH:MM:SS[.fff](Z|+HH:MM|-HH:MM)".
std::optional<Timestamp> ParseIsoTimestamp(std::string_view text);
// Always UTC with millisecond precision: "2014-04-01T12:00:00.000Z".
std::string FormatIsoTimestamp(Timestamp ts);

struct LoadStatus {
  enum class Kind { kLoaded, kTimeout, kError };
  Kind kind = Kind::kLoaded;
  std::string reason;  // only meaningful for kError

  static LoadStatus Loaded() { return {Kind::kLoaded, {}}; }
  static LoadStatus Timeout() { return {Kind::kTimeout, {}}; }
  static LoadStatus Failed(std::string reason) {
    return {Kind::kError, std::move(reason)};
  }

  // "loaded", "timeout" or "error:<reason>".
  std::string ToString() const;
  static std::optional<LoadStatus> FromString(std::string_view text);

  bool operator==(const LoadStatus&) const = default;
};

struct CapturedRequest {
  std::string uri;
  std::string method = "GET";
  std::optional<std::string> referer;     // verbatim
  std::optional<std::string> user_agent;  // verbatim
  std::optional<int> response_status;
  std::optional<std::string> content_type;
  std::vector<std::string> set_cookies;   // raw Set-Cookie header values
  Timestamp timestamp{};

  bool operator==(const CapturedRequest&) const = default;
};

struct CapturedCookie {
  enum class Source { kHeader, kScript, kUnknown };

  std::string name;
  std::string domain_attribute;  // lowercase, leading dot removed
  bool host_wide = false;        // the attribute carried a leading dot
  Source source = Source::kUnknown;
  Timestamp timestamp{};
  // URI of the response that set it, when known.
  std::optional<std::string> setter_uri;

  bool operator==(const CapturedCookie&) const = default;
};

std::string_view CookieSourceName(CapturedCookie::Source source);
std::optional<CapturedCookie::Source> CookieSourceFromName(
    std::string_view name);

// Parses a Set-Cookie header value. An absent Domain attribute falls back to
// the host of `setter_uri`; when that cannot be determined the cookie keeps
// an empty domain and Unknown source.
std::optional<CapturedCookie> ParseSetCookie(std::string_view header,
                                             std::string_view setter_uri,
                                             Timestamp timestamp);

struct PageLoadResult {
  std::string requested_uri;
  std::string final_uri;
  LoadStatus status;
  Timestamp started_at{};
  int settle_seconds = 30;
  std::vector<CapturedRequest> requests;
  std::vector<CapturedCookie> cookies;

  bool operator==(const PageLoadResult&) const = default;
};

}  // namespace trackscope

#endif  // TRACKSCOPE_CAPTURE_H_
