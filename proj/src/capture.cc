#include "trackscope/capture.h"

#include <charconv>
#include <cstdio>

#include "trackscope/uri.h"

namespace trackscope {

namespace {

bool ReadInt(std::string_view text, size_t pos, size_t width, int& out) {
  if (pos + width > text.size()) return false;
  const char* begin = text.data() + pos;
  auto [ptr, ec] = std::from_chars(begin, begin + width, out);
  return ec == std::errc() && ptr == begin + width;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

}  // namespace

std::optional<Timestamp> ParseIsoTimestamp(std::string_view text) {
  using namespace std::chrono;
  int y, mo, d, h, mi, s;
  if (!ReadInt(text, 0, 4, y) || text.size() < 19 || text[4] != '-' ||
      !ReadInt(text, 5, 2, mo) || text[7] != '-' || !ReadInt(text, 8, 2, d) ||
      (text[10] != 'T' && text[10] != ' ') || !ReadInt(text, 11, 2, h) ||
      text[13] != ':' || !ReadInt(text, 14, 2, mi) || text[16] != ':' ||
      !ReadInt(text, 17, 2, s)) {
    return std::nullopt;
  }
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                     day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) return std::nullopt;

  size_t pos = 19;
  int millis = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    int digits = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      if (digits < 3) millis = millis * 10 + (text[pos] - '0');
      ++digits;
      ++pos;
    }
    if (digits == 0) return std::nullopt;
    for (int i = digits; i < 3; ++i) millis *= 10;
  }
  minutes offset{0};
  if (pos < text.size()) {
    char sign = text[pos];
    if (sign == 'Z' && pos + 1 == text.size()) {
      ++pos;
    } else if ((sign == '+' || sign == '-') && pos + 6 == text.size() &&
               text[pos + 3] == ':') {
      int oh, om;
      if (!ReadInt(text, pos + 1, 2, oh) || !ReadInt(text, pos + 4, 2, om))
        return std::nullopt;
      offset = minutes(oh * 60 + om);
      if (sign == '-') offset = -offset;
      pos += 6;
    } else {
      return std::nullopt;
    }
  }
  auto tp = sys_days(ymd) + hours(h) + minutes(mi) + seconds(s) +
            milliseconds(millis) - offset;
  return time_point_cast<milliseconds>(tp);
}

std::string FormatIsoTimestamp(Timestamp ts) {
  using namespace std::chrono;
  auto days_part = floor<days>(ts);
  year_month_day ymd(days_part);
  auto rest = ts - days_part;
  auto h = duration_cast<hours>(rest);
  rest -= h;
  auto mi = duration_cast<minutes>(rest);
  rest -= mi;
  auto s = duration_cast<seconds>(rest);
  rest -= s;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<int>(h.count()),
                static_cast<int>(mi.count()), static_cast<int>(s.count()),
                static_cast<int>(rest.count()));
  return buf;
}

std::string LoadStatus::ToString() const {
  switch (kind) {
    case Kind::kLoaded: return "loaded";
    case Kind::kTimeout: return "timeout";
    case Kind::kError: return "error:" + reason;
  }
  return "error:" + reason;
}

std::optional<LoadStatus> LoadStatus::FromString(std::string_view text) {
  if (text == "loaded") return Loaded();
  if (text == "timeout") return Timeout();
  if (text.substr(0, 6) == "error:") return Failed(std::string(text.substr(6)));
  return std::nullopt;
}

std::string_view CookieSourceName(CapturedCookie::Source source) {
  switch (source) {
    case CapturedCookie::Source::kHeader: return "header";
    case CapturedCookie::Source::kScript: return "script";
    case CapturedCookie::Source::kUnknown: return "unknown";
  }
  return "unknown";
}

std::optional<CapturedCookie::Source> CookieSourceFromName(
    std::string_view name) {
  if (name == "header") return CapturedCookie::Source::kHeader;
  if (name == "script") return CapturedCookie::Source::kScript;
  if (name == "unknown") return CapturedCookie::Source::kUnknown;
  return std::nullopt;
}

std::optional<CapturedCookie> ParseSetCookie(std::string_view header,
                                             std::string_view setter_uri,
                                             Timestamp timestamp) {
  size_t semi = header.find(';');
  std::string_view pair = Trim(header.substr(0, semi));
  size_t eq = pair.find('=');
  if (eq == std::string_view::npos) return std::nullopt;
  std::string_view name = Trim(pair.substr(0, eq));
  if (name.empty()) return std::nullopt;

  CapturedCookie cookie;
  cookie.name = std::string(name);
  cookie.source = CapturedCookie::Source::kHeader;
  cookie.timestamp = timestamp;
  if (!setter_uri.empty()) cookie.setter_uri = std::string(setter_uri);

  std::string_view attrs =
      semi == std::string_view::npos ? std::string_view() : header.substr(semi + 1);
  std::string domain;
  while (!attrs.empty()) {
    size_t next = attrs.find(';');
    std::string_view attr = Trim(attrs.substr(0, next));
    attrs = next == std::string_view::npos ? std::string_view()
                                           : attrs.substr(next + 1);
    size_t aeq = attr.find('=');
    if (aeq == std::string_view::npos) continue;
    if (ToLowerAscii(Trim(attr.substr(0, aeq))) == "domain") {
      domain = ToLowerAscii(Trim(attr.substr(aeq + 1)));
    }
  }
  if (!domain.empty() && domain.front() == '.') {
    cookie.host_wide = true;
    domain.erase(0, domain.find_first_not_of('.'));
  }
  if (domain.empty()) {
    if (auto setter = TryParseUri(setter_uri)) {
      domain = setter->host;
    } else {
      cookie.source = CapturedCookie::Source::kUnknown;
    }
  }
  cookie.domain_attribute = std::move(domain);
  return cookie;
}

}  // namespace trackscope
