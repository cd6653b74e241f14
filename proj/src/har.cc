#include "trackscope/har.h"

#include <map>
#include <unordered_map>

#include "json.hpp"
#include "trackscope/digest.h"
#include "trackscope/error.h"
#include "trackscope/uri.h"

namespace trackscope {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void SchemaError(const std::string& what) {
  throw Error(ErrorCode::kSchemaError, "HAR: " + what);
}

std::string StringField(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) return {};
  return it->get<std::string>();
}

std::optional<std::string> HeaderValue(const json& headers,
                                       std::string_view name) {
  if (!headers.is_array()) return std::nullopt;
  for (const json& header : headers) {
    if (!header.is_object()) continue;
    if (ToLowerAscii(StringField(header, "name")) == name) {
      auto value = header.find("value");
      if (value != header.end() && value->is_string())
        return value->get<std::string>();
    }
  }
  return std::nullopt;
}

std::vector<std::string> HeaderValues(const json& headers,
                                      std::string_view name) {
  std::vector<std::string> out;
  if (!headers.is_array()) return out;
  for (const json& header : headers) {
    if (!header.is_object()) continue;
    if (ToLowerAscii(StringField(header, "name")) != name) continue;
    std::string value = StringField(header, "value");
    // Some producers fold repeated Set-Cookie headers into one
    // newline-separated value.
    size_t start = 0;
    while (start <= value.size()) {
      size_t nl = value.find('\n', start);
      if (nl == std::string::npos) nl = value.size();
      if (nl > start) out.push_back(value.substr(start, nl - start));
      start = nl + 1;
    }
  }
  return out;
}

Timestamp TimestampField(const json& obj, const char* key) {
  auto ts = ParseIsoTimestamp(StringField(obj, key));
  return ts ? *ts : Timestamp{};
}

CapturedRequest ToRequest(const json& entry) {
  if (!entry.is_object()) SchemaError("entry is not an object");
  auto request = entry.find("request");
  if (request == entry.end() || !request->is_object())
    SchemaError("entry without request");
  CapturedRequest out;
  out.uri = StringField(*request, "url");
  out.method = StringField(*request, "method");
  const json& headers = request->value("headers", json::array());
  out.referer = HeaderValue(headers, "referer");
  out.user_agent = HeaderValue(headers, "user-agent");
  out.timestamp = TimestampField(entry, "startedDateTime");

  auto response = entry.find("response");
  if (response != entry.end() && response->is_object()) {
    auto status = response->find("status");
    if (status != response->end() && status->is_number_integer() &&
        status->get<int>() > 0) {
      out.response_status = status->get<int>();
    }
    const json& response_headers = response->value("headers", json::array());
    std::string mime;
    if (auto content = response->find("content");
        content != response->end() && content->is_object()) {
      mime = StringField(*content, "mimeType");
    }
    if (mime.empty()) {
      if (auto header = HeaderValue(response_headers, "content-type"))
        mime = *header;
    }
    if (!mime.empty()) out.content_type = mime;
    out.set_cookies = HeaderValues(response_headers, "set-cookie");
  }
  return out;
}

std::string RedirectTarget(const json& entry) {
  auto response = entry.find("response");
  if (response == entry.end() || !response->is_object()) return {};
  std::string target = StringField(*response, "redirectURL");
  if (target.empty()) {
    if (auto location =
            HeaderValue(response->value("headers", json::array()), "location"))
      target = *location;
  }
  if (!target.empty() && target.front() == '/') {
    if (auto base = TryParseUri(StringField(entry["request"], "url"))) {
      std::string origin = base->scheme + "://" + base->host;
      if (base->port) origin += ":" + std::to_string(*base->port);
      target = origin + target;
    }
  }
  return target;
}

std::string FollowRedirects(const std::vector<const json*>& entries) {
  if (entries.empty()) return {};
  std::string current = StringField((*entries.front())["request"], "url");
  const json* at = entries.front();
  for (size_t hops = 0; hops < entries.size(); ++hops) {
    std::string next = RedirectTarget(*at);
    if (next.empty()) break;
    const json* found = nullptr;
    for (const json* candidate : entries) {
      if (StringField((*candidate)["request"], "url") == next) {
        found = candidate;
        break;
      }
    }
    current = next;
    if (!found) break;
    at = found;
  }
  return current;
}

std::vector<CapturedCookie> CookiesFromExtension(const json& list) {
  std::vector<CapturedCookie> cookies;
  for (const json& item : list) {
    if (!item.is_object()) SchemaError("_cookies item is not an object");
    CapturedCookie cookie;
    cookie.name = StringField(item, "name");
    cookie.domain_attribute = StringField(item, "domain");
    cookie.host_wide = item.value("hostWide", false);
    cookie.source = CookieSourceFromName(StringField(item, "source"))
                        .value_or(CapturedCookie::Source::kUnknown);
    cookie.timestamp = TimestampField(item, "time");
    if (item.contains("setter") && item["setter"].is_string())
      cookie.setter_uri = item["setter"].get<std::string>();
    cookies.push_back(std::move(cookie));
  }
  return cookies;
}

PageLoadResult BuildPage(const json* page,
                         const std::vector<const json*>& entries) {
  PageLoadResult result;
  for (const json* entry : entries) result.requests.push_back(ToRequest(*entry));

  if (page) {
    result.started_at = TimestampField(*page, "startedDateTime");
    result.requested_uri = StringField(*page, "_requestedUrl");
    result.final_uri = StringField(*page, "_finalUrl");
    if (auto settle = page->find("_settleSeconds");
        settle != page->end() && settle->is_number_integer()) {
      result.settle_seconds = settle->get<int>();
    }
  } else if (!result.requests.empty()) {
    result.started_at = result.requests.front().timestamp;
  }
  if (result.requested_uri.empty() && !entries.empty())
    result.requested_uri = StringField((*entries.front())["request"], "url");
  if (result.final_uri.empty()) result.final_uri = FollowRedirects(entries);

  std::optional<LoadStatus> status;
  if (page) {
    if (auto field = page->find("_loadStatus");
        field != page->end() && field->is_string()) {
      status = LoadStatus::FromString(field->get<std::string>());
      if (!status) SchemaError("bad _loadStatus " + field->dump());
    }
  }
  if (entries.empty() && (!status || status->kind == LoadStatus::Kind::kLoaded))
    status = LoadStatus::Failed("empty");
  result.status = status.value_or(LoadStatus::Loaded());

  if (page && page->contains("_cookies")) {
    const json& list = (*page)["_cookies"];
    if (!list.is_array()) SchemaError("_cookies is not an array");
    result.cookies = CookiesFromExtension(list);
  } else {
    for (const CapturedRequest& request : result.requests) {
      for (const std::string& header : request.set_cookies) {
        if (auto cookie = ParseSetCookie(header, request.uri, request.timestamp))
          result.cookies.push_back(std::move(*cookie));
      }
    }
  }
  return result;
}

}  // namespace

std::vector<PageLoadResult> IngestHar(std::string_view document) {
  json root = json::parse(document, nullptr, /*allow_exceptions=*/false);
  if (root.is_discarded()) SchemaError("document is not valid JSON");
  if (!root.is_object() || !root.contains("log") || !root["log"].is_object())
    SchemaError("missing log");
  const json& log = root["log"];
  if (!log.contains("entries") || !log["entries"].is_array())
    SchemaError("missing log.entries");
  if (auto version = log.find("version");
      version != log.end() && version->is_string()) {
    std::string v = version->get<std::string>();
    if (v != "1.2" && v != "1.1") SchemaError("unsupported version " + v);
  }

  const json& entries = log["entries"];
  const json* pages = log.contains("pages") ? &log["pages"] : nullptr;
  if (pages && !pages->is_array()) SchemaError("log.pages is not an array");

  std::vector<PageLoadResult> results;
  if (!pages || pages->empty()) {
    std::vector<const json*> all;
    for (const json& entry : entries) all.push_back(&entry);
    results.push_back(BuildPage(nullptr, all));
    return results;
  }

  std::unordered_map<std::string, size_t> index;
  std::vector<std::vector<const json*>> grouped(pages->size());
  for (size_t i = 0; i < pages->size(); ++i) {
    if (!(*pages)[i].is_object()) SchemaError("page is not an object");
    index.emplace(StringField((*pages)[i], "id"), i);
  }
  for (const json& entry : entries) {
    if (!entry.is_object()) SchemaError("entry is not an object");
    std::string ref = StringField(entry, "pageref");
    auto it = index.find(ref);
    if (it != index.end()) {
      grouped[it->second].push_back(&entry);
    } else if (ref.empty() && pages->size() == 1) {
      grouped[0].push_back(&entry);
    }
  }
  for (size_t i = 0; i < pages->size(); ++i)
    results.push_back(BuildPage(&(*pages)[i], grouped[i]));
  return results;
}

std::vector<PageLoadResult> IngestHarFile(const std::string& path) {
  try {
    return IngestHar(ReadFileToString(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kSchemaError)
      throw Error(ErrorCode::kSchemaError, path + ": " + e.what());
    throw;
  }
}

std::string WriteHar(const std::vector<PageLoadResult>& pages,
                     std::string_view creator) {
  ordered_json log;
  log["version"] = "1.2";
  log["creator"] = {{"name", std::string(creator)}, {"version", "1"}};
  ordered_json page_list = ordered_json::array();
  ordered_json entry_list = ordered_json::array();

  for (size_t i = 0; i < pages.size(); ++i) {
    const PageLoadResult& page = pages[i];
    std::string id = "page_" + std::to_string(i + 1);
    ordered_json cookies = ordered_json::array();
    for (const CapturedCookie& cookie : page.cookies) {
      ordered_json item;
      item["name"] = cookie.name;
      item["domain"] = cookie.domain_attribute;
      item["hostWide"] = cookie.host_wide;
      item["source"] = std::string(CookieSourceName(cookie.source));
      item["time"] = FormatIsoTimestamp(cookie.timestamp);
      if (cookie.setter_uri) item["setter"] = *cookie.setter_uri;
      cookies.push_back(std::move(item));
    }
    ordered_json page_json;
    page_json["startedDateTime"] = FormatIsoTimestamp(page.started_at);
    page_json["id"] = id;
    page_json["title"] = page.final_uri;
    page_json["pageTimings"] = ordered_json::object();
    page_json["_requestedUrl"] = page.requested_uri;
    page_json["_finalUrl"] = page.final_uri;
    page_json["_loadStatus"] = page.status.ToString();
    page_json["_settleSeconds"] = page.settle_seconds;
    page_json["_cookies"] = std::move(cookies);
    page_list.push_back(std::move(page_json));

    for (const CapturedRequest& request : page.requests) {
      ordered_json request_headers = ordered_json::array();
      if (request.referer)
        request_headers.push_back({{"name", "Referer"}, {"value", *request.referer}});
      if (request.user_agent)
        request_headers.push_back(
            {{"name", "User-Agent"}, {"value", *request.user_agent}});
      ordered_json response_headers = ordered_json::array();
      for (const std::string& cookie : request.set_cookies)
        response_headers.push_back({{"name", "Set-Cookie"}, {"value", cookie}});

      ordered_json entry;
      entry["pageref"] = id;
      entry["startedDateTime"] = FormatIsoTimestamp(request.timestamp);
      entry["time"] = 0;
      entry["request"] = {{"method", request.method},
                          {"url", request.uri},
                          {"httpVersion", "HTTP/1.1"},
                          {"headers", std::move(request_headers)},
                          {"queryString", ordered_json::array()},
                          {"cookies", ordered_json::array()},
                          {"headersSize", -1},
                          {"bodySize", -1}};
      entry["response"] = {
          {"status", request.response_status.value_or(0)},
          {"statusText", ""},
          {"httpVersion", "HTTP/1.1"},
          {"headers", std::move(response_headers)},
          {"cookies", ordered_json::array()},
          {"content",
           {{"size", 0}, {"mimeType", request.content_type.value_or("")}}},
          {"redirectURL", ""},
          {"headersSize", -1},
          {"bodySize", -1}};
      entry["cache"] = ordered_json::object();
      entry["timings"] = {{"send", 0}, {"wait", 0}, {"receive", 0}};
      entry_list.push_back(std::move(entry));
    }
  }
  log["pages"] = std::move(page_list);
  log["entries"] = std::move(entry_list);
  ordered_json root;
  root["log"] = std::move(log);
  return root.dump(1) + "\n";
}

}  // namespace trackscope
