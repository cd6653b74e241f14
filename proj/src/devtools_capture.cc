#include "trackscope/devtools_capture.h"

#include <algorithm>
#include <atomic>
#include <deque>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include <boost/asio/connect.hpp>
#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "json.hpp"
#include "trackscope/public_suffix.h"
#include "trackscope/uri.h"

namespace trackscope {

namespace {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

// Raised inside this file for anything wrong with the browser endpoint.
struct EndpointFailure {
  std::string detail;
};

Timestamp Now() {
  return std::chrono::time_point_cast<std::chrono::milliseconds>(
      std::chrono::system_clock::now());
}

// Path of the browser-level websocket, from GET /json/version.
std::string DiscoverBrowserPath(const CaptureSettings& settings,
                                Clock::time_point deadline) {
  net::io_context ioc;
  beast::tcp_stream stream(ioc);
  tcp::resolver resolver(ioc);
  http::response<http::string_body> response;
  beast::flat_buffer buffer;
  beast::error_code failure;

  auto remaining = [&] {
    return std::max(Clock::duration::zero(), deadline - Clock::now());
  };
  http::request<http::empty_body> request(http::verb::get, "/json/version", 11);
  request.set(http::field::host, settings.endpoint_host + ":" +
                                     std::to_string(settings.endpoint_port));

  resolver.async_resolve(
      settings.endpoint_host, std::to_string(settings.endpoint_port),
      [&](beast::error_code ec, tcp::resolver::results_type results) {
        if (ec) {
          failure = ec;
          return;
        }
        stream.expires_after(remaining());
        stream.async_connect(results, [&](beast::error_code ec,
                                          tcp::resolver::results_type::endpoint_type) {
          if (ec) {
            failure = ec;
            return;
          }
          http::async_write(stream, request, [&](beast::error_code ec, size_t) {
            if (ec) {
              failure = ec;
              return;
            }
            http::async_read(stream, buffer, response,
                             [&](beast::error_code ec, size_t) {
                               if (ec) failure = ec;
                             });
          });
        });
      });
  ioc.run();
  if (failure) throw EndpointFailure{"/json/version: " + failure.message()};
  if (response.result() != http::status::ok)
    throw EndpointFailure{"/json/version returned " +
                          std::to_string(response.result_int())};
  json body = json::parse(response.body(), nullptr, false);
  if (body.is_discarded() || !body.contains("webSocketDebuggerUrl"))
    throw EndpointFailure{"/json/version without webSocketDebuggerUrl"};
  std::string url = body["webSocketDebuggerUrl"].get<std::string>();
  auto parsed = TryParseUri(url);
  if (!parsed) throw EndpointFailure{"bad webSocketDebuggerUrl " + url};
  return parsed->path;
}

// One websocket connection to the browser. A single read is kept pending at
// all times; pumping the io_context until a deadline never cancels it.
class DevToolsConnection {
 public:
  DevToolsConnection(const CaptureSettings& settings, Clock::time_point deadline)
      : ws_(ioc_) {
    std::string path = DiscoverBrowserPath(settings, deadline);
    tcp::resolver resolver(ioc_);
    beast::error_code ec;
    auto results = resolver.resolve(settings.endpoint_host,
                                    std::to_string(settings.endpoint_port), ec);
    if (ec) throw EndpointFailure{"resolve: " + ec.message()};

    bool done = false;
    beast::get_lowest_layer(ws_).expires_after(
        std::max(Clock::duration::zero(), deadline - Clock::now()));
    beast::get_lowest_layer(ws_).async_connect(
        results, [&](beast::error_code e, tcp::resolver::results_type::endpoint_type) {
          if (e) {
            ec = e;
            done = true;
            return;
          }
          ws_.async_handshake(settings.endpoint_host + ":" +
                                  std::to_string(settings.endpoint_port),
                              path, [&](beast::error_code e) {
                                ec = e;
                                done = true;
                              });
        });
    while (!done && ioc_.run_one() > 0) {
    }
    if (!done || ec) throw EndpointFailure{"websocket: " + ec.message()};
    beast::get_lowest_layer(ws_).expires_never();
    ws_.read_message_max(64 * 1024 * 1024);
    StartRead();
  }

  ~DevToolsConnection() {
    beast::error_code ignored;
    beast::get_lowest_layer(ws_).socket().shutdown(tcp::socket::shutdown_both,
                                                   ignored);
    beast::get_lowest_layer(ws_).socket().close(ignored);
  }

  // Sends a command and waits for its response. Returns std::nullopt on
  // deadline; protocol-level errors come back inside the json ("error").
  std::optional<json> Call(const std::string& method, json params,
                           const std::string& session_id,
                           Clock::time_point deadline) {
    int id = next_id_++;
    json message{{"id", id}, {"method", method}, {"params", std::move(params)}};
    if (!session_id.empty()) message["sessionId"] = session_id;
    while (writing_) {
      if (!Pump(deadline)) return std::nullopt;
    }
    outgoing_ = message.dump();
    writing_ = true;
    ws_.text(true);
    ws_.async_write(net::buffer(outgoing_), [this](beast::error_code ec, size_t) {
      write_error_ = ec;
      writing_ = false;
    });
    while (writing_) {
      if (!Pump(deadline)) return std::nullopt;
    }
    if (write_error_) throw EndpointFailure{"write: " + write_error_.message()};

    while (true) {
      auto it = responses_.find(id);
      if (it != responses_.end()) {
        json response = std::move(it->second);
        responses_.erase(it);
        return response;
      }
      if (!Pump(deadline)) return std::nullopt;
    }
  }

  std::optional<json> NextEvent(Clock::time_point deadline) {
    while (events_.empty()) {
      if (!Pump(deadline)) return std::nullopt;
    }
    json event = std::move(events_.front());
    events_.pop_front();
    return event;
  }

 private:
  void StartRead() {
    ws_.async_read(buffer_, [this](beast::error_code ec, size_t) {
      if (ec) {
        read_error_ = ec;
        return;
      }
      json message = json::parse(beast::buffers_to_string(buffer_.data()), nullptr,
                                 false);
      buffer_.consume(buffer_.size());
      if (message.is_object()) {
        if (message.contains("id") && message["id"].is_number_integer()) {
          const int id = message["id"].get<int>();
          responses_[id] = std::move(message);
        } else if (message.contains("method")) {
          events_.push_back(std::move(message));
        }
      }
      StartRead();
    });
  }

  // Runs one handler. False once the deadline has passed.
  bool Pump(Clock::time_point deadline) {
    if (read_error_) throw EndpointFailure{"read: " + read_error_->message()};
    if (Clock::now() >= deadline) return false;
    if (ioc_.stopped()) ioc_.restart();
    ioc_.run_one_until(deadline);
    if (read_error_) throw EndpointFailure{"read: " + read_error_->message()};
    return true;
  }

  net::io_context ioc_;
  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  std::map<int, json> responses_;
  std::deque<json> events_;
  std::optional<beast::error_code> read_error_;
  std::string outgoing_;
  bool writing_ = false;
  beast::error_code write_error_;
  int next_id_ = 1;
};

std::optional<std::string> HeaderLookup(const json& headers, std::string_view name) {
  if (!headers.is_object()) return std::nullopt;
  for (auto it = headers.begin(); it != headers.end(); ++it) {
    if (ToLowerAscii(it.key()) == name && it.value().is_string())
      return it.value().get<std::string>();
  }
  return std::nullopt;
}

std::vector<std::string> SplitLines(const std::string& value) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= value.size()) {
    size_t nl = value.find('\n', start);
    if (nl == std::string::npos) nl = value.size();
    if (nl > start) out.push_back(value.substr(start, nl - start));
    start = nl + 1;
  }
  return out;
}

std::string StatusForNetError(const std::string& error_text) {
  if (error_text.find("ERR_NAME_NOT_RESOLVED") != std::string::npos ||
      error_text.find("ERR_NAME_RESOLUTION_FAILED") != std::string::npos) {
    return "dns";
  }
  std::string reason = error_text;
  if (reason.rfind("net::", 0) == 0) reason.erase(0, 5);
  return reason.empty() ? "navigation" : reason;
}

json ResultOrThrow(const std::optional<json>& response,
                          const std::string& method) {
  if (!response) throw EndpointFailure{method + " timed out"};
  if (response->contains("error"))
    throw EndpointFailure{method + ": " + (*response)["error"].dump()};
  if (!response->contains("result")) throw EndpointFailure{method + ": no result"};
  return (*response)["result"];
}

// Accumulates network events for one page session.
class PageRecorder {
 public:
  PageRecorder(PageLoadResult& result) : result_(result) {}

  void OnEvent(const json& event) {
    const std::string method = event.value("method", "");
    const json& params = event.contains("params") ? event["params"] : kEmpty;
    if (method == "Network.requestWillBeSent") {
      OnRequest(params);
    } else if (method == "Network.requestWillBeSentExtraInfo") {
      std::string id = params.value("requestId", "");
      auto it = index_.find(id);
      if (it == index_.end()) {
        early_request_headers_[id] = params.value("headers", json::object());
      } else {
        ApplyRequestHeaders(result_.requests[it->second],
                            params.value("headers", json::object()));
      }
    } else if (method == "Network.responseReceived") {
      auto it = index_.find(params.value("requestId", ""));
      if (it == index_.end() || !params.contains("response")) return;
      ApplyResponse(result_.requests[it->second], params["response"]);
    } else if (method == "Network.responseReceivedExtraInfo") {
      std::string id = params.value("requestId", "");
      auto it = index_.find(id);
      json headers = params.value("headers", json::object());
      if (it == index_.end()) {
        early_response_headers_[id] = std::move(headers);
      } else {
        ApplySetCookies(result_.requests[it->second], headers, /*replace=*/true);
      }
    } else if (method == "Page.frameNavigated") {
      const json& frame = params.contains("frame") ? params["frame"] : kEmpty;
      if (!frame.contains("parentId") && frame.contains("url"))
        result_.final_uri = frame["url"].get<std::string>();
    } else if (method == "Page.loadEventFired") {
      load_fired_ = true;
    } else if (method == "Network.loadingFailed") {
      if (params.value("requestId", "") == document_request_id_ &&
          !document_request_id_.empty()) {
        document_error_ = params.value("errorText", "");
      }
    }
  }

  bool load_fired() const { return load_fired_; }
  const std::string& document_error() const { return document_error_; }

 private:
  void OnRequest(const json& params) {
    std::string id = params.value("requestId", "");
    if (!params.contains("request")) return;
    const json& request = params["request"];

    auto previous = index_.find(id);
    if (previous != index_.end() && params.contains("redirectResponse")) {
      ApplyResponse(result_.requests[previous->second], params["redirectResponse"]);
    }
    CapturedRequest captured;
    captured.uri = request.value("url", "");
    captured.method = request.value("method", "GET");
    Timestamp at = Now();
    if (params.contains("wallTime") && params["wallTime"].is_number()) {
      at = Timestamp(std::chrono::milliseconds(
          static_cast<int64_t>(params["wallTime"].get<double>() * 1000.0)));
    }
    captured.timestamp = std::max(at, result_.started_at);
    ApplyRequestHeaders(captured, request.value("headers", json::object()));
    if (params.value("type", "") == "Document" && document_request_id_.empty())
      document_request_id_ = id;

    index_[id] = result_.requests.size();
    result_.requests.push_back(std::move(captured));
    if (auto early = early_request_headers_.find(id);
        early != early_request_headers_.end()) {
      ApplyRequestHeaders(result_.requests.back(), early->second);
      early_request_headers_.erase(early);
    }
    if (auto early = early_response_headers_.find(id);
        early != early_response_headers_.end()) {
      ApplySetCookies(result_.requests.back(), early->second, true);
      early_response_headers_.erase(early);
    }
  }

  static void ApplyRequestHeaders(CapturedRequest& request, const json& headers) {
    if (!request.referer) request.referer = HeaderLookup(headers, "referer");
    if (!request.user_agent) request.user_agent = HeaderLookup(headers, "user-agent");
  }

  static void ApplySetCookies(CapturedRequest& request, const json& headers,
                              bool replace) {
    auto value = HeaderLookup(headers, "set-cookie");
    if (!value) return;
    if (replace || request.set_cookies.empty()) request.set_cookies = SplitLines(*value);
  }

  static void ApplyResponse(CapturedRequest& request, const json& response) {
    if (response.contains("status") && response["status"].is_number())
      request.response_status = response["status"].get<int>();
    std::string mime = response.value("mimeType", "");
    if (mime.empty()) {
      if (auto header = HeaderLookup(response.value("headers", json::object()),
                                     "content-type"))
        mime = *header;
    }
    if (!mime.empty()) request.content_type = mime;
    ApplySetCookies(request, response.value("headers", json::object()), false);
  }

  static inline const json kEmpty = json::object();
  PageLoadResult& result_;
  std::map<std::string, size_t> index_;
  std::map<std::string, json> early_request_headers_;
  std::map<std::string, json> early_response_headers_;
  std::string document_request_id_;
  std::string document_error_;
  bool load_fired_ = false;
};

void CollectCookies(PageLoadResult& result, const json& jar) {
  std::set<std::pair<std::string, std::string>> from_headers;
  for (const CapturedRequest& request : result.requests) {
    for (const std::string& header : request.set_cookies) {
      if (auto cookie = ParseSetCookie(header, request.uri, request.timestamp)) {
        from_headers.emplace(cookie->name, cookie->domain_attribute);
        result.cookies.push_back(std::move(*cookie));
      }
    }
  }
  std::vector<CapturedCookie> scripted;
  if (jar.is_array()) {
    for (const json& item : jar) {
      CapturedCookie cookie;
      cookie.name = item.value("name", "");
      std::string domain = ToLowerAscii(item.value("domain", ""));
      cookie.host_wide = !domain.empty() && domain.front() == '.';
      cookie.domain_attribute = CanonicalHost(domain);
      if (from_headers.contains({cookie.name, cookie.domain_attribute})) continue;
      cookie.source = CapturedCookie::Source::kScript;
      cookie.timestamp = std::max(Now(), result.started_at);
      scripted.push_back(std::move(cookie));
    }
  }
  std::sort(scripted.begin(), scripted.end(),
            [](const CapturedCookie& a, const CapturedCookie& b) {
              return std::tie(a.domain_attribute, a.name) <
                     std::tie(b.domain_attribute, b.name);
            });
  for (CapturedCookie& cookie : scripted) result.cookies.push_back(std::move(cookie));
}

void RunCapture(DevToolsConnection& connection, const PageListEntry& entry,
                const CaptureSettings& settings, Clock::time_point start,
                PageLoadResult& result) {
  const auto hard_deadline = start + std::chrono::seconds(settings.hard_timeout_seconds);
  const auto settle_deadline = start + std::chrono::seconds(settings.settle_seconds);

  json context = ResultOrThrow(
      connection.Call("Target.createBrowserContext", json::object(), "", hard_deadline),
      "Target.createBrowserContext");
  const std::string context_id = context.value("browserContextId", "");

  struct ContextGuard {
    DevToolsConnection& connection;
    std::string id;
    ~ContextGuard() {
      try {
        connection.Call("Target.disposeBrowserContext", json{{"browserContextId", id}},
                        "", Clock::now() + std::chrono::seconds(5));
      } catch (...) {
      }
    }
  } guard{connection, context_id};

  json target = ResultOrThrow(
      connection.Call("Target.createTarget",
                      json{{"url", "about:blank"}, {"browserContextId", context_id}},
                      "", hard_deadline),
      "Target.createTarget");
  json attached = ResultOrThrow(
      connection.Call("Target.attachToTarget",
                      json{{"targetId", target.value("targetId", "")}, {"flatten", true}},
                      "", hard_deadline),
      "Target.attachToTarget");
  const std::string session = attached.value("sessionId", "");
  ResultOrThrow(connection.Call("Network.enable", json::object(), session, hard_deadline),
                "Network.enable");
  ResultOrThrow(connection.Call("Page.enable", json::object(), session, hard_deadline),
                "Page.enable");

  PageRecorder recorder(result);
  result.started_at = Now();
  auto navigation = connection.Call("Page.navigate", json{{"url", entry.normalized_uri}},
                                    session, hard_deadline);
  if (!navigation) {
    result.status = LoadStatus::Timeout();
  } else {
    json nav = ResultOrThrow(navigation, "Page.navigate");
    std::string error_text = nav.value("errorText", "");
    if (!error_text.empty()) {
      result.status = LoadStatus::Failed(StatusForNetError(error_text));
    }
  }

  auto drain_until = [&](Clock::time_point deadline) {
    while (auto event = connection.NextEvent(deadline)) {
      if (event->value("sessionId", "") == session) recorder.OnEvent(*event);
    }
  };
  if (result.status.kind == LoadStatus::Kind::kLoaded) {
    drain_until(settle_deadline);
    if (!recorder.load_fired()) {
      while (!recorder.load_fired() && Clock::now() < hard_deadline) {
        auto event = connection.NextEvent(hard_deadline);
        if (!event) break;
        if (event->value("sessionId", "") == session) recorder.OnEvent(*event);
      }
      if (!recorder.load_fired()) result.status = LoadStatus::Timeout();
    }
    if (!recorder.document_error().empty() &&
        result.status.kind == LoadStatus::Kind::kLoaded) {
      result.status = LoadStatus::Failed(StatusForNetError(recorder.document_error()));
    }
  } else {
    // Drain whatever already arrived so partial data is kept.
    drain_until(std::min(Clock::now() + std::chrono::milliseconds(200), hard_deadline));
  }

  auto cookies = connection.Call("Storage.getCookies",
                                 json{{"browserContextId", context_id}}, "",
                                 Clock::now() + std::chrono::seconds(5));
  json jar = json::array();
  if (cookies && cookies->contains("result"))
    jar = (*cookies)["result"].value("cookies", json::array());
  CollectCookies(result, jar);
}

}  // namespace

PageLoadResult CaptureLive(const PageListEntry& entry, const CaptureSettings& settings) {
  PageLoadResult result;
  result.requested_uri = entry.normalized_uri;
  result.final_uri = entry.normalized_uri;
  result.settle_seconds = settings.settle_seconds;
  result.started_at = Now();
  const auto start = Clock::now();
  try {
    DevToolsConnection connection(
        settings, start + std::chrono::seconds(settings.hard_timeout_seconds));
    RunCapture(connection, entry, settings, start, result);
  } catch (const EndpointFailure&) {
    result.status = LoadStatus::Failed("endpoint");
  } catch (const std::exception&) {
    result.status = LoadStatus::Failed("endpoint");
  }
  return result;
}

std::vector<PageLoadResult> CaptureAll(
    const std::vector<PageListEntry>& entries, const CaptureSettings& settings,
    int parallelism,
    const std::function<void(size_t, const PageLoadResult&)>& on_result) {
  std::vector<PageLoadResult> results(entries.size());
  std::atomic<size_t> next{0};
  std::mutex callback_mutex;
  auto worker = [&] {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= entries.size()) return;
      results[i] = CaptureLive(entries[i], settings);
      if (on_result) {
        std::lock_guard<std::mutex> lock(callback_mutex);
        on_result(i, results[i]);
      }
    }
  };
  int workers = std::max(1, std::min<int>(parallelism, static_cast<int>(entries.size())));
  std::vector<std::thread> threads;
  for (int i = 0; i < workers; ++i) threads.emplace_back(worker);
  for (std::thread& t : threads) t.join();
  return results;
}

}  // namespace trackscope
