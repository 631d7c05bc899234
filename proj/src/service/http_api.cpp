#include "fluency/service/http_api.hpp"

#include <thread>

#include <httplib.h>

#include "fluency/core/serialize.hpp"

namespace fluency::service {

namespace {

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(-1, ' ', false, Json::error_handler_t::replace),
                  "application/json");
}

void send_error(httplib::Response& res, const Error& e) {
  send_json(res, http_status_for(e.code()),
            {{"error", std::string(to_string(e.code()))}, {"detail", e.detail()}});
}

// Wraps a handler so library errors become JSON error responses.
template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send_error(res, e);
    } catch (const Json::exception& e) {
      send_error(res, Error(ErrorCode::InvalidInput, e.what()));
    } catch (const std::exception& e) {
      send_json(res, 500, {{"error", "Internal"}, {"detail", e.what()}});
    }
  };
}

Json parse_body(const std::string& text) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::InvalidInput, "body must be a JSON object");
  }
  return j;
}

review::ReviewAction parse_review(const Json& body) {
  review::ReviewAction action;
  auto kind = review::action_from_string(body.value("action", std::string{}));
  if (!kind) throw Error(ErrorCode::InvalidInput, "action must be approve, reject or modify");
  action.action = *kind;
  action.feedback = body.value("feedback", std::string{});
  action.clinician_id = body.value("clinicianId", std::string{});
  if (action.clinician_id.empty()) throw Error(ErrorCode::InvalidInput, "clinicianId required");
  if (auto it = body.find("timestamp"); it != body.end() && it->is_string()) {
    auto ts = review::parse_timestamp(it->get<std::string>());
    if (!ts) throw Error(ErrorCode::InvalidInput, "timestamp must be ISO-8601 UTC");
    action.timestamp = *ts;
  } else {
    action.timestamp = review::now();
  }
  return action;
}

std::string sse_frame(const Json& data) {
  return "event: progress\ndata: " + data.dump(-1, ' ', false, Json::error_handler_t::replace) +
         "\n\n";
}

constexpr const char* kId = "([0-9a-fA-F-]+)";

}  // namespace

int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound:
    case ErrorCode::ChunkOutOfRange:
      return 404;
    case ErrorCode::InvalidState:
    case ErrorCode::InvalidAction:
      return 409;
    case ErrorCode::EmptyAudio:
    case ErrorCode::BadAudio:
    case ErrorCode::BadConfig:
    case ErrorCode::InvalidInput:
    case ErrorCode::EmptyInput:
    case ErrorCode::MissingFeedback:
    case ErrorCode::MissingContext:
      return 400;
    case ErrorCode::BackendUnavailable:
      return 502;
    default:
      return 500;
  }
}

void install_routes(httplib::Server& server, SessionService& service) {
  const std::string base = "/api/sessions/";
  const std::string id = kId;

  server.Post("/api/sessions", guarded([&service](const httplib::Request& req,
                                                  httplib::Response& res) {
    if (!req.is_multipart_form_data()) {
      throw Error(ErrorCode::InvalidInput, "expected multipart/form-data");
    }
    if (!req.has_file("audio")) throw Error(ErrorCode::BadAudio, "missing audio part");
    Json metadata = Json::object();
    if (req.has_file("metadata")) metadata = parse_body(req.get_file_value("metadata").content);
    auto request = parse_session_request(metadata, orchestrator::OrchestrationConfig::kMaxRounds);
    auto session_id = service.create_session(request, req.get_file_value("audio").content);
    send_json(res, 201, {{"sessionId", session_id}});
  }));

  server.Get(base + id, guarded([&service](const httplib::Request& req, httplib::Response& res) {
    send_json(res, 200, service.get_status(req.matches[1]));
  }));

  server.Get(base + id + "/results",
             guarded([&service](const httplib::Request& req, httplib::Response& res) {
               send_json(res, 200, service.get_results(req.matches[1]));
             }));

  server.Get(base + id + "/chunks/([0-9]+)/audio",
             guarded([&service](const httplib::Request& req, httplib::Response& res) {
               const int n = std::stoi(std::string(req.matches[2]));
               res.set_content(service.get_chunk_audio(req.matches[1], n), "audio/wav");
             }));

  server.Post(base + id + "/upgrade",
              guarded([&service](const httplib::Request& req, httplib::Response& res) {
                service.upgrade_session(req.matches[1]);
                send_json(res, 202, service.get_status(req.matches[1]));
              }));

  server.Post(base + id + "/review",
              guarded([&service](const httplib::Request& req, httplib::Response& res) {
                auto lifecycle = service.post_review(req.matches[1], parse_review(parse_body(req.body)));
                send_json(res, 200, {{"lifecycle", std::string(to_string(lifecycle))}});
              }));

  server.Get(base + id + "/export",
             guarded([&service](const httplib::Request& req, httplib::Response& res) {
               res.set_content(service.export_html(req.matches[1]), "text/html; charset=utf-8");
             }));

  server.Get(base + id + "/events",
             guarded([&service](const httplib::Request& req, httplib::Response& res) {
               const std::string session_id = req.matches[1];
               service.snapshot(session_id);  // 404 before streaming starts
               auto sent = std::make_shared<std::size_t>(0);
               auto seen = std::make_shared<std::uint64_t>(0);
               res.set_chunked_content_provider(
                   "text/event-stream",
                   [&service, session_id, sent, seen](std::size_t, httplib::DataSink& sink) {
                     auto record = service.snapshot(session_id);
                     *seen = service.version(session_id);
                     for (; *sent < record->events.size(); ++*sent) {
                       Json data = record->events[*sent];
                       data["lifecycle"] = std::string(to_string(record->lifecycle));
                       const std::string frame = sse_frame(data);
                       if (!sink.write(frame.data(), frame.size())) return false;
                     }
                     if (!is_busy(record->lifecycle)) {
                       const std::string frame =
                           "event: end\ndata: " + status_document(*record).dump() + "\n\n";
                       sink.write(frame.data(), frame.size());
                       sink.done();
                       return true;
                     }
                     service.wait_for_change(session_id, *seen, std::chrono::seconds(1));
                     return sink.is_writable();
                   });
             }));
}

struct HttpServer::Impl {
  explicit Impl(SessionService& s) : service(s) { install_routes(server, service); }

  SessionService& service;
  httplib::Server server;
  std::thread thread;
};

HttpServer::HttpServer(SessionService& service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound <= 0) {
    throw Error(ErrorCode::BadConfig, "cannot bind " + host + ":" + std::to_string(port));
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void HttpServer::run(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) {
    throw Error(ErrorCode::BadConfig, "cannot listen on " + host + ":" + std::to_string(port));
  }
}

void HttpServer::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace fluency::service
