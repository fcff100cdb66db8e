#include "uavlabel/service.hpp"

#include <httplib.h>

#include <thread>

#include "uavlabel/admin.hpp"
#include "uavlabel/error.hpp"
#include "uavlabel/operations.hpp"
#include "uavlabel/serialization.hpp"

namespace uavlabel::service {

using nlohmann::json;

int http_status(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain:
    case ErrorKind::Validation:
    case ErrorKind::Configuration:
      return 400;
    case ErrorKind::Unauthenticated:
      return 401;
    case ErrorKind::Forbidden:
      return 403;
    case ErrorKind::NotFound:
      return 404;
    case ErrorKind::State:
    case ErrorKind::Conflict:
    case ErrorKind::MissingPrerequisite:
    case ErrorKind::Integrity:
      return 409;
    case ErrorKind::Io:
      return 500;
  }
  return 500;
}

namespace {

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
  send_json(res, json{{"error", {{"code", code}, {"message", message}}}}, status);
}

json parse_body(const httplib::Request& req) {
  try {
    return json::parse(req.body.empty() ? std::string("{}") : req.body);
  } catch (const json::parse_error&) {
    fail(ErrorKind::Validation, "bad_json", "request body is not valid JSON");
  }
}

int parse_index(const std::string& s) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorKind::NotFound, "frame_not_found", "no frame '" + s + "'");
}

bool query_flag(const httplib::Request& req, const char* name, bool fallback) {
  if (!req.has_param(name)) return fallback;
  const auto v = req.get_param_value(name);
  return v == "true" || v == "1";
}

json account_json(const AccountInfo& a) {
  return json{{"account_id", a.account_id}, {"username", a.username}, {"role", to_string(a.role)}};
}

json meta_json(const VideoMeta& m) {
  return json{{"video_id", m.video_id}, {"frame_count", m.frame_count}, {"fps", m.fps},
              {"polarity_inverted", m.polarity_inverted}, {"width", m.width}, {"height", m.height}};
}

json summary_json(const SubmissionSummary& s) {
  return json{{"header", s.header},
              {"status", to_string(s.status)},
              {"sequence_no", s.sequence_no},
              {"total_boxes", s.total_boxes}};
}

}  // namespace

struct ApiServer::Impl {
  DataRoot& root;
  ServiceConfig config;
  httplib::Server server;
  std::thread thread;
  int port = -1;

  Impl(DataRoot& r, ServiceConfig c) : root(r), config(std::move(c)) { routes(); }

  AccountInfo who(const httplib::Request& req) {
    const std::string header = req.get_header_value("Authorization");
    const std::string prefix = "Bearer ";
    if (header.rfind(prefix, 0) != 0) {
      fail(ErrorKind::Unauthenticated, "missing_token", "an Authorization: Bearer token is required");
    }
    return root.accounts.resolve(header.substr(prefix.size()));
  }

  void routes() {
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      try {
        std::rethrow_exception(ep);
      } catch (const Error& e) {
        send_error(res, http_status(e.kind()), e.code(), e.what());
      } catch (const json::exception& e) {
        send_error(res, 400, "bad_json", e.what());
      } catch (const std::exception& e) {
        send_error(res, 500, "internal", e.what());
      }
    });

    server.Post("/api/login", [this](const httplib::Request& req, httplib::Response& res) {
      const json body = parse_body(req);
      const auto session = root.accounts.authenticate(field<std::string>(body, "username"),
                                                      field<std::string>(body, "password"));
      send_json(res, {{"token", session.token}, {"account", account_json(session.account)}});
    });

    server.Post("/api/logout", [this](const httplib::Request& req, httplib::Response& res) {
      who(req);
      root.accounts.logout(req.get_header_value("Authorization").substr(7));
      send_json(res, json::object());
    });

    server.Get("/api/videos", [this](const httplib::Request& req, httplib::Response& res) {
      who(req);
      json videos = json::array();
      for (const auto& m : root.videos.list()) videos.push_back(meta_json(m));
      send_json(res, {{"videos", videos}});
    });

    server.Get("/api/videos/:video/frames/:n", [this](const httplib::Request& req, httplib::Response& res) {
      who(req);
      const auto bytes = root.videos.frame_bytes(req.path_params.at("video"), parse_index(req.path_params.at("n")));
      res.set_header("Cache-Control", "no-store");
      res.set_content(std::string(bytes.begin(), bytes.end()), "image/png");
    });

    server.Get("/api/videos/:video/submissions", [this](const httplib::Request& req, httplib::Response& res) {
      const auto account = who(req);
      json list = json::array();
      for (const auto& s : video_submissions(root, account, req.path_params.at("video"))) {
        list.push_back(summary_json(s));
      }
      send_json(res, {{"submissions", list}});
    });

    server.Get("/api/assignments", [this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, {{"assignments", visible_assignments(root, who(req))}});
    });

    server.Get("/api/segments/:segment", [this](const httplib::Request& req, httplib::Response& res) {
      who(req);
      send_json(res, json(root.project.segment(req.path_params.at("segment"))));
    });

    server.Post("/api/submissions", [this](const httplib::Request& req, httplib::Response& res) {
      const auto account = who(req);
      const json body = parse_body(req);
      std::optional<SubmissionId> reviewed;
      if (body.contains("reviewed_submission_id") && !body.at("reviewed_submission_id").is_null()) {
        reviewed = field<std::string>(body, "reviewed_submission_id");
      }
      const auto created = open_submission(root, account, field<std::string>(body, "video_segment_id"),
                                           mode_from_string(field<std::string>(body, "mode")), reviewed);
      send_json(res, submission_view(created.state, created.sequence_no), 201);
    });

    server.Get("/api/submissions/:id", [this](const httplib::Request& req, httplib::Response& res) {
      const auto loaded = read_submission(root, who(req), req.path_params.at("id"));
      send_json(res, submission_view(loaded.state, loaded.sequence_no));
    });

    server.Post("/api/submissions/:id/events", [this](const httplib::Request& req, httplib::Response& res) {
      const auto account = who(req);
      const json body = parse_body(req);
      const auto events = field<std::vector<SubmissionEvent>>(body, "events");
      const auto seq = append_edits(root, account, req.path_params.at("id"), events);
      send_json(res, {{"sequence_no", seq}});
    });

    server.Post("/api/submissions/:id/advance", [this](const httplib::Request& req, httplib::Response& res) {
      const auto account = who(req);
      const json body = parse_body(req);
      TrackerConfig tracker = config.tracker;
      if (body.contains("buffer")) tracker.buffer = field<int>(body, "buffer");
      std::optional<std::int64_t> expected;
      if (body.contains("sequence_no")) expected = field<std::int64_t>(body, "sequence_no");
      const auto result = advance(root, account, req.path_params.at("id"), field<int>(body, "from"),
                                  field<int>(body, "to"), field<bool>(body, "tracker_enabled"), tracker, expected);
      send_json(res, {{"sequence_no", result.sequence_no}, {"created", result.created}, {"boxes", result.boxes}});
    });

    server.Post("/api/submissions/:id/submit", [this](const httplib::Request& req, httplib::Response& res) {
      const auto seq = submit_submission(root, who(req), req.path_params.at("id"), query_flag(req, "confirm", false));
      send_json(res, {{"sequence_no", seq}});
    });

    server.Delete("/api/submissions/:id", [this](const httplib::Request& req, httplib::Response& res) {
      const auto seq = discard_progress(root, who(req), req.path_params.at("id"), query_flag(req, "confirm", false));
      send_json(res, {{"sequence_no", seq}});
    });

    server.Post("/api/consensus/:segment", [this](const httplib::Request& req, httplib::Response& res) {
      require_admin(who(req));
      const auto finals = run_consensus(root, req.path_params.at("segment"), config.consensus);
      send_json(res, {{"segment_id", finals.segment_id},
                      {"video_id", finals.video_id},
                      {"framework", to_string(finals.framework)},
                      {"submissions", finals.submissions},
                      {"labels", finals.labels}});
    });

    server.Get("/api/reports/efficiency", [this](const httplib::Request& req, httplib::Response& res) {
      require_admin(who(req));
      ReportOptions options;
      options.trim = query_flag(req, "trim", true);
      options.global_trim = query_flag(req, "global_trim", false);
      options.panel_size = config.consensus.panel_size;
      const auto report = build_report(gather_report_inputs(root), options);
      res.status = 200;
      res.set_content(report_to_json(report), "application/json");
    });
  }
};

ApiServer::ApiServer(DataRoot& root, ServiceConfig config)
    : impl_(std::make_unique<Impl>(root, std::move(config))) {
  impl_->config.tracker.validate();
  impl_->config.consensus.validate();
}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind() {
  if (impl_->port >= 0) return impl_->port;
  auto& s = impl_->server;
  const auto& c = impl_->config;
  const int port = c.port == 0 ? s.bind_to_any_port(c.bind_address) : (s.bind_to_port(c.bind_address, c.port) ? c.port : -1);
  if (port < 0) {
    fail(ErrorKind::Io, "bind_failed", "cannot bind " + c.bind_address + ":" + std::to_string(c.port));
  }
  impl_->port = port;
  return port;
}

void ApiServer::listen() {
  bind();
  impl_->server.listen_after_bind();
}

int ApiServer::start() {
  const int port = bind();
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port;
}

void ApiServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace uavlabel::service
