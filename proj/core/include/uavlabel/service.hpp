#pragma once

#include <memory>
#include <string>

#include "uavlabel/consensus.hpp"
#include "uavlabel/error.hpp"
#include "uavlabel/store.hpp"
#include "uavlabel/tracker.hpp"

namespace uavlabel::service {

struct ServiceConfig {
  std::string bind_address = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  TrackerConfig tracker;
  ConsensusConfig consensus;
};

/// HTTP status for an error kind: 400 validation, 401, 403, 404, 409 state
/// and conflicts, 500 I/O.
int http_status(ErrorKind kind);

/// JSON API over one data root. Routes (JSON unless noted; all but login
/// need `Authorization: Bearer <token>`):
///
///   POST   /api/login                        {username, password}
///   POST   /api/logout
///   GET    /api/videos
///   GET    /api/videos/{v}/frames/{n}        PNG bytes, Cache-Control: no-store
///   GET    /api/videos/{v}/submissions
///   GET    /api/assignments
///   GET    /api/segments/{segment}
///   POST   /api/submissions                  {video_segment_id, mode, reviewed_submission_id?}
///   GET    /api/submissions/{s}
///   POST   /api/submissions/{s}/events       {events: [{sequence_no, kind, payload}, ...]}
///   POST   /api/submissions/{s}/advance      {from, to, tracker_enabled, buffer?, sequence_no?}
///   POST   /api/submissions/{s}/submit?confirm=true
///   DELETE /api/submissions/{s}?confirm=true
///   POST   /api/consensus/{segment}          admin
///   GET    /api/reports/efficiency           admin; ?trim=false, ?global_trim=true
///
/// Errors are {"error": {"code", "message"}} with the status from
/// http_status().
class ApiServer {
 public:
  ApiServer(DataRoot& root, ServiceConfig config);
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Binds the socket and returns the port actually bound.
  int bind();
  /// Serves until stop(); bind() is called first if needed.
  void listen();
  /// bind() and listen() on a background thread; returns the port.
  int start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace uavlabel::service
