#include "uavlabel/serialization.hpp"

namespace uavlabel {

using nlohmann::json;

void to_json(json& j, BoxId id) { j = to_underlying(id); }
void from_json(const json& j, BoxId& id) { id = BoxId{j.get<std::uint64_t>()}; }

void to_json(json& j, const BoundingBox& b) {
  j = json{{"box_id", b.box_id},  {"frame_index", b.frame_index},
           {"x", b.x},            {"y", b.y},
           {"width", b.width},    {"height", b.height},
           {"category", to_string(b.category)}, {"origin", to_string(b.origin)},
           {"author_id", b.author_id}};
}

void from_json(const json& j, BoundingBox& b) {
  b.box_id = j.value("box_id", BoxId{});
  b.frame_index = j.value("frame_index", 0);
  b.x = field<int>(j, "x");
  b.y = field<int>(j, "y");
  b.width = field<int>(j, "width");
  b.height = field<int>(j, "height");
  b.category = category_from_string(j.value("category", std::string("Animal")));
  b.origin = origin_from_string(j.value("origin", std::string("Drawn")));
  b.author_id = j.value("author_id", std::string());
}

void to_json(json& j, const BoxPlacement& p) {
  j = json{{"box_id", p.box_id}, {"x", p.x}, {"y", p.y}, {"width", p.width}, {"height", p.height}};
}

void from_json(const json& j, BoxPlacement& p) {
  p.box_id = field<BoxId>(j, "box_id");
  p.x = field<int>(j, "x");
  p.y = field<int>(j, "y");
  p.width = field<int>(j, "width");
  p.height = field<int>(j, "height");
}

void to_json(json& j, const TimeLogEntry& e) {
  j = json{{"frame_index", e.frame_index}, {"active_seconds", e.active_seconds}};
}

void from_json(const json& j, TimeLogEntry& e) {
  e.frame_index = field<int>(j, "frame_index");
  e.active_seconds = field<double>(j, "active_seconds");
}

void to_json(json& j, const SubmissionHeader& h) {
  j = json{{"submission_id", h.submission_id},
           {"video_segment_id", h.video_segment_id},
           {"video_id", h.video_id},
           {"labeler_id", h.labeler_id},
           {"mode", to_string(h.mode)},
           {"reviewed_submission_id", h.reviewed_submission_id ? json(*h.reviewed_submission_id) : json(nullptr)},
           {"first_frame", h.first_frame},
           {"last_frame", h.last_frame},
           {"frame_width", h.frame_width},
           {"frame_height", h.frame_height},
           {"min_box_size", h.min_box_size},
           {"created_at", h.created_at}};
}

void from_json(const json& j, SubmissionHeader& h) {
  h.submission_id = field<std::string>(j, "submission_id");
  h.video_segment_id = field<std::string>(j, "video_segment_id");
  h.video_id = field<std::string>(j, "video_id");
  h.labeler_id = field<std::string>(j, "labeler_id");
  h.mode = mode_from_string(field<std::string>(j, "mode"));
  if (j.contains("reviewed_submission_id") && !j.at("reviewed_submission_id").is_null()) {
    h.reviewed_submission_id = j.at("reviewed_submission_id").get<std::string>();
  } else {
    h.reviewed_submission_id.reset();
  }
  h.first_frame = field<int>(j, "first_frame");
  h.last_frame = field<int>(j, "last_frame");
  h.frame_width = field<int>(j, "frame_width");
  h.frame_height = field<int>(j, "frame_height");
  h.min_box_size = j.value("min_box_size", kDefaultMinBoxSize);
  h.created_at = j.value("created_at", std::string());
}

namespace {

json frames_json(const std::map<int, std::vector<BoundingBox>>& frames) {
  json out = json::array();
  for (const auto& [frame, boxes] : frames) out.push_back({{"frame", frame}, {"boxes", boxes}});
  return out;
}

std::map<int, std::vector<BoundingBox>> frames_from(const json& j) {
  std::map<int, std::vector<BoundingBox>> out;
  for (const auto& entry : j) out[entry.at("frame").get<int>()] = entry.at("boxes").get<std::vector<BoundingBox>>();
  return out;
}

}  // namespace

// Full state, used for snapshots; round-trips exactly.
void to_json(json& j, const Submission& s) {
  json propagation = json::array();
  for (const auto& [frame, n] : s.propagation_count) propagation.push_back({frame, n});
  j = json{{"header", s.header},
           {"frames", frames_json(s.frames)},
           {"visited", s.visited},
           {"entry_snapshots", frames_json(s.entry_snapshots)},
           {"propagation_count", propagation},
           {"status", to_string(s.status)},
           {"time_log", s.time_log},
           {"next_box_id", s.next_box_id},
           {"current_frame", s.current_frame},
           {"submitted_at", s.submitted_at ? json(*s.submitted_at) : json(nullptr)}};
}

void from_json(const json& j, Submission& s) {
  s.header = j.at("header").get<SubmissionHeader>();
  s.frames = frames_from(j.at("frames"));
  s.visited = j.at("visited").get<std::set<int>>();
  s.entry_snapshots = frames_from(j.at("entry_snapshots"));
  s.propagation_count.clear();
  for (const auto& p : j.at("propagation_count")) s.propagation_count[p.at(0).get<int>()] = p.at(1).get<int>();
  s.status = status_from_string(j.at("status").get<std::string>());
  s.time_log = j.at("time_log").get<std::vector<TimeLogEntry>>();
  s.next_box_id = j.at("next_box_id").get<std::uint64_t>();
  s.current_frame = j.at("current_frame").get<int>();
  if (j.at("submitted_at").is_null()) s.submitted_at.reset();
  else s.submitted_at = j.at("submitted_at").get<std::string>();
}

void to_json(json& j, const FrameVisit& v) {
  j = json{{"from", v.from}, {"to", v.to}, {"propagated", v.propagated}, {"boxes", v.populated}};
}

void from_json(const json& j, FrameVisit& v) {
  v.from = field<int>(j, "from");
  v.to = field<int>(j, "to");
  v.propagated = j.value("propagated", false);
  v.populated = j.value("boxes", std::vector<BoundingBox>{});
}

void to_json(json& j, const FinalLabel& f) {
  j = json{{"box", f.box},
           {"supporting_labelers", f.supporting_labelers},
           {"framework", to_string(f.framework)},
           {"reviewer_id", f.reviewer_id ? json(*f.reviewer_id) : json(nullptr)}};
}

void from_json(const json& j, FinalLabel& f) {
  f.box = j.at("box").get<BoundingBox>();
  f.supporting_labelers = j.at("supporting_labelers").get<std::vector<AccountId>>();
  f.framework = framework_from_string(j.at("framework").get<std::string>());
  if (j.at("reviewer_id").is_null()) f.reviewer_id.reset();
  else f.reviewer_id = j.at("reviewer_id").get<std::string>();
}

void to_json(json& j, const VideoSegment& s) {
  j = json{{"segment_id", s.segment_id},   {"video_id", s.video_id},
           {"first_frame", s.first_frame}, {"last_frame", s.last_frame},
           {"predecessor_note", s.predecessor_note}};
}

void from_json(const json& j, VideoSegment& s) {
  s.segment_id = j.at("segment_id").get<std::string>();
  s.video_id = j.at("video_id").get<std::string>();
  s.first_frame = j.at("first_frame").get<int>();
  s.last_frame = j.at("last_frame").get<int>();
  s.predecessor_note = j.value("predecessor_note", std::string());
}

void to_json(json& j, const Assignment& a) {
  j = json{{"assignment_id", a.assignment_id}, {"account", a.account_id},
           {"video_segment", a.video_segment_id}, {"role", to_string(a.role)},
           {"week", a.week}, {"status", to_string(a.status)}};
}

void from_json(const json& j, Assignment& a) {
  a.assignment_id = j.at("assignment_id").get<std::string>();
  a.account_id = j.at("account").get<std::string>();
  a.video_segment_id = j.at("video_segment").get<std::string>();
  a.role = role_from_string(j.at("role").get<std::string>());
  a.week = j.at("week").get<std::string>();
  a.status = assignment_status_from_string(j.at("status").get<std::string>());
}

json submission_view(const Submission& s, std::int64_t sequence_no) {
  json frames = json::object();
  for (const auto& [frame, boxes] : s.frames) {
    if (!boxes.empty()) frames[std::to_string(frame)] = boxes;
  }
  return json{{"submission_id", s.id()},
              {"header", s.header},
              {"status", to_string(s.status)},
              {"sequence_no", sequence_no},
              {"current_frame", s.current_frame},
              {"visited", s.visited},
              {"frames", frames},
              {"total_boxes", s.total_boxes()},
              {"active_seconds", s.active_seconds()},
              {"submitted_at", s.submitted_at ? json(*s.submitted_at) : json(nullptr)}};
}

}  // namespace uavlabel
