#include "uavlabel/events.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

#include "uavlabel/error.hpp"
#include "uavlabel/serialization.hpp"

namespace uavlabel {

namespace {

constexpr std::pair<EventKind, std::string_view> kKindNames[] = {
    {EventKind::BoxDrawn, "BoxDrawn"},       {EventKind::BoxMoved, "BoxMoved"},
    {EventKind::BoxDeleted, "BoxDeleted"},   {EventKind::BoxReclassified, "BoxReclassified"},
    {EventKind::FrameVisited, "FrameVisited"}, {EventKind::Undo, "Undo"},
    {EventKind::TimeTick, "TimeTick"},       {EventKind::Submit, "Submit"},
    {EventKind::Delete, "Delete"},
};

bool confirmed(const nlohmann::json& payload) {
  return payload.is_object() && payload.value("confirm", false);
}

}  // namespace

std::string_view to_string(EventKind k) {
  for (const auto& [kind, name] : kKindNames) {
    if (kind == k) return name;
  }
  return "TimeTick";
}

EventKind event_kind_from_string(std::string_view s) {
  for (const auto& [kind, name] : kKindNames) {
    if (name == s) return kind;
  }
  fail(ErrorKind::Validation, "bad_event_kind", "unknown event kind '" + std::string(s) + "'");
}

void to_json(nlohmann::json& j, const SubmissionEvent& e) {
  j = nlohmann::json{{"sequence_no", e.sequence_no},
                     {"timestamp", e.timestamp},
                     {"kind", to_string(e.kind)},
                     {"payload", e.payload}};
}

void from_json(const nlohmann::json& j, SubmissionEvent& e) {
  e.sequence_no = field<std::int64_t>(j, "sequence_no");
  e.timestamp = j.value("timestamp", std::string());
  e.kind = event_kind_from_string(field<std::string>(j, "kind"));
  e.payload = j.value("payload", nlohmann::json::object());
}

void apply_event(Submission& sub, const SubmissionEvent& event) {
  const auto& p = event.payload;
  // Workflow operations validate before mutating, so a throw leaves `sub`
  // as it was.
  switch (event.kind) {
    case EventKind::BoxDrawn: {
      BoundingBox proposal;
      proposal.x = field<int>(p, "x");
      proposal.y = field<int>(p, "y");
      proposal.width = field<int>(p, "width");
      proposal.height = field<int>(p, "height");
      proposal.category = category_from_string(p.value("category", std::string("Animal")));
      std::optional<BoxId> id;
      if (p.contains("box_id") && !p.at("box_id").is_null()) id = field<BoxId>(p, "box_id");
      draw_box(sub, field<int>(p, "frame"), proposal, id);
      break;
    }
    case EventKind::BoxMoved: {
      const auto placements = field<std::vector<BoxPlacement>>(p, "boxes");
      move_boxes(sub, field<int>(p, "frame"), placements);
      break;
    }
    case EventKind::BoxDeleted:
      delete_box(sub, field<int>(p, "frame"), field<BoxId>(p, "box_id"));
      break;
    case EventKind::BoxReclassified:
      reclassify_box(sub, field<int>(p, "frame"), field<BoxId>(p, "box_id"),
                     category_from_string(field<std::string>(p, "category")));
      break;
    case EventKind::FrameVisited: {
      FrameVisit visit;
      try {
        visit = p.get<FrameVisit>();
      } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Validation, "bad_payload", e.what());
      }
      apply_visit(sub, visit);
      break;
    }
    case EventKind::Undo:
      if (!confirmed(p)) fail(ErrorKind::Validation, "confirmation_required", "undo must be confirmed");
      undo_frame(sub, field<int>(p, "frame"));
      break;
    case EventKind::TimeTick:
      record_time(sub, field<int>(p, "frame"), field<double>(p, "seconds"));
      break;
    case EventKind::Submit:
      submit(sub, confirmed(p), event.timestamp);
      break;
    case EventKind::Delete:
      delete_progress(sub, confirmed(p));
      break;
  }
}

std::string utc_timestamp() {
  using namespace std::chrono;
  const auto now = system_clock::now();
  const std::time_t t = system_clock::to_time_t(now);
  const auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[40];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

}  // namespace uavlabel
