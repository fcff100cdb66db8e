#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "uavlabel/workflow.hpp"

namespace uavlabel {

enum class EventKind {
  BoxDrawn,
  BoxMoved,
  BoxDeleted,
  BoxReclassified,
  FrameVisited,
  Undo,
  TimeTick,
  Submit,
  Delete,
};

std::string_view to_string(EventKind k);
EventKind event_kind_from_string(std::string_view s);

/// One autosaved change. Payloads by kind:
///
///   BoxDrawn        {frame, x, y, width, height, category?, box_id?}
///   BoxMoved        {frame, boxes: [{box_id, x, y, width, height}, ...]}
///   BoxDeleted      {frame, box_id}
///   BoxReclassified {frame, box_id, category}
///   FrameVisited    {from, to, propagated, boxes: [...]}
///   Undo            {frame, confirm: true}
///   TimeTick        {frame, seconds}
///   Submit          {confirm: true}
///   Delete          {confirm: true}
struct SubmissionEvent {
  std::int64_t sequence_no = 0;
  std::string timestamp;
  EventKind kind = EventKind::TimeTick;
  nlohmann::json payload = nlohmann::json::object();

  friend bool operator==(const SubmissionEvent&, const SubmissionEvent&) = default;
};

void to_json(nlohmann::json& j, const SubmissionEvent& e);
void from_json(const nlohmann::json& j, SubmissionEvent& e);

/// Applies one event through the workflow rules. Leaves `sub` untouched and
/// throws if the event is not allowed in the current state.
void apply_event(Submission& sub, const SubmissionEvent& event);

/// Current UTC time, ISO-8601 with milliseconds.
std::string utc_timestamp();

}  // namespace uavlabel
