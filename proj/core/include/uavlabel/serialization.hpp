#pragma once

// JSON mappings for the domain types. Field names are the wire names used by
// the HTTP API, the event log and the data-root files.

#include <nlohmann/json.hpp>

#include "uavlabel/consensus.hpp"
#include "uavlabel/error.hpp"
#include "uavlabel/geometry.hpp"
#include "uavlabel/workflow.hpp"

namespace uavlabel {

void to_json(nlohmann::json& j, BoxId id);
void from_json(const nlohmann::json& j, BoxId& id);
void to_json(nlohmann::json& j, const BoundingBox& b);
void from_json(const nlohmann::json& j, BoundingBox& b);
void to_json(nlohmann::json& j, const BoxPlacement& p);
void from_json(const nlohmann::json& j, BoxPlacement& p);
void to_json(nlohmann::json& j, const TimeLogEntry& e);
void from_json(const nlohmann::json& j, TimeLogEntry& e);
void to_json(nlohmann::json& j, const SubmissionHeader& h);
void from_json(const nlohmann::json& j, SubmissionHeader& h);
void to_json(nlohmann::json& j, const Submission& s);
void from_json(const nlohmann::json& j, Submission& s);
void to_json(nlohmann::json& j, const FrameVisit& v);
void from_json(const nlohmann::json& j, FrameVisit& v);
void to_json(nlohmann::json& j, const FinalLabel& f);
void from_json(const nlohmann::json& j, FinalLabel& f);
void to_json(nlohmann::json& j, const VideoSegment& s);
void from_json(const nlohmann::json& j, VideoSegment& s);
void to_json(nlohmann::json& j, const Assignment& a);
void from_json(const nlohmann::json& j, Assignment& a);

/// Submission as shown to clients: header, boxes per frame, visit state and
/// totals. Entry snapshots are internal and left out.
nlohmann::json submission_view(const Submission& s, std::int64_t sequence_no);

/// Reads a required field, mapping absence or a type mismatch to
/// Error(Validation) naming the field.
template <typename T>
T field(const nlohmann::json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) {
    fail(ErrorKind::Validation, "missing_field", std::string("missing field '") + name + "'");
  }
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorKind::Validation, "bad_field", std::string("field '") + name + "' has the wrong type");
  }
}

}  // namespace uavlabel
