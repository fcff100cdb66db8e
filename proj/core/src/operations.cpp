#include "uavlabel/operations.hpp"

#include <algorithm>

#include "uavlabel/error.hpp"
#include "uavlabel/serialization.hpp"

namespace uavlabel {

using nlohmann::json;

void require_admin(const AccountInfo& who) {
  if (who.role != AccountRole::Admin) fail(ErrorKind::Forbidden, "admin_only", "this action needs an admin account");
}

namespace {

bool assigned(const DataRoot& root, const AccountId& who, const SegmentId& segment, AssignmentRole role) {
  const auto all = root.project.assignments();
  return std::any_of(all.begin(), all.end(), [&](const Assignment& a) {
    return a.account_id == who && a.video_segment_id == segment && a.role == role &&
           a.status != AssignmentStatus::Reassigned;
  });
}

bool is_admin(const AccountInfo& who) { return who.role == AccountRole::Admin; }

// Mutations: owner or admin.
LoadedSubmission owned(DataRoot& root, const AccountInfo& who, const SubmissionId& id) {
  auto loaded = root.submissions.load(id);
  if (loaded.state.header.labeler_id != who.account_id && !is_admin(who)) {
    fail(ErrorKind::Forbidden, "not_owner", "submission " + id + " belongs to another account");
  }
  return loaded;
}

bool reviewable_by(const DataRoot& root, const AccountInfo& who, const Submission& s) {
  return s.header.mode == SubmissionMode::Label && s.status == SubmissionStatus::Submitted &&
         s.header.labeler_id != who.account_id &&
         assigned(root, who.account_id, s.header.video_segment_id, AssignmentRole::Review);
}

std::int64_t append_one(DataRoot& root, const SubmissionId& id, EventKind kind, json payload) {
  return root.submissions
      .append_with(id,
                   [&](const LoadedSubmission&) {
                     SubmissionEvent e;
                     e.kind = kind;
                     e.payload = payload;
                     return e;
                   })
      .first;
}

}  // namespace

LoadedSubmission open_submission(DataRoot& root, const AccountInfo& who, const SegmentId& segment,
                                 SubmissionMode mode, const std::optional<SubmissionId>& reviewed) {
  const VideoSegment seg = root.project.segment(segment);
  const AssignmentRole role = mode == SubmissionMode::Label ? AssignmentRole::Label : AssignmentRole::Review;
  if (!assigned(root, who.account_id, segment, role)) {
    fail(ErrorKind::Forbidden, "not_assigned",
         who.account_id + " has no " + std::string(to_string(role)) + " assignment for " + segment);
  }
  if (mode == SubmissionMode::Label && reviewed) {
    fail(ErrorKind::Validation, "unexpected_reference", "label submissions do not review anything");
  }
  if (mode == SubmissionMode::Review && !reviewed) {
    fail(ErrorKind::Validation, "missing_field", "review submissions must name the submission under review");
  }
  const VideoMeta meta = root.videos.meta(seg.video_id);

  SubmissionHeader header;
  header.video_segment_id = seg.segment_id;
  header.video_id = seg.video_id;
  header.labeler_id = who.account_id;
  header.mode = mode;
  header.reviewed_submission_id = reviewed;
  header.first_frame = seg.first_frame;
  header.last_frame = seg.last_frame;
  header.frame_width = meta.width;
  header.frame_height = meta.height;

  // Ids are <segment>-<account>-<L|R><n>; n counts up past existing ones.
  const std::string prefix = segment + "-" + who.account_id + "-" + (mode == SubmissionMode::Label ? "L" : "R");
  for (int n = 1;; ++n) {
    header.submission_id = prefix + std::to_string(n);
    if (root.submissions.exists(header.submission_id)) continue;
    try {
      return root.submissions.create(header);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Conflict) throw;  // lost a race for this id
    }
  }
}

LoadedSubmission read_submission(DataRoot& root, const AccountInfo& who, const SubmissionId& id) {
  auto loaded = root.submissions.load(id);
  if (loaded.state.header.labeler_id == who.account_id || is_admin(who) || reviewable_by(root, who, loaded.state)) {
    return loaded;
  }
  fail(ErrorKind::Forbidden, "not_owner", "submission " + id + " belongs to another account");
}

std::int64_t append_edits(DataRoot& root, const AccountInfo& who, const SubmissionId& id,
                          std::span<const SubmissionEvent> events) {
  std::int64_t last = owned(root, who, id).sequence_no;
  for (const auto& e : events) {
    if (e.kind == EventKind::FrameVisited || e.kind == EventKind::Submit || e.kind == EventKind::Delete) {
      fail(ErrorKind::Validation, "not_an_edit",
           std::string(to_string(e.kind)) + " events go through their own operation");
    }
  }
  for (const auto& e : events) last = root.submissions.append(id, e);
  return last;
}

AdvanceResult advance(DataRoot& root, const AccountInfo& who, const SubmissionId& id, int from, int to,
                      bool tracker_enabled, const TrackerConfig& tracker,
                      std::optional<std::int64_t> expected_sequence_no) {
  tracker.validate();
  owned(root, who, id);
  FrameVisit visit;
  const auto [seq, event] = root.submissions.append_with(id, [&](const LoadedSubmission& current) {
    if (expected_sequence_no && *expected_sequence_no != current.sequence_no + 1) {
      fail(ErrorKind::Conflict, "sequence_conflict",
           "expected sequence_no " + std::to_string(current.sequence_no + 1) + ", got " +
               std::to_string(*expected_sequence_no));
    }
    const Submission& sub = current.state;
    visit = plan_advance(sub, from, to, tracker_enabled, tracker,
                         [&](int frame) { return root.videos.frame(sub.header.video_id, frame); });
    SubmissionEvent e;
    e.kind = EventKind::FrameVisited;
    e.payload = json(visit);
    return e;
  });
  (void)event;
  const auto after = root.submissions.load(id);
  const auto boxes = after.state.boxes(to);
  return {seq, visit.populated.size(), {boxes.begin(), boxes.end()}};
}

std::int64_t submit_submission(DataRoot& root, const AccountInfo& who, const SubmissionId& id, bool confirmed) {
  owned(root, who, id);
  return append_one(root, id, EventKind::Submit, json{{"confirm", confirmed}});
}

std::int64_t discard_progress(DataRoot& root, const AccountInfo& who, const SubmissionId& id, bool confirmed) {
  owned(root, who, id);
  return append_one(root, id, EventKind::Delete, json{{"confirm", confirmed}});
}

std::vector<SubmissionSummary> video_submissions(DataRoot& root, const AccountInfo& who, const VideoId& video) {
  root.videos.meta(video);  // NotFound for unknown videos
  std::vector<SubmissionSummary> out;
  for (const auto& h : root.submissions.list()) {
    if (h.video_id != video) continue;
    const auto loaded = root.submissions.load(h.submission_id);
    if (!is_admin(who) && h.labeler_id != who.account_id && !reviewable_by(root, who, loaded.state)) continue;
    out.push_back({loaded.state.header, loaded.state.status, loaded.sequence_no, loaded.state.total_boxes()});
  }
  return out;
}

std::vector<Assignment> visible_assignments(const DataRoot& root, const AccountInfo& who) {
  auto all = root.project.assignments();
  if (!is_admin(who)) std::erase_if(all, [&](const Assignment& a) { return a.account_id != who.account_id; });
  return all;
}

}  // namespace uavlabel
