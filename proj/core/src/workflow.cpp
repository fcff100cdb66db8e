#include "uavlabel/workflow.hpp"

#include <algorithm>
#include <ctime>
#include <numeric>
#include <sstream>
#include <tuple>

#include "uavlabel/error.hpp"

namespace uavlabel {

std::string_view to_string(SubmissionMode m) { return m == SubmissionMode::Label ? "Label" : "Review"; }

std::string_view to_string(SubmissionStatus s) {
  switch (s) {
    case SubmissionStatus::InProgress: return "InProgress";
    case SubmissionStatus::Submitted: return "Submitted";
    case SubmissionStatus::Deleted: return "Deleted";
  }
  return "InProgress";
}

std::string_view to_string(Framework f) { return f == Framework::MajVote ? "MajVote" : "LabelReview"; }

SubmissionMode mode_from_string(std::string_view s) {
  if (s == "Label") return SubmissionMode::Label;
  if (s == "Review") return SubmissionMode::Review;
  fail(ErrorKind::Validation, "bad_mode", "mode must be Label or Review");
}

SubmissionStatus status_from_string(std::string_view s) {
  if (s == "InProgress") return SubmissionStatus::InProgress;
  if (s == "Submitted") return SubmissionStatus::Submitted;
  if (s == "Deleted") return SubmissionStatus::Deleted;
  fail(ErrorKind::Validation, "bad_status", "unknown submission status '" + std::string(s) + "'");
}

Framework framework_from_string(std::string_view s) {
  if (s == "MajVote" || s == "majvote") return Framework::MajVote;
  if (s == "LabelReview" || s == "labelreview") return Framework::LabelReview;
  fail(ErrorKind::Validation, "bad_framework", "framework must be majvote or labelreview");
}

std::span<const BoundingBox> Submission::boxes(int frame) const {
  const auto it = frames.find(frame);
  if (it == frames.end()) return {};
  return it->second;
}

std::size_t Submission::total_boxes() const {
  std::size_t n = 0;
  for (const auto& [_, list] : frames) n += list.size();
  return n;
}

double Submission::active_seconds() const {
  return std::accumulate(time_log.begin(), time_log.end(), 0.0,
                         [](double acc, const TimeLogEntry& e) { return acc + e.active_seconds; });
}

namespace {

void require_in_progress(const Submission& sub) {
  if (sub.status != SubmissionStatus::InProgress) {
    fail(ErrorKind::State, "not_in_progress",
         "submission " + sub.id() + " is " + std::string(to_string(sub.status)));
  }
}

void require_in_segment(const Submission& sub, int frame) {
  if (frame < sub.header.first_frame || frame > sub.header.last_frame) {
    fail(ErrorKind::Domain, "frame_out_of_range",
         "frame " + std::to_string(frame) + " is outside the segment");
  }
}

void require_editable(const Submission& sub, int frame) {
  require_in_progress(sub);
  require_in_segment(sub, frame);
  if (!sub.visited.contains(frame)) {
    fail(ErrorKind::Domain, "frame_not_visited", "frame " + std::to_string(frame) + " has not been visited");
  }
}

std::vector<BoundingBox>::iterator find_box(Submission& sub, int frame, BoxId id) {
  auto& list = sub.frames[frame];
  auto it = std::find_if(list.begin(), list.end(), [&](const BoundingBox& b) { return b.box_id == id; });
  if (it == list.end()) {
    fail(ErrorKind::NotFound, "box_not_found",
         "box " + std::to_string(to_underlying(id)) + " not on frame " + std::to_string(frame));
  }
  return it;
}

BoundingBox filtered(const Submission& sub, const BoundingBox& box) {
  auto clipped = clamp_and_filter(box, sub.header.frame_width, sub.header.frame_height,
                                  sub.header.min_box_size);
  if (!clipped) {
    fail(ErrorKind::Validation, "box_too_small", "box is below the minimum size after clipping");
  }
  return *clipped;
}

void validate_header(const SubmissionHeader& h) {
  if (h.submission_id.empty() || h.labeler_id.empty()) {
    fail(ErrorKind::Validation, "bad_header", "submission id and labeler are required");
  }
  if (h.first_frame < 0 || h.first_frame > h.last_frame) {
    fail(ErrorKind::Validation, "bad_header", "segment frame range is empty");
  }
  if (h.frame_width <= 0 || h.frame_height <= 0) {
    fail(ErrorKind::Validation, "bad_header", "frame dimensions must be positive");
  }
  if (h.mode == SubmissionMode::Review && !h.reviewed_submission_id) {
    fail(ErrorKind::Validation, "bad_header", "review submissions must reference a submission");
  }
}

void enter(Submission& sub, int frame) {
  sub.visited.insert(frame);
  sub.entry_snapshots[frame] = sub.frames[frame];
  sub.current_frame = frame;
}

}  // namespace

Submission start_label_submission(SubmissionHeader header) {
  header.mode = SubmissionMode::Label;
  header.reviewed_submission_id.reset();
  validate_header(header);
  Submission sub;
  sub.header = std::move(header);
  enter(sub, sub.header.first_frame);
  return sub;
}

Submission start_review_submission(SubmissionHeader header, const Submission& original) {
  header.mode = SubmissionMode::Review;
  validate_header(header);
  if (*header.reviewed_submission_id != original.id()) {
    fail(ErrorKind::Integrity, "dangling_reference", "review does not reference " + original.id());
  }
  if (original.header.mode != SubmissionMode::Label || original.status != SubmissionStatus::Submitted) {
    fail(ErrorKind::State, "not_reviewable", "only submitted Label submissions can be reviewed");
  }
  if (original.header.labeler_id == header.labeler_id) {
    fail(ErrorKind::Forbidden, "self_review", "labelers cannot review their own submission");
  }
  if (original.header.video_segment_id != header.video_segment_id) {
    fail(ErrorKind::Integrity, "segment_mismatch", "review must cover the original's segment");
  }
  Submission sub;
  sub.header = std::move(header);
  for (const auto& [frame, list] : original.frames) {
    if (!list.empty()) sub.frames[frame] = list;
  }
  sub.next_box_id = original.next_box_id;
  enter(sub, sub.header.first_frame);
  return sub;
}

FrameVisit plan_advance(const Submission& sub, int from, int to, bool tracker_enabled,
                        const TrackerConfig& cfg, const FrameLoader& load_frame) {
  require_in_progress(sub);
  require_in_segment(sub, from);
  require_in_segment(sub, to);
  if (!sub.visited.contains(from)) {
    fail(ErrorKind::Domain, "frame_not_visited", "cannot navigate from an unvisited frame");
  }

  FrameVisit visit{from, to, false, {}};
  const bool eligible = sub.header.mode == SubmissionMode::Label && to == from + 1 &&
                        !sub.visited.contains(to);
  if (!eligible) return visit;

  visit.propagated = true;
  const auto source = sub.boxes(from);
  if (source.empty()) return visit;
  if (tracker_enabled) {
    const FrameImage frame = load_frame(to);
    visit.populated = track_boxes(source, frame, cfg);
  } else {
    visit.populated = copy_boxes(source);
  }
  return visit;
}

void apply_visit(Submission& sub, const FrameVisit& visit) {
  require_in_progress(sub);
  require_in_segment(sub, visit.from);
  require_in_segment(sub, visit.to);
  if (visit.propagated) {
    if (sub.header.mode != SubmissionMode::Label || visit.to != visit.from + 1 ||
        sub.visited.contains(visit.to)) {
      fail(ErrorKind::State, "propagation_not_allowed", "frame already visited or not eligible");
    }
    for (const auto& b : visit.populated) {
      if (b.frame_index != visit.to) {
        fail(ErrorKind::Validation, "frame_mismatch", "populated box is on the wrong frame");
      }
    }
  } else if (!visit.populated.empty()) {
    fail(ErrorKind::Validation, "unexpected_boxes", "non-propagating visit carries boxes");
  } else if (sub.header.mode == SubmissionMode::Label && visit.to == visit.from + 1 &&
             sub.visited.contains(visit.from) && !sub.visited.contains(visit.to)) {
    // A first forward visit always propagates (possibly zero boxes).
    fail(ErrorKind::State, "propagation_required", "first forward visit must go through advance");
  }
  if (!sub.visited.contains(visit.from)) {
    fail(ErrorKind::Domain, "frame_not_visited", "cannot navigate from an unvisited frame");
  }

  if (visit.propagated) {
    auto& list = sub.frames[visit.to];
    list.insert(list.end(), visit.populated.begin(), visit.populated.end());
    ++sub.propagation_count[visit.to];
  }
  enter(sub, visit.to);
}

FrameVisit advance_frame(Submission& sub, int from, int to, bool tracker_enabled,
                         const TrackerConfig& cfg, const FrameLoader& load_frame) {
  FrameVisit visit = plan_advance(sub, from, to, tracker_enabled, cfg, load_frame);
  apply_visit(sub, visit);
  return visit;
}

BoxId draw_box(Submission& sub, int frame, const BoundingBox& proposal,
               std::optional<BoxId> requested_id) {
  require_editable(sub, frame);
  if (requested_id && to_underlying(*requested_id) < sub.next_box_id) {
    fail(ErrorKind::Validation, "box_id_in_use", "box ids must be fresh");
  }
  BoundingBox box = proposal;
  box.frame_index = frame;
  box.origin = BoxOrigin::Drawn;
  box.author_id = sub.header.labeler_id;
  box.box_id = requested_id.value_or(BoxId{sub.next_box_id});
  box = filtered(sub, box);

  sub.next_box_id = to_underlying(box.box_id) + 1;
  sub.frames[frame].push_back(box);
  return box.box_id;
}

void move_boxes(Submission& sub, int frame, std::span<const BoxPlacement> placements) {
  require_editable(sub, frame);
  std::vector<BoundingBox> updated = sub.frames[frame];
  std::set<BoxId> seen;
  for (const auto& p : placements) {
    if (!seen.insert(p.box_id).second) {
      fail(ErrorKind::Validation, "duplicate_box", "a box may appear once per move");
    }
    auto it = std::find_if(updated.begin(), updated.end(),
                           [&](const BoundingBox& b) { return b.box_id == p.box_id; });
    if (it == updated.end()) {
      fail(ErrorKind::NotFound, "box_not_found",
           "box " + std::to_string(to_underlying(p.box_id)) + " not on frame " + std::to_string(frame));
    }
    BoundingBox moved = *it;
    moved.x = p.x;
    moved.y = p.y;
    moved.width = p.width;
    moved.height = p.height;
    moved = filtered(sub, moved);
    if (sub.header.mode == SubmissionMode::Review) moved.origin = BoxOrigin::ReviewEdited;
    *it = moved;
  }
  sub.frames[frame] = std::move(updated);
}

void delete_box(Submission& sub, int frame, BoxId id) {
  require_editable(sub, frame);
  auto it = find_box(sub, frame, id);
  sub.frames[frame].erase(it);
}

void reclassify_box(Submission& sub, int frame, BoxId id, Category category) {
  require_editable(sub, frame);
  auto it = find_box(sub, frame, id);
  it->category = category;
  if (sub.header.mode == SubmissionMode::Review) it->origin = BoxOrigin::ReviewEdited;
}

void undo_frame(Submission& sub, int frame) {
  require_editable(sub, frame);
  sub.frames[frame] = sub.entry_snapshots.at(frame);
}

void record_time(Submission& sub, int frame, double active_seconds) {
  require_in_progress(sub);
  require_in_segment(sub, frame);
  if (!(active_seconds >= 0.0)) {
    fail(ErrorKind::Validation, "bad_time", "active seconds must be non-negative");
  }
  sub.time_log.push_back({frame, active_seconds});
}

void submit(Submission& sub, bool confirmed, std::string timestamp) {
  require_in_progress(sub);
  if (!confirmed) fail(ErrorKind::Validation, "confirmation_required", "submit must be confirmed");
  sub.status = SubmissionStatus::Submitted;
  sub.submitted_at = std::move(timestamp);
}

void delete_progress(Submission& sub, bool confirmed) {
  require_in_progress(sub);
  if (!confirmed) fail(ErrorKind::Validation, "confirmation_required", "delete must be confirmed");
  sub.frames.clear();
  sub.entry_snapshots.clear();
  sub.visited.clear();
  sub.status = SubmissionStatus::Deleted;
}

// Segments and assignments -------------------------------------------------

std::string_view to_string(AssignmentRole r) { return r == AssignmentRole::Label ? "Label" : "Review"; }

std::string_view to_string(AssignmentStatus s) {
  switch (s) {
    case AssignmentStatus::Open: return "Open";
    case AssignmentStatus::Done: return "Done";
    case AssignmentStatus::Reassigned: return "Reassigned";
  }
  return "Open";
}

AssignmentRole role_from_string(std::string_view s) {
  if (s == "Label") return AssignmentRole::Label;
  if (s == "Review") return AssignmentRole::Review;
  fail(ErrorKind::Validation, "bad_role", "role must be Label or Review");
}

AssignmentStatus assignment_status_from_string(std::string_view s) {
  if (s == "Open") return AssignmentStatus::Open;
  if (s == "Done") return AssignmentStatus::Done;
  if (s == "Reassigned") return AssignmentStatus::Reassigned;
  fail(ErrorKind::Validation, "bad_status", "unknown assignment status '" + std::string(s) + "'");
}

SegmentId segment_id_for(const VideoId& video, std::size_t index) {
  return video + "_s" + std::to_string(index);
}

std::vector<VideoSegment> split_video(const VideoId& video, int frame_count, int max_frames_per_segment) {
  if (max_frames_per_segment < 1) {
    fail(ErrorKind::Validation, "bad_segment_size", "max frames per segment must be at least 1");
  }
  if (frame_count < 1) fail(ErrorKind::Validation, "empty_video", "video " + video + " has no frames");
  std::vector<VideoSegment> out;
  for (int first = 0; first < frame_count; first += max_frames_per_segment) {
    const int last = std::min(first + max_frames_per_segment, frame_count) - 1;
    out.push_back({segment_id_for(video, out.size()), video, first, last, {}});
  }
  return out;
}

namespace {

struct Load {
  int label = 0;
  int review = 0;
  int total() const { return label + review; }
};

int next_assignment_number(std::span<const Assignment> existing) {
  int next = 1;
  for (const auto& a : existing) {
    if (a.assignment_id.size() > 1 && a.assignment_id[0] == 'a') {
      try {
        next = std::max(next, std::stoi(a.assignment_id.substr(1)) + 1);
      } catch (const std::exception&) {
      }
    }
  }
  return next;
}

}  // namespace

std::vector<Assignment> create_assignments(std::span<const VideoSegment> segments,
                                           std::span<const AccountId> labelers, Framework framework,
                                           const std::string& week,
                                           std::span<const Assignment> existing, int panel_size) {
  std::vector<AccountId> pool(labelers.begin(), labelers.end());
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());

  const std::size_t needed = framework == Framework::MajVote ? static_cast<std::size_t>(panel_size) : 2;
  if (panel_size < 1 || pool.size() < needed) {
    fail(ErrorKind::Configuration, "insufficient_labelers",
         std::string(to_string(framework)) + " needs at least " + std::to_string(needed) +
             " distinct labelers, got " + std::to_string(pool.size()));
  }

  std::map<AccountId, Load> load;
  for (const auto& id : pool) load[id];
  for (const auto& a : existing) {
    if (a.status != AssignmentStatus::Open || !load.contains(a.account_id)) continue;
    (a.role == AssignmentRole::Label ? load[a.account_id].label : load[a.account_id].review)++;
  }

  auto pick = [&](AssignmentRole role, const std::set<AccountId>& excluded) {
    const AccountId* best = nullptr;
    auto key = [&](const AccountId& id) {
      const Load& l = load[id];
      return std::tuple(role == AssignmentRole::Label ? l.label : l.review, l.total(), id);
    };
    for (const auto& id : pool) {
      if (excluded.contains(id)) continue;
      if (best == nullptr || key(id) < key(*best)) best = &id;
    }
    return *best;
  };

  int number = next_assignment_number(existing);
  std::vector<Assignment> out;
  auto emit = [&](const VideoSegment& seg, const AccountId& who, AssignmentRole role) {
    out.push_back({"a" + std::to_string(number++), who, seg.segment_id, role, week, AssignmentStatus::Open});
    (role == AssignmentRole::Label ? load[who].label : load[who].review)++;
  };

  for (const auto& seg : segments) {
    std::set<AccountId> taken;
    if (framework == Framework::MajVote) {
      for (int i = 0; i < panel_size; ++i) {
        const AccountId who = pick(AssignmentRole::Label, taken);
        taken.insert(who);
        emit(seg, who, AssignmentRole::Label);
      }
    } else {
      const AccountId labeler = pick(AssignmentRole::Label, taken);
      taken.insert(labeler);
      emit(seg, labeler, AssignmentRole::Label);
      emit(seg, pick(AssignmentRole::Review, taken), AssignmentRole::Review);
    }
  }
  return out;
}

std::string assignments_to_csv(std::span<const Assignment> assignments) {
  std::ostringstream os;
  os << "assignment_id,account,video_segment,role,week,status\n";
  for (const auto& a : assignments) {
    os << a.assignment_id << ',' << a.account_id << ',' << a.video_segment_id << ','
       << to_string(a.role) << ',' << a.week << ',' << to_string(a.status) << '\n';
  }
  return os.str();
}

std::string current_iso_week() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[16];
  std::strftime(buf, sizeof buf, "%G-W%V", &tm);
  return buf;
}

}  // namespace uavlabel
