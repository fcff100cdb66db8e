#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uavlabel/geometry.hpp"
#include "uavlabel/image.hpp"
#include "uavlabel/tracker.hpp"

namespace uavlabel {

using VideoId = std::string;
using SegmentId = std::string;
using SubmissionId = std::string;

enum class SubmissionMode { Label, Review };
enum class SubmissionStatus { InProgress, Submitted, Deleted };
enum class Framework { MajVote, LabelReview };

std::string_view to_string(SubmissionMode m);
std::string_view to_string(SubmissionStatus s);
std::string_view to_string(Framework f);
SubmissionMode mode_from_string(std::string_view s);
SubmissionStatus status_from_string(std::string_view s);
/// Accepts "MajVote"/"majvote" and "LabelReview"/"labelreview".
Framework framework_from_string(std::string_view s);

struct TimeLogEntry {
  int frame_index = 0;
  double active_seconds = 0.0;

  friend bool operator==(const TimeLogEntry&, const TimeLogEntry&) = default;
};

/// Immutable facts fixed when a submission is created.
struct SubmissionHeader {
  SubmissionId submission_id;
  SegmentId video_segment_id;
  VideoId video_id;
  AccountId labeler_id;
  SubmissionMode mode = SubmissionMode::Label;
  std::optional<SubmissionId> reviewed_submission_id;
  int first_frame = 0;
  int last_frame = 0;
  int frame_width = 0;
  int frame_height = 0;
  int min_box_size = kDefaultMinBoxSize;
  std::string created_at;

  friend bool operator==(const SubmissionHeader&, const SubmissionHeader&) = default;
};

/// One labeler's (or reviewer's) evolving label set for a video segment.
struct Submission {
  SubmissionHeader header;
  std::map<int, std::vector<BoundingBox>> frames;
  std::set<int> visited;
  std::map<int, std::vector<BoundingBox>> entry_snapshots;
  std::map<int, int> propagation_count;
  SubmissionStatus status = SubmissionStatus::InProgress;
  std::vector<TimeLogEntry> time_log;
  std::uint64_t next_box_id = 1;
  int current_frame = 0;
  std::optional<std::string> submitted_at;

  const SubmissionId& id() const { return header.submission_id; }
  std::span<const BoundingBox> boxes(int frame) const;
  std::size_t total_boxes() const;
  double active_seconds() const;

  friend bool operator==(const Submission&, const Submission&) = default;
};

using FrameLoader = std::function<FrameImage(int frame_index)>;

/// Fresh Label submission positioned on the segment's first frame.
Submission start_label_submission(SubmissionHeader header);

/// Review submission seeded with the original's boxes. The original must be
/// a submitted Label submission of the same segment by someone else.
Submission start_review_submission(SubmissionHeader header, const Submission& original);

/// Result of navigating between frames; stored in the event log so replay
/// never needs pixel data.
struct FrameVisit {
  int from = 0;
  int to = 0;
  bool propagated = false;
  std::vector<BoundingBox> populated;

  friend bool operator==(const FrameVisit&, const FrameVisit&) = default;
};

/// Works out what a move from `from` to `to` does without changing `sub`.
/// Boxes are carried forward only in Label mode, only for `to == from + 1`,
/// and only on the first visit to `to`; `load_frame` is called only when
/// tracking actually runs.
FrameVisit plan_advance(const Submission& sub, int from, int to, bool tracker_enabled,
                        const TrackerConfig& cfg, const FrameLoader& load_frame);

/// Enters frame `visit.to`: adds populated boxes, marks it visited and takes
/// the entry snapshot used by undo.
void apply_visit(Submission& sub, const FrameVisit& visit);

FrameVisit advance_frame(Submission& sub, int from, int to, bool tracker_enabled,
                         const TrackerConfig& cfg, const FrameLoader& load_frame);

// Box edits. All require an InProgress submission and a visited frame; a box
// that fails the size filter after clipping is rejected with Error(Validation).
BoxId draw_box(Submission& sub, int frame, const BoundingBox& proposal,
               std::optional<BoxId> requested_id = std::nullopt);

struct BoxPlacement {
  BoxId box_id{};
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  friend bool operator==(const BoxPlacement&, const BoxPlacement&) = default;
};

/// Moves (and optionally resizes) one or more boxes as a single edit.
void move_boxes(Submission& sub, int frame, std::span<const BoxPlacement> placements);
void delete_box(Submission& sub, int frame, BoxId id);
void reclassify_box(Submission& sub, int frame, BoxId id, Category category);

/// Restores `frame` to its entry snapshot.
void undo_frame(Submission& sub, int frame);

void record_time(Submission& sub, int frame, double active_seconds);

void submit(Submission& sub, bool confirmed, std::string timestamp);
void delete_progress(Submission& sub, bool confirmed);

// Segments and assignments -------------------------------------------------

struct VideoSegment {
  SegmentId segment_id;
  VideoId video_id;
  int first_frame = 0;
  int last_frame = 0;
  std::string predecessor_note;

  int frame_count() const { return last_frame - first_frame + 1; }
  friend bool operator==(const VideoSegment&, const VideoSegment&) = default;
};

SegmentId segment_id_for(const VideoId& video, std::size_t index);

std::vector<VideoSegment> split_video(const VideoId& video, int frame_count,
                                      int max_frames_per_segment);

enum class AssignmentRole { Label, Review };
enum class AssignmentStatus { Open, Done, Reassigned };

std::string_view to_string(AssignmentRole r);
std::string_view to_string(AssignmentStatus s);
AssignmentRole role_from_string(std::string_view s);
AssignmentStatus assignment_status_from_string(std::string_view s);

struct Assignment {
  std::string assignment_id;
  AccountId account_id;
  SegmentId video_segment_id;
  AssignmentRole role = AssignmentRole::Label;
  std::string week;
  AssignmentStatus status = AssignmentStatus::Open;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// Distributes segments over labelers.
///
/// MajVote gives each segment `panel_size` Label assignments to distinct
/// labelers; LabelReview gives one Label and one Review assignment to two
/// distinct labelers. Each pick takes the labeler with the fewest open
/// assignments in that role, then the fewest open assignments overall, then
/// the lowest account id. `existing` seeds those counts and the id sequence.
std::vector<Assignment> create_assignments(std::span<const VideoSegment> segments,
                                           std::span<const AccountId> labelers,
                                           Framework framework, const std::string& week,
                                           std::span<const Assignment> existing = {},
                                           int panel_size = 5);

/// The shareable spreadsheet: `assignment_id,account,video_segment,role,week,status`.
std::string assignments_to_csv(std::span<const Assignment> assignments);

/// ISO-8601 week of the current UTC date, e.g. "2026-W42".
std::string current_iso_week();

}  // namespace uavlabel
