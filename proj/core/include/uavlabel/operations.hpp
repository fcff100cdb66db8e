#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "uavlabel/store.hpp"
#include "uavlabel/tracker.hpp"

namespace uavlabel {

// Submission operations on behalf of an authenticated account. Ownership and
// assignment checks live here so every front end enforces the same rules.

/// Error(Forbidden) unless `who` is an Admin.
void require_admin(const AccountInfo& who);

/// Creates a submission for a segment `who` is assigned to in the matching
/// role. Review submissions name the submitted Label submission they review.
LoadedSubmission open_submission(DataRoot& root, const AccountInfo& who, const SegmentId& segment,
                                 SubmissionMode mode, const std::optional<SubmissionId>& reviewed = std::nullopt);

/// The owner and admins may read a submission; so may the reviewer assigned
/// to a Label submission's segment.
LoadedSubmission read_submission(DataRoot& root, const AccountInfo& who, const SubmissionId& id);

/// Appends autosaved edits in order and returns the last stored sequence
/// number. Navigation, submit and delete have their own operations and are
/// rejected here. Events before a failing one stay stored.
std::int64_t append_edits(DataRoot& root, const AccountInfo& who, const SubmissionId& id,
                          std::span<const SubmissionEvent> events);

struct AdvanceResult {
  std::int64_t sequence_no = -1;
  std::size_t created = 0;              // boxes carried onto the target frame
  std::vector<BoundingBox> boxes;       // all boxes now on the target frame
};

/// Navigates from `from` to `to`, running the tracker on the stored frame
/// when enabled. `expected_sequence_no`, when given, must be the next number.
AdvanceResult advance(DataRoot& root, const AccountInfo& who, const SubmissionId& id, int from, int to,
                      bool tracker_enabled, const TrackerConfig& tracker,
                      std::optional<std::int64_t> expected_sequence_no = std::nullopt);

std::int64_t submit_submission(DataRoot& root, const AccountInfo& who, const SubmissionId& id, bool confirmed);
std::int64_t discard_progress(DataRoot& root, const AccountInfo& who, const SubmissionId& id, bool confirmed);

struct SubmissionSummary {
  SubmissionHeader header;
  SubmissionStatus status = SubmissionStatus::InProgress;
  std::int64_t sequence_no = -1;
  std::size_t total_boxes = 0;
};

/// Submissions of a video visible to `who`: everything for admins; for a
/// labeler their own plus the submitted Label submissions of segments they
/// are assigned to review.
std::vector<SubmissionSummary> video_submissions(DataRoot& root, const AccountInfo& who, const VideoId& video);

/// Assignments of `who` (all of them for admins).
std::vector<Assignment> visible_assignments(const DataRoot& root, const AccountInfo& who);

}  // namespace uavlabel
