#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "uavlabel/analytics.hpp"
#include "uavlabel/consensus.hpp"
#include "uavlabel/store.hpp"

namespace uavlabel {

struct AssignRequest {
  VideoId video_id;
  Framework framework = Framework::LabelReview;
  int max_frames_per_segment = 0;  // 0: the whole video is one segment
  std::vector<AccountId> labelers;
  std::string week;                // empty: current ISO week
};

struct AssignResult {
  std::vector<VideoSegment> segments;
  std::vector<Assignment> assignments;
};

/// Splits the video into segments and distributes them. Labelers must be
/// existing accounts.
AssignResult assign_video(DataRoot& root, const AssignRequest& request, const ConsensusConfig& cfg = {});

/// Runs the framework the segment was assigned under and persists the final
/// labels. Error(MissingPrerequisite) lists every outstanding assignment.
StoredFinals run_consensus(DataRoot& root, const SegmentId& segment, const ConsensusConfig& cfg = {});

enum class ExportFormat { Csv, Jsonl };

struct ExportRecord {
  VideoId video_id;
  int frame_index = 0;
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
  Category category = Category::Animal;
  Framework framework = Framework::LabelReview;
  std::vector<AccountId> supporting_labelers;
  std::optional<AccountId> reviewer_id;

  friend bool operator==(const ExportRecord&, const ExportRecord&) = default;
};

/// Final labels of the given videos (all when empty), sorted by
/// (video, frame, x, y) with the remaining fields as tie-breakers.
std::vector<ExportRecord> collect_export(const DataRoot& root, std::span<const VideoId> videos);
std::string format_export(std::span<const ExportRecord> records, ExportFormat format);

/// One report row per segment with stored final labels. Person time comes
/// from each participant's time log; label counts are the boxes each
/// participant produced (labelers) or left in place (reviewers).
std::vector<VideoRecord> gather_report_inputs(DataRoot& root);

struct ReportFiles {
  EfficiencyReport report;
  std::vector<std::filesystem::path> written;
};

/// Writes report.json, videos.csv, entries.csv, histogram_per_frame.csv and
/// histogram_per_labeled_frame.csv into `out_dir`.
ReportFiles write_report(DataRoot& root, const ReportOptions& options, const std::filesystem::path& out_dir);

}  // namespace uavlabel
