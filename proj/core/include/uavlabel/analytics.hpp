#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uavlabel/workflow.hpp"

namespace uavlabel {

enum class ParticipantRole { Labeler, Reviewer };
std::string_view to_string(ParticipantRole r);

struct TimePerLabelEntry {
  VideoId video_id;
  AccountId account_id;
  ParticipantRole role = ParticipantRole::Labeler;
  double person_seconds = 0.0;
  long label_count = 0;

  friend bool operator==(const TimePerLabelEntry&, const TimePerLabelEntry&) = default;
};

struct LabelDensity {
  double avg_per_frame = 0.0;
  std::optional<double> avg_per_labeled_frame;  // absent when no frame has a label
};

/// `label_frames` holds the frame index of every label of the video.
LabelDensity label_density(std::span<const int> label_frames, int frame_count);

/// Label-density groups (0,1), [1,2), [2,3), [3,inf); exactly zero is Empty.
enum class DensityGroup { Empty, G1, G2, G3, G4 };
std::string_view to_string(DensityGroup g);
DensityGroup density_group(double avg_per_frame);

/// Number of entries dropped from each end: floor(5% of n).
std::size_t trim_count(std::size_t n);

/// Sorts by seconds per label (stable) and drops trim_count(n) entries from
/// each end. Every entry must have label_count >= 1.
std::vector<TimePerLabelEntry> trim_outliers(std::vector<TimePerLabelEntry> entries);

/// Seconds per label; nullopt for an entry without labels.
std::optional<double> individual_efficiency(const TimePerLabelEntry& entry);

/// Everyone who worked on one video under one framework.
struct FrameworkRun {
  VideoId video_id;
  Framework framework = Framework::LabelReview;
  std::vector<double> participant_seconds;
  long final_label_count = 0;
};

/// Total person-seconds over all participants divided by the number of final
/// labels; nullopt when there are no final labels. MajVote runs must have
/// exactly `panel_size` participants and LabelReview runs exactly two.
std::optional<double> overall_efficiency(const FrameworkRun& run, int panel_size = 5);

struct HistogramBin {
  double low = 0.0;
  double high = 0.0;
  long count = 0;

  friend bool operator==(const HistogramBin&, const HistogramBin&) = default;
};

struct DensityHistograms {
  std::vector<HistogramBin> per_frame;
  std::vector<HistogramBin> per_labeled_frame;
};

struct VideoDensity {
  VideoId video_id;
  LabelDensity density;
};

/// Unit-width bins from 0; each histogram has at least `min_bins` bins and
/// is extended to cover its own largest value. Videos without labels count in
/// the first per-frame bin and are left out of the per-labeled-frame one.
DensityHistograms density_histogram(std::span<const VideoDensity> videos, int min_bins = 10);
std::string histogram_to_csv(std::span<const HistogramBin> bins);

// Report --------------------------------------------------------------------

struct VideoRecord {
  VideoId video_id;
  int frame_count = 0;
  Framework framework = Framework::LabelReview;
  std::vector<int> final_label_frames;
  std::vector<TimePerLabelEntry> entries;
};

struct ReportOptions {
  bool group_by_density = true;
  bool trim = true;
  bool global_trim = false;  // trim across all entries instead of per group
  int panel_size = 5;
};

struct VideoSummary {
  VideoId video_id;
  Framework framework = Framework::LabelReview;
  long final_label_count = 0;
  LabelDensity density;
  DensityGroup group = DensityGroup::Empty;
  std::optional<double> overall_seconds_per_label;
  double person_seconds = 0.0;
};

struct EntrySummary {
  TimePerLabelEntry entry;
  DensityGroup group = DensityGroup::Empty;
  std::optional<double> seconds_per_label;
  bool trimmed = false;
};

struct GroupSummary {
  std::string name;  // "G1".."G4", or "all" when not grouping by density
  std::size_t surviving_entries = 0;
  std::optional<double> mean_seconds_per_label;
  std::optional<double> standard_error;
  std::optional<double> mean_overall_seconds_per_final_label;
  std::size_t videos_with_final_labels = 0;
};

struct EfficiencyReport {
  std::vector<VideoSummary> videos;
  std::vector<EntrySummary> entries;
  std::vector<GroupSummary> groups;
  std::size_t trimmed_entries = 0;
  std::vector<VideoId> excluded_videos;  // no final labels: overall efficiency undefined
  DensityHistograms histograms;
};

EfficiencyReport build_report(std::span<const VideoRecord> videos, const ReportOptions& options);

std::string report_to_json(const EfficiencyReport& report);
std::string videos_to_csv(const EfficiencyReport& report);
std::string entries_to_csv(const EfficiencyReport& report);

}  // namespace uavlabel
