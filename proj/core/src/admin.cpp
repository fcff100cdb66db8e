#include "uavlabel/admin.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

#include "uavlabel/error.hpp"
#include "uavlabel/serialization.hpp"

namespace uavlabel {

namespace fs = std::filesystem;
using nlohmann::json;

AssignResult assign_video(DataRoot& root, const AssignRequest& request, const ConsensusConfig& cfg) {
  cfg.validate();
  const VideoMeta meta = root.videos.meta(request.video_id);
  for (const auto& who : request.labelers) {
    const auto account = root.accounts.find(who);
    if (!account) fail(ErrorKind::Validation, "unknown_labeler", "no account " + who);
  }
  const int per_segment = request.max_frames_per_segment > 0 ? request.max_frames_per_segment : meta.frame_count;

  AssignResult result;
  result.segments = split_video(meta.video_id, meta.frame_count, per_segment);
  const auto existing = root.project.assignments();
  result.assignments = create_assignments(result.segments, request.labelers, request.framework,
                                          request.week.empty() ? current_iso_week() : request.week,
                                          existing, cfg.panel_size);
  root.project.add_segments(result.segments);
  root.project.add_assignments(result.assignments);
  return result;
}

namespace {

// "a12" sorts after "a9".
bool assignment_order(const Assignment& l, const Assignment& r) {
  auto key = [](const Assignment& a) {
    long n = -1;
    if (a.assignment_id.size() > 1 && a.assignment_id[0] == 'a') {
      try {
        n = std::stol(a.assignment_id.substr(1));
      } catch (const std::exception&) {
      }
    }
    return std::tuple(n, a.assignment_id);
  };
  return key(l) < key(r);
}

std::string describe(const Assignment& a) {
  return a.assignment_id + " (" + a.account_id + ", " + std::string(to_string(a.role)) + ")";
}

}  // namespace

StoredFinals run_consensus(DataRoot& root, const SegmentId& segment_id, const ConsensusConfig& cfg) {
  cfg.validate();
  const VideoSegment segment = root.project.segment(segment_id);

  std::vector<Assignment> label_jobs;
  std::vector<Assignment> review_jobs;
  for (const auto& a : root.project.assignments()) {
    if (a.video_segment_id != segment_id || a.status == AssignmentStatus::Reassigned) continue;
    (a.role == AssignmentRole::Label ? label_jobs : review_jobs).push_back(a);
  }
  std::sort(label_jobs.begin(), label_jobs.end(), assignment_order);
  std::sort(review_jobs.begin(), review_jobs.end(), assignment_order);

  const Framework framework = review_jobs.empty() ? Framework::MajVote : Framework::LabelReview;
  if (framework == Framework::MajVote && label_jobs.size() != static_cast<std::size_t>(cfg.panel_size)) {
    fail(ErrorKind::Configuration, "wrong_panel_size",
         "segment " + segment_id + " has " + std::to_string(label_jobs.size()) + " label assignments, expected " +
             std::to_string(cfg.panel_size));
  }
  if (framework == Framework::LabelReview && (label_jobs.size() != 1 || review_jobs.size() != 1)) {
    fail(ErrorKind::Configuration, "bad_review_pair", "segment " + segment_id + " needs one label and one review assignment");
  }

  // Latest submitted submission per (account, mode) on this segment.
  std::vector<Submission> submitted;
  for (const auto& h : root.submissions.list()) {
    if (h.video_segment_id != segment_id) continue;
    auto loaded = root.submissions.load(h.submission_id);
    if (loaded.state.status == SubmissionStatus::Submitted) submitted.push_back(std::move(loaded.state));
  }
  auto find = [&](const AccountId& who, SubmissionMode mode,
                  const std::optional<SubmissionId>& reviews) -> const Submission* {
    const Submission* best = nullptr;
    for (const auto& s : submitted) {
      if (s.header.labeler_id != who || s.header.mode != mode) continue;
      if (reviews && s.header.reviewed_submission_id != reviews) continue;
      if (best == nullptr || std::tie(s.header.created_at, s.header.submission_id) >
                                 std::tie(best->header.created_at, best->header.submission_id)) {
        best = &s;
      }
    }
    return best;
  };

  std::vector<std::string> outstanding;
  std::vector<const Submission*> panel;
  for (const auto& job : label_jobs) {
    const Submission* s = find(job.account_id, SubmissionMode::Label, std::nullopt);
    if (s == nullptr) outstanding.push_back(describe(job));
    panel.push_back(s);
  }
  const Submission* review = nullptr;
  if (framework == Framework::LabelReview) {
    if (panel.front() != nullptr) review = find(review_jobs.front().account_id, SubmissionMode::Review, panel.front()->id());
    if (review == nullptr) outstanding.push_back(describe(review_jobs.front()));
  }
  if (!outstanding.empty()) {
    std::string message = "segment " + segment_id + " has outstanding assignments:";
    for (const auto& o : outstanding) message += " " + o;
    fail(ErrorKind::MissingPrerequisite, "outstanding_assignments", message);
  }

  StoredFinals finals{segment_id, segment.video_id, framework, {}, {}};
  if (framework == Framework::MajVote) {
    std::vector<Submission> subs;
    for (const auto* s : panel) {
      subs.push_back(*s);
      finals.submissions.push_back(s->id());
    }
    finals.labels = majority_vote_video(subs, cfg);
  } else {
    finals.submissions = {panel.front()->id(), review->id()};
    finals.labels = review_merge(*panel.front(), *review);
  }
  root.project.save_finals(finals);
  for (const auto& job : label_jobs) root.project.set_assignment_status(job.assignment_id, AssignmentStatus::Done);
  for (const auto& job : review_jobs) root.project.set_assignment_status(job.assignment_id, AssignmentStatus::Done);
  return finals;
}

std::vector<ExportRecord> collect_export(const DataRoot& root, std::span<const VideoId> videos) {
  std::vector<ExportRecord> out;
  for (const auto& finals : root.project.all_finals()) {
    if (!videos.empty() && std::find(videos.begin(), videos.end(), finals.video_id) == videos.end()) continue;
    for (const auto& f : finals.labels) {
      auto supporters = f.supporting_labelers;
      std::sort(supporters.begin(), supporters.end());
      out.push_back({finals.video_id, f.box.frame_index, f.box.x, f.box.y, f.box.width, f.box.height,
                     f.box.category, f.framework, std::move(supporters), f.reviewer_id});
    }
  }
  std::sort(out.begin(), out.end(), [](const ExportRecord& l, const ExportRecord& r) {
    return std::tie(l.video_id, l.frame_index, l.x, l.y, l.width, l.height, l.category, l.framework,
                    l.supporting_labelers, l.reviewer_id) <
           std::tie(r.video_id, r.frame_index, r.x, r.y, r.width, r.height, r.category, r.framework,
                    r.supporting_labelers, r.reviewer_id);
  });
  return out;
}

std::string format_export(std::span<const ExportRecord> records, ExportFormat format) {
  std::ostringstream os;
  if (format == ExportFormat::Csv) {
    os << "video_id,frame_index,x,y,width,height,category,framework,supporting_labelers,reviewer_id\n";
    for (const auto& r : records) {
      std::string supporters;
      for (const auto& s : r.supporting_labelers) supporters += (supporters.empty() ? "" : ";") + s;
      os << r.video_id << ',' << r.frame_index << ',' << r.x << ',' << r.y << ',' << r.width << ',' << r.height
         << ',' << to_string(r.category) << ',' << to_string(r.framework) << ',' << supporters << ','
         << r.reviewer_id.value_or("") << '\n';
    }
    return os.str();
  }
  for (const auto& r : records) {
    const json j{{"video_id", r.video_id},
                 {"frame_index", r.frame_index},
                 {"x", r.x},
                 {"y", r.y},
                 {"width", r.width},
                 {"height", r.height},
                 {"category", to_string(r.category)},
                 {"framework", to_string(r.framework)},
                 {"supporting_labelers", r.supporting_labelers},
                 {"reviewer_id", r.reviewer_id ? json(*r.reviewer_id) : json(nullptr)}};
    os << j.dump() << '\n';
  }
  return os.str();
}

std::vector<VideoRecord> gather_report_inputs(DataRoot& root) {
  const auto segments = root.project.segments();
  std::vector<VideoRecord> out;
  for (const auto& finals : root.project.all_finals()) {
    const auto seg = std::find_if(segments.begin(), segments.end(),
                                  [&](const VideoSegment& s) { return s.segment_id == finals.segment_id; });
    if (seg == segments.end()) continue;
    const VideoMeta meta = root.videos.meta(finals.video_id);

    VideoRecord record;
    record.video_id = seg->frame_count() == meta.frame_count ? finals.video_id : finals.segment_id;
    record.frame_count = seg->frame_count();
    record.framework = finals.framework;
    for (const auto& f : finals.labels) record.final_label_frames.push_back(f.box.frame_index);
    for (const auto& id : finals.submissions) {
      const auto sub = root.submissions.load(id).state;
      record.entries.push_back({record.video_id, sub.header.labeler_id,
                                sub.header.mode == SubmissionMode::Label ? ParticipantRole::Labeler
                                                                         : ParticipantRole::Reviewer,
                                sub.active_seconds(), static_cast<long>(sub.total_boxes())});
    }
    out.push_back(std::move(record));
  }
  return out;
}

ReportFiles write_report(DataRoot& root, const ReportOptions& options, const fs::path& out_dir) {
  ReportFiles files;
  const auto inputs = gather_report_inputs(root);
  files.report = build_report(inputs, options);
  fs::create_directories(out_dir);
  const std::pair<const char*, std::string> outputs[] = {
      {"report.json", report_to_json(files.report)},
      {"videos.csv", videos_to_csv(files.report)},
      {"entries.csv", entries_to_csv(files.report)},
      {"histogram_per_frame.csv", histogram_to_csv(files.report.histograms.per_frame)},
      {"histogram_per_labeled_frame.csv", histogram_to_csv(files.report.histograms.per_labeled_frame)},
  };
  for (const auto& [name, contents] : outputs) {
    write_file_atomically(out_dir / name, contents);
    files.written.push_back(out_dir / name);
  }
  return files;
}

}  // namespace uavlabel
