#include "uavlabel/consensus.hpp"

#include <algorithm>
#include <set>

#include "uavlabel/error.hpp"

namespace uavlabel {

void ConsensusConfig::validate() const {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    fail(ErrorKind::Configuration, "bad_iou_threshold", "IoU threshold must lie in (0, 1]");
  }
  if (panel_size < 1 || quorum < 1 || quorum > panel_size) {
    fail(ErrorKind::Configuration, "bad_quorum", "quorum must lie in [1, panel_size]");
  }
}

namespace {

bool by_id(const BoundingBox& a, const BoundingBox& b) {
  return to_underlying(a.box_id) < to_underlying(b.box_id);
}

}  // namespace

std::vector<FinalLabel> majority_vote_frame(std::span<const PanelSet> sets, const ConsensusConfig& cfg) {
  cfg.validate();
  if (sets.size() != static_cast<std::size_t>(cfg.panel_size)) {
    fail(ErrorKind::Configuration, "wrong_panel_size",
         "expected " + std::to_string(cfg.panel_size) + " label sets, got " + std::to_string(sets.size()));
  }

  // Work on id-sorted copies so results do not depend on input box order.
  std::vector<std::vector<BoundingBox>> boxes;
  std::vector<std::vector<bool>> consumed;
  for (const auto& set : sets) {
    boxes.push_back(set.boxes);
    std::sort(boxes.back().begin(), boxes.back().end(), by_id);
    consumed.emplace_back(set.boxes.size(), false);
  }
  std::optional<int> frame;
  for (const auto& list : boxes) {
    for (const auto& b : list) {
      if (frame && *frame != b.frame_index) {
        fail(ErrorKind::Domain, "mixed_frames", "majority_vote_frame requires boxes from one frame");
      }
      frame = b.frame_index;
    }
  }

  std::vector<FinalLabel> out;
  for (std::size_t anchor_set = 0; anchor_set < boxes.size(); ++anchor_set) {
    for (std::size_t a = 0; a < boxes[anchor_set].size(); ++a) {
      if (consumed[anchor_set][a]) continue;
      const BoundingBox& anchor = boxes[anchor_set][a];

      struct Member {
        std::size_t set;
        std::size_t index;
      };
      std::vector<Member> cluster{{anchor_set, a}};
      for (std::size_t other = 0; other < boxes.size(); ++other) {
        if (other == anchor_set) continue;
        std::vector<BoundingBox> available;
        std::vector<std::size_t> origin;
        for (std::size_t j = 0; j < boxes[other].size(); ++j) {
          if (consumed[other][j]) continue;
          available.push_back(boxes[other][j]);
          origin.push_back(j);
        }
        const auto matches = greedy_match(std::span(&anchor, 1), available, cfg.iou_threshold);
        if (matches.empty()) continue;
        const auto hit = std::find_if(available.begin(), available.end(), [&](const BoundingBox& b) {
          return b.box_id == matches.front().other_box_id;
        });
        cluster.push_back({other, origin[static_cast<std::size_t>(hit - available.begin())]});
      }

      if (cluster.size() < static_cast<std::size_t>(cfg.quorum)) continue;

      // Distinct panel seats sharing an account do not add support.
      std::set<AccountId> supporters;
      for (const auto& m : cluster) supporters.insert(sets[m.set].labeler);
      if (supporters.size() < static_cast<std::size_t>(cfg.quorum)) continue;

      int animals = 0;
      int humans = 0;
      for (const auto& m : cluster) {
        consumed[m.set][m.index] = true;
        (boxes[m.set][m.index].category == Category::Animal ? animals : humans)++;
      }

      FinalLabel label;
      label.box = anchor;
      label.box.category = animals > humans   ? Category::Animal
                           : humans > animals ? Category::Human
                                              : anchor.category;
      label.supporting_labelers.assign(supporters.begin(), supporters.end());
      label.framework = Framework::MajVote;
      out.push_back(std::move(label));
    }
  }

  std::stable_sort(out.begin(), out.end(),
                   [](const FinalLabel& l, const FinalLabel& r) { return by_id(l.box, r.box); });
  return out;
}

std::vector<FinalLabel> majority_vote_video(std::span<const Submission> submissions,
                                            const ConsensusConfig& cfg) {
  cfg.validate();
  if (submissions.size() != static_cast<std::size_t>(cfg.panel_size)) {
    fail(ErrorKind::Configuration, "wrong_panel_size",
         "expected " + std::to_string(cfg.panel_size) + " submissions, got " +
             std::to_string(submissions.size()));
  }
  const auto& segment = submissions.front().header.video_segment_id;
  std::set<int> frames;
  for (const auto& s : submissions) {
    if (s.header.video_segment_id != segment) {
      fail(ErrorKind::Domain, "segment_mismatch", "submissions cover different segments");
    }
    if (s.header.mode != SubmissionMode::Label || s.status != SubmissionStatus::Submitted) {
      fail(ErrorKind::State, "not_submitted", "submission " + s.id() + " is not a submitted Label submission");
    }
    for (const auto& [frame, list] : s.frames) {
      if (!list.empty()) frames.insert(frame);
    }
  }

  std::vector<FinalLabel> out;
  for (const int frame : frames) {
    std::vector<PanelSet> sets;
    for (const auto& s : submissions) {
      const auto list = s.boxes(frame);
      sets.push_back({s.header.labeler_id, {list.begin(), list.end()}});
    }
    auto labels = majority_vote_frame(sets, cfg);
    out.insert(out.end(), std::make_move_iterator(labels.begin()), std::make_move_iterator(labels.end()));
  }
  return out;
}

std::vector<FinalLabel> review_merge(const Submission& original, const Submission& review) {
  if (review.header.mode != SubmissionMode::Review ||
      review.header.reviewed_submission_id != original.id()) {
    fail(ErrorKind::Integrity, "dangling_reference",
         "submission " + review.id() + " is not a review of " + original.id());
  }
  if (review.status != SubmissionStatus::Submitted) {
    fail(ErrorKind::State, "not_submitted", "review " + review.id() + " has not been submitted");
  }
  std::vector<FinalLabel> out;
  for (const auto& [frame, list] : review.frames) {
    std::vector<BoundingBox> ordered = list;
    std::stable_sort(ordered.begin(), ordered.end(), by_id);
    for (const auto& box : ordered) {
      out.push_back({box, {box.author_id}, Framework::LabelReview, review.header.labeler_id});
    }
  }
  return out;
}

}  // namespace uavlabel
