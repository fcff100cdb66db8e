#pragma once

#include <optional>
#include <span>
#include <vector>

#include "uavlabel/geometry.hpp"
#include "uavlabel/workflow.hpp"

namespace uavlabel {

struct ConsensusConfig {
  double iou_threshold = 0.5;
  int quorum = 3;
  int panel_size = 5;

  void validate() const;
};

struct FinalLabel {
  BoundingBox box;
  std::vector<AccountId> supporting_labelers;  // sorted, distinct
  Framework framework = Framework::MajVote;
  std::optional<AccountId> reviewer_id;

  friend bool operator==(const FinalLabel&, const FinalLabel&) = default;
};

/// One labeler's boxes on one frame.
struct PanelSet {
  AccountId labeler;
  std::vector<BoundingBox> boxes;
};

/// 3-of-5 style voting on a single frame.
///
/// Labelers are visited in panel order and each of their unconsumed boxes
/// (by ascending id) serves as an anchor. Every other labeler contributes at
/// most one unconsumed box, chosen by greedy IoU matching against the anchor
/// at `iou_threshold`. With at least `quorum` distinct supporters (the anchor
/// counts) the anchor's rectangle becomes a final label and every box of the
/// cluster is consumed. The category is the cluster majority, ties going to
/// the anchor. Output is ordered by anchor box id.
std::vector<FinalLabel> majority_vote_frame(std::span<const PanelSet> sets, const ConsensusConfig& cfg);

/// Frame-by-frame voting over `panel_size` submitted Label submissions of the
/// same segment, in panel order. Output is ordered by frame, then anchor id.
std::vector<FinalLabel> majority_vote_video(std::span<const Submission> submissions,
                                            const ConsensusConfig& cfg);

/// Final labels of a LabelReview pair: exactly the reviewer's box set, each
/// keeping its creator as author and recording the reviewer.
std::vector<FinalLabel> review_merge(const Submission& original, const Submission& review);

}  // namespace uavlabel
