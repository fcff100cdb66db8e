#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "uavlabel/consensus.hpp"
#include "uavlabel/error.hpp"

namespace uavlabel {
namespace {

using testing::make_box;
using testing::test_header;

const std::vector<AccountId> kPanel{"p1", "p2", "p3", "p4", "p5"};

std::vector<PanelSet> panel(const std::vector<std::vector<BoundingBox>>& boxes) {
  std::vector<PanelSet> sets;
  for (std::size_t i = 0; i < boxes.size(); ++i) sets.push_back({kPanel[i], boxes[i]});
  return sets;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorKind::Io;
}

TEST(MajorityVoteFrame, FiveIdenticalBoxesGiveOneLabel) {
  std::vector<std::vector<BoundingBox>> boxes(5, {make_box(10, 10, 20, 20)});
  const auto out = majority_vote_frame(panel(boxes), ConsensusConfig{});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].supporting_labelers, kPanel);
  EXPECT_TRUE(out[0].box.same_rect(make_box(10, 10, 20, 20)));
  EXPECT_EQ(out[0].framework, Framework::MajVote);
  EXPECT_FALSE(out[0].reviewer_id);
}

TEST(MajorityVoteFrame, DisjointBoxesGiveNothing) {
  std::vector<std::vector<BoundingBox>> boxes;
  for (int i = 0; i < 5; ++i) boxes.push_back({make_box(30 * i, 0, 20, 20)});
  EXPECT_TRUE(majority_vote_frame(panel(boxes), ConsensusConfig{}).empty());
}

TEST(MajorityVoteFrame, ThreeOfFiveIsEnough) {
  const auto b = make_box(10, 10, 20, 20);
  const auto out = majority_vote_frame(panel({{}, {b}, {b}, {}, {b}}), ConsensusConfig{});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].supporting_labelers, (std::vector<AccountId>{"p2", "p3", "p5"}));
}

TEST(MajorityVoteFrame, TwoOfFiveIsNot) {
  const auto b = make_box(10, 10, 20, 20);
  EXPECT_TRUE(majority_vote_frame(panel({{b}, {}, {}, {b}, {}}), ConsensusConfig{}).empty());
}

TEST(MajorityVoteFrame, EmptyPanelGivesNothing) {
  EXPECT_TRUE(majority_vote_frame(panel({{}, {}, {}, {}, {}}), ConsensusConfig{}).empty());
}

TEST(MajorityVoteFrame, CategoryFollowsMajorityThenAnchor) {
  const auto animal = make_box(10, 10, 20, 20, 1, 0, Category::Animal);
  const auto human = make_box(10, 10, 20, 20, 1, 0, Category::Human);
  auto out = majority_vote_frame(panel({{animal}, {human}, {human}, {human}, {animal}}), ConsensusConfig{});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].box.category, Category::Human);
  // 2 vs 2: the anchor (first labeler) decides.
  out = majority_vote_frame(panel({{animal}, {human}, {human}, {animal}, {}}), ConsensusConfig{});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].box.category, Category::Animal);
}

TEST(MajorityVoteFrame, SupportersAreConsumed) {
  // Two clusters: the first uses up p2's only box, so the second falls short.
  const auto a = make_box(10, 10, 20, 20, 1);
  const auto b = make_box(14, 10, 20, 20, 2);
  const auto out = majority_vote_frame(panel({{a, b}, {a}, {a}, {}, {}}), ConsensusConfig{});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].box.box_id, BoxId{1});
}

TEST(MajorityVoteFrame, ThresholdAndQuorumAreConfigurable) {
  const auto a = make_box(0, 0, 10, 10);
  const auto shifted = make_box(3, 0, 10, 10);  // IoU 7/13
  ConsensusConfig loose;
  loose.iou_threshold = 0.5;
  EXPECT_EQ(majority_vote_frame(panel({{a}, {shifted}, {shifted}, {}, {}}), loose).size(), 1u);
  ConsensusConfig strict;
  strict.iou_threshold = 0.6;
  EXPECT_TRUE(majority_vote_frame(panel({{a}, {shifted}, {shifted}, {}, {}}), strict).empty());
  ConsensusConfig pair;
  pair.quorum = 2;
  EXPECT_EQ(majority_vote_frame(panel({{a}, {a}, {}, {}, {}}), pair).size(), 1u);
}

TEST(MajorityVoteFrame, RejectsBadInputs) {
  ConsensusConfig c;
  c.quorum = 6;
  EXPECT_EQ(kind_of([&] { c.validate(); }), ErrorKind::Configuration);
  c = {};
  c.iou_threshold = 0.0;
  EXPECT_EQ(kind_of([&] { c.validate(); }), ErrorKind::Configuration);
  const auto b = make_box(0, 0, 10, 10);
  EXPECT_EQ(kind_of([&] { majority_vote_frame(panel({{b}, {b}, {b}}), ConsensusConfig{}); }),
            ErrorKind::Configuration);
  const auto other = make_box(0, 0, 10, 10, 1, 4);
  EXPECT_EQ(kind_of([&] { majority_vote_frame(panel({{b}, {other}, {}, {}, {}}), ConsensusConfig{}); }),
            ErrorKind::Domain);
}

TEST(MajorityVoteFrame, AgreesWithOracleOnRandomPanels) {
  std::mt19937 rng(21);
  std::uniform_int_distribution<int> pos(0, 40);
  std::uniform_int_distribution<int> len(6, 20);
  std::uniform_int_distribution<int> count(0, 3);
  std::uniform_int_distribution<int> jitter(-3, 3);
  std::bernoulli_distribution human(0.3);
  for (int trial = 0; trial < 500; ++trial) {
    // A few shared objects, each seen with jitter by some labelers, plus noise.
    std::vector<BoundingBox> objects;
    for (int k = 0; k < 3; ++k) objects.push_back(make_box(pos(rng), pos(rng), len(rng), len(rng)));
    std::vector<std::vector<BoundingBox>> boxes(5);
    for (auto& set : boxes) {
      std::uint64_t id = 1;
      for (const auto& o : objects) {
        if (std::bernoulli_distribution(0.7)(rng)) {
          set.push_back(make_box(o.x + jitter(rng), o.y + jitter(rng), o.width + jitter(rng), o.height + jitter(rng), id++, 0,
                                 human(rng) ? Category::Human : Category::Animal));
        }
      }
      for (int n = count(rng); n > 0; --n) set.push_back(make_box(pos(rng), pos(rng), len(rng), len(rng), id++));
      std::shuffle(set.begin(), set.end(), rng);
    }
    const auto sets = panel(boxes);
    EXPECT_EQ(majority_vote_frame(sets, ConsensusConfig{}), testing::oracle_majority_vote(sets, ConsensusConfig{}))
        << "trial " << trial;
  }
}

Submission submitted(const std::string& id, const AccountId& who, const std::vector<std::vector<BoundingBox>>& per_frame) {
  Submission s = start_label_submission(test_header(id, who, static_cast<int>(per_frame.size())));
  for (std::size_t f = 0; f < per_frame.size(); ++f) {
    const int frame = static_cast<int>(f);
    if (f > 0) {
      const FrameVisit v{frame - 1, frame, true, {}};
      apply_visit(s, v);
    }
    for (const auto& b : per_frame[f]) {
      auto copy = b;
      copy.frame_index = frame;
      draw_box(s, frame, copy, b.box_id);
    }
  }
  submit(s, true, "t");
  return s;
}

TEST(MajorityVoteVideo, VotesFrameByFrame) {
  const auto b = make_box(10, 10, 20, 20, 1);
  const auto c = make_box(30, 20, 12, 12, 2);
  std::vector<Submission> subs;
  // Frame 0: everyone agrees on b. Frame 2: only p1 and p2 mark c.
  for (std::size_t i = 0; i < 5; ++i) {
    subs.push_back(submitted("s" + std::to_string(i), kPanel[i], {{b}, {}, i < 2 ? std::vector{c} : std::vector<BoundingBox>{}}));
  }
  auto out = majority_vote_video(subs, ConsensusConfig{});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].box.frame_index, 0);
  // Author lineage is kept from the anchor.
  EXPECT_EQ(out[0].box.author_id, "p1");

  subs[2] = submitted("s2", kPanel[2], {{b}, {}, {c}});
  out = majority_vote_video(subs, ConsensusConfig{});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[1].box.frame_index, 2);
  EXPECT_EQ(out[1].supporting_labelers, (std::vector<AccountId>{"p1", "p2", "p3"}));
}

TEST(MajorityVoteVideo, Preconditions) {
  std::vector<Submission> subs;
  for (std::size_t i = 0; i < 5; ++i) subs.push_back(submitted("s" + std::to_string(i), kPanel[i], {{}}));
  EXPECT_NO_THROW(majority_vote_video(subs, ConsensusConfig{}));
  EXPECT_EQ(kind_of([&] { majority_vote_video(std::span(subs).first(4), ConsensusConfig{}); }),
            ErrorKind::Configuration);
  auto open = subs;
  open[3] = start_label_submission(test_header("s3", "p4", 1));
  EXPECT_EQ(kind_of([&] { majority_vote_video(open, ConsensusConfig{}); }), ErrorKind::State);
  auto moved = subs;
  moved[1].header.video_segment_id = "other_s0";
  EXPECT_EQ(kind_of([&] { majority_vote_video(moved, ConsensusConfig{}); }), ErrorKind::Domain);
}

class ReviewMergeTest : public ::testing::Test {
 protected:
  void SetUp() override {
    original = submitted("s1", "alice", {{make_box(5, 5, 10, 10, 1), make_box(30, 5, 10, 10, 2)}, {make_box(5, 20, 8, 8, 3)}});
    review = start_review_submission(test_header("r1", "bob", 2, SubmissionMode::Review, "s1"), original);
    apply_visit(review, FrameVisit{0, 1, false, {}});
  }
  std::vector<FinalLabel> finish() {
    submit(review, true, "t");
    return review_merge(original, review);
  }
  Submission original;
  Submission review;
};

TEST_F(ReviewMergeTest, UntouchedReviewKeepsEverything) {
  const auto out = finish();
  ASSERT_EQ(out.size(), 3u);
  for (const auto& f : out) {
    EXPECT_EQ(f.framework, Framework::LabelReview);
    EXPECT_EQ(f.reviewer_id, "bob");
    EXPECT_EQ(f.supporting_labelers, std::vector<AccountId>{"alice"});
  }
  EXPECT_EQ(out[2].box.frame_index, 1);
}

TEST_F(ReviewMergeTest, DeletingEverythingLeavesNothing) {
  delete_box(review, 0, BoxId{1});
  delete_box(review, 0, BoxId{2});
  delete_box(review, 1, BoxId{3});
  EXPECT_TRUE(finish().empty());
}

TEST_F(ReviewMergeTest, MovesAndAdditionsAreTaken) {
  const BoxPlacement p{BoxId{2}, 40, 10, 12, 12};
  move_boxes(review, 0, std::span(&p, 1));
  draw_box(review, 1, make_box(40, 30, 6, 6, 0, 1, Category::Human));
  const auto out = finish();
  ASSERT_EQ(out.size(), 4u);
  EXPECT_TRUE(out[1].box.same_rect(make_box(40, 10, 12, 12)));
  EXPECT_EQ(out[1].box.origin, BoxOrigin::ReviewEdited);
  EXPECT_EQ(out[1].supporting_labelers, std::vector<AccountId>{"alice"});
  EXPECT_EQ(out[3].box.category, Category::Human);
  EXPECT_EQ(out[3].supporting_labelers, std::vector<AccountId>{"bob"});
}

TEST_F(ReviewMergeTest, Preconditions) {
  EXPECT_EQ(kind_of([&] { review_merge(original, review); }), ErrorKind::State);
  submit(review, true, "t");
  const auto stranger = submitted("s9", "carol", {{}, {}});
  EXPECT_EQ(kind_of([&] { review_merge(stranger, review); }), ErrorKind::Integrity);
}

}  // namespace
}  // namespace uavlabel
