#include <gtest/gtest.h>

#include "test_support.hpp"
#include "uavlabel/admin.hpp"
#include "uavlabel/error.hpp"
#include "uavlabel/operations.hpp"

namespace uavlabel {
namespace {

using testing::TempDir;

Error error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "expected an error";
  return Error(ErrorKind::Io, "none", "none");
}

SubmissionEvent draw(int frame, int x, int y, int size = 10, const char* category = "Animal") {
  return {0, "", EventKind::BoxDrawn,
          {{"frame", frame}, {"x", x}, {"y", y}, {"width", size}, {"height", size}, {"category", category}}};
}

SubmissionEvent tick(double seconds) { return {0, "", EventKind::TimeTick, {{"frame", 0}, {"seconds", seconds}}}; }

class AdminTest : public ::testing::Test {
 protected:
  AdminTest() : root(dir.path() / "data", StoreOptions{64, false}, testing::fast_accounts()) {
    std::vector<FrameImage> frames;
    for (int i = 0; i < 4; ++i) frames.push_back(FrameImage(64, 48, i, 20));
    testing::write_frames(dir.path() / "src", frames);
    root.videos.ingest(dir.path() / "src", "vid", 9.0, false);
    root.accounts.add_user("root", "rootpassword", AccountRole::Admin);
    for (const auto* name : {"p1", "p2", "p3", "p4", "p5"}) {
      root.accounts.add_user(name, std::string(name) + "password", AccountRole::Labeler);
    }
  }

  AccountInfo who(const std::string& name) { return *root.accounts.find(name); }

  // Opens, fills and submits a Label submission; returns its id.
  SubmissionId label(const std::string& name, const SegmentId& seg, std::vector<SubmissionEvent> events) {
    const auto sub = open_submission(root, who(name), seg, SubmissionMode::Label);
    for (std::size_t i = 0; i < events.size(); ++i) events[i].sequence_no = static_cast<std::int64_t>(i);
    append_edits(root, who(name), sub.state.id(), events);
    submit_submission(root, who(name), sub.state.id(), true);
    return sub.state.id();
  }

  AssignResult majvote() {
    return assign_video(root, {"vid", Framework::MajVote, 0, {"p1", "p2", "p3", "p4", "p5"}, "2026-W10"});
  }

  TempDir dir;
  DataRoot root;
};

TEST_F(AdminTest, AssignSplitsAndStores) {
  const auto r = assign_video(root, {"vid", Framework::LabelReview, 3, {"p1", "p2"}, ""});
  ASSERT_EQ(r.segments.size(), 2u);
  EXPECT_EQ(r.segments[1].first_frame, 3);
  EXPECT_EQ(r.assignments.size(), 4u);
  EXPECT_EQ(root.project.assignments(), r.assignments);
  EXPECT_EQ(r.assignments[0].week, current_iso_week());
  EXPECT_EQ(error_of([&] { assign_video(root, {"vid", Framework::LabelReview, 3, {"p1", "p2"}, ""}); }).kind(),
            ErrorKind::Conflict);
  EXPECT_EQ(error_of([&] { assign_video(root, {"nope", Framework::LabelReview, 3, {"p1", "p2"}, ""}); }).kind(),
            ErrorKind::NotFound);
}

TEST_F(AdminTest, AssignRejectsUnknownLabelers) {
  EXPECT_EQ(error_of([&] { assign_video(root, {"vid", Framework::LabelReview, 0, {"p1", "ghost"}, ""}); }).kind(),
            ErrorKind::Validation);
  EXPECT_TRUE(root.project.segments().empty());
}

TEST_F(AdminTest, MajVoteWithMissingLabelerNamesThem) {
  majvote();
  for (const auto* name : {"p1", "p2", "p3", "p5"}) label(name, "vid_s0", {draw(0, 10, 10)});
  const auto e = error_of([&] { run_consensus(root, "vid_s0"); });
  EXPECT_EQ(e.kind(), ErrorKind::MissingPrerequisite);
  EXPECT_EQ(e.code(), "outstanding_assignments");
  EXPECT_NE(std::string(e.what()).find("p4"), std::string::npos);
  EXPECT_EQ(std::string(e.what()).find("p1"), std::string::npos);
  EXPECT_FALSE(root.project.finals("vid_s0"));
}

TEST_F(AdminTest, InProgressSubmissionDoesNotCount) {
  majvote();
  for (const auto* name : {"p1", "p2", "p3", "p4"}) label(name, "vid_s0", {draw(0, 10, 10)});
  open_submission(root, who("p5"), "vid_s0", SubmissionMode::Label);
  EXPECT_EQ(error_of([&] { run_consensus(root, "vid_s0"); }).kind(), ErrorKind::MissingPrerequisite);
}

TEST_F(AdminTest, MajVoteConsensusIsDeterministic) {
  majvote();
  label("p1", "vid_s0", {draw(0, 10, 10), draw(0, 40, 20), tick(30)});
  label("p2", "vid_s0", {draw(0, 11, 10), tick(20)});
  label("p3", "vid_s0", {draw(0, 10, 11, 10, "Human"), draw(0, 40, 20), tick(10)});
  label("p4", "vid_s0", {draw(0, 40, 21)});
  label("p5", "vid_s0", {});
  const auto first = run_consensus(root, "vid_s0");
  ASSERT_EQ(first.labels.size(), 2u);
  EXPECT_EQ(first.labels[0].supporting_labelers, (std::vector<AccountId>{"p1", "p2", "p3"}));
  EXPECT_EQ(first.labels[1].supporting_labelers, (std::vector<AccountId>{"p1", "p3", "p4"}));
  EXPECT_EQ(first.submissions.size(), 5u);
  for (const auto& a : root.project.assignments()) EXPECT_EQ(a.status, AssignmentStatus::Done);
  EXPECT_EQ(run_consensus(root, "vid_s0"), first);
  EXPECT_EQ(root.project.finals("vid_s0"), first);
}

TEST_F(AdminTest, LabelReviewNeedsTheReview) {
  assign_video(root, {"vid", Framework::LabelReview, 0, {"p1", "p2"}, "w"});
  const auto original = label("p1", "vid_s0", {draw(0, 10, 10)});
  const auto e = error_of([&] { run_consensus(root, "vid_s0"); });
  EXPECT_EQ(e.kind(), ErrorKind::MissingPrerequisite);
  EXPECT_NE(std::string(e.what()).find("p2"), std::string::npos);

  const auto review = open_submission(root, who("p2"), "vid_s0", SubmissionMode::Review, original);
  submit_submission(root, who("p2"), review.state.id(), true);
  const auto finals = run_consensus(root, "vid_s0");
  ASSERT_EQ(finals.labels.size(), 1u);
  EXPECT_EQ(finals.labels[0].reviewer_id, "p2");
  EXPECT_EQ(finals.framework, Framework::LabelReview);
}

TEST_F(AdminTest, ExportFormatsAgree) {
  majvote();
  for (const auto* name : {"p1", "p2", "p3"}) label(name, "vid_s0", {draw(0, 30, 20), draw(0, 5, 5)});
  label("p4", "vid_s0", {});
  label("p5", "vid_s0", {});
  run_consensus(root, "vid_s0");

  const auto records = collect_export(root, {});
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].x, 5);
  EXPECT_EQ(records[1].x, 30);

  const auto csv = format_export(records, ExportFormat::Csv);
  EXPECT_EQ(csv,
            "video_id,frame_index,x,y,width,height,category,framework,supporting_labelers,reviewer_id\n"
            "vid,0,5,5,10,10,Animal,MajVote,p1;p2;p3,\n"
            "vid,0,30,20,10,10,Animal,MajVote,p1;p2;p3,\n");

  const auto jsonl = format_export(records, ExportFormat::Jsonl);
  std::istringstream lines(jsonl);
  std::string line;
  std::size_t i = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    ASSERT_LT(i, records.size());
    EXPECT_EQ(j["frame_index"], records[i].frame_index);
    EXPECT_EQ(j["x"], records[i].x);
    EXPECT_EQ(j["supporting_labelers"].get<std::vector<std::string>>(), records[i].supporting_labelers);
    EXPECT_TRUE(j["reviewer_id"].is_null());
    ++i;
  }
  EXPECT_EQ(i, records.size());

  const std::vector<VideoId> other{"other"};
  EXPECT_TRUE(collect_export(root, other).empty());
  EXPECT_EQ(format_export({}, ExportFormat::Jsonl), "");
}

TEST_F(AdminTest, ReportFilesAndInputs) {
  majvote();
  label("p1", "vid_s0", {draw(0, 10, 10), tick(40)});
  label("p2", "vid_s0", {draw(0, 10, 10), tick(20)});
  label("p3", "vid_s0", {draw(0, 10, 10), tick(30)});
  label("p4", "vid_s0", {tick(5)});
  label("p5", "vid_s0", {tick(5)});
  run_consensus(root, "vid_s0");

  const auto inputs = gather_report_inputs(root);
  ASSERT_EQ(inputs.size(), 1u);
  EXPECT_EQ(inputs[0].video_id, "vid");
  EXPECT_EQ(inputs[0].frame_count, 4);
  EXPECT_EQ(inputs[0].final_label_frames, std::vector<int>{0});
  ASSERT_EQ(inputs[0].entries.size(), 5u);
  EXPECT_DOUBLE_EQ(inputs[0].entries[0].person_seconds, 40.0);
  EXPECT_EQ(inputs[0].entries[3].label_count, 0);

  const auto files = write_report(root, ReportOptions{}, dir.path() / "out");
  EXPECT_EQ(files.written.size(), 5u);
  for (const auto& p : files.written) EXPECT_TRUE(std::filesystem::exists(p)) << p;
  EXPECT_DOUBLE_EQ(*files.report.videos[0].overall_seconds_per_label, 100.0);
  const auto j = nlohmann::json::parse(testing::read_file(dir.path() / "out" / "report.json"));
  EXPECT_TRUE(j.is_object());
}

TEST_F(AdminTest, SegmentRowsUseSegmentIds) {
  assign_video(root, {"vid", Framework::LabelReview, 2, {"p1", "p2"}, "w"});
  // Roles alternate: p2 labels the second segment and p1 reviews it.
  const auto original = label("p2", "vid_s1", {draw(2, 10, 10)});
  const auto review = open_submission(root, who("p1"), "vid_s1", SubmissionMode::Review, original);
  submit_submission(root, who("p1"), review.state.id(), true);
  run_consensus(root, "vid_s1");
  const auto inputs = gather_report_inputs(root);
  ASSERT_EQ(inputs.size(), 1u);
  EXPECT_EQ(inputs[0].video_id, "vid_s1");
  EXPECT_EQ(inputs[0].frame_count, 2);
  EXPECT_EQ(inputs[0].entries[1].role, ParticipantRole::Reviewer);
}

TEST_F(AdminTest, OperationsEnforceAssignments) {
  assign_video(root, {"vid", Framework::LabelReview, 0, {"p1", "p2"}, "w"});
  // p1 labels, p2 reviews: the roles cannot be swapped.
  EXPECT_EQ(error_of([&] { open_submission(root, who("p2"), "vid_s0", SubmissionMode::Label); }).kind(),
            ErrorKind::Forbidden);
  EXPECT_EQ(error_of([&] { open_submission(root, who("p3"), "vid_s0", SubmissionMode::Label); }).kind(),
            ErrorKind::Forbidden);
  const auto sub = open_submission(root, who("p1"), "vid_s0", SubmissionMode::Label);
  EXPECT_EQ(sub.state.id(), "vid_s0-p1-L1");
  EXPECT_EQ(sub.state.header.frame_width, 64);

  EXPECT_EQ(error_of([&] { read_submission(root, who("p3"), sub.state.id()); }).kind(), ErrorKind::Forbidden);
  EXPECT_NO_THROW(read_submission(root, who("root"), sub.state.id()));
  // The reviewer sees the original only after it is submitted.
  EXPECT_EQ(error_of([&] { read_submission(root, who("p2"), sub.state.id()); }).kind(), ErrorKind::Forbidden);
  EXPECT_EQ(error_of([&] {
              open_submission(root, who("p2"), "vid_s0", SubmissionMode::Review, sub.state.id());
            }).kind(),
            ErrorKind::State);

  const SubmissionEvent visit{0, "", EventKind::FrameVisited, {{"from", 0}, {"to", 1}, {"propagated", true}, {"boxes", nlohmann::json::array()}}};
  EXPECT_EQ(error_of([&] { append_edits(root, who("p1"), sub.state.id(), std::span(&visit, 1)); }).code(),
            "not_an_edit");
  const auto e = draw(0, 5, 5);
  EXPECT_EQ(error_of([&] { append_edits(root, who("p2"), sub.state.id(), std::span(&e, 1)); }).kind(),
            ErrorKind::Forbidden);
  EXPECT_EQ(error_of([&] { submit_submission(root, who("p1"), sub.state.id(), false); }).kind(),
            ErrorKind::Validation);

  submit_submission(root, who("p1"), sub.state.id(), true);
  EXPECT_NO_THROW(read_submission(root, who("p2"), sub.state.id()));
  const auto mine = video_submissions(root, who("p2"), "vid");
  ASSERT_EQ(mine.size(), 1u);
  EXPECT_EQ(mine[0].status, SubmissionStatus::Submitted);
  EXPECT_TRUE(video_submissions(root, who("p3"), "vid").empty());
  EXPECT_EQ(visible_assignments(root, who("p1")).size(), 1u);
  EXPECT_EQ(visible_assignments(root, who("root")).size(), 2u);
  EXPECT_EQ(error_of([&] { require_admin(who("p1")); }).kind(), ErrorKind::Forbidden);
}

TEST_F(AdminTest, AdvanceCarriesBoxesForward) {
  assign_video(root, {"vid", Framework::LabelReview, 0, {"p1", "p2"}, "w"});
  const auto sub = open_submission(root, who("p1"), "vid_s0", SubmissionMode::Label);
  const auto e = draw(0, 5, 5);
  append_edits(root, who("p1"), sub.state.id(), std::span(&e, 1));
  const auto first = advance(root, who("p1"), sub.state.id(), 0, 1, true, TrackerConfig{});
  EXPECT_EQ(first.sequence_no, 1);
  EXPECT_EQ(first.created, 1u);
  ASSERT_EQ(first.boxes.size(), 1u);
  EXPECT_EQ(first.boxes[0].origin, BoxOrigin::Propagated);  // uniform frame: nothing above threshold
  advance(root, who("p1"), sub.state.id(), 1, 0, true, TrackerConfig{});
  const auto again = advance(root, who("p1"), sub.state.id(), 0, 1, true, TrackerConfig{});
  EXPECT_EQ(again.created, 0u);
  EXPECT_EQ(again.boxes.size(), 1u);
  EXPECT_EQ(error_of([&] { advance(root, who("p1"), sub.state.id(), 1, 2, false, TrackerConfig{}, 2); }).kind(),
            ErrorKind::Conflict);
  EXPECT_EQ(advance(root, who("p1"), sub.state.id(), 1, 2, false, TrackerConfig{}, 4).sequence_no, 4);
}

}  // namespace
}  // namespace uavlabel
