// Acceptance gate: one PASS/FAIL line per primary criterion. Exit status is
// non-zero when any criterion fails.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "test_support.hpp"
#include "uavlabel/analytics.hpp"
#include "uavlabel/error.hpp"
#include "uavlabel/serialization.hpp"
#include "uavlabel/tracker.hpp"

namespace {

using namespace uavlabel;
using namespace uavlabel::testing;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(double v, int precision = 3) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

// 1. Closed-form IoU against pixel counting.
Outcome iou_oracle() {
  const auto start = Clock::now();
  std::mt19937 rng(20240601);
  auto box = [&](std::uint64_t id) {
    std::uniform_int_distribution<int> pos(0, 199);
    const int x = pos(rng);
    const int y = pos(rng);
    const int w = std::uniform_int_distribution<int>(1, 200 - x)(rng);
    const int h = std::uniform_int_distribution<int>(1, 200 - y)(rng);
    return make_box(x, y, w, h, id);
  };
  double worst = 0.0;
  int overlapping = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto a = box(1);
    const auto b = box(2);
    const auto raster = raster_overlap(a, b);
    worst = std::max(worst, std::abs(iou(a, b) - raster.iou()));
    overlapping += raster.intersection > 0;
  }
  const double secs = seconds_since(start);
  return {worst <= 1e-9 && secs < 10.0, "10000 pairs, " + std::to_string(overlapping) + " overlapping, max |diff| " +
                                           fmt(worst) + ", " + fmt(secs) + " s"};
}

// 2. Voting against the brute-force oracle.
Outcome consensus_fidelity() {
  std::mt19937 rng(77);
  const ConsensusConfig cfg;
  int with_labels = 0;
  int total_labels = 0;
  for (int instance = 0; instance < 500; ++instance) {
    // A few shared objects; each labeler boxes a jittered subset of them.
    std::vector<std::array<int, 4>> objects;
    for (int o = std::uniform_int_distribution<int>(1, 3)(rng); o > 0; --o) {
      objects.push_back({std::uniform_int_distribution<int>(0, 60)(rng), std::uniform_int_distribution<int>(0, 60)(rng),
                         std::uniform_int_distribution<int>(6, 30)(rng), std::uniform_int_distribution<int>(6, 30)(rng)});
    }
    std::vector<PanelSet> sets;
    for (int l = 0; l < 5; ++l) {
      PanelSet set{"labeler" + std::to_string(l), {}};
      const int n = std::uniform_int_distribution<int>(0, 3)(rng);
      for (int k = 0; k < n; ++k) {
        const auto& o = objects[static_cast<std::size_t>(std::uniform_int_distribution<int>(0, int(objects.size()) - 1)(rng))];
        std::uniform_int_distribution<int> jitter(-4, 4);
        set.boxes.push_back(make_box(o[0] + jitter(rng), o[1] + jitter(rng), std::max(1, o[2] + jitter(rng)),
                                     std::max(1, o[3] + jitter(rng)), static_cast<std::uint64_t>(k + 1), 0,
                                     std::uniform_int_distribution<int>(0, 4)(rng) ? Category::Animal : Category::Human));
      }
      std::shuffle(set.boxes.begin(), set.boxes.end(), rng);
      sets.push_back(set);
    }
    const auto got = majority_vote_frame(sets, cfg);
    const auto want = oracle_majority_vote(sets, cfg);
    if (got != want) return {false, "instance " + std::to_string(instance) + " differs from the oracle"};
    for (const auto& f : got) {
      const std::set<AccountId> distinct(f.supporting_labelers.begin(), f.supporting_labelers.end());
      if (distinct.size() < 3) return {false, "label with fewer than 3 supporters"};
      bool anchored = false;
      for (const auto& s : sets) {
        for (const auto& b : s.boxes) {
          anchored |= b.box_id == f.box.box_id && b.same_rect(f.box) && distinct.contains(s.labeler);
        }
      }
      if (!anchored) return {false, "label coordinates do not equal a supporting box"};
    }
    with_labels += !got.empty();
    total_labels += static_cast<int>(got.size());
  }
  return {true, "500 instances match the oracle (" + std::to_string(with_labels) + " with labels, " +
                    std::to_string(total_labels) + " labels)"};
}

Submission submitted_label(const std::string& who, const std::vector<BoundingBox>& boxes) {
  Submission s = start_label_submission(test_header("sub-" + who, who, 5));
  for (const auto& b : boxes) draw_box(s, 0, b);
  record_time(s, 0, 60.0);
  submit(s, true, "2026-01-01T00:00:00.000Z");
  return s;
}

// 3. Disjoint panels produce nothing and drop out of overall efficiency.
Outcome zero_consensus() {
  std::vector<Submission> panel;
  for (int l = 0; l < 5; ++l) {
    panel.push_back(submitted_label("l" + std::to_string(l), {make_box(l * 12, 0, 10, 10), make_box(l * 12, 30, 10, 10)}));
  }
  const auto finals = majority_vote_video(panel, ConsensusConfig{});

  VideoRecord empty{"video-I", 5, Framework::MajVote, {}, {}};
  for (const auto& s : panel) {
    empty.entries.push_back({"video-I", s.header.labeler_id, ParticipantRole::Labeler, s.active_seconds(),
                             static_cast<long>(s.total_boxes())});
  }
  VideoRecord other{"video-B", 5, Framework::LabelReview, {0, 1, 2}, {}};
  other.entries = {{"video-B", "a", ParticipantRole::Labeler, 30.0, 3}, {"video-B", "b", ParticipantRole::Reviewer, 12.0, 3}};
  const std::vector<VideoRecord> corpus{empty, other};
  const auto report = build_report(corpus, ReportOptions{});

  bool excluded = report.excluded_videos == std::vector<VideoId>{"video-I"};
  for (const auto& v : report.videos) {
    if (v.video_id == "video-I") excluded &= !v.overall_seconds_per_label.has_value();
  }
  const FrameworkRun run{"video-I", Framework::MajVote, {60, 60, 60, 60, 60}, 0};
  excluded &= !overall_efficiency(run).has_value();
  return {finals.empty() && excluded,
          std::to_string(finals.size()) + " final labels; excluded videos: " +
              (report.excluded_videos.empty() ? std::string("none") : report.excluded_videos.front())};
}

// 4. Five participants cost more per final label than two.
Outcome efficiency_direction() {
  int cases = 0;
  for (int per_label = 1; per_label <= 120; per_label += 7) {
    for (long finals = 1; finals <= 60; finals += 3) {
      const double t = per_label;
      const double labels = static_cast<double>(finals);
      const FrameworkRun mv{"v", Framework::MajVote, std::vector<double>(5, t * labels), finals};
      const FrameworkRun lr{"v", Framework::LabelReview, std::vector<double>(2, t * labels), finals};
      const auto m = overall_efficiency(mv);
      const auto r = overall_efficiency(lr);
      if (!m || !r) return {false, "efficiency undefined with final labels present"};
      if (*m != (5 * t * labels) / labels || *r != (2 * t * labels) / labels || !(*m > *r)) {
        return {false, "per-label " + fmt(t) + " s, " + std::to_string(finals) + " finals: MajVote " + fmt(*m) +
                           " vs LabelReview " + fmt(*r)};
      }
      ++cases;
    }
  }
  return {true, std::to_string(cases) + " workloads, MajVote = 5t > LabelReview = 2t per final label"};
}

// 5. Threshold tracking on a moving blob.
Outcome tracking() {
  const auto start = Clock::now();
  std::mt19937 rng(5150);
  const int width = 320;
  const int height = 240;
  TrackerConfig cfg;  // buffer 10, threshold 200, size threshold 2500
  int row = 120;
  int col = 160;
  std::vector<BoundingBox> boxes{make_box(col - 5, row - 5, 11, 11, 1, 0)};
  double worst = 0.0;
  for (int f = 1; f < 50; ++f) {
    std::uniform_int_distribution<int> step(-cfg.buffer, cfg.buffer);
    row = std::clamp(row + step(rng), 20, height - 21);
    col = std::clamp(col + step(rng), 20, width - 21);
    FrameImage frame(width, height, f);
    std::uniform_int_distribution<int> noise(0, 50);
    for (auto& p : frame.pixels) p = static_cast<std::uint8_t>(noise(rng));
    for (int r = row - 1; r <= row + 1; ++r) {
      for (int c = col - 1; c <= col + 1; ++c) frame.at(r, c) = 255;
    }
    boxes = track_boxes(boxes, frame, cfg);
    const double cx = boxes[0].x + (boxes[0].width - 1) / 2.0;
    const double cy = boxes[0].y + (boxes[0].height - 1) / 2.0;
    worst = std::max({worst, std::abs(cx - col), std::abs(cy - row)});
  }

  // Nothing bright in the search region: coordinates carry over unchanged.
  const auto still = make_box(40, 30, 12, 9, 7, 0);
  const auto dark = track_boxes(std::vector{still}, blob_frame(width, height, 1, 50, 200, 300), cfg);
  const bool dark_ok = dark.size() == 1 && dark[0].same_rect(still) && dark[0].origin == BoxOrigin::Propagated;

  // Boxes above the size threshold are copied even with a blob inside.
  const auto big = make_box(100, 100, 60, 60, 8, 0);
  const auto copied = track_boxes(std::vector{big}, blob_frame(width, height, 1, 20, 110, 110), cfg);
  const bool big_ok = copied.size() == 1 && copied[0].same_rect(big) && copied[0].origin == BoxOrigin::Propagated;

  const double secs = seconds_since(start);
  return {worst <= 1.0 && dark_ok && big_ok && secs < 5.0,
          "50 frames, max centre error " + fmt(worst) + " px; empty region " + (dark_ok ? "unchanged" : "CHANGED") +
              "; large box " + (big_ok ? "copied" : "MOVED") + "; " + fmt(secs) + " s"};
}

// 6. Component labeling.
Outcome connectivity() {
  BinaryMask diagonal(2, 2);
  diagonal.set(0, 0);
  diagonal.set(1, 1);
  const auto eight = connected_components(diagonal, Connectivity::Eight).size();
  const auto four = connected_components(diagonal, Connectivity::Four).size();

  std::mt19937 rng(31337);
  for (int m = 0; m < 1000; ++m) {
    BinaryMask mask(std::uniform_int_distribution<int>(1, 48)(rng), std::uniform_int_distribution<int>(1, 48)(rng));
    std::bernoulli_distribution on(std::uniform_real_distribution<double>(0.05, 0.7)(rng));
    for (auto& b : mask.bits) b = on(rng) ? 1 : 0;
    for (const auto conn : {Connectivity::Four, Connectivity::Eight}) {
      const auto comps = connected_components(mask, conn);
      long sum = 0;
      for (const auto& c : comps) sum += c.pixel_count;
      if (static_cast<std::size_t>(sum) != mask.foreground_count()) {
        return {false, "mask " + std::to_string(m) + ": component pixels do not sum to the foreground"};
      }
      if (comps.size() != flood_fill_components(mask, conn).size()) {
        return {false, "mask " + std::to_string(m) + ": component count differs from flood fill"};
      }
    }
  }
  return {eight == 1 && four == 2, "diagonal pair: " + std::to_string(eight) + " component(s) 8-connected, " +
                                       std::to_string(four) + " 4-connected; 1000 random masks sum correctly"};
}

bool throws_state(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind() == ErrorKind::State;
  }
  return false;
}

// 7. Workflow state machine properties over random sessions.
Outcome workflow_properties() {
  std::mt19937 rng(4242);
  int sessions = 0;
  int undo_checks = 0;
  for (int run = 0; run < 300; ++run) {
    Submission label = start_label_submission(test_header("L" + std::to_string(run), "alice"));
    random_events(label, rng, 60, 0);
    for (const auto& [frame, n] : label.propagation_count) {
      if (n > 1) return {false, "frame " + std::to_string(frame) + " propagated " + std::to_string(n) + " times"};
    }
    // Revisiting every frame in order must not propagate again.
    for (int f = label.header.first_frame; f < label.header.last_frame; ++f) {
      if (!label.visited.contains(f) || !label.visited.contains(f + 1)) continue;
      if (!plan_advance(label, f, f + 1, false, {}, {}).populated.empty()) return {false, "second propagation planned"};
    }

    // Undo restores the entry snapshot exactly.
    {
      Submission copy = label;
      const int frame = copy.current_frame;
      random_events(copy, rng, 10, 0);
      if (copy.current_frame == frame) {
        const auto before = nlohmann::json(copy.entry_snapshots.at(frame)).dump();
        undo_frame(copy, frame);
        if (nlohmann::json(std::vector<BoundingBox>(copy.boxes(frame).begin(), copy.boxes(frame).end())).dump() != before) {
          return {false, "undo did not restore the entry snapshot"};
        }
        ++undo_checks;
      }
    }

    // Review sessions never propagate.
    submit(label, true, "2026-01-01T00:00:00.000Z");
    Submission review = start_review_submission(
        test_header("R" + std::to_string(run), "bob", 12, SubmissionMode::Review, label.id()), label);
    const auto seeded = review.frames;
    random_events(review, rng, 60, 0);
    if (!review.propagation_count.empty()) return {false, "review session propagated"};

    // Terminal states reject everything and stay unchanged.
    Submission deleted = review;
    delete_progress(deleted, true);
    for (Submission* s : {&label, &deleted}) {
      const Submission frozen = *s;
      const int f = s->current_frame;
      const bool all_rejected =
          throws_state([&] { draw_box(*s, f, make_box(1, 1, 10, 10)); }) &&
          throws_state([&] { advance_frame(*s, f, std::min(f + 1, s->header.last_frame), false, {}, {}); }) &&
          throws_state([&] { undo_frame(*s, f); }) && throws_state([&] { record_time(*s, f, 1.0); }) &&
          throws_state([&] { submit(*s, true, "x"); }) && throws_state([&] { delete_progress(*s, true); });
      if (!all_rejected || !(*s == frozen)) return {false, "terminal submission accepted an operation"};
    }
    ++sessions;
  }
  return {true, std::to_string(sessions) + " random Label/Review sessions; propagation <= 1 per frame, none in "
                "Review; " + std::to_string(undo_checks) + " undo checks exact; terminal states frozen"};
}

// 8. Analytics: trimming, grouping, histogram.
Outcome analytics() {
  for (std::size_t n = 1; n <= 200; ++n) {
    std::vector<TimePerLabelEntry> entries;
    for (std::size_t i = 0; i < n; ++i) {
      entries.push_back({"v", "p" + std::to_string(i), ParticipantRole::Labeler, double((i * 37) % 101), 1 + long(i % 7)});
    }
    const std::size_t expected = n - 2 * (n * 5 / 100);
    if (trim_outliers(entries).size() != expected) return {false, "trim of n=" + std::to_string(n)};
  }

  const std::vector<std::pair<double, DensityGroup>> boundaries{
      {0.0, DensityGroup::Empty},
      {1e-9, DensityGroup::G1},
      {std::nextafter(1.0, 0.0), DensityGroup::G1},
      {1.0, DensityGroup::G2},
      {std::nextafter(2.0, 0.0), DensityGroup::G2},
      {2.0, DensityGroup::G3},
      {std::nextafter(3.0, 0.0), DensityGroup::G3},
      {3.0, DensityGroup::G4},
      {1e6, DensityGroup::G4},
  };
  for (const auto& [value, group] : boundaries) {
    if (density_group(value) != group) return {false, "density " + fmt(value, 17) + " in the wrong group"};
  }

  // 20 videos of 10 frames; labels spread over min(count, 5) frames.
  const int counts[] = {0, 3, 5, 9, 10, 12, 15, 19, 20, 20, 25, 29, 30, 35, 41, 50, 64, 99, 100, 125};
  std::vector<VideoDensity> corpus;
  for (const int c : counts) {
    std::vector<int> frames;
    for (int j = 0; j < c; ++j) frames.push_back(j % std::min(c, 5));
    corpus.push_back({"v" + std::to_string(c), label_density(frames, 10)});
  }
  const auto hist = density_histogram(corpus);
  // Binned by hand from the counts above.
  const std::vector<long> per_frame{4, 4, 4, 2, 1, 1, 1, 0, 0, 1, 1, 0, 1};
  const std::vector<long> per_labeled{0, 3, 2, 2, 2, 2, 1, 1, 1, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 1};
  auto matches = [](const std::vector<HistogramBin>& bins, const std::vector<long>& want) {
    if (bins.size() != want.size()) return false;
    for (std::size_t i = 0; i < bins.size(); ++i) {
      if (bins[i].low != double(i) || bins[i].high != double(i + 1) || bins[i].count != want[i]) return false;
    }
    return true;
  };
  if (!matches(hist.per_frame, per_frame)) return {false, "per-frame histogram differs from the hand table"};
  if (!matches(hist.per_labeled_frame, per_labeled)) return {false, "per-labeled-frame histogram differs"};
  return {true, "trim sizes n=1..200 exact; group boundaries at 1, 2, 3 half-open; 20-video histograms match"};
}

// 9. Persistence across a process restart.
Outcome persistence() {
  std::mt19937 rng(9001);
  int runs = 0;
  long events_total = 0;
  for (int run = 0; run < 12; ++run) {
    TempDir dir;
    const int length = run == 0 ? 500 : std::uniform_int_distribution<int>(1, 500)(rng);
    const auto header = test_header("s" + std::to_string(run), "alice", 40);
    Submission expected = start_label_submission(header);
    const auto events = random_events(expected, rng, length, 0, run % 3 == 0);

    // Write from a child process, then fold in this one.
    const pid_t child = ::fork();
    if (child == 0) {
      int code = 0;
      try {
        SubmissionStore store(dir.path() / "submissions");
        store.create(header);
        for (const auto& e : events) store.append(header.submission_id, e);
      } catch (...) {
        code = 1;
      }
      std::_Exit(code);
    }
    int status = 0;
    ::waitpid(child, &status, 0);
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return {false, "writer process failed"};

    SubmissionStore store(dir.path() / "submissions");
    const auto loaded = store.load(header.submission_id);
    const auto full = store.replay_from_disk(header.submission_id, false);
    const auto want_seq = static_cast<std::int64_t>(events.size()) - 1;
    if (!(loaded.state == expected) || loaded.sequence_no != want_seq || !(full.state == expected) ||
        nlohmann::json(loaded.state).dump() != nlohmann::json(expected).dump()) {
      return {false, "run " + std::to_string(run) + ": refolded state differs after restart"};
    }

    if (!events.empty()) {
      const auto log = dir.path() / "submissions" / header.submission_id / "events.jsonl";
      const auto size_before = std::filesystem::file_size(log);
      bool rejected = false;
      try {
        store.append(header.submission_id, events.back());
      } catch (const Error& e) {
        rejected = e.kind() == ErrorKind::Conflict;
      }
      if (!rejected || std::filesystem::file_size(log) != size_before ||
          !(store.load(header.submission_id).state == expected)) {
        return {false, "duplicate sequence number was applied"};
      }
    }
    ++runs;
    events_total += static_cast<long>(events.size());
  }
  return {true, std::to_string(runs) + " logs (" + std::to_string(events_total) +
                    " events, longest 500) refold identically in a new process; duplicates rejected"};
}

// 10. End-to-end through the HTTP API.
Outcome end_to_end() {
  TempDir dir;
  const auto outcome = run_e2e_scenario(dir.path());
  const auto expected = read_file(fixture_path("e2e_expected.csv"));
  const bool same = outcome.export_csv == expected;
  return {same && outcome.labeled_boxes == 10 && outcome.review_edits == 2 && outcome.seconds < 30.0,
          std::to_string(outcome.labeled_boxes) + " boxes labeled, " + std::to_string(outcome.review_edits) +
              " review edits, " + std::to_string(outcome.final_labels) + " final labels; export " +
              (same ? "matches" : "DIFFERS FROM") + " fixture; " + fmt(outcome.seconds) + " s"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"iou-oracle-equivalence", iou_oracle},
      {"consensus-rule-fidelity", consensus_fidelity},
      {"zero-consensus-exclusion", zero_consensus},
      {"framework-efficiency-direction", efficiency_direction},
      {"tracking", tracking},
      {"connectivity", connectivity},
      {"workflow-state-machine", workflow_properties},
      {"analytics", analytics},
      {"persistence", persistence},
      {"end-to-end", end_to_end},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s  %-32s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
