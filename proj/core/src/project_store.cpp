#include <algorithm>

#include "uavlabel/error.hpp"
#include "uavlabel/serialization.hpp"
#include "uavlabel/store.hpp"

namespace uavlabel {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename T>
std::vector<T> read_list(const fs::path& path, const char* key) {
  if (!fs::exists(path)) return {};
  return json::parse(read_text_file(path)).at(key).get<std::vector<T>>();
}

template <typename T>
void write_list(const fs::path& path, const char* key, const std::vector<T>& items) {
  write_file_atomically(path, json{{key, items}}.dump(2) + "\n");
}

json finals_json(const StoredFinals& f) {
  return json{{"segment_id", f.segment_id},
              {"video_id", f.video_id},
              {"framework", to_string(f.framework)},
              {"submissions", f.submissions},
              {"labels", f.labels}};
}

StoredFinals finals_from(const json& j) {
  return {j.at("segment_id").get<std::string>(), j.at("video_id").get<std::string>(),
          framework_from_string(j.at("framework").get<std::string>()),
          j.at("submissions").get<std::vector<SubmissionId>>(), j.at("labels").get<std::vector<FinalLabel>>()};
}

}  // namespace

ProjectStore::ProjectStore(fs::path root) : root_(std::move(root)) {}

std::vector<VideoSegment> ProjectStore::segments() const {
  std::lock_guard lock(mutex_);
  return read_list<VideoSegment>(root_ / "segments.json", "segments");
}

VideoSegment ProjectStore::segment(const SegmentId& id) const {
  for (auto& s : segments()) {
    if (s.segment_id == id) return s;
  }
  fail(ErrorKind::NotFound, "segment_not_found", "no segment " + id);
}

void ProjectStore::add_segments(std::span<const VideoSegment> added) {
  std::lock_guard lock(mutex_);
  auto all = read_list<VideoSegment>(root_ / "segments.json", "segments");
  for (const auto& s : added) {
    if (std::any_of(all.begin(), all.end(), [&](const VideoSegment& e) { return e.segment_id == s.segment_id; })) {
      fail(ErrorKind::Conflict, "segment_exists", "segment " + s.segment_id + " already exists");
    }
    for (const auto& e : all) {
      if (e.video_id == s.video_id && !(s.last_frame < e.first_frame || e.last_frame < s.first_frame)) {
        fail(ErrorKind::Conflict, "segment_overlap", "segment " + s.segment_id + " overlaps " + e.segment_id);
      }
    }
    all.push_back(s);
  }
  write_list(root_ / "segments.json", "segments", all);
}

void ProjectStore::carry_note_forward(const SegmentId& id, const std::string& note) {
  std::lock_guard lock(mutex_);
  auto all = read_list<VideoSegment>(root_ / "segments.json", "segments");
  const auto it = std::find_if(all.begin(), all.end(), [&](const VideoSegment& s) { return s.segment_id == id; });
  if (it == all.end()) fail(ErrorKind::NotFound, "segment_not_found", "no segment " + id);
  VideoSegment* next = nullptr;
  for (auto& s : all) {
    if (s.video_id == it->video_id && s.first_frame > it->last_frame &&
        (next == nullptr || s.first_frame < next->first_frame)) {
      next = &s;
    }
  }
  if (next == nullptr) fail(ErrorKind::NotFound, "no_next_segment", "segment " + id + " is the last one");
  next->predecessor_note = note;
  write_list(root_ / "segments.json", "segments", all);
}

std::vector<Assignment> ProjectStore::assignments() const {
  std::lock_guard lock(mutex_);
  return read_list<Assignment>(root_ / "assignments.json", "assignments");
}

void ProjectStore::add_assignments(std::span<const Assignment> added) {
  std::lock_guard lock(mutex_);
  auto all = read_list<Assignment>(root_ / "assignments.json", "assignments");
  all.insert(all.end(), added.begin(), added.end());
  write_list(root_ / "assignments.json", "assignments", all);
}

void ProjectStore::set_assignment_status(const std::string& assignment_id, AssignmentStatus status) {
  std::lock_guard lock(mutex_);
  auto all = read_list<Assignment>(root_ / "assignments.json", "assignments");
  const auto it = std::find_if(all.begin(), all.end(),
                               [&](const Assignment& a) { return a.assignment_id == assignment_id; });
  if (it == all.end()) fail(ErrorKind::NotFound, "assignment_not_found", "no assignment " + assignment_id);
  it->status = status;
  write_list(root_ / "assignments.json", "assignments", all);
}

void ProjectStore::save_finals(const StoredFinals& finals) {
  std::lock_guard lock(mutex_);
  write_file_atomically(root_ / "finals" / (finals.segment_id + ".json"), finals_json(finals).dump(2) + "\n");
}

std::optional<StoredFinals> ProjectStore::finals(const SegmentId& id) const {
  std::lock_guard lock(mutex_);
  const fs::path p = root_ / "finals" / (id + ".json");
  if (!fs::exists(p)) return std::nullopt;
  return finals_from(json::parse(read_text_file(p)));
}

std::vector<StoredFinals> ProjectStore::all_finals() const {
  std::lock_guard lock(mutex_);
  std::vector<StoredFinals> out;
  const fs::path dir = root_ / "finals";
  if (!fs::exists(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") out.push_back(finals_from(json::parse(read_text_file(entry.path()))));
  }
  std::sort(out.begin(), out.end(),
            [](const StoredFinals& l, const StoredFinals& r) { return l.segment_id < r.segment_id; });
  return out;
}

DataRoot::DataRoot(const fs::path& root, StoreOptions store_options, AccountOptions account_options)
    : path(root),
      accounts(root / "accounts.json", std::move(account_options)),
      videos(root / "videos"),
      submissions(root / "submissions", store_options),
      project(root) {
  fs::create_directories(root);
}

}  // namespace uavlabel
