#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <regex>

#include "uavlabel/error.hpp"
#include "uavlabel/store.hpp"

namespace uavlabel {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "read_failed", "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

VideoMeta meta_from(const json& j) {
  return {j.at("video_id").get<std::string>(), j.at("frame_count").get<int>(), j.at("fps").get<double>(),
          j.at("polarity_inverted").get<bool>(), j.at("width").get<int>(), j.at("height").get<int>()};
}

// flock-based exclusive lock on a file next to the video directory.
class ExclusiveLock {
 public:
  explicit ExclusiveLock(const fs::path& path) {
    fs::create_directories(path.parent_path());
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0 || ::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      if (fd_ >= 0) ::close(fd_);
      fail(ErrorKind::Conflict, "video_locked", "another process is ingesting into " + path.parent_path().string());
    }
  }
  ~ExclusiveLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  ExclusiveLock(const ExclusiveLock&) = delete;
  ExclusiveLock& operator=(const ExclusiveLock&) = delete;

 private:
  int fd_ = -1;
};

}  // namespace

VideoCatalog::VideoCatalog(fs::path root) : root_(std::move(root)) {}

std::string VideoCatalog::frame_file_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%06d.png", index);
  return buf;
}

fs::path VideoCatalog::video_dir(const VideoId& id) const {
  if (id.empty() || id.find_first_of("/\\") != std::string::npos || id == "." || id == "..") {
    fail(ErrorKind::Validation, "bad_id", "invalid video id '" + id + "'");
  }
  return root_ / id;
}

std::vector<VideoMeta> VideoCatalog::list() const {
  std::vector<VideoMeta> out;
  if (!fs::exists(root_)) return out;
  for (const auto& entry : fs::directory_iterator(root_)) {
    const fs::path meta = entry.path() / "meta.json";
    if (fs::exists(meta)) out.push_back(meta_from(json::parse(read_text_file(meta))));
  }
  std::sort(out.begin(), out.end(), [](const VideoMeta& l, const VideoMeta& r) { return l.video_id < r.video_id; });
  return out;
}

VideoMeta VideoCatalog::meta(const VideoId& id) const {
  const fs::path meta = video_dir(id) / "meta.json";
  if (!fs::exists(meta)) fail(ErrorKind::NotFound, "video_not_found", "no video " + id);
  return meta_from(json::parse(read_text_file(meta)));
}

std::vector<std::uint8_t> VideoCatalog::frame_bytes(const VideoId& id, int index) const {
  const VideoMeta m = meta(id);
  if (index < 0 || index >= m.frame_count) {
    fail(ErrorKind::NotFound, "frame_not_found",
         "frame " + std::to_string(index) + " outside video " + id);
  }
  return read_bytes(video_dir(id) / "frames" / frame_file_name(index));
}

FrameImage VideoCatalog::frame(const VideoId& id, int index) const {
  const VideoMeta m = meta(id);
  FrameImage img = decode_png(frame_bytes(id, index), index);
  return m.polarity_inverted ? img.inverted() : img;
}

VideoMeta VideoCatalog::ingest(const fs::path& dir, const VideoId& id, double fps, bool polarity_inverted) {
  const fs::path target = video_dir(id);
  ExclusiveLock lock(root_ / ("." + id + ".lock"));
  if (fs::exists(target / "meta.json")) {
    fail(ErrorKind::Conflict, "video_exists", "video " + id + " is already ingested");
  }
  if (!(fps > 0.0)) fail(ErrorKind::Validation, "bad_fps", "fps must be positive");
  if (!fs::is_directory(dir)) fail(ErrorKind::Validation, "not_a_directory", dir.string() + " is not a directory");

  static const std::regex pattern(R"(frame_(\d{6})\.png)");
  std::map<int, fs::path> frames;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && std::regex_match(name, m, pattern)) frames[std::stoi(m[1].str())] = entry.path();
  }
  if (frames.empty()) {
    fail(ErrorKind::Validation, "no_frames", "no frame_<6-digit>.png files in " + dir.string());
  }

  std::vector<std::string> problems;
  const int count = frames.rbegin()->first + 1;
  for (int i = 0; i < count; ++i) {
    if (!frames.contains(i)) problems.push_back("missing " + frame_file_name(i));
  }

  std::optional<std::pair<int, int>> size;
  std::map<std::pair<int, int>, std::vector<std::string>> by_size;
  for (const auto& [index, path] : frames) {
    PngInfo info;
    try {
      info = probe_png(read_bytes(path));
    } catch (const Error& e) {
      problems.push_back(path.filename().string() + ": " + e.what());
      continue;
    }
    if (!info.gray8) problems.push_back(path.filename().string() + ": not 8-bit grayscale");
    by_size[{info.width, info.height}].push_back(path.filename().string());
    if (!size) size = std::pair(info.width, info.height);
  }
  if (by_size.size() > 1) {
    for (const auto& [dims, names] : by_size) {
      std::string line = "size " + std::to_string(dims.first) + "x" + std::to_string(dims.second) + ":";
      for (const auto& n : names) line += " " + n;
      problems.push_back(line);
    }
  }
  if (!problems.empty()) {
    std::string message = "ingestion of " + dir.string() + " failed:";
    for (const auto& p : problems) message += "\n  " + p;
    fail(ErrorKind::Validation, "ingest_failed", message);
  }

  fs::create_directories(target / "frames");
  for (const auto& [index, path] : frames) {
    fs::copy_file(path, target / "frames" / frame_file_name(index), fs::copy_options::overwrite_existing);
  }
  VideoMeta meta{id, count, fps, polarity_inverted, size->first, size->second};
  const json j{{"video_id", meta.video_id},   {"frame_count", meta.frame_count},
               {"fps", meta.fps},             {"polarity_inverted", meta.polarity_inverted},
               {"width", meta.width},         {"height", meta.height}};
  write_file_atomically(target / "meta.json", j.dump(2) + "\n");
  return meta;
}

}  // namespace uavlabel
