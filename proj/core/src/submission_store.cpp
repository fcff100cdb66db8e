#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "uavlabel/error.hpp"
#include "uavlabel/serialization.hpp"
#include "uavlabel/store.hpp"

namespace uavlabel {

namespace fs = std::filesystem;
using nlohmann::json;

void write_file_atomically(const fs::path& path, std::string_view contents) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "write_failed", "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) fail(ErrorKind::Io, "write_failed", "short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::NotFound, "file_not_found", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

void validate_id(const std::string& id) {
  if (id.empty() || id.find_first_of("/\\") != std::string::npos || id == "." || id == "..") {
    fail(ErrorKind::Validation, "bad_id", "invalid identifier '" + id + "'");
  }
}

void append_line(const fs::path& path, const std::string& line, bool sync) {
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) fail(ErrorKind::Io, "append_failed", "cannot open " + path.string());
  const std::string data = line + "\n";
  std::size_t done = 0;
  while (done < data.size()) {
    const ssize_t n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      ::close(fd);
      fail(ErrorKind::Io, "append_failed", "write to " + path.string() + " failed");
    }
    done += static_cast<std::size_t>(n);
  }
  if (sync && ::fsync(fd) != 0) {
    ::close(fd);
    fail(ErrorKind::Io, "append_failed", "fsync of " + path.string() + " failed");
  }
  ::close(fd);
}

}  // namespace

SubmissionStore::SubmissionStore(fs::path root, StoreOptions options)
    : root_(std::move(root)), options_(options) {
  fs::create_directories(root_);
}

fs::path SubmissionStore::dir(const SubmissionId& id) const {
  validate_id(id);
  return root_ / id;
}

SubmissionStore::Slot& SubmissionStore::slot(const SubmissionId& id) {
  std::lock_guard lock(slots_mutex_);
  auto& s = slots_[id];
  if (!s) s = std::make_unique<Slot>();
  return *s;
}

bool SubmissionStore::exists(const SubmissionId& id) const {
  return fs::exists(dir(id) / "header.json");
}

LoadedSubmission SubmissionStore::create(SubmissionHeader header) {
  const fs::path d = dir(header.submission_id);
  if (header.created_at.empty()) header.created_at = utc_timestamp();

  LoadedSubmission initial;
  if (header.mode == SubmissionMode::Review) {
    if (!header.reviewed_submission_id || !exists(*header.reviewed_submission_id)) {
      fail(ErrorKind::Integrity, "dangling_reference", "reviewed submission does not exist");
    }
    const auto original = load(*header.reviewed_submission_id);
    initial.state = start_review_submission(header, original.state);
  } else {
    initial.state = start_label_submission(header);
  }

  Slot& s = slot(header.submission_id);
  std::lock_guard lock(s.mutex);
  if (exists(header.submission_id)) {
    fail(ErrorKind::Conflict, "submission_exists", "submission " + header.submission_id + " already exists");
  }
  fs::create_directories(d);
  write_file_atomically(d / "header.json", json(initial.state.header).dump(2) + "\n");
  s.cached = initial;
  return initial;
}

LoadedSubmission SubmissionStore::fold(const SubmissionId& id, bool use_snapshot) {
  const fs::path d = dir(id);
  if (!fs::exists(d / "header.json")) {
    fail(ErrorKind::NotFound, "submission_not_found", "no submission " + id);
  }
  const auto header = json::parse(read_text_file(d / "header.json")).get<SubmissionHeader>();

  LoadedSubmission loaded;
  if (use_snapshot && fs::exists(d / "snapshot.json")) {
    const json snap = json::parse(read_text_file(d / "snapshot.json"));
    loaded.state = snap.at("state").get<Submission>();
    loaded.sequence_no = snap.at("sequence_no").get<std::int64_t>();
  } else if (header.mode == SubmissionMode::Review) {
    const auto original = load(*header.reviewed_submission_id);
    loaded.state = start_review_submission(header, original.state);
  } else {
    loaded.state = start_label_submission(header);
  }

  const fs::path log = d / "events.jsonl";
  if (!fs::exists(log)) return loaded;

  std::ifstream in(log, std::ios::binary);
  std::string line;
  std::uintmax_t good_bytes = 0;
  bool torn_tail = false;
  while (std::getline(in, line)) {
    const bool complete = !in.eof();
    SubmissionEvent event;
    try {
      event = json::parse(line).get<SubmissionEvent>();
    } catch (const std::exception&) {
      if (complete && in.peek() != EOF) {
        fail(ErrorKind::Integrity, "corrupt_log", "unreadable event in " + log.string());
      }
      torn_tail = true;  // an unacknowledged partial write
      break;
    }
    if (!complete) {
      torn_tail = true;
      break;
    }
    good_bytes += line.size() + 1;
    if (event.sequence_no <= loaded.sequence_no) continue;  // covered by the snapshot
    if (event.sequence_no != loaded.sequence_no + 1) {
      fail(ErrorKind::Integrity, "sequence_gap", "event log of " + id + " has a gap");
    }
    apply_event(loaded.state, event);
    loaded.sequence_no = event.sequence_no;
  }
  if (torn_tail) {
    in.close();
    fs::resize_file(log, good_bytes);
  }
  return loaded;
}

LoadedSubmission& SubmissionStore::cached_locked(const SubmissionId& id, Slot& s) {
  if (!s.cached) s.cached = fold(id, true);
  return *s.cached;
}

LoadedSubmission SubmissionStore::load(const SubmissionId& id) {
  Slot& s = slot(id);
  std::lock_guard lock(s.mutex);
  return cached_locked(id, s);
}

LoadedSubmission SubmissionStore::replay_from_disk(const SubmissionId& id, bool use_snapshot) {
  Slot& s = slot(id);
  std::lock_guard lock(s.mutex);
  return fold(id, use_snapshot);
}

std::int64_t SubmissionStore::append_locked(const SubmissionId& id, Slot& s, SubmissionEvent event) {
  LoadedSubmission& current = cached_locked(id, s);
  if (event.sequence_no != current.sequence_no + 1) {
    fail(ErrorKind::Conflict, "sequence_conflict",
         "expected sequence_no " + std::to_string(current.sequence_no + 1) + ", got " +
             std::to_string(event.sequence_no));
  }
  if (event.timestamp.empty()) event.timestamp = utc_timestamp();

  Submission next = current.state;
  apply_event(next, event);

  append_line(dir(id) / "events.jsonl", json(event).dump(), options_.sync_writes);
  current.state = std::move(next);
  current.sequence_no = event.sequence_no;

  if (options_.snapshot_interval > 0 && (current.sequence_no + 1) % options_.snapshot_interval == 0) {
    const json snap{{"sequence_no", current.sequence_no}, {"state", current.state}};
    write_file_atomically(dir(id) / "snapshot.json", snap.dump() + "\n");
  }
  return current.sequence_no;
}

std::int64_t SubmissionStore::append(const SubmissionId& id, SubmissionEvent event) {
  Slot& s = slot(id);
  std::lock_guard lock(s.mutex);
  return append_locked(id, s, std::move(event));
}

std::pair<std::int64_t, SubmissionEvent> SubmissionStore::append_with(const SubmissionId& id,
                                                                      const EventBuilder& build) {
  Slot& s = slot(id);
  std::lock_guard lock(s.mutex);
  const LoadedSubmission& current = cached_locked(id, s);
  SubmissionEvent event = build(current);
  event.sequence_no = current.sequence_no + 1;
  if (event.timestamp.empty()) event.timestamp = utc_timestamp();
  const auto seq = append_locked(id, s, event);
  return {seq, event};
}

std::vector<SubmissionHeader> SubmissionStore::list() const {
  std::vector<SubmissionHeader> out;
  if (!fs::exists(root_)) return out;
  for (const auto& entry : fs::directory_iterator(root_)) {
    const fs::path header = entry.path() / "header.json";
    if (!fs::exists(header)) continue;
    out.push_back(json::parse(read_text_file(header)).get<SubmissionHeader>());
  }
  std::sort(out.begin(), out.end(), [](const SubmissionHeader& l, const SubmissionHeader& r) {
    return l.submission_id < r.submission_id;
  });
  return out;
}

}  // namespace uavlabel
