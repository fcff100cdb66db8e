#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uavlabel/consensus.hpp"
#include "uavlabel/events.hpp"
#include "uavlabel/image.hpp"
#include "uavlabel/workflow.hpp"

namespace uavlabel {

// Data root layout:
//
//   accounts.json
//   videos/<video_id>/meta.json
//   videos/<video_id>/frames/frame_<6-digit>.png
//   submissions/<submission_id>/header.json
//   submissions/<submission_id>/events.jsonl      one SubmissionEvent per line
//   submissions/<submission_id>/snapshot.json     folded state at some sequence_no
//   segments.json, assignments.json
//   finals/<segment_id>.json

/// Writes `contents` to `path` through a temporary file and rename.
void write_file_atomically(const std::filesystem::path& path, std::string_view contents);
std::string read_text_file(const std::filesystem::path& path);

// Submissions ----------------------------------------------------------------

struct StoreOptions {
  std::int64_t snapshot_interval = 64;  // events between snapshots; 0 disables
  bool sync_writes = true;              // fsync each appended event
};

struct LoadedSubmission {
  Submission state;
  std::int64_t sequence_no = -1;  // last applied event, -1 for an empty log

  friend bool operator==(const LoadedSubmission&, const LoadedSubmission&) = default;
};

/// Append-only event logs, one per submission, with a per-submission write
/// lock and an in-memory cache of the folded state.
class SubmissionStore {
 public:
  explicit SubmissionStore(std::filesystem::path root, StoreOptions options = {});

  /// Writes the header of a new submission. Review submissions are seeded
  /// from the (submitted) submission they reference.
  LoadedSubmission create(SubmissionHeader header);

  /// Validates and durably appends one event. `event.sequence_no` must be
  /// exactly one past the last stored event, otherwise Error(Conflict) and
  /// nothing is written. An empty timestamp is filled in.
  std::int64_t append(const SubmissionId& id, SubmissionEvent event);

  using EventBuilder = std::function<SubmissionEvent(const LoadedSubmission& current)>;

  /// Builds the next event from the current state under the write lock and
  /// appends it; the builder's sequence number is overwritten.
  std::pair<std::int64_t, SubmissionEvent> append_with(const SubmissionId& id, const EventBuilder& build);

  LoadedSubmission load(const SubmissionId& id);

  /// Folds the log from disk without the cache; `use_snapshot` = false
  /// replays every event from the header.
  LoadedSubmission replay_from_disk(const SubmissionId& id, bool use_snapshot = true);

  std::vector<SubmissionHeader> list() const;
  bool exists(const SubmissionId& id) const;

  const std::filesystem::path& root() const { return root_; }

 private:
  struct Slot {
    std::mutex mutex;
    std::optional<LoadedSubmission> cached;
  };

  std::filesystem::path dir(const SubmissionId& id) const;
  Slot& slot(const SubmissionId& id);
  LoadedSubmission fold(const SubmissionId& id, bool use_snapshot);
  LoadedSubmission& cached_locked(const SubmissionId& id, Slot& s);
  std::int64_t append_locked(const SubmissionId& id, Slot& s, SubmissionEvent event);

  std::filesystem::path root_;
  StoreOptions options_;
  std::mutex slots_mutex_;
  std::map<SubmissionId, std::unique_ptr<Slot>> slots_;
};

// Accounts -------------------------------------------------------------------

enum class AccountRole { Labeler, Admin };
std::string_view to_string(AccountRole r);
AccountRole account_role_from_string(std::string_view s);

/// Public view of an account; never carries the password hash.
struct AccountInfo {
  AccountId account_id;
  std::string username;
  AccountRole role = AccountRole::Labeler;

  friend bool operator==(const AccountInfo&, const AccountInfo&) = default;
};

struct Session {
  std::string token;
  AccountInfo account;
};

struct AccountOptions {
  std::chrono::seconds idle_timeout = std::chrono::hours(12);
  std::function<std::chrono::steady_clock::time_point()> clock = [] {
    return std::chrono::steady_clock::now();
  };
  /// Argon2id cost; the defaults are libsodium's interactive limits.
  unsigned long long hash_ops_limit = 0;
  std::size_t hash_mem_limit = 0;
};

/// Accounts file plus in-memory sessions. The account id is the username.
class AccountStore {
 public:
  explicit AccountStore(std::filesystem::path file, AccountOptions options = {});

  AccountInfo add_user(const std::string& username, const std::string& password, AccountRole role);
  void remove_user(const std::string& username);
  std::vector<AccountInfo> list() const;
  std::optional<AccountInfo> find(const AccountId& id) const;

  /// Issues a random 256-bit session token. Unknown users and wrong
  /// passwords fail identically with Error(Unauthenticated).
  Session authenticate(const std::string& username, const std::string& password);

  /// Resolves a token and refreshes its idle timer.
  AccountInfo resolve(const std::string& token);
  void logout(const std::string& token);

 private:
  struct Record {
    AccountInfo info;
    std::string password_hash;
  };
  struct SessionState {
    AccountId account_id;
    std::chrono::steady_clock::time_point last_seen;
  };

  std::vector<Record> read_records() const;
  void write_records(const std::vector<Record>& records) const;
  std::string hash_password(const std::string& password) const;

  std::filesystem::path file_;
  AccountOptions options_;
  std::string dummy_hash_;
  mutable std::mutex mutex_;
  std::map<std::string, SessionState> sessions_;
};

// Videos ---------------------------------------------------------------------

struct VideoMeta {
  VideoId video_id;
  int frame_count = 0;
  double fps = 0.0;
  bool polarity_inverted = false;
  int width = 0;
  int height = 0;

  friend bool operator==(const VideoMeta&, const VideoMeta&) = default;
};

/// Immutable frame corpus under `<root>/videos`.
class VideoCatalog {
 public:
  explicit VideoCatalog(std::filesystem::path root);

  static std::string frame_file_name(int index);

  std::vector<VideoMeta> list() const;
  VideoMeta meta(const VideoId& id) const;

  /// The stored PNG exactly as ingested. Error(NotFound) when out of range.
  std::vector<std::uint8_t> frame_bytes(const VideoId& id, int index) const;

  /// Decoded frame in white-hot polarity (black-hot videos are inverted).
  FrameImage frame(const VideoId& id, int index) const;

  /// Validates `dir` (frame_<6-digit>.png, contiguous from 0, one size,
  /// 8-bit grayscale), copies the frames and writes meta.json. Holds an
  /// exclusive lock on the video while it runs.
  VideoMeta ingest(const std::filesystem::path& dir, const VideoId& id, double fps,
                   bool polarity_inverted);

 private:
  std::filesystem::path video_dir(const VideoId& id) const;
  std::filesystem::path root_;
};

// Segments, assignments, final labels ----------------------------------------

struct StoredFinals {
  SegmentId segment_id;
  VideoId video_id;
  Framework framework = Framework::LabelReview;
  std::vector<SubmissionId> submissions;
  std::vector<FinalLabel> labels;

  friend bool operator==(const StoredFinals&, const StoredFinals&) = default;
};

class ProjectStore {
 public:
  explicit ProjectStore(std::filesystem::path root);

  std::vector<VideoSegment> segments() const;
  VideoSegment segment(const SegmentId& id) const;
  void add_segments(std::span<const VideoSegment> segments);
  /// Stores a note for the labelers of the segment that follows `id`.
  void carry_note_forward(const SegmentId& id, const std::string& note);

  std::vector<Assignment> assignments() const;
  void add_assignments(std::span<const Assignment> assignments);
  void set_assignment_status(const std::string& assignment_id, AssignmentStatus status);

  void save_finals(const StoredFinals& finals);
  std::optional<StoredFinals> finals(const SegmentId& id) const;
  std::vector<StoredFinals> all_finals() const;

 private:
  std::filesystem::path root_;
  mutable std::mutex mutex_;
};

/// Everything under one data root.
struct DataRoot {
  explicit DataRoot(const std::filesystem::path& root, StoreOptions store_options = {},
                    AccountOptions account_options = {});

  std::filesystem::path path;
  AccountStore accounts;
  VideoCatalog videos;
  SubmissionStore submissions;
  ProjectStore project;
};

/// Environment variable naming the data root for the server and the CLI.
inline constexpr const char* kDataRootEnv = "UAVLABEL_DATA_ROOT";

}  // namespace uavlabel
