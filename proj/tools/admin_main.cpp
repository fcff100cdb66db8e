// uavlabel-admin: operator tool for one data root.
//
// Exit codes: 0 success, 1 other failure, 2 validation error, 3 missing
// prerequisite (for example an incomplete consensus panel).

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include "uavlabel/admin.hpp"
#include "uavlabel/error.hpp"

namespace {

using namespace uavlabel;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Validation:
    case ErrorKind::Domain:
    case ErrorKind::Configuration:
      return 2;
    case ErrorKind::MissingPrerequisite:
      return 3;
    default:
      return 1;
  }
}

std::filesystem::path resolve_root(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kDataRootEnv)) return env;
  fail(ErrorKind::Validation, "no_data_root", std::string("pass --data-root or set ") + kDataRootEnv);
}

void emit(const std::string& text, const std::string& output) {
  if (output.empty() || output == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(output, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "write_failed", "cannot write " + output);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uavlabel-admin: manage videos, accounts, assignments, consensus and reports"};
  app.require_subcommand(1);
  std::string data_root;
  app.add_option("--data-root", data_root, std::string("data root (default: $") + kDataRootEnv + ")");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "import a directory of frame_<6-digit>.png images");
  std::string ingest_dir;
  std::string ingest_video;
  double fps = 30.0;
  bool black_hot = false;
  ingest->add_option("dir", ingest_dir, "frame directory")->required();
  ingest->add_option("--video", ingest_video, "video id")->required();
  ingest->add_option("--fps", fps, "frame rate");
  ingest->add_flag("--black-hot", black_hot, "frames use black-hot polarity");

  // user add|rm|list
  auto* user = app.add_subcommand("user", "manage accounts");
  user->require_subcommand(1);
  auto* user_add = user->add_subcommand("add", "create an account");
  std::string username;
  std::string password;
  bool password_stdin = false;
  std::string role = "labeler";
  user_add->add_option("username", username)->required();
  auto* pw_opt = user_add->add_option("--password", password, "password (8+ characters)");
  user_add->add_flag("--password-stdin", password_stdin, "read the password from stdin")->excludes(pw_opt);
  user_add->add_option("--role", role, "admin or labeler")->check(CLI::IsMember({"admin", "labeler"}));
  auto* user_rm = user->add_subcommand("rm", "remove an account");
  user_rm->add_option("username", username)->required();
  auto* user_list = user->add_subcommand("list", "list accounts");

  // assign
  auto* assign = app.add_subcommand("assign", "split a video into segments and assign them");
  AssignRequest request;
  std::string framework = "labelreview";
  assign->add_option("--video", request.video_id, "video id")->required();
  assign->add_option("--framework", framework, "majvote or labelreview")
      ->check(CLI::IsMember({"majvote", "labelreview"}));
  assign->add_option("--max-frames", request.max_frames_per_segment, "frames per segment (0: whole video)")
      ->check(CLI::NonNegativeNumber);
  assign->add_option("--labelers", request.labelers, "accounts to distribute work over")->required()->delimiter(',');
  assign->add_option("--week", request.week, "ISO week label (default: current week)");

  // note
  auto* note = app.add_subcommand("note", "leave a note for the labelers of the next segment");
  std::string note_segment;
  std::string note_text;
  note->add_option("segment", note_segment)->required();
  note->add_option("text", note_text)->required();

  // assignments
  auto* list_assignments = app.add_subcommand("assignments", "print all assignments as CSV");

  // consensus
  auto* consensus = app.add_subcommand("consensus", "compute and store final labels for segments");
  std::vector<std::string> segments;
  consensus->add_option("segments", segments, "segment ids")->required();

  // export
  auto* exporter = app.add_subcommand("export", "write final labels");
  std::string format = "csv";
  std::vector<std::string> export_videos;
  std::string output;
  exporter->add_option("--format", format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
  exporter->add_option("--video", export_videos, "restrict to these videos (repeatable)");
  exporter->add_option("-o,--output", output, "output file (default: stdout)");

  // report
  auto* report = app.add_subcommand("report", "write efficiency report files");
  bool no_trim = false;
  bool global_trim = false;
  bool no_groups = false;
  std::string out_dir = "report";
  report->add_flag("--no-trim", no_trim, "keep the top and bottom 5% of entries");
  report->add_flag("--global-trim", global_trim, "trim across all groups instead of per group");
  report->add_flag("--no-groups", no_groups, "one group for all videos");
  report->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help prints and succeeds; any usage error is a validation failure.
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    DataRoot root(resolve_root(data_root));

    if (*ingest) {
      const auto meta = root.videos.ingest(ingest_dir, ingest_video, fps, black_hot);
      std::cout << "ingested " << meta.video_id << ": " << meta.frame_count << " frames " << meta.width << "x"
                << meta.height << "\n";
    } else if (*user_add) {
      if (password_stdin) std::getline(std::cin, password);
      const auto info = root.accounts.add_user(username, password, account_role_from_string(role));
      std::cout << "added " << info.account_id << " (" << to_string(info.role) << ")\n";
    } else if (*user_rm) {
      root.accounts.remove_user(username);
      std::cout << "removed " << username << "\n";
    } else if (*user_list) {
      for (const auto& a : root.accounts.list()) std::cout << a.account_id << "," << to_string(a.role) << "\n";
    } else if (*assign) {
      request.framework = framework_from_string(framework);
      const auto result = assign_video(root, request);
      std::cout << assignments_to_csv(result.assignments);
    } else if (*note) {
      root.project.carry_note_forward(note_segment, note_text);
    } else if (*list_assignments) {
      std::cout << assignments_to_csv(root.project.assignments());
    } else if (*consensus) {
      for (const auto& s : segments) {
        const auto finals = run_consensus(root, s);
        std::cout << s << ": " << finals.labels.size() << " final labels (" << to_string(finals.framework) << ")\n";
      }
    } else if (*exporter) {
      const auto records = collect_export(root, export_videos);
      if (records.empty()) std::cerr << "warning: no final labels to export\n";
      emit(format_export(records, format == "csv" ? ExportFormat::Csv : ExportFormat::Jsonl), output);
    } else if (*report) {
      ReportOptions options;
      options.trim = !no_trim;
      options.global_trim = global_trim;
      options.group_by_density = !no_groups;
      const auto files = write_report(root, options, out_dir);
      for (const auto& p : files.written) std::cout << p.string() << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
