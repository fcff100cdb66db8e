#include "uavlabel/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "uavlabel/error.hpp"

namespace uavlabel {

std::string_view to_string(ParticipantRole r) { return r == ParticipantRole::Labeler ? "Labeler" : "Reviewer"; }

std::string_view to_string(DensityGroup g) {
  switch (g) {
    case DensityGroup::Empty: return "Empty";
    case DensityGroup::G1: return "G1";
    case DensityGroup::G2: return "G2";
    case DensityGroup::G3: return "G3";
    case DensityGroup::G4: return "G4";
  }
  return "Empty";
}

LabelDensity label_density(std::span<const int> label_frames, int frame_count) {
  if (frame_count < 1) fail(ErrorKind::Domain, "bad_frame_count", "frame count must be at least 1");
  LabelDensity d;
  const auto total = static_cast<double>(label_frames.size());
  d.avg_per_frame = total / frame_count;
  const std::set<int> labeled(label_frames.begin(), label_frames.end());
  if (!labeled.empty()) d.avg_per_labeled_frame = total / static_cast<double>(labeled.size());
  return d;
}

DensityGroup density_group(double avg) {
  if (!(avg >= 0.0)) fail(ErrorKind::Domain, "negative_density", "label density cannot be negative");
  if (avg == 0.0) return DensityGroup::Empty;
  if (avg < 1.0) return DensityGroup::G1;
  if (avg < 2.0) return DensityGroup::G2;
  if (avg < 3.0) return DensityGroup::G3;
  return DensityGroup::G4;
}

std::size_t trim_count(std::size_t n) { return n / 20; }

namespace {

double per_label(const TimePerLabelEntry& e) { return e.person_seconds / static_cast<double>(e.label_count); }

// Indices into `entries` that survive trimming, in ascending per-label order.
std::vector<std::size_t> surviving_indices(std::span<const TimePerLabelEntry> entries) {
  std::vector<std::size_t> order(entries.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return per_label(entries[l]) < per_label(entries[r]);
  });
  const std::size_t k = trim_count(order.size());
  return {order.begin() + static_cast<std::ptrdiff_t>(k), order.end() - static_cast<std::ptrdiff_t>(k)};
}

}  // namespace

std::vector<TimePerLabelEntry> trim_outliers(std::vector<TimePerLabelEntry> entries) {
  for (const auto& e : entries) {
    if (e.label_count < 1) {
      fail(ErrorKind::Domain, "no_labels", "trimming needs entries with at least one label");
    }
  }
  std::vector<TimePerLabelEntry> out;
  for (const auto i : surviving_indices(entries)) out.push_back(entries[i]);
  return out;
}

std::optional<double> individual_efficiency(const TimePerLabelEntry& entry) {
  if (entry.label_count < 1) return std::nullopt;
  return per_label(entry);
}

std::optional<double> overall_efficiency(const FrameworkRun& run, int panel_size) {
  const std::size_t expected = run.framework == Framework::MajVote ? static_cast<std::size_t>(panel_size) : 2;
  if (run.participant_seconds.size() != expected) {
    fail(ErrorKind::Configuration, "participant_count",
         std::string(to_string(run.framework)) + " expects " + std::to_string(expected) + " participants");
  }
  if (run.final_label_count < 1) return std::nullopt;
  const double total = std::accumulate(run.participant_seconds.begin(), run.participant_seconds.end(), 0.0);
  return total / static_cast<double>(run.final_label_count);
}

DensityHistograms density_histogram(std::span<const VideoDensity> videos, int min_bins) {
  std::vector<double> per_frame;
  std::vector<double> per_labeled;
  for (const auto& v : videos) {
    per_frame.push_back(v.density.avg_per_frame);
    if (v.density.avg_per_labeled_frame) per_labeled.push_back(*v.density.avg_per_labeled_frame);
  }
  auto bin = [&](const std::vector<double>& values) {
    double top = 0.0;
    for (const double x : values) top = std::max(top, x);
    const int bins = std::max(min_bins, static_cast<int>(std::floor(top)) + 1);
    std::vector<HistogramBin> h;
    for (int i = 0; i < bins; ++i) h.push_back({double(i), double(i + 1), 0});
    for (const double x : values) ++h[static_cast<std::size_t>(std::floor(x))].count;
    return h;
  };
  return {bin(per_frame), bin(per_labeled)};
}

std::string histogram_to_csv(std::span<const HistogramBin> bins) {
  std::ostringstream os;
  os << "bin_low,bin_high,count\n";
  for (const auto& b : bins) os << b.low << ',' << b.high << ',' << b.count << '\n';
  return os.str();
}

EfficiencyReport build_report(std::span<const VideoRecord> videos, const ReportOptions& options) {
  EfficiencyReport report;
  std::vector<VideoDensity> densities;

  for (const auto& v : videos) {
    VideoSummary s;
    s.video_id = v.video_id;
    s.framework = v.framework;
    s.final_label_count = static_cast<long>(v.final_label_frames.size());
    s.density = label_density(v.final_label_frames, v.frame_count);
    s.group = density_group(s.density.avg_per_frame);
    FrameworkRun run{v.video_id, v.framework, {}, s.final_label_count};
    for (const auto& e : v.entries) {
      run.participant_seconds.push_back(e.person_seconds);
      s.person_seconds += e.person_seconds;
    }
    s.overall_seconds_per_label = overall_efficiency(run, options.panel_size);
    if (!s.overall_seconds_per_label) report.excluded_videos.push_back(v.video_id);
    densities.push_back({v.video_id, s.density});

    for (const auto& e : v.entries) {
      report.entries.push_back({e, s.group, individual_efficiency(e), false});
    }
    report.videos.push_back(std::move(s));
  }

  auto group_name = [&](DensityGroup g) {
    return options.group_by_density ? std::string(to_string(g)) : std::string("all");
  };

  // Entries eligible for per-label statistics: defined value, non-empty video.
  std::map<std::string, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < report.entries.size(); ++i) {
    const auto& e = report.entries[i];
    if (!e.seconds_per_label || e.group == DensityGroup::Empty) continue;
    members[group_name(e.group)].push_back(i);
  }

  auto trim_within = [&](const std::vector<std::size_t>& idx) {
    std::vector<TimePerLabelEntry> subset;
    for (const auto i : idx) subset.push_back(report.entries[i].entry);
    const auto keep = surviving_indices(subset);
    const std::set<std::size_t> kept(keep.begin(), keep.end());
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (!kept.contains(k)) report.entries[idx[k]].trimmed = true;
    }
  };
  if (options.trim) {
    if (options.global_trim) {
      std::vector<std::size_t> all;
      for (const auto& [_, idx] : members) all.insert(all.end(), idx.begin(), idx.end());
      std::sort(all.begin(), all.end());
      trim_within(all);
    } else {
      for (const auto& [_, idx] : members) trim_within(idx);
    }
  }
  for (const auto& e : report.entries) report.trimmed_entries += e.trimmed ? 1 : 0;

  std::vector<std::string> names;
  if (options.group_by_density) {
    for (auto g : {DensityGroup::G1, DensityGroup::G2, DensityGroup::G3, DensityGroup::G4}) {
      names.emplace_back(to_string(g));
    }
  } else {
    names.emplace_back("all");
  }
  for (const auto& name : names) {
    GroupSummary g;
    g.name = name;
    std::vector<double> values;
    for (const auto i : members[name]) {
      if (!report.entries[i].trimmed) values.push_back(*report.entries[i].seconds_per_label);
    }
    g.surviving_entries = values.size();
    if (!values.empty()) {
      const double n = static_cast<double>(values.size());
      const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
      g.mean_seconds_per_label = mean;
      if (values.size() >= 2) {
        double ss = 0.0;
        for (const double x : values) ss += (x - mean) * (x - mean);
        g.standard_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
      }
    }
    double overall_sum = 0.0;
    for (const auto& v : report.videos) {
      if (v.group == DensityGroup::Empty || group_name(v.group) != name || !v.overall_seconds_per_label) continue;
      overall_sum += *v.overall_seconds_per_label;
      ++g.videos_with_final_labels;
    }
    if (g.videos_with_final_labels > 0) {
      g.mean_overall_seconds_per_final_label = overall_sum / static_cast<double>(g.videos_with_final_labels);
    }
    report.groups.push_back(std::move(g));
  }

  report.histograms = density_histogram(densities);
  return report;
}

namespace {

nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

nlohmann::json bins_json(std::span<const HistogramBin> bins) {
  auto arr = nlohmann::json::array();
  for (const auto& b : bins) arr.push_back({{"bin_low", b.low}, {"bin_high", b.high}, {"count", b.count}});
  return arr;
}

}  // namespace

std::string report_to_json(const EfficiencyReport& r) {
  nlohmann::json j;
  j["videos"] = nlohmann::json::array();
  for (const auto& v : r.videos) {
    j["videos"].push_back({{"video_id", v.video_id},
                           {"framework", to_string(v.framework)},
                           {"final_label_count", v.final_label_count},
                           {"avg_labels_per_frame", v.density.avg_per_frame},
                           {"avg_labels_per_labeled_frame", opt(v.density.avg_per_labeled_frame)},
                           {"density_group", to_string(v.group)},
                           {"person_seconds", v.person_seconds},
                           {"overall_seconds_per_final_label", opt(v.overall_seconds_per_label)}});
  }
  j["entries"] = nlohmann::json::array();
  for (const auto& e : r.entries) {
    j["entries"].push_back({{"video_id", e.entry.video_id},
                            {"account_id", e.entry.account_id},
                            {"role", to_string(e.entry.role)},
                            {"person_seconds", e.entry.person_seconds},
                            {"label_count", e.entry.label_count},
                            {"density_group", to_string(e.group)},
                            {"seconds_per_label", opt(e.seconds_per_label)},
                            {"trimmed", e.trimmed}});
  }
  j["groups"] = nlohmann::json::array();
  for (const auto& g : r.groups) {
    j["groups"].push_back({{"group", g.name},
                           {"surviving_entries", g.surviving_entries},
                           {"mean_seconds_per_label", opt(g.mean_seconds_per_label)},
                           {"standard_error", opt(g.standard_error)},
                           {"mean_overall_seconds_per_final_label", opt(g.mean_overall_seconds_per_final_label)},
                           {"videos_with_final_labels", g.videos_with_final_labels}});
  }
  j["trimmed_entries"] = r.trimmed_entries;
  j["excluded_videos"] = r.excluded_videos;
  j["histograms"] = {{"per_frame", bins_json(r.histograms.per_frame)},
                     {"per_labeled_frame", bins_json(r.histograms.per_labeled_frame)}};
  return j.dump(2) + "\n";
}

namespace {

std::string fmt_opt(const std::optional<double>& v) {
  if (!v) return "";
  std::ostringstream os;
  os << *v;
  return os.str();
}

}  // namespace

std::string videos_to_csv(const EfficiencyReport& r) {
  std::ostringstream os;
  os << "video_id,framework,final_label_count,avg_labels_per_frame,avg_labels_per_labeled_frame,"
        "density_group,person_seconds,overall_seconds_per_final_label\n";
  for (const auto& v : r.videos) {
    os << v.video_id << ',' << to_string(v.framework) << ',' << v.final_label_count << ','
       << v.density.avg_per_frame << ',' << fmt_opt(v.density.avg_per_labeled_frame) << ','
       << to_string(v.group) << ',' << v.person_seconds << ',' << fmt_opt(v.overall_seconds_per_label) << '\n';
  }
  return os.str();
}

std::string entries_to_csv(const EfficiencyReport& r) {
  std::ostringstream os;
  os << "video_id,account_id,role,person_seconds,label_count,density_group,seconds_per_label,trimmed\n";
  for (const auto& e : r.entries) {
    os << e.entry.video_id << ',' << e.entry.account_id << ',' << to_string(e.entry.role) << ','
       << e.entry.person_seconds << ',' << e.entry.label_count << ',' << to_string(e.group) << ','
       << fmt_opt(e.seconds_per_label) << ',' << (e.trimmed ? "true" : "false") << '\n';
  }
  return os.str();
}

}  // namespace uavlabel
