#include "handwash/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "handwash/errors.hpp"
#include "handwash/json_util.hpp"
#include "handwash/random.hpp"

namespace handwash {

using nlohmann::json;

namespace {

void validate_entry(const ManifestEntry& e) {
  if (e.annotation_paths.empty() || e.annotation_paths.size() > 2) {
    throw ValidationError("manifest entry '" + e.episode_id + "' has " +
                          std::to_string(e.annotation_paths.size()) +
                          " annotation paths; expected 1 or 2");
  }
  if (e.frame_count < 0) {
    throw ValidationError("manifest entry '" + e.episode_id + "' has negative frame_count");
  }
}

void validate_manifest(const DatasetManifest& m) {
  std::set<std::string_view> ids;
  for (const ManifestEntry& e : m.entries) {
    validate_entry(e);
    if (!ids.insert(e.episode_id).second) {
      throw ValidationError("duplicate episode_id '" + e.episode_id + "'");
    }
  }
}

}  // namespace

DatasetManifest parse_manifest(std::string_view text) {
  const json doc = json_util::parse_document(text);
  if (!doc.is_object()) throw ValidationError("manifest must be an object");
  const std::string format = json_util::require_string(doc, "format", "manifest");
  if (format != kManifestFormat) throw ValidationError("unsupported manifest format '" + format + "'");

  DatasetManifest m;
  const json& entries = json_util::require(doc, "entries", "manifest");
  if (!entries.is_array()) throw ValidationError("manifest entries must be an array");
  m.entries.reserve(entries.size());
  for (const json& e : entries) {
    if (!e.is_object()) throw ValidationError("manifest entry must be an object");
    ManifestEntry entry;
    entry.episode_id = json_util::require_string(e, "episode_id", "manifest entry");
    entry.video_path = json_util::require_string(e, "video_path", "manifest entry");
    entry.frame_count = json_util::require_int(e, "frame_count", "manifest entry");
    const json& fps = json_util::require(e, "fps", "manifest entry");
    entry.fps = Rational(json_util::require_int(fps, "num", "fps"),
                         json_util::require_int(fps, "den", "fps"));
    const json& paths = json_util::require(e, "annotation_paths", "manifest entry");
    if (!paths.is_array()) throw ValidationError("annotation_paths must be an array");
    for (const json& p : paths) {
      if (!p.is_string()) throw ValidationError("annotation path must be a string");
      entry.annotation_paths.push_back(p.get<std::string>());
    }
    m.entries.push_back(std::move(entry));
  }
  if (auto it = doc.find("unannotated_videos"); it != doc.end()) {
    if (!it->is_array()) throw ValidationError("unannotated_videos must be an array");
    for (const json& p : *it) {
      if (!p.is_string()) throw ValidationError("unannotated video path must be a string");
      m.unannotated_videos.push_back(p.get<std::string>());
    }
  }
  validate_manifest(m);
  return m;
}

std::string serialize_manifest(const DatasetManifest& m) {
  json entries = json::array();
  for (const ManifestEntry& e : m.entries) {
    entries.push_back({{"episode_id", e.episode_id},
                       {"video_path", e.video_path},
                       {"annotation_paths", e.annotation_paths},
                       {"frame_count", e.frame_count},
                       {"fps", {{"num", e.fps.num()}, {"den", e.fps.den()}}}});
  }
  const json doc = {{"format", kManifestFormat},
                    {"entries", std::move(entries)},
                    {"unannotated_videos", m.unannotated_videos}};
  return doc.dump(1) + "\n";
}

DatasetManifest load_manifest(const std::string& path) {
  return parse_manifest(json_util::read_file(path));
}

void save_manifest(const DatasetManifest& m, const std::string& path) {
  json_util::write_file(path, serialize_manifest(m));
}

DatasetStats dataset_stats(const DatasetManifest& m) {
  DatasetStats s;
  for (const ManifestEntry& e : m.entries) {
    validate_entry(e);
    if (e.annotation_paths.size() == 1) {
      ++s.annotated_once;
    } else {
      ++s.annotated_twice;
    }
  }
  s.total_annotated_files = s.annotated_once + s.annotated_twice;
  s.total_annotations = s.annotated_once + 2 * s.annotated_twice;
  s.total_videos = s.total_annotated_files + static_cast<std::int64_t>(m.unannotated_videos.size());
  return s;
}

namespace {

void validate_ratios(const SplitRatios& r) {
  if (!(r.train > 0.0) || !(r.validation > 0.0) || !(r.test > 0.0)) {
    throw ValidationError("split ratios must be positive");
  }
  if (std::abs(r.train + r.validation + r.test - 1.0) > 1e-9) {
    throw ValidationError("split ratios must sum to 1");
  }
}

// floor(ratio * n) where ratio is a decimal like 0.7 whose binary value is
// slightly off; the nudge is far below the 1/n granularity of real fractions.
std::int64_t floor_share(double ratio, std::int64_t n) {
  const double exact = ratio * static_cast<double>(n);
  return static_cast<std::int64_t>(std::floor(exact + 1e-9 * std::max(1.0, exact)));
}

}  // namespace

std::array<std::int64_t, 3> split_sizes(std::int64_t n, const SplitRatios& ratios) {
  validate_ratios(ratios);
  if (n < 0) throw ValidationError("split item count must be >= 0");
  const std::int64_t train = floor_share(ratios.train, n);
  const std::int64_t validation = floor_share(ratios.validation, n);
  return {train, validation, n - train - validation};
}

SplitAssignment split_dataset(std::int64_t n, const SplitRatios& ratios, std::uint64_t seed) {
  const auto sizes = split_sizes(n, ratios);
  std::vector<std::int64_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  shuffle_in_place(order, rng);

  SplitAssignment out;
  out.seed = seed;
  const auto train_end = order.begin() + sizes[0];
  const auto validation_end = train_end + sizes[1];
  out.train.assign(order.begin(), train_end);
  out.validation.assign(train_end, validation_end);
  out.test.assign(validation_end, order.end());
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.validation.begin(), out.validation.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

SplitAssignment split_by_group(const std::vector<std::int64_t>& group_sizes,
                               const SplitRatios& ratios, std::uint64_t seed) {
  const auto groups = split_dataset(static_cast<std::int64_t>(group_sizes.size()), ratios, seed);
  std::vector<std::int64_t> offsets(group_sizes.size() + 1, 0);
  for (std::size_t g = 0; g < group_sizes.size(); ++g) {
    if (group_sizes[g] < 0) throw ValidationError("group size must be >= 0");
    offsets[g + 1] = offsets[g] + group_sizes[g];
  }
  auto expand = [&](const std::vector<std::int64_t>& group_ids) {
    std::vector<std::int64_t> items;
    for (std::int64_t g : group_ids) {
      for (std::int64_t i = offsets[g]; i < offsets[g + 1]; ++i) items.push_back(i);
    }
    return items;  // already sorted: group ids ascend and ranges are laid out in order
  };
  SplitAssignment out;
  out.seed = seed;
  out.train = expand(groups.train);
  out.validation = expand(groups.validation);
  out.test = expand(groups.test);
  return out;
}

}  // namespace handwash
