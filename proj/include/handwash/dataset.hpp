#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "handwash/rational.hpp"

namespace handwash {

struct ManifestEntry {
  std::string episode_id;
  std::string video_path;
  std::vector<std::string> annotation_paths;  // one or two
  std::int64_t frame_count = 0;
  Rational fps{30, 1};

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

/// Annotated episodes plus the recorded videos nobody annotated.
struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::vector<std::string> unannotated_videos;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

inline constexpr std::string_view kManifestFormat = "handwash-manifest/1";

/// Throws ParseError / ValidationError (duplicate ids, 0 or >2 annotations).
DatasetManifest parse_manifest(std::string_view text);
std::string serialize_manifest(const DatasetManifest& m);
DatasetManifest load_manifest(const std::string& path);
void save_manifest(const DatasetManifest& m, const std::string& path);

struct DatasetStats {
  std::int64_t total_videos = 0;
  std::int64_t total_annotations = 0;
  std::int64_t total_annotated_files = 0;
  std::int64_t annotated_once = 0;
  std::int64_t annotated_twice = 0;

  friend bool operator==(const DatasetStats&, const DatasetStats&) = default;
};

DatasetStats dataset_stats(const DatasetManifest& m);

struct SplitRatios {
  double train = 0.7;
  double validation = 0.2;
  double test = 0.1;
};

/// Sorted, pairwise disjoint index sets covering [0, n).
struct SplitAssignment {
  std::vector<std::int64_t> train;
  std::vector<std::int64_t> validation;
  std::vector<std::int64_t> test;
  std::uint64_t seed = 0;
};

/// Sizes floor(train*n), floor(validation*n), remainder.
std::array<std::int64_t, 3> split_sizes(std::int64_t n, const SplitRatios& ratios);

/// Item-level split over a seeded shuffle of [0, n).
SplitAssignment split_dataset(std::int64_t n, const SplitRatios& ratios, std::uint64_t seed);

/// Group-level split: groups (e.g. episodes) are shuffled and assigned whole,
/// so no group straddles two sets. `group_sizes[g]` items belong to group g
/// and item indices are laid out group after group. Set sizes follow the
/// floor rule on the number of groups.
SplitAssignment split_by_group(const std::vector<std::int64_t>& group_sizes,
                               const SplitRatios& ratios, std::uint64_t seed);

}  // namespace handwash
