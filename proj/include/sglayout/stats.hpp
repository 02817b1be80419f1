#pragma once

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "sglayout/types.hpp"

namespace sglayout::stats {

// Corpus filtering thresholds. Category/predicate rarity can be measured in
// occurrence instances or in distinct images containing the label.
enum class CountMode { instances, images };

struct FilterConfig {
  int min_object_pixels = 32;
  int min_objects_per_image = 2;
  int max_objects_per_image = 10;
  int min_category_count = 0;
  int min_predicate_count = 0;
  CountMode count_mode = CountMode::instances;

  void validate() const;  // throws on negatives or min > max
};

// Rejection tallies, accumulated across fixpoint rounds. An all-pass corpus
// leaves every counter at zero.
struct FilterReport {
  int input_images = 0;
  int kept_images = 0;
  int rejected_rare_category = 0;
  int rejected_rare_predicate = 0;
  int rejected_too_few_objects = 0;
  int rejected_too_many_objects = 0;
  int objects_dropped_small = 0;

  bool operator==(const FilterReport&) const = default;
};

struct FilterResult {
  std::vector<LayoutSample> kept;
  FilterReport report;
};

// Applies, in order: rare-category/predicate removal (corpus-wide counts),
// per-image object-count bounds, and the per-object pixel bound (objects with
// w*width or h*height below min_object_pixels are dropped along with their
// triplets, then the count bounds are re-checked). The pipeline repeats until
// nothing changes, so filtering twice equals filtering once.
FilterResult filter_corpus(const std::vector<LayoutSample>& samples, const FilterConfig& cfg);

struct TripletKey {
  int subject_category = 0;
  int predicate = 0;
  int object_category = 0;

  auto operator<=>(const TripletKey&) const = default;
};

struct TripletStats {
  int count = 0;
  double mean_s = 0.0, std_s = 0.0;
  double mean_dx = 0.0, std_dx = 0.0;
  double mean_dy = 0.0, std_dy = 0.0;

  bool operator==(const TripletStats&) const = default;
};

struct TripletStatTable {
  std::map<TripletKey, TripletStats> entries;
  // One entry per sample skipped for a degenerate ground-truth box.
  std::vector<std::string> warnings;

  const TripletStats* find(const TripletKey& key) const;
};

// Per triplet type, mean and sample standard deviation (n - 1 denominator,
// zero when n == 1) of relative scale and distance measured from the
// ground-truth boxes. Values are accumulated in a canonical sorted order, so
// the result is independent of sample order.
TripletStatTable compute_stats(const std::vector<LayoutSample>& samples);

// JSON array sorted by the "subject|predicate|object" name key.
std::string stats_to_json(const TripletStatTable& table, const Vocab& vocab);
void write_stats(const TripletStatTable& table, const Vocab& vocab, const std::string& path);

}  // namespace sglayout::stats
