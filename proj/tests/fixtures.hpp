#pragma once

// Hand-built 12-sample filter fixture. The kept set, the post-filter shape of
// f05 and the report below were computed by hand from the filtering rules:
//   - rare labels first (corpus-wide counts, threshold 2 instances here),
//   - then the 2..4 objects-per-image bounds,
//   - then the 32px object bound with a lower-bound recheck.
// Any change to the samples must re-derive all three by hand.

#include <string>
#include <vector>

#include "sglayout/stats.hpp"
#include "sglayout/types.hpp"

namespace sglayout::testfix {

inline Vocab filter_vocab() {
  Vocab v;
  v.categories = {"person", "dog", "tree", "car"};
  v.predicates = {"holding", "near", "floating_above"};
  return v;
}

inline stats::FilterConfig filter_config() {
  stats::FilterConfig cfg;
  cfg.min_object_pixels = 32;
  cfg.min_objects_per_image = 2;
  cfg.max_objects_per_image = 4;
  cfg.min_category_count = 0;
  cfg.min_predicate_count = 2;
  cfg.count_mode = stats::CountMode::instances;
  return cfg;
}

inline std::vector<LayoutSample> filter_samples() {
  auto make = [](std::string id, std::vector<int> cats, std::vector<BoundingBox> boxes,
                 std::vector<Triplet> triplets) {
    LayoutSample s;
    s.id = std::move(id);
    s.image_width = 100;
    s.image_height = 100;
    s.graph.object_categories = std::move(cats);
    s.graph.triplets = std::move(triplets);
    s.boxes = std::move(boxes);
    return s;
  };
  constexpr int kPerson = 0, kDog = 1, kTree = 2, kCar = 3;
  constexpr int kHolding = 0, kNear = 1, kFloating = 2;

  std::vector<LayoutSample> samples;
  // Clean two-object image: kept untouched.
  samples.push_back(make("f01", {kPerson, kDog},
                         {{0.3, 0.3, 0.4, 0.4}, {0.7, 0.7, 0.4, 0.4}}, {{0, kNear, 1}}));
  // Single object: below the lower count bound.
  samples.push_back(make("f02", {kTree}, {{0.5, 0.5, 0.5, 0.5}}, {}));
  // Five objects: above the upper count bound of 4.
  samples.push_back(make("f03", {kPerson, kDog, kTree, kCar, kPerson},
                         {{0.2, 0.2, 0.4, 0.4},
                          {0.4, 0.4, 0.4, 0.4},
                          {0.6, 0.6, 0.4, 0.4},
                          {0.8, 0.8, 0.4, 0.4},
                          {0.5, 0.5, 0.4, 0.4}},
                         {{0, kHolding, 1}}));
  // 20x20 px dog is dropped, leaving one object: rejected on the recheck.
  samples.push_back(make("f04", {kPerson, kDog},
                         {{0.3, 0.3, 0.4, 0.4}, {0.7, 0.7, 0.2, 0.2}}, {{0, kNear, 1}}));
  // 20x20 px tree is dropped together with its triplet; the rest survives.
  samples.push_back(make("f05", {kPerson, kDog, kTree},
                         {{0.25, 0.25, 0.4, 0.4}, {0.75, 0.75, 0.4, 0.4}, {0.5, 0.5, 0.2, 0.2}},
                         {{0, kNear, 1}, {0, kHolding, 2}}));
  // Sole user of floating_above (1 instance < 2): rejected as rare.
  samples.push_back(make("f06", {kPerson, kCar},
                         {{0.3, 0.3, 0.4, 0.4}, {0.7, 0.7, 0.4, 0.4}}, {{0, kFloating, 1}}));
  // Filler images keeping "near" and "holding" above the rarity threshold.
  samples.push_back(make("f07", {kPerson, kTree},
                         {{0.3, 0.3, 0.4, 0.4}, {0.7, 0.7, 0.4, 0.4}}, {{0, kNear, 1}}));
  samples.push_back(make("f08", {kDog, kCar},
                         {{0.3, 0.3, 0.4, 0.4}, {0.7, 0.7, 0.4, 0.4}}, {{0, kNear, 1}}));
  samples.push_back(make("f09", {kPerson, kDog},
                         {{0.3, 0.3, 0.4, 0.4}, {0.7, 0.7, 0.4, 0.4}}, {{0, kHolding, 1}}));
  samples.push_back(make("f10", {kPerson, kCar},
                         {{0.3, 0.3, 0.4, 0.4}, {0.7, 0.7, 0.4, 0.4}}, {{0, kHolding, 1}}));
  // No triplets at all: no rule forbids that.
  samples.push_back(make("f11", {kTree, kCar},
                         {{0.3, 0.3, 0.4, 0.4}, {0.7, 0.7, 0.4, 0.4}}, {}));
  // Includes a 40x32 px car: exactly at the pixel bound, so it stays.
  samples.push_back(make("f12", {kDog, kTree, kCar},
                         {{0.4, 0.4, 0.5, 0.5}, {0.6, 0.6, 0.5, 0.5}, {0.5, 0.2, 0.4, 0.32}},
                         {{0, kNear, 1}, {2, kNear, 1}}));
  return samples;
}

inline std::vector<std::string> filter_expected_kept_ids() {
  return {"f01", "f05", "f07", "f08", "f09", "f10", "f11", "f12"};
}

// f05 after the 20x20 px tree and the triplet pointing at it are removed.
inline LayoutSample filter_expected_f05() {
  LayoutSample s;
  s.id = "f05";
  s.image_width = 100;
  s.image_height = 100;
  s.graph.object_categories = {0, 1};
  s.graph.triplets = {{0, 1, 1}};
  s.boxes = {{0.25, 0.25, 0.4, 0.4}, {0.75, 0.75, 0.4, 0.4}};
  return s;
}

inline stats::FilterReport filter_expected_report() {
  stats::FilterReport r;
  r.input_images = 12;
  r.kept_images = 8;
  r.rejected_rare_category = 0;
  r.rejected_rare_predicate = 1;   // f06
  r.rejected_too_few_objects = 2;  // f02, f04 (after its dog is dropped)
  r.rejected_too_many_objects = 1; // f03
  r.objects_dropped_small = 2;     // f04's dog, f05's tree
  return r;
}

}  // namespace sglayout::testfix
