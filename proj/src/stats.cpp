#include "sglayout/stats.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <stdexcept>

#include "sglayout/parsing.hpp"
#include "sglayout/spatial.hpp"

namespace sglayout::stats {

using nlohmann::json;

void FilterConfig::validate() const {
  if (min_object_pixels < 0 || min_objects_per_image < 0 || max_objects_per_image < 0 ||
      min_category_count < 0 || min_predicate_count < 0) {
    throw std::invalid_argument("filter config: thresholds must be non-negative");
  }
  if (min_objects_per_image > max_objects_per_image) {
    throw std::invalid_argument("filter config: min objects per image exceeds max");
  }
}

namespace {

struct LabelCounts {
  std::map<int, int> categories;
  std::map<int, int> predicates;
};

LabelCounts count_labels(const std::vector<LayoutSample>& samples, CountMode mode) {
  LabelCounts counts;
  for (const LayoutSample& s : samples) {
    if (mode == CountMode::instances) {
      for (int c : s.graph.object_categories) ++counts.categories[c];
      for (const Triplet& t : s.graph.triplets) ++counts.predicates[t.predicate];
    } else {
      std::set<int> cats(s.graph.object_categories.begin(), s.graph.object_categories.end());
      std::set<int> preds;
      for (const Triplet& t : s.graph.triplets) preds.insert(t.predicate);
      for (int c : cats) ++counts.categories[c];
      for (int p : preds) ++counts.predicates[p];
    }
  }
  return counts;
}

// Removes objects below the pixel bound, along with triplets touching them.
// Returns the number of objects dropped.
int drop_small_objects(LayoutSample& sample, int min_pixels) {
  const int n = sample.graph.object_count();
  std::vector<int> remap(static_cast<std::size_t>(n), -1);
  LayoutSample out = sample;
  out.graph.object_categories.clear();
  out.boxes.clear();
  int dropped = 0;
  for (int i = 0; i < n; ++i) {
    const BoundingBox& b = sample.boxes[static_cast<std::size_t>(i)];
    if (b.w * sample.image_width < min_pixels || b.h * sample.image_height < min_pixels) {
      ++dropped;
      continue;
    }
    remap[static_cast<std::size_t>(i)] = static_cast<int>(out.graph.object_categories.size());
    out.graph.object_categories.push_back(sample.graph.object_categories[static_cast<std::size_t>(i)]);
    out.boxes.push_back(b);
  }
  if (dropped == 0) return 0;
  out.graph.triplets.clear();
  for (const Triplet& t : sample.graph.triplets) {
    const int s = remap[static_cast<std::size_t>(t.subject)];
    const int o = remap[static_cast<std::size_t>(t.object)];
    if (s >= 0 && o >= 0) out.graph.triplets.push_back({s, t.predicate, o});
  }
  sample = std::move(out);
  return dropped;
}

// One round of the ordered pipeline. Returns true when anything changed.
bool filter_round(std::vector<LayoutSample>& samples, const FilterConfig& cfg,
                  FilterReport& report) {
  bool changed = false;

  if (cfg.min_category_count > 0 || cfg.min_predicate_count > 0) {
    const LabelCounts counts = count_labels(samples, cfg.count_mode);
    std::vector<LayoutSample> kept;
    kept.reserve(samples.size());
    for (LayoutSample& s : samples) {
      bool rare_cat = false;
      for (int c : s.graph.object_categories) {
        if (counts.categories.at(c) < cfg.min_category_count) {
          rare_cat = true;
          break;
        }
      }
      if (rare_cat) {
        ++report.rejected_rare_category;
        changed = true;
        continue;
      }
      bool rare_pred = false;
      for (const Triplet& t : s.graph.triplets) {
        if (counts.predicates.at(t.predicate) < cfg.min_predicate_count) {
          rare_pred = true;
          break;
        }
      }
      if (rare_pred) {
        ++report.rejected_rare_predicate;
        changed = true;
        continue;
      }
      kept.push_back(std::move(s));
    }
    samples = std::move(kept);
  }

  std::vector<LayoutSample> kept;
  kept.reserve(samples.size());
  for (LayoutSample& s : samples) {
    const int n = s.graph.object_count();
    if (n < cfg.min_objects_per_image) {
      ++report.rejected_too_few_objects;
      changed = true;
    } else if (n > cfg.max_objects_per_image) {
      ++report.rejected_too_many_objects;
      changed = true;
    } else {
      kept.push_back(std::move(s));
    }
  }
  samples = std::move(kept);

  std::vector<LayoutSample> sized;
  sized.reserve(samples.size());
  for (LayoutSample& s : samples) {
    const int dropped = drop_small_objects(s, cfg.min_object_pixels);
    if (dropped > 0) {
      report.objects_dropped_small += dropped;
      changed = true;
    }
    // Dropping can only shrink an image, so re-checking the lower bound is
    // enough here; the upper bound was enforced just above.
    if (s.graph.object_count() < cfg.min_objects_per_image) {
      ++report.rejected_too_few_objects;
    } else {
      sized.push_back(std::move(s));
    }
  }
  samples = std::move(sized);
  return changed;
}

}  // namespace

FilterResult filter_corpus(const std::vector<LayoutSample>& samples, const FilterConfig& cfg) {
  cfg.validate();
  for (const LayoutSample& s : samples) {
    if (s.boxes.size() != s.graph.object_categories.size()) {
      throw std::invalid_argument("filter: sample \"" + s.id + "\" has no ground-truth boxes");
    }
  }
  FilterResult result;
  result.kept = samples;
  result.report.input_images = static_cast<int>(samples.size());
  while (filter_round(result.kept, cfg, result.report)) {
  }
  result.report.kept_images = static_cast<int>(result.kept.size());
  return result;
}

const TripletStats* TripletStatTable::find(const TripletKey& key) const {
  auto it = entries.find(key);
  return it == entries.end() ? nullptr : &it->second;
}

namespace {

struct GeoSamples {
  std::vector<std::array<double, 3>> values;  // (s, dx, dy) per instance
};

// Two-pass mean and sample standard deviation over one component.
std::pair<double, double> mean_std(const std::vector<std::array<double, 3>>& values, int comp) {
  const std::size_t n = values.size();
  double sum = 0.0;
  for (const auto& v : values) sum += v[static_cast<std::size_t>(comp)];
  const double mean = sum / static_cast<double>(n);
  if (n < 2) return {mean, 0.0};
  double sq = 0.0;
  for (const auto& v : values) {
    const double d = v[static_cast<std::size_t>(comp)] - mean;
    sq += d * d;
  }
  return {mean, std::sqrt(sq / static_cast<double>(n - 1))};
}

}  // namespace

TripletStatTable compute_stats(const std::vector<LayoutSample>& samples) {
  TripletStatTable table;
  std::map<TripletKey, GeoSamples> acc;
  std::vector<std::string> skipped;
  for (const LayoutSample& s : samples) {
    if (s.boxes.size() != s.graph.object_categories.size()) {
      throw std::invalid_argument("stats: sample \"" + s.id + "\" has no ground-truth boxes");
    }
    // Geometry for the whole sample first, so a degenerate box skips the
    // sample as a unit instead of leaving it half-counted.
    std::vector<std::pair<TripletKey, std::array<double, 3>>> local;
    bool degenerate = false;
    for (const Triplet& t : s.graph.triplets) {
      const BoundingBox& bj = s.boxes[static_cast<std::size_t>(t.subject)];
      const BoundingBox& bk = s.boxes[static_cast<std::size_t>(t.object)];
      TripletKey key{s.graph.object_categories[static_cast<std::size_t>(t.subject)], t.predicate,
                     s.graph.object_categories[static_cast<std::size_t>(t.object)]};
      try {
        const spatial::RelativeGeometry g = spatial::relative_geometry(bj, bk);
        local.emplace_back(key, std::array<double, 3>{g.scale_ratio, g.dx, g.dy});
      } catch (const std::domain_error&) {
        degenerate = true;
        break;
      }
    }
    if (degenerate) {
      skipped.push_back(s.id);
      continue;
    }
    for (auto& [key, value] : local) acc[key].values.push_back(value);
  }

  std::sort(skipped.begin(), skipped.end());
  for (const std::string& id : skipped) {
    table.warnings.push_back("sample \"" + id + "\" skipped: degenerate ground-truth box");
  }

  for (auto& [key, geo] : acc) {
    // Canonical order: the statistics cannot depend on corpus order.
    std::sort(geo.values.begin(), geo.values.end());
    TripletStats st;
    st.count = static_cast<int>(geo.values.size());
    std::tie(st.mean_s, st.std_s) = mean_std(geo.values, 0);
    std::tie(st.mean_dx, st.std_dx) = mean_std(geo.values, 1);
    std::tie(st.mean_dy, st.std_dy) = mean_std(geo.values, 2);
    table.entries.emplace(key, st);
  }
  return table;
}

std::string stats_to_json(const TripletStatTable& table, const Vocab& vocab) {
  std::vector<std::pair<std::string, const TripletStats*>> rows;
  rows.reserve(table.entries.size());
  for (const auto& [key, st] : table.entries) {
    const std::string label = vocab.categories.at(static_cast<std::size_t>(key.subject_category)) +
                              "|" + vocab.predicates.at(static_cast<std::size_t>(key.predicate)) +
                              "|" + vocab.categories.at(static_cast<std::size_t>(key.object_category));
    rows.emplace_back(label, &st);
  }
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  json out = json::array();
  for (const auto& [label, st] : rows) {
    out.push_back({{"triplet", label},
                   {"count", st->count},
                   {"mean_s", st->mean_s},
                   {"std_s", st->std_s},
                   {"mean_dx", st->mean_dx},
                   {"std_dx", st->std_dx},
                   {"mean_dy", st->mean_dy},
                   {"std_dy", st->std_dy}});
  }
  return out.dump(2) + "\n";
}

void write_stats(const TripletStatTable& table, const Vocab& vocab, const std::string& path) {
  write_file(path, stats_to_json(table, vocab));
}

}  // namespace sglayout::stats
