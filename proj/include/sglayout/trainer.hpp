#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sglayout/model.hpp"
#include "sglayout/spatial.hpp"
#include "sglayout/stats.hpp"
#include "sglayout/types.hpp"

namespace sglayout::train {

// Targets of the spatial-constraint term: geometry of each sample's own
// ground-truth boxes, or the corpus-wide per-triplet-type means.
enum class ScmTargetMode { per_sample, corpus_stat };

struct TrainConfig {
  double lr = 1e-4;
  int batch_size = 32;
  int epochs = 1;
  std::uint64_t seed = 0;
  spatial::LossWeights weights;
  ScmTargetMode scm_target_mode = ScmTargetMode::per_sample;

  void validate() const;
};

// One Adam step. l_box and l_scm are the unweighted batch means; total is
// the weighted objective actually minimized.
struct LossRecord {
  int step = 0;
  int epoch = 0;
  double l_box = 0.0;
  double l_scm = 0.0;
  double total = 0.0;

  bool operator==(const LossRecord&) const = default;
};

// Runs epochs * ceil(N / batch_size) Adam steps on the weighted objective,
// shuffling sample order once per epoch with a generator seeded from
// cfg.seed. Deterministic given (model, cfg). Aborts with a diagnostic
// naming the batch when the loss stops being finite.
std::vector<LossRecord> train(LayoutModel& model, const std::vector<LayoutSample>& corpus,
                              const TrainConfig& cfg);

std::string history_to_csv(const std::vector<LossRecord>& history);
void write_history(const std::vector<LossRecord>& history, const std::string& path);

struct PredicateMetrics {
  int triplet_count = 0;
  double mean_abs_scale_error = 0.0;
  double mean_distance_error = 0.0;
  // Ground-truth spread context from the stat table (count-weighted means
  // over the predicate's triplet types), for judging the errors above.
  double gt_mean_s = 0.0;
  double gt_mean_dx = 0.0;
  double gt_mean_dy = 0.0;
};

struct EvalReport {
  int samples = 0;
  int objects = 0;
  int triplets = 0;
  double mean_iou = 0.0;
  double mean_abs_scale_error = 0.0;
  double mean_distance_error = 0.0;
  std::map<int, PredicateMetrics> per_predicate;  // keyed by predicate id
  double probe_accuracy = 0.0;
  std::string corpus_fingerprint;  // content hash of the serialized corpus
};

// Predicts every sample with deterministic (zero-noise) forward passes and
// never mutates the model. Geometry errors compare guarded relative
// scale/distance of predictions against the same quantities of the ground
// truth, so a perfect model scores exactly zero. probe_accuracy comes from
// relation_probe on predicted geometry; a corpus with fewer than two
// predicate classes skips the probe and reports 1.0.
EvalReport evaluate(const LayoutModel& model, const std::vector<LayoutSample>& corpus,
                    const stats::TripletStatTable& table, std::uint64_t probe_seed = 0);

// Intersection-over-union of two center-format boxes; 0 when disjoint.
double box_iou(const BoundingBox& a, const BoundingBox& b);

std::string eval_report_to_json(const EvalReport& report, const Vocab& vocab);

}  // namespace sglayout::train
