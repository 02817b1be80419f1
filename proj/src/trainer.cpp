#include "sglayout/trainer.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "sglayout/optim.hpp"
#include "sglayout/parsing.hpp"
#include "sglayout/probe.hpp"
#include "sglayout/rng.hpp"
#include "sglayout/util.hpp"

namespace sglayout::train {

using nlohmann::json;

void TrainConfig::validate() const {
  if (!(lr > 0.0)) throw std::invalid_argument("train config: lr must be positive");
  if (batch_size < 1) throw std::invalid_argument("train config: batch_size must be >= 1");
  if (epochs < 0) throw std::invalid_argument("train config: epochs must be >= 0");
  weights.validate();
}

namespace {

// Corpus-statistic targets per sample triplet; per-sample mode keeps these
// empty and scm_loss derives targets from the sample's own boxes.
std::vector<std::vector<spatial::RelativeGeometry>> stat_targets(
    const std::vector<LayoutSample>& corpus) {
  const stats::TripletStatTable table = stats::compute_stats(corpus);
  std::vector<std::vector<spatial::RelativeGeometry>> targets;
  targets.reserve(corpus.size());
  for (const LayoutSample& s : corpus) {
    std::vector<spatial::RelativeGeometry> per_triplet;
    per_triplet.reserve(s.graph.triplets.size());
    for (const Triplet& t : s.graph.triplets) {
      const stats::TripletKey key{
          s.graph.object_categories[static_cast<std::size_t>(t.subject)], t.predicate,
          s.graph.object_categories[static_cast<std::size_t>(t.object)]};
      if (const stats::TripletStats* st = table.find(key)) {
        per_triplet.push_back({st->mean_s, st->mean_dx, st->mean_dy});
      } else {
        // Type only seen in degenerate-skipped samples: fall back to the
        // sample's own geometry.
        per_triplet.push_back(spatial::guarded_geometry(
            s.boxes[static_cast<std::size_t>(t.subject)],
            s.boxes[static_cast<std::size_t>(t.object)]));
      }
    }
    targets.push_back(std::move(per_triplet));
  }
  return targets;
}

// Content hash over everything that defines the corpus, independent of any
// vocabulary object (ids are already resolved).
std::string corpus_fingerprint(const std::vector<LayoutSample>& corpus) {
  std::ostringstream os;
  for (const LayoutSample& s : corpus) {
    os << s.id << ";" << s.image_width << "x" << s.image_height << ";";
    for (int c : s.graph.object_categories) os << c << ",";
    os << ";";
    for (const Triplet& t : s.graph.triplets) {
      os << t.subject << ">" << t.predicate << ">" << t.object << ",";
    }
    os << ";";
    for (const BoundingBox& b : s.boxes) {
      os << format_double(b.x) << "," << format_double(b.y) << "," << format_double(b.w) << ","
         << format_double(b.h) << "|";
    }
    os << "\n";
  }
  return to_hex(fnv1a64(os.str()));
}

}  // namespace

std::vector<LossRecord> train(LayoutModel& model, const std::vector<LayoutSample>& corpus,
                              const TrainConfig& cfg) {
  cfg.validate();
  if (corpus.empty()) throw std::invalid_argument("train: empty corpus");
  for (const LayoutSample& s : corpus) {
    if (s.boxes.size() != s.graph.object_categories.size()) {
      throw std::invalid_argument("train: sample \"" + s.id + "\" has no ground-truth boxes");
    }
  }

  std::vector<std::vector<spatial::RelativeGeometry>> targets;
  if (cfg.scm_target_mode == ScmTargetMode::corpus_stat) targets = stat_targets(corpus);

  ad::NamedParams params = model.parameters();
  ad::AdamState adam = ad::make_adam_state(params, cfg.lr);
  // Parameters untouched by a batch (e.g. unused embeddings) still need a
  // gradient buffer for the optimizer; zero is the correct value for them.
  for (auto& [name, p] : params) p.zero_grad();

  Rng rng(cfg.seed);
  std::vector<int> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);

  std::vector<LossRecord> history;
  int step = 0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t begin = 0; begin < order.size(); begin += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end =
          std::min(order.size(), begin + static_cast<std::size_t>(cfg.batch_size));
      ad::Tensor box_sum = ad::Tensor::scalar(0.0);
      ad::Tensor scm_sum = ad::Tensor::scalar(0.0);
      for (std::size_t i = begin; i < end; ++i) {
        const LayoutSample& s = corpus[static_cast<std::size_t>(order[i])];
        const ad::Tensor pred = predict_boxes(model, encode(model, s.graph));
        box_sum = ad::add(box_sum, spatial::box_loss(s.boxes, pred));
        if (cfg.scm_target_mode == ScmTargetMode::corpus_stat) {
          scm_sum = ad::add(scm_sum, spatial::scm_loss_targets(
                                         s.graph, targets[static_cast<std::size_t>(order[i])], pred));
        } else {
          scm_sum = ad::add(scm_sum, spatial::scm_loss(s.graph, s.boxes, pred));
        }
      }
      const double inv = 1.0 / static_cast<double>(end - begin);
      const ad::Tensor l_box = ad::mul_scalar(box_sum, inv);
      const ad::Tensor l_scm = ad::mul_scalar(scm_sum, inv);
      const ad::Tensor total = spatial::total_loss(cfg.weights, l_box, l_scm);
      ++step;
      if (!std::isfinite(total.value())) {
        std::ostringstream os;
        os << "train: non-finite loss at step " << step << " (epoch " << epoch << ", batch "
           << begin / static_cast<std::size_t>(cfg.batch_size) << ")";
        throw std::runtime_error(os.str());
      }
      total.backward();
      ad::adam_step(params, adam);
      history.push_back({step, epoch, l_box.value(), l_scm.value(), total.value()});
    }
  }
  return history;
}

std::string history_to_csv(const std::vector<LossRecord>& history) {
  std::string csv = "step,epoch,l_box,l_scm,total\n";
  for (const LossRecord& r : history) {
    csv += std::to_string(r.step) + "," + std::to_string(r.epoch) + "," + format_double(r.l_box) +
           "," + format_double(r.l_scm) + "," + format_double(r.total) + "\n";
  }
  return csv;
}

void write_history(const std::vector<LossRecord>& history, const std::string& path) {
  write_file(path, history_to_csv(history));
}

double box_iou(const BoundingBox& a, const BoundingBox& b) {
  const double ax0 = a.x - a.w / 2, ax1 = a.x + a.w / 2;
  const double ay0 = a.y - a.h / 2, ay1 = a.y + a.h / 2;
  const double bx0 = b.x - b.w / 2, bx1 = b.x + b.w / 2;
  const double by0 = b.y - b.h / 2, by1 = b.y + b.h / 2;
  const double iw = std::min(ax1, bx1) - std::max(ax0, bx0);
  const double ih = std::min(ay1, by1) - std::max(ay0, by0);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  return inter / (a.w * a.h + b.w * b.h - inter);
}

EvalReport evaluate(const LayoutModel& model, const std::vector<LayoutSample>& corpus,
                    const stats::TripletStatTable& table, std::uint64_t probe_seed) {
  EvalReport report;
  report.samples = static_cast<int>(corpus.size());
  report.corpus_fingerprint = corpus_fingerprint(corpus);

  struct Accum {
    int count = 0;
    double scale = 0.0;
    double dist = 0.0;
  };
  Accum all;
  std::map<int, Accum> per_pred;
  double iou_sum = 0.0;
  int objects = 0;

  for (const LayoutSample& s : corpus) {
    if (s.boxes.size() != s.graph.object_categories.size()) {
      throw std::invalid_argument("evaluate: sample \"" + s.id + "\" has no ground-truth boxes");
    }
    const std::vector<BoundingBox> pred = predict_layout(model, s.graph);
    for (std::size_t i = 0; i < pred.size(); ++i) {
      iou_sum += box_iou(s.boxes[i], pred[i]);
      ++objects;
    }
    for (const Triplet& t : s.graph.triplets) {
      const auto sj = static_cast<std::size_t>(t.subject);
      const auto sk = static_cast<std::size_t>(t.object);
      const spatial::RelativeGeometry gt = spatial::guarded_geometry(s.boxes[sj], s.boxes[sk]);
      const spatial::RelativeGeometry hat = spatial::guarded_geometry(pred[sj], pred[sk]);
      const double scale_err = std::abs(gt.scale_ratio - hat.scale_ratio);
      const double dist_err = std::hypot(gt.dx - hat.dx, gt.dy - hat.dy);
      all.count += 1;
      all.scale += scale_err;
      all.dist += dist_err;
      Accum& pp = per_pred[t.predicate];
      pp.count += 1;
      pp.scale += scale_err;
      pp.dist += dist_err;
    }
  }

  report.objects = objects;
  report.triplets = all.count;
  report.mean_iou = objects > 0 ? iou_sum / objects : 0.0;
  report.mean_abs_scale_error = all.count > 0 ? all.scale / all.count : 0.0;
  report.mean_distance_error = all.count > 0 ? all.dist / all.count : 0.0;

  for (const auto& [predicate, acc] : per_pred) {
    PredicateMetrics pm;
    pm.triplet_count = acc.count;
    pm.mean_abs_scale_error = acc.scale / acc.count;
    pm.mean_distance_error = acc.dist / acc.count;
    double weight = 0.0;
    for (const auto& [key, st] : table.entries) {
      if (key.predicate != predicate) continue;
      pm.gt_mean_s += st.count * st.mean_s;
      pm.gt_mean_dx += st.count * st.mean_dx;
      pm.gt_mean_dy += st.count * st.mean_dy;
      weight += st.count;
    }
    if (weight > 0.0) {
      pm.gt_mean_s /= weight;
      pm.gt_mean_dx /= weight;
      pm.gt_mean_dy /= weight;
    }
    report.per_predicate.emplace(predicate, pm);
  }

  if (per_pred.size() >= 2 && all.count >= 5) {
    report.probe_accuracy = relation_probe(corpus, GeometrySource::predicted, &model, probe_seed);
  } else {
    report.probe_accuracy = 1.0;  // single relation class is trivially recoverable
  }
  return report;
}

std::string eval_report_to_json(const EvalReport& report, const Vocab& vocab) {
  json per_pred = json::object();
  for (const auto& [predicate, pm] : report.per_predicate) {
    per_pred[vocab.predicates.at(static_cast<std::size_t>(predicate))] = {
        {"triplet_count", pm.triplet_count},
        {"mean_abs_scale_error", pm.mean_abs_scale_error},
        {"mean_distance_error", pm.mean_distance_error},
        {"gt_mean_s", pm.gt_mean_s},
        {"gt_mean_dx", pm.gt_mean_dx},
        {"gt_mean_dy", pm.gt_mean_dy}};
  }
  json doc = {{"samples", report.samples},
              {"objects", report.objects},
              {"triplets", report.triplets},
              {"mean_iou", report.mean_iou},
              {"mean_abs_scale_error", report.mean_abs_scale_error},
              {"mean_distance_error", report.mean_distance_error},
              {"per_predicate", std::move(per_pred)},
              {"probe_accuracy", report.probe_accuracy},
              {"corpus_fingerprint", report.corpus_fingerprint}};
  return doc.dump(2) + "\n";
}

}  // namespace sglayout::train
