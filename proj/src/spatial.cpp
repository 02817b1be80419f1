#include "sglayout/spatial.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sglayout::spatial {

namespace ad = sglayout::ad;

double diag(const BoundingBox& box) { return std::sqrt(box.w * box.w + box.h * box.h); }

double relative_scale(const BoundingBox& subject, const BoundingBox& object) {
  const double dk = diag(object);
  if (dk < kDegenerateEps) {
    std::ostringstream os;
    os << "relative_scale: degenerate object box (diagonal " << dk << ")";
    throw std::domain_error(os.str());
  }
  return diag(subject) / dk;
}

std::array<double, 2> relative_distance(const BoundingBox& subject, const BoundingBox& object) {
  const double denom = diag(subject) + diag(object);
  if (denom < kDegenerateEps) {
    std::ostringstream os;
    os << "relative_distance: degenerate box pair (summed diagonals " << denom << ")";
    throw std::domain_error(os.str());
  }
  return {std::fabs(subject.x - object.x) / denom, (subject.y - object.y) / denom};
}

RelativeGeometry relative_geometry(const BoundingBox& subject, const BoundingBox& object) {
  const auto d = relative_distance(subject, object);
  return {relative_scale(subject, object), d[0], d[1]};
}

double guarded_scale(const BoundingBox& subject, const BoundingBox& object) {
  return diag(subject) / (diag(object) + kDegenerateEps);
}

std::array<double, 2> guarded_distance(const BoundingBox& subject, const BoundingBox& object) {
  // Mirrors the tensor-path arithmetic exactly: (dj + dk) + 2*eps.
  const double denom = (diag(subject) + diag(object)) + 2.0 * kDegenerateEps;
  return {std::fabs(subject.x - object.x) / denom, (subject.y - object.y) / denom};
}

RelativeGeometry guarded_geometry(const BoundingBox& subject, const BoundingBox& object) {
  const auto d = guarded_distance(subject, object);
  return {guarded_scale(subject, object), d[0], d[1]};
}

void LossWeights::validate() const {
  if (lambda_box < 0.0 || lambda_scm < 0.0 || lambda_obj < 0.0 || lambda_sg < 0.0 ||
      lambda_img < 0.0) {
    throw std::invalid_argument("loss weights must be non-negative");
  }
  if (lambda_obj != 0.0 || lambda_sg != 0.0 || lambda_img != 0.0) {
    throw std::invalid_argument(
        "lambda_obj, lambda_sg and lambda_img have no loss terms here and must be 0");
  }
}

ad::Tensor box_loss(const std::vector<BoundingBox>& gt, const ad::Tensor& pred) {
  const int n = static_cast<int>(gt.size());
  if (pred.rank() != 2 || pred.extent(1) != 4 || pred.extent(0) != n) {
    std::ostringstream os;
    os << "box_loss: " << n << " ground-truth boxes vs predictions of shape "
       << ad::shape_str(pred.shape());
    throw std::invalid_argument(os.str());
  }
  if (n == 0) return ad::Tensor::scalar(0.0);
  std::vector<double> gt_data;
  gt_data.reserve(static_cast<std::size_t>(n) * 4);
  for (const BoundingBox& b : gt) {
    gt_data.insert(gt_data.end(), {b.x, b.y, b.w, b.h});
  }
  ad::Tensor target = ad::Tensor::from_data({n, 4}, std::move(gt_data));
  return ad::sum(ad::l2_norm(ad::sub(target, pred), 1));
}

namespace {

// Predicted-side geometry columns for each triplet, guarded denominators.
struct PredGeometry {
  ad::Tensor scale;  // {m}
  ad::Tensor dx;     // {m}
  ad::Tensor dy;     // {m}
};

PredGeometry predicted_geometry(const SceneGraph& graph, const ad::Tensor& pred) {
  const int m = graph.triplet_count();
  std::vector<int> subj(static_cast<std::size_t>(m)), obj(static_cast<std::size_t>(m));
  for (int t = 0; t < m; ++t) {
    subj[static_cast<std::size_t>(t)] = graph.triplets[static_cast<std::size_t>(t)].subject;
    obj[static_cast<std::size_t>(t)] = graph.triplets[static_cast<std::size_t>(t)].object;
  }
  ad::Tensor pj = ad::gather_rows(pred, subj);
  ad::Tensor pk = ad::gather_rows(pred, obj);
  auto diag_of = [](const ad::Tensor& p) {
    ad::Tensor w = ad::column(p, 2);
    ad::Tensor h = ad::column(p, 3);
    return ad::sqrt(ad::add(ad::mul(w, w), ad::mul(h, h)));
  };
  ad::Tensor dj = diag_of(pj);
  ad::Tensor dk = diag_of(pk);
  PredGeometry g;
  g.scale = ad::div(dj, ad::add_scalar(dk, kDegenerateEps));
  ad::Tensor denom = ad::add_scalar(ad::add(dj, dk), 2.0 * kDegenerateEps);
  g.dx = ad::div(ad::abs(ad::sub(ad::column(pj, 0), ad::column(pk, 0))), denom);
  g.dy = ad::div(ad::sub(ad::column(pj, 1), ad::column(pk, 1)), denom);
  return g;
}

}  // namespace

ad::Tensor scm_loss_targets(const SceneGraph& graph, const std::vector<RelativeGeometry>& targets,
                            const ad::Tensor& pred) {
  const int m = graph.triplet_count();
  if (static_cast<int>(targets.size()) != m) {
    std::ostringstream os;
    os << "scm_loss: " << targets.size() << " targets for " << m << " triplets";
    throw std::invalid_argument(os.str());
  }
  if (m == 0) return ad::Tensor::scalar(0.0);

  std::vector<double> ts(static_cast<std::size_t>(m)), tdx(static_cast<std::size_t>(m)),
      tdy(static_cast<std::size_t>(m));
  for (int t = 0; t < m; ++t) {
    ts[static_cast<std::size_t>(t)] = targets[static_cast<std::size_t>(t)].scale_ratio;
    tdx[static_cast<std::size_t>(t)] = targets[static_cast<std::size_t>(t)].dx;
    tdy[static_cast<std::size_t>(t)] = targets[static_cast<std::size_t>(t)].dy;
  }
  PredGeometry g = predicted_geometry(graph, pred);
  ad::Tensor scale_term = ad::abs(ad::sub(ad::Tensor::from_data({m}, std::move(ts)), g.scale));
  ad::Tensor ddx = ad::sub(ad::Tensor::from_data({m}, std::move(tdx)), g.dx);
  ad::Tensor ddy = ad::sub(ad::Tensor::from_data({m}, std::move(tdy)), g.dy);
  ad::Tensor delta = ad::concat({ad::reshape(ddx, {m, 1}), ad::reshape(ddy, {m, 1})});
  ad::Tensor dist_term = ad::l2_norm(delta, 1);
  return ad::sum(ad::add(scale_term, dist_term));
}

ad::Tensor scm_loss(const SceneGraph& graph, const std::vector<BoundingBox>& gt,
                    const ad::Tensor& pred) {
  std::vector<RelativeGeometry> targets;
  targets.reserve(graph.triplets.size());
  for (const Triplet& t : graph.triplets) {
    targets.push_back(guarded_geometry(gt.at(static_cast<std::size_t>(t.subject)),
                                       gt.at(static_cast<std::size_t>(t.object))));
  }
  return scm_loss_targets(graph, targets, pred);
}

ad::Tensor total_loss(const LossWeights& weights, const ad::Tensor& l_box,
                      const ad::Tensor& l_scm) {
  weights.validate();
  return ad::add(ad::mul_scalar(l_box, weights.lambda_box),
                 ad::mul_scalar(l_scm, weights.lambda_scm));
}

}  // namespace sglayout::spatial
