#pragma once

#include <array>
#include <vector>

#include "sglayout/tensor.hpp"
#include "sglayout/types.hpp"

namespace sglayout::spatial {

// Below this, a box diagonal counts as degenerate.
inline constexpr double kDegenerateEps = 1e-6;

// Relative geometry of a related (subject, object) box pair: the scale ratio
// of their diagonals and the diagonal-normalized center offset, x-component
// absolute-valued.
struct RelativeGeometry {
  double scale_ratio = 1.0;  // > 0
  double dx = 0.0;           // >= 0
  double dy = 0.0;

  bool operator==(const RelativeGeometry&) const = default;
};

// Diagonal length sqrt(w^2 + h^2) of a normalized box.
double diag(const BoundingBox& box);

// diag(subject) / diag(object). Throws on a degenerate object box.
double relative_scale(const BoundingBox& subject, const BoundingBox& object);

// [|x_j - x_k|, y_j - y_k] / (diag(subject) + diag(object)).
// Throws when the summed diagonals are degenerate.
std::array<double, 2> relative_distance(const BoundingBox& subject, const BoundingBox& object);

RelativeGeometry relative_geometry(const BoundingBox& subject, const BoundingBox& object);

// Loss-path variants with kDegenerateEps added to each diagonal appearing in
// a denominator, keeping gradients finite when predicted extents collapse.
// The exact functions above are for measurement; these are for training.
double guarded_scale(const BoundingBox& subject, const BoundingBox& object);
std::array<double, 2> guarded_distance(const BoundingBox& subject, const BoundingBox& object);
RelativeGeometry guarded_geometry(const BoundingBox& subject, const BoundingBox& object);

// Loss weights of the combined objective. Only the box and spatial-constraint
// terms exist in this artifact; the remaining weights must stay at zero.
struct LossWeights {
  double lambda_box = 1.0;
  double lambda_scm = 1.0;
  double lambda_obj = 0.0;
  double lambda_sg = 0.0;
  double lambda_img = 0.0;

  void validate() const;  // throws on negatives or nonzero out-of-scope weights
};

// Sum over objects of the L2 distance between ground-truth and predicted box
// 4-vectors. `pred` is {n, 4} and stays differentiable.
ad::Tensor box_loss(const std::vector<BoundingBox>& gt, const ad::Tensor& pred);

// Sum over the graph's triplets of |s - s_hat| + ||d - d_hat||_2, predicted
// geometry computed from `pred` with guarded denominators. Targets are taken
// per-sample from the ground-truth boxes.
ad::Tensor scm_loss(const SceneGraph& graph, const std::vector<BoundingBox>& gt,
                    const ad::Tensor& pred);

// Same loss against explicit per-triplet targets (corpus-statistic mode).
ad::Tensor scm_loss_targets(const SceneGraph& graph, const std::vector<RelativeGeometry>& targets,
                            const ad::Tensor& pred);

// lambda_box * l_box + lambda_scm * l_scm after validating the weights.
ad::Tensor total_loss(const LossWeights& weights, const ad::Tensor& l_box,
                      const ad::Tensor& l_scm);

}  // namespace sglayout::spatial
