#pragma once

#include <cstdint>
#include <vector>

#include "sglayout/model.hpp"
#include "sglayout/types.hpp"

namespace sglayout::train {

enum class GeometrySource { ground_truth, predicted };

// Trains a softmax linear classifier to recover each triplet's predicate
// from the pair's geometry ([log s, d_x, d_y, log diag_j, log diag_k],
// guarded variants) and returns held-out accuracy on a seeded 80/20 split.
// `model` is required only for GeometrySource::predicted. Throws when the
// corpus has fewer than two predicate classes or fewer than five triplets.
double relation_probe(const std::vector<LayoutSample>& corpus, GeometrySource source,
                      const LayoutModel* model, std::uint64_t seed);

}  // namespace sglayout::train
