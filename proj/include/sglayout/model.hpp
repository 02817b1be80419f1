#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sglayout/optim.hpp"
#include "sglayout/tensor.hpp"
#include "sglayout/types.hpp"

namespace sglayout {

struct Dims {
  int d1 = 64;      // category embedding width
  int d2 = 64;      // predicate embedding width
  int hidden = 128; // node/edge width after the first round
  int layers = 3;   // message-passing rounds

  bool operator==(const Dims&) const = default;
};

// One message-passing round. The edge MLP maps concat(h_s, h_r, h_o) to
// (candidate_s, new_edge, candidate_o); candidates keep the incoming node
// width so that pooled candidates and passed-through vectors of edge-less
// nodes go through the same node MLP.
struct GcnLayer {
  ad::Tensor edge_w1, edge_b1;  // (2*node_in + edge_in) -> hidden
  ad::Tensor edge_w2, edge_b2;  // hidden -> (node_in + node_out + node_in)
  ad::Tensor node_w, node_b;    // node_in -> node_out
};

struct BoxHead {
  ad::Tensor w1, b1;  // hidden -> hidden
  ad::Tensor w2, b2;  // hidden -> hidden
  ad::Tensor w3, b3;  // hidden -> 4, sigmoid output
};

// Embedding tables, graph-convolution weights and the box regressor.
struct LayoutModel {
  Dims dims;
  std::uint64_t vocab_hash = 0;
  ad::Tensor category_embeddings;   // |categories| x d1
  ad::Tensor predicate_embeddings;  // |predicates| x d2
  std::vector<GcnLayer> gcn_layers;
  BoxHead box_head;

  ad::NamedParams parameters() const;
};

// Deterministic initialization: weights ~ U(-a, a) with a = sqrt(6/(fan_in +
// fan_out)), biases zero, embeddings ~ N(0, 0.01).
LayoutModel init_model(const Vocab& vocab, const Dims& dims, std::uint64_t seed);

struct EncodedGraph {
  ad::Tensor object_vectors;    // n x hidden
  ad::Tensor relation_vectors;  // m x hidden ({0, hidden} when m == 0)
};

// Runs dims.layers rounds of message passing. Candidates are aggregated in
// ascending edge order (subject candidates first, then object candidates),
// which makes object relabeling permute the outputs bit-exactly.
EncodedGraph encode(const LayoutModel& model, const SceneGraph& graph);

// Relation-guided combined vector: concat(c_i, mean of predicate embeddings
// over triplets where object i is the subject) + noise. Objects heading no
// triplet get a zero relation part. `noise` must have length d1 + d2.
std::vector<double> combined_vector(const LayoutModel& model, const SceneGraph& graph,
                                    int object_index, const std::vector<double>& noise);

// Box regressor: per-object MLP with sigmoid outputs, so every predicted box
// satisfies the BoundingBox invariants by construction. Returns {n, 4}.
ad::Tensor predict_boxes(const LayoutModel& model, const EncodedGraph& encoded);

// Convenience: encode + predict without recording gradients.
std::vector<BoundingBox> predict_layout(const LayoutModel& model, const SceneGraph& graph);

BoundingBox box_from_row(const ad::Tensor& boxes, int row);

}  // namespace sglayout
