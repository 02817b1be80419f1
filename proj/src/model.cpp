#include "sglayout/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sglayout/rng.hpp"

namespace sglayout {

namespace {

ad::Tensor xavier(Rng& rng, int fan_in, int fan_out) {
  const double a = std::sqrt(6.0 / (fan_in + fan_out));
  std::vector<double> data(static_cast<std::size_t>(fan_in) * fan_out);
  for (double& v : data) v = rng.uniform(-a, a);
  return ad::Tensor::from_data({fan_in, fan_out}, std::move(data), /*requires_grad=*/true);
}

ad::Tensor zero_bias(int width) {
  return ad::Tensor::zeros({width}, /*requires_grad=*/true);
}

ad::Tensor embedding_table(Rng& rng, int rows, int cols) {
  std::vector<double> data(static_cast<std::size_t>(rows) * cols);
  for (double& v : data) v = rng.normal(0.0, 0.01);
  return ad::Tensor::from_data({rows, cols}, std::move(data), /*requires_grad=*/true);
}

// Node/edge input widths entering round `layer`.
std::pair<int, int> layer_inputs(const Dims& dims, int layer) {
  if (layer == 0) return {dims.d1, dims.d2};
  return {dims.hidden, dims.hidden};
}

ad::Tensor linear(const ad::Tensor& x, const ad::Tensor& w, const ad::Tensor& b) {
  return ad::add(ad::matmul(x, w), b);
}

}  // namespace

ad::NamedParams LayoutModel::parameters() const {
  ad::NamedParams params;
  params.emplace_back("category_embeddings", category_embeddings);
  params.emplace_back("predicate_embeddings", predicate_embeddings);
  for (std::size_t l = 0; l < gcn_layers.size(); ++l) {
    const std::string prefix = "gcn." + std::to_string(l) + ".";
    params.emplace_back(prefix + "edge_w1", gcn_layers[l].edge_w1);
    params.emplace_back(prefix + "edge_b1", gcn_layers[l].edge_b1);
    params.emplace_back(prefix + "edge_w2", gcn_layers[l].edge_w2);
    params.emplace_back(prefix + "edge_b2", gcn_layers[l].edge_b2);
    params.emplace_back(prefix + "node_w", gcn_layers[l].node_w);
    params.emplace_back(prefix + "node_b", gcn_layers[l].node_b);
  }
  params.emplace_back("box_head.w1", box_head.w1);
  params.emplace_back("box_head.b1", box_head.b1);
  params.emplace_back("box_head.w2", box_head.w2);
  params.emplace_back("box_head.b2", box_head.b2);
  params.emplace_back("box_head.w3", box_head.w3);
  params.emplace_back("box_head.b3", box_head.b3);
  return params;
}

LayoutModel init_model(const Vocab& vocab, const Dims& dims, std::uint64_t seed) {
  if (vocab.categories.empty()) throw std::invalid_argument("init_model: empty category list");
  if (vocab.predicates.empty()) throw std::invalid_argument("init_model: empty predicate list");
  if (dims.d1 <= 0 || dims.d2 <= 0 || dims.hidden <= 0 || dims.layers <= 0) {
    throw std::invalid_argument("init_model: all dimensions must be positive");
  }

  Rng rng(seed);
  LayoutModel model;
  model.dims = dims;
  model.vocab_hash = vocab_fingerprint(vocab);
  model.category_embeddings =
      embedding_table(rng, static_cast<int>(vocab.categories.size()), dims.d1);
  model.predicate_embeddings =
      embedding_table(rng, static_cast<int>(vocab.predicates.size()), dims.d2);
  for (int l = 0; l < dims.layers; ++l) {
    const auto [node_in, edge_in] = layer_inputs(dims, l);
    const int node_out = dims.hidden;
    GcnLayer layer;
    layer.edge_w1 = xavier(rng, 2 * node_in + edge_in, dims.hidden);
    layer.edge_b1 = zero_bias(dims.hidden);
    layer.edge_w2 = xavier(rng, dims.hidden, 2 * node_in + node_out);
    layer.edge_b2 = zero_bias(2 * node_in + node_out);
    layer.node_w = xavier(rng, node_in, node_out);
    layer.node_b = zero_bias(node_out);
    model.gcn_layers.push_back(std::move(layer));
  }
  model.box_head.w1 = xavier(rng, dims.hidden, dims.hidden);
  model.box_head.b1 = zero_bias(dims.hidden);
  model.box_head.w2 = xavier(rng, dims.hidden, dims.hidden);
  model.box_head.b2 = zero_bias(dims.hidden);
  model.box_head.w3 = xavier(rng, dims.hidden, 4);
  model.box_head.b3 = zero_bias(4);
  return model;
}

namespace {

void check_graph(const LayoutModel& model, const SceneGraph& graph) {
  const int n_cat = model.category_embeddings.extent(0);
  const int n_pred = model.predicate_embeddings.extent(0);
  for (int c : graph.object_categories) {
    if (c < 0 || c >= n_cat) {
      std::ostringstream os;
      os << "encode: category id " << c << " out of range [0," << n_cat << ")";
      throw std::out_of_range(os.str());
    }
  }
  for (const Triplet& t : graph.triplets) {
    if (t.predicate < 0 || t.predicate >= n_pred) {
      std::ostringstream os;
      os << "encode: predicate id " << t.predicate << " out of range [0," << n_pred << ")";
      throw std::out_of_range(os.str());
    }
    if (t.subject < 0 || t.subject >= graph.object_count() || t.object < 0 ||
        t.object >= graph.object_count()) {
      throw std::out_of_range("encode: triplet index out of range");
    }
  }
}

}  // namespace

EncodedGraph encode(const LayoutModel& model, const SceneGraph& graph) {
  check_graph(model, graph);
  const int n = graph.object_count();
  const int m = graph.triplet_count();
  if (n == 0) throw std::invalid_argument("encode: graph has no objects");

  std::vector<int> subj(static_cast<std::size_t>(m)), obj(static_cast<std::size_t>(m)),
      preds(static_cast<std::size_t>(m));
  for (int t = 0; t < m; ++t) {
    subj[static_cast<std::size_t>(t)] = graph.triplets[static_cast<std::size_t>(t)].subject;
    obj[static_cast<std::size_t>(t)] = graph.triplets[static_cast<std::size_t>(t)].object;
    preds[static_cast<std::size_t>(t)] = graph.triplets[static_cast<std::size_t>(t)].predicate;
  }

  ad::Tensor nodes = ad::gather_rows(model.category_embeddings, graph.object_categories);
  ad::Tensor edges;  // undefined when m == 0
  if (m > 0) edges = ad::gather_rows(model.predicate_embeddings, preds);

  for (int l = 0; l < model.dims.layers; ++l) {
    const GcnLayer& layer = model.gcn_layers[static_cast<std::size_t>(l)];
    const int node_in = nodes.extent(1);
    ad::Tensor pooled;
    if (m > 0) {
      ad::Tensor hs = ad::gather_rows(nodes, subj);
      ad::Tensor ho = ad::gather_rows(nodes, obj);
      ad::Tensor mid = ad::relu(linear(ad::concat({hs, edges, ho}), layer.edge_w1, layer.edge_b1));
      ad::Tensor out = linear(mid, layer.edge_w2, layer.edge_b2);
      const int node_out = out.extent(1) - 2 * node_in;
      ad::Tensor cand_subj = ad::slice_cols(out, 0, node_in);
      edges = ad::slice_cols(out, node_in, node_in + node_out);
      ad::Tensor cand_obj = ad::slice_cols(out, node_in + node_out, 2 * node_in + node_out);

      // All subject candidates (by edge), then all object candidates.
      std::vector<int> targets = subj;
      targets.insert(targets.end(), obj.begin(), obj.end());
      pooled = ad::scatter_mean(ad::vstack(cand_subj, cand_obj), targets, nodes);
    } else {
      pooled = nodes;
    }
    nodes = ad::relu(linear(pooled, layer.node_w, layer.node_b));
  }

  EncodedGraph enc;
  enc.object_vectors = nodes;
  enc.relation_vectors = m > 0 ? edges : ad::Tensor::zeros({0, model.dims.hidden});
  return enc;
}

std::vector<double> combined_vector(const LayoutModel& model, const SceneGraph& graph,
                                    int object_index, const std::vector<double>& noise) {
  check_graph(model, graph);
  if (object_index < 0 || object_index >= graph.object_count()) {
    std::ostringstream os;
    os << "combined_vector: object index " << object_index << " out of range [0,"
       << graph.object_count() << ")";
    throw std::out_of_range(os.str());
  }
  const int d1 = model.dims.d1;
  const int d2 = model.dims.d2;
  if (static_cast<int>(noise.size()) != d1 + d2) {
    std::ostringstream os;
    os << "combined_vector: noise length " << noise.size() << ", expected " << d1 + d2;
    throw std::invalid_argument(os.str());
  }

  std::vector<double> v(static_cast<std::size_t>(d1 + d2), 0.0);
  const int cat = graph.object_categories[static_cast<std::size_t>(object_index)];
  const auto& cemb = model.category_embeddings.data();
  for (int j = 0; j < d1; ++j) {
    v[static_cast<std::size_t>(j)] = cemb[static_cast<std::size_t>(cat) * d1 + j];
  }

  // Mean over triplets where this object is the subject, in edge order.
  const auto& pemb = model.predicate_embeddings.data();
  int count = 0;
  for (const Triplet& t : graph.triplets) {
    if (t.subject != object_index) continue;
    ++count;
    for (int j = 0; j < d2; ++j) {
      v[static_cast<std::size_t>(d1 + j)] += pemb[static_cast<std::size_t>(t.predicate) * d2 + j];
    }
  }
  if (count > 0) {
    for (int j = 0; j < d2; ++j) v[static_cast<std::size_t>(d1 + j)] /= count;
  }
  for (std::size_t j = 0; j < v.size(); ++j) v[j] += noise[j];
  return v;
}

ad::Tensor predict_boxes(const LayoutModel& model, const EncodedGraph& encoded) {
  const BoxHead& head = model.box_head;
  ad::Tensor h = ad::relu(linear(encoded.object_vectors, head.w1, head.b1));
  h = ad::relu(linear(h, head.w2, head.b2));
  return ad::sigmoid(linear(h, head.w3, head.b3));
}

std::vector<BoundingBox> predict_layout(const LayoutModel& model, const SceneGraph& graph) {
  ad::NoGradGuard no_grad;
  ad::Tensor boxes = predict_boxes(model, encode(model, graph));
  std::vector<BoundingBox> out;
  out.reserve(static_cast<std::size_t>(boxes.extent(0)));
  for (int i = 0; i < boxes.extent(0); ++i) out.push_back(box_from_row(boxes, i));
  return out;
}

BoundingBox box_from_row(const ad::Tensor& boxes, int row) {
  if (boxes.rank() != 2 || boxes.extent(1) != 4 || row < 0 || row >= boxes.extent(0)) {
    throw std::invalid_argument("box_from_row: bad row/shape");
  }
  const auto& d = boxes.data();
  const std::size_t base = static_cast<std::size_t>(row) * 4;
  return {d[base], d[base + 1], d[base + 2], d[base + 3]};
}

}  // namespace sglayout
