#include "sglayout/probe.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>

#include "sglayout/rng.hpp"
#include "sglayout/spatial.hpp"

namespace sglayout::train {

namespace {

constexpr int kFeatures = 5;
constexpr int kIterations = 500;
constexpr double kLearningRate = 0.5;

struct Instance {
  std::array<double, kFeatures> x{};
  int label = 0;  // contiguous class index
};

std::array<double, kFeatures> geometry_features(const BoundingBox& bj, const BoundingBox& bk) {
  const spatial::RelativeGeometry g = spatial::guarded_geometry(bj, bk);
  return {std::log(g.scale_ratio), g.dx, g.dy,
          std::log(spatial::diag(bj) + spatial::kDegenerateEps),
          std::log(spatial::diag(bk) + spatial::kDegenerateEps)};
}

}  // namespace

double relation_probe(const std::vector<LayoutSample>& corpus, GeometrySource source,
                      const LayoutModel* model, std::uint64_t seed) {
  if (source == GeometrySource::predicted && model == nullptr) {
    throw std::invalid_argument("relation probe: predicted geometry needs a model");
  }

  std::map<int, int> class_of;  // predicate id -> contiguous class
  for (const LayoutSample& s : corpus) {
    for (const Triplet& t : s.graph.triplets) class_of.emplace(t.predicate, 0);
  }
  if (class_of.size() < 2) {
    throw std::invalid_argument("relation probe: needs at least 2 predicate classes");
  }
  int next_class = 0;
  for (auto& [predicate, cls] : class_of) cls = next_class++;
  const int num_classes = next_class;

  std::vector<Instance> instances;
  for (const LayoutSample& s : corpus) {
    std::vector<BoundingBox> boxes;
    if (source == GeometrySource::predicted) {
      boxes = predict_layout(*model, s.graph);
    } else {
      if (s.boxes.size() != s.graph.object_categories.size()) {
        throw std::invalid_argument("relation probe: sample \"" + s.id +
                                    "\" has no ground-truth boxes");
      }
      boxes = s.boxes;
    }
    for (const Triplet& t : s.graph.triplets) {
      Instance inst;
      inst.x = geometry_features(boxes[static_cast<std::size_t>(t.subject)],
                                 boxes[static_cast<std::size_t>(t.object)]);
      inst.label = class_of.at(t.predicate);
      instances.push_back(inst);
    }
  }
  if (instances.size() < 5) {
    throw std::invalid_argument("relation probe: needs at least 5 triplets");
  }

  std::vector<int> order(instances.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  Rng rng(seed);
  rng.shuffle(order);
  const std::size_t train_n =
      std::max<std::size_t>(1, std::min(instances.size() - 1, instances.size() * 4 / 5));

  // Standardize with training-split statistics.
  std::array<double, kFeatures> mean{}, scale{};
  for (std::size_t i = 0; i < train_n; ++i) {
    const auto& x = instances[static_cast<std::size_t>(order[i])].x;
    for (int f = 0; f < kFeatures; ++f) mean[static_cast<std::size_t>(f)] += x[static_cast<std::size_t>(f)];
  }
  for (double& m : mean) m /= static_cast<double>(train_n);
  for (std::size_t i = 0; i < train_n; ++i) {
    const auto& x = instances[static_cast<std::size_t>(order[i])].x;
    for (int f = 0; f < kFeatures; ++f) {
      const double d = x[static_cast<std::size_t>(f)] - mean[static_cast<std::size_t>(f)];
      scale[static_cast<std::size_t>(f)] += d * d;
    }
  }
  for (double& v : scale) {
    v = std::sqrt(v / static_cast<double>(train_n));
    if (v < 1e-12) v = 1.0;
  }
  auto standardized = [&](const Instance& inst) {
    std::array<double, kFeatures + 1> z{};
    for (int f = 0; f < kFeatures; ++f) {
      z[static_cast<std::size_t>(f)] =
          (inst.x[static_cast<std::size_t>(f)] - mean[static_cast<std::size_t>(f)]) /
          scale[static_cast<std::size_t>(f)];
    }
    z[kFeatures] = 1.0;  // bias input
    return z;
  };

  // Full-batch softmax regression, zero-initialized.
  std::vector<double> w(static_cast<std::size_t>(kFeatures + 1) * num_classes, 0.0);
  auto logits = [&](const std::array<double, kFeatures + 1>& z, std::vector<double>& out) {
    for (int k = 0; k < num_classes; ++k) {
      double acc = 0.0;
      for (int f = 0; f <= kFeatures; ++f) {
        acc += z[static_cast<std::size_t>(f)] * w[static_cast<std::size_t>(f) * num_classes + k];
      }
      out[static_cast<std::size_t>(k)] = acc;
    }
  };

  std::vector<double> grad(w.size());
  std::vector<double> p(static_cast<std::size_t>(num_classes));
  for (int iter = 0; iter < kIterations; ++iter) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t i = 0; i < train_n; ++i) {
      const Instance& inst = instances[static_cast<std::size_t>(order[i])];
      const auto z = standardized(inst);
      logits(z, p);
      const double mx = *std::max_element(p.begin(), p.end());
      double denom = 0.0;
      for (double& v : p) {
        v = std::exp(v - mx);
        denom += v;
      }
      for (double& v : p) v /= denom;
      p[static_cast<std::size_t>(inst.label)] -= 1.0;
      for (int f = 0; f <= kFeatures; ++f) {
        for (int k = 0; k < num_classes; ++k) {
          grad[static_cast<std::size_t>(f) * num_classes + k] +=
              z[static_cast<std::size_t>(f)] * p[static_cast<std::size_t>(k)];
        }
      }
    }
    for (std::size_t j = 0; j < w.size(); ++j) {
      w[j] -= kLearningRate * grad[j] / static_cast<double>(train_n);
    }
  }

  int correct = 0;
  const std::size_t test_n = instances.size() - train_n;
  for (std::size_t i = train_n; i < instances.size(); ++i) {
    const Instance& inst = instances[static_cast<std::size_t>(order[i])];
    logits(standardized(inst), p);
    const int pick = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
    if (pick == inst.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test_n);
}

}  // namespace sglayout::train
