#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace sglayout {

// Label spaces for object categories and relation predicates. Ids are dense
// and follow file order.
struct Vocab {
  std::vector<std::string> categories;
  std::vector<std::string> predicates;

  std::optional<int> category_id(const std::string& name) const;
  std::optional<int> predicate_id(const std::string& name) const;

  bool operator==(const Vocab&) const = default;
};

// Stable content hash of the label spaces, stored in checkpoints so that a
// model is never applied against a reordered or edited vocabulary.
std::uint64_t vocab_fingerprint(const Vocab& vocab);

struct Triplet {
  int subject = 0;    // index into the scene's object list
  int predicate = 0;  // predicate id
  int object = 0;     // index into the scene's object list

  bool operator==(const Triplet&) const = default;
};

// Directed graph of one scene: nodes are category ids, edges are
// subject-predicate-object triplets over node indices.
struct SceneGraph {
  std::vector<int> object_categories;
  std::vector<Triplet> triplets;

  int object_count() const { return static_cast<int>(object_categories.size()); }
  int triplet_count() const { return static_cast<int>(triplets.size()); }

  bool operator==(const SceneGraph&) const = default;
};

// Normalized center-format box. y grows downward (image convention).
struct BoundingBox {
  double x = 0.0;  // center abscissa in [0, 1]
  double y = 0.0;  // center ordinate in [0, 1]
  double w = 0.0;  // width in (0, 1]
  double h = 0.0;  // height in (0, 1]

  bool operator==(const BoundingBox&) const = default;
};

// One annotated scene: graph plus one ground-truth box per object.
// `boxes` may be empty for prediction inputs that carry no annotation.
struct LayoutSample {
  std::string id;
  int image_width = 0;
  int image_height = 0;
  SceneGraph graph;
  std::vector<BoundingBox> boxes;

  bool operator==(const LayoutSample&) const = default;
};

// Returns every violated invariant; empty means the sample is valid.
std::vector<std::string> validate_sample(const LayoutSample& sample);

// Same check against a vocabulary (category/predicate ids in range).
std::vector<std::string> validate_sample(const LayoutSample& sample, const Vocab& vocab);

}  // namespace sglayout
