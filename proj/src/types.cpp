#include "sglayout/types.hpp"

#include <set>
#include <sstream>

#include "sglayout/util.hpp"

namespace sglayout {

namespace {

std::optional<int> lookup(const std::vector<std::string>& names, const std::string& name) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  return std::nullopt;
}

}  // namespace

std::optional<int> Vocab::category_id(const std::string& name) const {
  return lookup(categories, name);
}

std::optional<int> Vocab::predicate_id(const std::string& name) const {
  return lookup(predicates, name);
}

std::uint64_t vocab_fingerprint(const Vocab& vocab) {
  std::uint64_t h = fnv1a64("categories");
  for (const auto& c : vocab.categories) {
    h = fnv1a64(c, h);
    h = fnv1a64(std::string_view("\0", 1), h);
  }
  h = fnv1a64("predicates", h);
  for (const auto& p : vocab.predicates) {
    h = fnv1a64(p, h);
    h = fnv1a64(std::string_view("\0", 1), h);
  }
  return h;
}

std::vector<std::string> validate_sample(const LayoutSample& sample) {
  std::vector<std::string> violations;
  auto fail = [&](const std::string& msg) { violations.push_back(msg); };

  const int n = sample.graph.object_count();
  if (sample.image_width <= 0 || sample.image_height <= 0) {
    fail("image dimensions must be positive");
  }
  if (static_cast<int>(sample.boxes.size()) != n) {
    std::ostringstream os;
    os << "expected " << n << " boxes, got " << sample.boxes.size();
    fail(os.str());
  }
  for (std::size_t i = 0; i < sample.boxes.size(); ++i) {
    const BoundingBox& b = sample.boxes[i];
    std::ostringstream os;
    os << "box " << i << ": ";
    if (!(b.x >= 0.0 && b.x <= 1.0)) fail(os.str() + "x out of [0,1]");
    if (!(b.y >= 0.0 && b.y <= 1.0)) fail(os.str() + "y out of [0,1]");
    if (!(b.w > 0.0 && b.w <= 1.0)) fail(os.str() + "w out of (0,1]");
    if (!(b.h > 0.0 && b.h <= 1.0)) fail(os.str() + "h out of (0,1]");
  }

  std::set<std::tuple<int, int, int>> seen;
  for (std::size_t t = 0; t < sample.graph.triplets.size(); ++t) {
    const Triplet& tr = sample.graph.triplets[t];
    std::ostringstream os;
    os << "triplet " << t << ": ";
    if (tr.subject < 0 || tr.subject >= n) fail(os.str() + "subject index out of range");
    if (tr.object < 0 || tr.object >= n) fail(os.str() + "object index out of range");
    if (tr.subject == tr.object) fail(os.str() + "subject and object are the same node");
    if (!seen.insert({tr.subject, tr.predicate, tr.object}).second) {
      fail(os.str() + "duplicate (subject, predicate, object) triple");
    }
  }
  return violations;
}

std::vector<std::string> validate_sample(const LayoutSample& sample, const Vocab& vocab) {
  std::vector<std::string> violations = validate_sample(sample);
  const int n_cat = static_cast<int>(vocab.categories.size());
  const int n_pred = static_cast<int>(vocab.predicates.size());
  for (std::size_t i = 0; i < sample.graph.object_categories.size(); ++i) {
    const int c = sample.graph.object_categories[i];
    if (c < 0 || c >= n_cat) {
      std::ostringstream os;
      os << "object " << i << ": category id " << c << " out of range";
      violations.push_back(os.str());
    }
  }
  for (std::size_t t = 0; t < sample.graph.triplets.size(); ++t) {
    const int p = sample.graph.triplets[t].predicate;
    if (p < 0 || p >= n_pred) {
      std::ostringstream os;
      os << "triplet " << t << ": predicate id " << p << " out of range";
      violations.push_back(os.str());
    }
  }
  return violations;
}

}  // namespace sglayout
