#include "sglayout/synth.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>

#include "sglayout/parsing.hpp"
#include "sglayout/rng.hpp"
#include "sglayout/spatial.hpp"

namespace sglayout::stats {

using nlohmann::json;

namespace {

// Subject extents are drawn from this range; wide enough to vary, narrow
// enough that solved object boxes almost always fit.
constexpr double kMinExtent = 0.1;
constexpr double kMaxExtent = 0.4;
constexpr int kImageSize = 512;
constexpr int kMaxTries = 100;

}  // namespace

void SynthSpec::validate() const {
  if (categories.empty()) throw std::invalid_argument("synth spec: no categories");
  if (predicates.empty()) throw std::invalid_argument("synth spec: no predicates");
  if (scenes < 1) throw std::invalid_argument("synth spec: scenes must be >= 1");
  if (min_objects < 1 || min_objects > max_objects) {
    throw std::invalid_argument("synth spec: bad objects-per-scene range");
  }
  std::set<std::string> seen;
  for (const PredicateParams& p : predicates) {
    if (p.name.empty()) throw std::invalid_argument("synth spec: empty predicate name");
    if (!seen.insert(p.name).second) {
      throw std::invalid_argument("synth spec: duplicate predicate \"" + p.name + "\"");
    }
    if (p.sigma_log_s < 0 || p.sigma_dx < 0 || p.sigma_dy < 0) {
      throw std::invalid_argument("synth spec: negative sigma for \"" + p.name + "\"");
    }
  }
  std::set<std::string> cats(categories.begin(), categories.end());
  if (cats.size() != categories.size()) {
    throw std::invalid_argument("synth spec: duplicate category name");
  }
}

Vocab SynthSpec::vocab() const {
  Vocab v;
  v.categories = categories;
  for (const PredicateParams& p : predicates) v.predicates.push_back(p.name);
  return v;
}

SynthSpec parse_synth_spec_text(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ": " + e.what());
  }
  try {
    SynthSpec spec;
    spec.categories = doc.at("categories").get<std::vector<std::string>>();
    for (const json& jp : doc.at("predicates")) {
      PredicateParams p;
      p.name = jp.at("name").get<std::string>();
      p.mu_log_s = jp.at("mu_log_s").get<double>();
      p.sigma_log_s = jp.at("sigma_log_s").get<double>();
      p.mu_dx = jp.at("mu_dx").get<double>();
      p.sigma_dx = jp.at("sigma_dx").get<double>();
      p.mu_dy = jp.at("mu_dy").get<double>();
      p.sigma_dy = jp.at("sigma_dy").get<double>();
      spec.predicates.push_back(std::move(p));
    }
    spec.scenes = doc.at("scenes").get<int>();
    const auto range = doc.at("objects_per_scene").get<std::vector<int>>();
    if (range.size() != 2) throw ParseError(origin + ": objects_per_scene must be [min, max]");
    spec.min_objects = range[0];
    spec.max_objects = range[1];
    spec.seed = doc.at("seed").get<std::uint64_t>();
    spec.validate();
    return spec;
  } catch (const json::exception& e) {
    throw ParseError(origin + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(origin + ": " + e.what());
  }
}

SynthSpec parse_synth_spec(const std::string& path) {
  return parse_synth_spec_text(read_file(path), path);
}

std::string synth_spec_to_json(const SynthSpec& spec) {
  json preds = json::array();
  for (const PredicateParams& p : spec.predicates) {
    preds.push_back({{"name", p.name},
                     {"mu_log_s", p.mu_log_s},
                     {"sigma_log_s", p.sigma_log_s},
                     {"mu_dx", p.mu_dx},
                     {"sigma_dx", p.sigma_dx},
                     {"mu_dy", p.mu_dy},
                     {"sigma_dy", p.sigma_dy}});
  }
  json doc = {{"categories", spec.categories},
              {"predicates", std::move(preds)},
              {"scenes", spec.scenes},
              {"objects_per_scene", {spec.min_objects, spec.max_objects}},
              {"seed", spec.seed}};
  return doc.dump(2) + "\n";
}

namespace {

struct PlacedPair {
  BoundingBox subject;
  BoundingBox object;
};

bool try_place_pair(Rng& rng, const PredicateParams& params, PlacedPair& out) {
  const double wj = rng.uniform(kMinExtent, kMaxExtent);
  const double hj = rng.uniform(kMinExtent, kMaxExtent);
  const double s = std::exp(rng.normal(params.mu_log_s, params.sigma_log_s));
  const double dxm = rng.normal(params.mu_dx, params.sigma_dx);
  const double dy = rng.normal(params.mu_dy, params.sigma_dy);
  const double sign = rng.coin() ? 1.0 : -1.0;
  if (dxm < 0.0) return false;

  const double wk = wj / s;
  const double hk = hj / s;
  if (!(wk > 0.0) || wk > 1.0 || !(hk > 0.0) || hk > 1.0) return false;

  // Mirror the measurement arithmetic so measuring the emitted pair gives the
  // sampled geometry back.
  const double denom = spatial::diag({0, 0, wj, hj}) + spatial::diag({0, 0, wk, hk});
  const double ox = sign * dxm * denom;  // x_j - x_k
  const double oy = dy * denom;          // y_j - y_k

  const double x_lo = std::max(0.0, ox), x_hi = std::min(1.0, 1.0 + ox);
  const double y_lo = std::max(0.0, oy), y_hi = std::min(1.0, 1.0 + oy);
  if (x_lo > x_hi || y_lo > y_hi) return false;

  const double xj = rng.uniform(x_lo, x_hi);
  const double yj = rng.uniform(y_lo, y_hi);
  const double xk = xj - ox;
  const double yk = yj - oy;
  if (xk < 0.0 || xk > 1.0 || yk < 0.0 || yk > 1.0) return false;

  out.subject = {xj, yj, wj, hj};
  out.object = {xk, yk, wk, hk};
  return true;
}

BoundingBox place_isolated(Rng& rng) {
  return {rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0), rng.uniform(kMinExtent, kMaxExtent),
          rng.uniform(kMinExtent, kMaxExtent)};
}

}  // namespace

std::vector<LayoutSample> synth_corpus(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const int num_predicates = static_cast<int>(spec.predicates.size());
  const int num_categories = static_cast<int>(spec.categories.size());

  std::vector<LayoutSample> corpus;
  corpus.reserve(static_cast<std::size_t>(spec.scenes));
  long long pair_counter = 0;
  for (int scene = 0; scene < spec.scenes; ++scene) {
    LayoutSample sample;
    std::ostringstream id;
    id << "synth-" << std::setw(6) << std::setfill('0') << scene;
    sample.id = id.str();
    sample.image_width = kImageSize;
    sample.image_height = kImageSize;

    const int n = rng.uniform_int(spec.min_objects, spec.max_objects);
    for (int i = 0; i < n; ++i) {
      sample.graph.object_categories.push_back(rng.uniform_int(0, num_categories - 1));
    }
    sample.boxes.resize(static_cast<std::size_t>(n));

    for (int p = 0; 2 * p + 1 < n; ++p) {
      const int predicate = static_cast<int>(pair_counter++ % num_predicates);
      const PredicateParams& params = spec.predicates[static_cast<std::size_t>(predicate)];
      PlacedPair placed;
      bool ok = false;
      for (int attempt = 0; attempt < kMaxTries && !ok; ++attempt) {
        ok = try_place_pair(rng, params, placed);
      }
      if (!ok) {
        throw std::runtime_error("synth: could not place a \"" + params.name +
                                 "\" pair after 100 attempts; spec looks unsatisfiable");
      }
      sample.boxes[static_cast<std::size_t>(2 * p)] = placed.subject;
      sample.boxes[static_cast<std::size_t>(2 * p + 1)] = placed.object;
      sample.graph.triplets.push_back({2 * p, predicate, 2 * p + 1});
    }
    if (n % 2 == 1) sample.boxes[static_cast<std::size_t>(n - 1)] = place_isolated(rng);

    const auto violations = validate_sample(sample);
    if (!violations.empty()) {
      throw std::runtime_error("synth: generated an invalid sample (" + violations.front() + ")");
    }
    corpus.push_back(std::move(sample));
  }
  return corpus;
}

}  // namespace sglayout::stats
