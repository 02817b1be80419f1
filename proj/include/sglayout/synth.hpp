#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sglayout/types.hpp"

namespace sglayout::stats {

// Generative parameters for one predicate: relative scale is log-normal,
// the distance components are normal (dx is a magnitude; negative draws are
// rejected, so keep mu_dx comfortably above sigma_dx).
struct PredicateParams {
  std::string name;
  double mu_log_s = 0.0;
  double sigma_log_s = 0.0;
  double mu_dx = 0.0;
  double sigma_dx = 0.0;
  double mu_dy = 0.0;
  double sigma_dy = 0.0;
};

struct SynthSpec {
  std::vector<std::string> categories;
  std::vector<PredicateParams> predicates;
  int scenes = 1;
  int min_objects = 2;
  int max_objects = 2;
  std::uint64_t seed = 0;

  void validate() const;
  Vocab vocab() const;
};

SynthSpec parse_synth_spec_text(const std::string& text, const std::string& origin);
SynthSpec parse_synth_spec(const std::string& path);
std::string synth_spec_to_json(const SynthSpec& spec);

// Deterministic corpus with known generating distributions. Objects are laid
// out in consecutive pairs (an odd object count leaves the last object
// relation-isolated); predicates rotate round-robin over a corpus-wide pair
// counter, so pair counts per predicate are exact. Each pair's object box is
// solved from the sampled geometry, so measuring relative scale/distance on
// the emitted boxes recovers the sampled values up to rounding. The subject
// is placed uniformly over the region keeping both centers in bounds, which
// keeps acceptance free of geometry bias. Throws when a pair cannot be
// placed within 100 attempts.
std::vector<LayoutSample> synth_corpus(const SynthSpec& spec);

}  // namespace sglayout::stats
