#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sglayout/tensor.hpp"

namespace sglayout::ad {

using NamedParams = std::vector<std::pair<std::string, Tensor>>;

// Standard Adam with bias correction. Moment buffers are keyed by parameter
// order, so the same parameter list must be passed on every step.
struct AdamState {
  std::int64_t step_count = 0;
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
};

AdamState make_adam_state(const NamedParams& params, double lr = 1e-4, double beta1 = 0.9,
                          double beta2 = 0.999, double epsilon = 1e-8);

// One update over all parameters; gradients must be populated (allocate-zero
// counts) and are cleared afterwards.
void adam_step(const NamedParams& params, AdamState& state);

}  // namespace sglayout::ad
