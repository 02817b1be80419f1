#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sglayout/tensor.hpp"

namespace sglayout::ad {

// Mutates the analytic gradient before the finite-difference comparison.
// Exists for negative controls: a corrupted gradient must make the check
// fail. Production callers leave it empty.
using AnalyticHook = std::function<void(std::vector<double>&)>;

// Compares the reverse-mode gradient of a scalar-valued function against
// central finite differences, component by component, and returns the largest
// relative error with denominator max(|analytic|, |numeric|, 1e-5). The floor
// acts as the absolute tolerance for near-zero gradients, sized above the
// rounding jitter of the difference quotient itself.
//
// `f` is re-run for every perturbation; it must be a pure function of the
// data in `at` (which may alias a model parameter — the perturbation is done
// in place and restored). The function must be differentiable at the point;
// kinks (|x| at 0, relu at 0, norms at 0) are the caller's responsibility.
double grad_check(const std::function<Tensor(const Tensor&)>& f, const Tensor& at,
                  double step = 1e-5, const AnalyticHook& hook = {});

struct CheckResult {
  std::string name;
  double max_rel_error = 0.0;
};

// One grad_check per core op, at seeded random points chosen away from the
// documented kinks. The hook (if any) is applied to every check.
std::vector<CheckResult> gradcheck_core_ops(std::uint64_t seed, const AnalyticHook& hook = {});

// End-to-end check of the weighted box + spatial-constraint objective on a
// random 3-object, 2-triplet graph, one entry per model parameter. Scenes
// whose finite differences straddle a relu or spatial kink are rejected and
// redrawn from consecutive sub-seeds (deterministically, keeping the best of
// up to eight attempts), so only genuine analytic/numeric mismatches are
// reported.
std::vector<CheckResult> gradcheck_pipeline(std::uint64_t seed, const AnalyticHook& hook = {});

}  // namespace sglayout::ad
