#include "sglayout/optim.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sglayout::ad {

AdamState make_adam_state(const NamedParams& params, double lr, double beta1, double beta2,
                          double epsilon) {
  if (lr <= 0.0) throw std::invalid_argument("adam: lr must be positive");
  if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) {
    throw std::invalid_argument("adam: betas must lie in [0, 1)");
  }
  AdamState s;
  s.lr = lr;
  s.beta1 = beta1;
  s.beta2 = beta2;
  s.epsilon = epsilon;
  for (const auto& [name, t] : params) {
    (void)name;
    s.first_moment.emplace_back(t.data().size(), 0.0);
    s.second_moment.emplace_back(t.data().size(), 0.0);
  }
  return s;
}

void adam_step(const NamedParams& params, AdamState& state) {
  if (params.size() != state.first_moment.size()) {
    std::ostringstream os;
    os << "adam_step: state tracks " << state.first_moment.size() << " parameters, got "
       << params.size();
    throw std::invalid_argument(os.str());
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    const auto& [name, t] = params[k];
    if (!t.has_grad()) {
      throw std::runtime_error("adam_step: parameter \"" + name + "\" has no gradient");
    }
    if (state.first_moment[k].size() != t.data().size()) {
      throw std::invalid_argument("adam_step: parameter \"" + name + "\" changed size");
    }
  }

  state.step_count += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor t = params[k].second;
    auto& m = state.first_moment[k];
    auto& v = state.second_moment[k];
    auto& data = t.data();
    auto& grad = t.grad();
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double g = grad[i];
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g;
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g * g;
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      data[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
    t.zero_grad();
  }
}

}  // namespace sglayout::ad
