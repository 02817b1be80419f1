#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace sglayout::ad {

namespace detail {

struct Node {
  std::vector<int> shape;
  std::vector<double> data;
  std::vector<double> grad;  // allocated on demand, same length as data
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this node's grad and accumulates into the parents' grads.
  std::function<void(Node&)> backward;

  void ensure_grad() {
    if (grad.size() != data.size()) grad.assign(data.size(), 0.0);
  }
};

}  // namespace detail

// Dense row-major tensor of doubles participating in a define-by-run
// reverse-mode graph. Copying a Tensor copies the handle, not the buffer.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(std::vector<int> shape, bool requires_grad = false);
  static Tensor full(std::vector<int> shape, double value, bool requires_grad = false);
  static Tensor from_data(std::vector<int> shape, std::vector<double> data,
                          bool requires_grad = false);
  static Tensor scalar(double value);

  bool defined() const { return node_ != nullptr; }
  const std::vector<int>& shape() const { return node_->shape; }
  int rank() const { return static_cast<int>(node_->shape.size()); }
  int size() const { return static_cast<int>(node_->data.size()); }
  int extent(int axis) const { return node_->shape.at(static_cast<std::size_t>(axis)); }

  std::vector<double>& data() { return node_->data; }
  const std::vector<double>& data() const { return node_->data; }

  bool requires_grad() const { return node_->requires_grad; }
  bool has_grad() const { return node_->grad.size() == node_->data.size(); }
  std::vector<double>& grad();
  const std::vector<double>& grad() const;
  void zero_grad();  // allocates if needed

  // Scalar access; throws unless size() == 1.
  double value() const;

  // Reverse pass from a scalar. Seeds d(this)/d(this) = 1 and accumulates
  // gradients into every requires_grad ancestor.
  void backward() const;

  std::shared_ptr<detail::Node> node() const { return node_; }
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}

 private:
  std::shared_ptr<detail::Node> node_;
};

// While alive, ops do not record the graph (forward values only). Used for
// evaluation and prediction paths where gradients are never needed.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;
};

bool grad_enabled();

std::string shape_str(const std::vector<int>& shape);

// Elementwise; `b` may also be a row vector {d} or {1, d} broadcast over the
// rows of a {n, d} tensor `a`.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);  // same shapes only

Tensor add_scalar(const Tensor& a, double c);
Tensor mul_scalar(const Tensor& a, double c);

Tensor matmul(const Tensor& a, const Tensor& b);  // {p,q} x {q,r} -> {p,r}

// Concatenation along the last axis; 1-D or 2-D, two or more operands.
Tensor concat(const std::vector<Tensor>& parts);
Tensor vstack(const Tensor& a, const Tensor& b);         // {p,d},{q,d} -> {p+q,d}
Tensor slice_cols(const Tensor& a, int from, int to);    // 2-D column range
Tensor column(const Tensor& a, int col);                 // {n,d} -> {n}
Tensor reshape(const Tensor& a, std::vector<int> shape);

// Row gather with duplicates allowed; backward scatter-adds.
Tensor gather_rows(const Tensor& a, const std::vector<int>& rows);

// out[t] = mean of src rows r with targets[r] == t, accumulated in ascending
// row order; targets with no incoming rows keep base[t]. src {p,d}, base {n,d}.
Tensor scatter_mean(const Tensor& src, const std::vector<int>& targets, const Tensor& base);

Tensor sum(const Tensor& a);             // all elements -> scalar
Tensor mean(const Tensor& a, int axis);  // 1-D axis 0 -> scalar; 2-D axis 0 or 1

Tensor relu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor sqrt(const Tensor& a);  // requires non-negative input
Tensor abs(const Tensor& a);   // subgradient 0 at 0

// 1-D axis 0 -> scalar; 2-D axis 1 -> row norms {n}. Gradient defined as 0
// where the norm is 0.
Tensor l2_norm(const Tensor& a, int axis);

}  // namespace sglayout::ad
