#include "sglayout/tensor.hpp"

#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace sglayout::ad {

namespace {

thread_local int nograd_depth = 0;

std::size_t checked_size(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int e : shape) {
    if (e < 0) throw std::invalid_argument("negative extent in shape " + shape_str(shape));
    n *= static_cast<std::size_t>(e);
  }
  return n;
}

using detail::Node;

Tensor make_leaf(std::vector<int> shape, std::vector<double> data, bool requires_grad) {
  if (checked_size(shape) != data.size()) {
    std::ostringstream os;
    os << "data length " << data.size() << " does not match shape " << shape_str(shape);
    throw std::invalid_argument(os.str());
  }
  auto n = std::make_shared<Node>();
  n->shape = std::move(shape);
  n->data = std::move(data);
  n->requires_grad = requires_grad;
  return Tensor(n);
}

Tensor make_op(std::vector<int> shape, std::vector<double> data,
               std::vector<std::shared_ptr<Node>> parents, std::function<void(Node&)> backward) {
  auto n = std::make_shared<Node>();
  n->shape = std::move(shape);
  n->data = std::move(data);
  if (grad_enabled()) {
    for (const auto& p : parents) {
      if (p->requires_grad) {
        n->requires_grad = true;
        break;
      }
    }
    if (n->requires_grad) {
      n->parents = std::move(parents);
      n->backward = std::move(backward);
    }
  }
  return Tensor(n);
}

void accumulate(Node& parent, std::size_t index, double g) {
  if (!parent.requires_grad) return;
  parent.ensure_grad();
  parent.grad[index] += g;
}

[[noreturn]] void shape_error(const char* op, const std::vector<int>& a,
                              const std::vector<int>& b) {
  std::ostringstream os;
  os << op << ": shape mismatch: " << shape_str(a) << " vs " << shape_str(b);
  throw std::invalid_argument(os.str());
}

enum class Broadcast { none, row };  // row: b is {d} or {1,d} against a {n,d}

Broadcast broadcast_mode(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() == b.shape()) return Broadcast::none;
  if (a.rank() == 2) {
    const int d = a.extent(1);
    if ((b.rank() == 1 && b.extent(0) == d) ||
        (b.rank() == 2 && b.extent(0) == 1 && b.extent(1) == d)) {
      return Broadcast::row;
    }
  }
  shape_error(op, a.shape(), b.shape());
}

template <typename Fwd, typename Bwd>
Tensor binary_broadcast(const char* op, const Tensor& a, const Tensor& b, Fwd fwd, Bwd bwd) {
  const Broadcast mode = broadcast_mode(op, a, b);
  const std::size_t n = a.data().size();
  const std::size_t d = mode == Broadcast::row ? b.data().size() : n;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = fwd(a.data()[i], b.data()[i % d]);
  return make_op(a.shape(), std::move(out), {a.node(), b.node()}, [mode, d, bwd](Node& o) {
    Node& pa = *o.parents[0];
    Node& pb = *o.parents[1];
    for (std::size_t i = 0; i < o.data.size(); ++i) {
      const std::size_t j = mode == Broadcast::row ? i % d : i;
      auto [ga, gb] = bwd(pa.data[i], pb.data[j], o.grad[i]);
      accumulate(pa, i, ga);
      accumulate(pb, j, gb);
    }
  });
}

}  // namespace

std::string shape_str(const std::vector<int>& shape) {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ",";
    os << shape[i];
  }
  os << "}";
  return os.str();
}

NoGradGuard::NoGradGuard() { ++nograd_depth; }
NoGradGuard::~NoGradGuard() { --nograd_depth; }
bool grad_enabled() { return nograd_depth == 0; }

Tensor Tensor::zeros(std::vector<int> shape, bool requires_grad) {
  std::vector<double> data(checked_size(shape), 0.0);
  return make_leaf(std::move(shape), std::move(data), requires_grad);
}

Tensor Tensor::full(std::vector<int> shape, double value, bool requires_grad) {
  std::vector<double> data(checked_size(shape), value);
  return make_leaf(std::move(shape), std::move(data), requires_grad);
}

Tensor Tensor::from_data(std::vector<int> shape, std::vector<double> data, bool requires_grad) {
  return make_leaf(std::move(shape), std::move(data), requires_grad);
}

Tensor Tensor::scalar(double value) { return make_leaf({1}, {value}, false); }

std::vector<double>& Tensor::grad() {
  if (!has_grad()) throw std::logic_error("tensor has no gradient buffer");
  return node_->grad;
}

const std::vector<double>& Tensor::grad() const {
  if (!has_grad()) throw std::logic_error("tensor has no gradient buffer");
  return node_->grad;
}

void Tensor::zero_grad() { node_->grad.assign(node_->data.size(), 0.0); }

double Tensor::value() const {
  if (node_->data.size() != 1) {
    throw std::invalid_argument("value() requires a scalar, got shape " + shape_str(node_->shape));
  }
  return node_->data[0];
}

void Tensor::backward() const {
  if (!node_) throw std::logic_error("backward on empty tensor");
  if (node_->data.size() != 1) {
    throw std::invalid_argument("backward requires a scalar output, got shape " +
                                shape_str(node_->shape));
  }
  if (!node_->requires_grad) return;  // constant: nothing to propagate into

  // Post-order DFS, then run backward functions in reverse topological order.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  struct Frame {
    Node* node;
    std::size_t next = 0;
  };
  std::vector<Frame> stack{{node_.get()}};
  visited.insert(node_.get());
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next < f.node->parents.size()) {
      Node* p = f.node->parents[f.next++].get();
      if (p->requires_grad && visited.insert(p).second) stack.push_back({p});
    } else {
      order.push_back(f.node);
      stack.pop_back();
    }
  }

  node_->ensure_grad();
  node_->grad[0] = 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backward && n->grad.size() == n->data.size()) n->backward(*n);
  }
}

Tensor add(const Tensor& a, const Tensor& b) {
  return binary_broadcast(
      "add", a, b, [](double x, double y) { return x + y; },
      [](double, double, double g) { return std::pair<double, double>{g, g}; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary_broadcast(
      "sub", a, b, [](double x, double y) { return x - y; },
      [](double, double, double g) { return std::pair<double, double>{g, -g}; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary_broadcast(
      "mul", a, b, [](double x, double y) { return x * y; },
      [](double x, double y, double g) { return std::pair<double, double>{g * y, g * x}; });
}

Tensor div(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) shape_error("div", a.shape(), b.shape());
  const std::size_t n = a.data().size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = a.data()[i] / b.data()[i];
  return make_op(a.shape(), std::move(out), {a.node(), b.node()}, [](Node& o) {
    Node& pa = *o.parents[0];
    Node& pb = *o.parents[1];
    for (std::size_t i = 0; i < o.data.size(); ++i) {
      const double y = pb.data[i];
      accumulate(pa, i, o.grad[i] / y);
      accumulate(pb, i, -o.grad[i] * pa.data[i] / (y * y));
    }
  });
}

Tensor add_scalar(const Tensor& a, double c) {
  std::vector<double> out(a.data());
  for (double& v : out) v += c;
  return make_op(a.shape(), std::move(out), {a.node()}, [](Node& o) {
    Node& p = *o.parents[0];
    for (std::size_t i = 0; i < o.data.size(); ++i) accumulate(p, i, o.grad[i]);
  });
}

Tensor mul_scalar(const Tensor& a, double c) {
  std::vector<double> out(a.data());
  for (double& v : out) v *= c;
  return make_op(a.shape(), std::move(out), {a.node()}, [c](Node& o) {
    Node& p = *o.parents[0];
    for (std::size_t i = 0; i < o.data.size(); ++i) accumulate(p, i, o.grad[i] * c);
  });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.extent(1) != b.extent(0)) {
    shape_error("matmul", a.shape(), b.shape());
  }
  const int p = a.extent(0), q = a.extent(1), r = b.extent(1);
  std::vector<double> out(static_cast<std::size_t>(p) * r, 0.0);
  const auto& da = a.data();
  const auto& db = b.data();
  for (int i = 0; i < p; ++i) {
    for (int k = 0; k < q; ++k) {
      const double aik = da[static_cast<std::size_t>(i) * q + k];
      const std::size_t brow = static_cast<std::size_t>(k) * r;
      const std::size_t orow = static_cast<std::size_t>(i) * r;
      for (int j = 0; j < r; ++j) out[orow + j] += aik * db[brow + j];
    }
  }
  return make_op({p, r}, std::move(out), {a.node(), b.node()}, [p, q, r](Node& o) {
    Node& pa = *o.parents[0];
    Node& pb = *o.parents[1];
    if (pa.requires_grad) {
      pa.ensure_grad();
      // dA = dC * B^T
      for (int i = 0; i < p; ++i) {
        for (int j = 0; j < r; ++j) {
          const double g = o.grad[static_cast<std::size_t>(i) * r + j];
          for (int k = 0; k < q; ++k) {
            pa.grad[static_cast<std::size_t>(i) * q + k] +=
                g * pb.data[static_cast<std::size_t>(k) * r + j];
          }
        }
      }
    }
    if (pb.requires_grad) {
      pb.ensure_grad();
      // dB = A^T * dC
      for (int i = 0; i < p; ++i) {
        for (int k = 0; k < q; ++k) {
          const double aik = pa.data[static_cast<std::size_t>(i) * q + k];
          for (int j = 0; j < r; ++j) {
            pb.grad[static_cast<std::size_t>(k) * r + j] +=
                aik * o.grad[static_cast<std::size_t>(i) * r + j];
          }
        }
      }
    }
  });
}

Tensor concat(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat: no operands");
  const int rank = parts.front().rank();
  if (rank != 1 && rank != 2) {
    throw std::invalid_argument("concat: rank must be 1 or 2, got shape " +
                                shape_str(parts.front().shape()));
  }
  const int rows = rank == 2 ? parts.front().extent(0) : 1;
  int total_cols = 0;
  std::vector<int> widths;
  for (const Tensor& t : parts) {
    if (t.rank() != rank || (rank == 2 && t.extent(0) != rows)) {
      shape_error("concat", parts.front().shape(), t.shape());
    }
    widths.push_back(rank == 2 ? t.extent(1) : t.extent(0));
    total_cols += widths.back();
  }
  std::vector<double> out(static_cast<std::size_t>(rows) * total_cols);
  std::vector<std::shared_ptr<Node>> parents;
  int offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto& src = parts[k].data();
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < widths[k]; ++j) {
        out[static_cast<std::size_t>(i) * total_cols + offset + j] =
            src[static_cast<std::size_t>(i) * widths[k] + j];
      }
    }
    offset += widths[k];
    parents.push_back(parts[k].node());
  }
  std::vector<int> shape = rank == 2 ? std::vector<int>{rows, total_cols}
                                     : std::vector<int>{total_cols};
  return make_op(std::move(shape), std::move(out), std::move(parents),
                 [rows, total_cols, widths](Node& o) {
                   int off = 0;
                   for (std::size_t k = 0; k < o.parents.size(); ++k) {
                     Node& p = *o.parents[k];
                     if (p.requires_grad) {
                       p.ensure_grad();
                       for (int i = 0; i < rows; ++i) {
                         for (int j = 0; j < widths[k]; ++j) {
                           p.grad[static_cast<std::size_t>(i) * widths[k] + j] +=
                               o.grad[static_cast<std::size_t>(i) * total_cols + off + j];
                         }
                       }
                     }
                     off += widths[k];
                   }
                 });
}

Tensor vstack(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.extent(1) != b.extent(1)) {
    shape_error("vstack", a.shape(), b.shape());
  }
  const int pa_rows = a.extent(0), d = a.extent(1);
  std::vector<double> out(a.data());
  out.insert(out.end(), b.data().begin(), b.data().end());
  return make_op({pa_rows + b.extent(0), d}, std::move(out), {a.node(), b.node()},
                 [split = static_cast<std::size_t>(pa_rows) * d](Node& o) {
                   Node& pa = *o.parents[0];
                   Node& pb = *o.parents[1];
                   for (std::size_t i = 0; i < split; ++i) accumulate(pa, i, o.grad[i]);
                   for (std::size_t i = split; i < o.data.size(); ++i) {
                     accumulate(pb, i - split, o.grad[i]);
                   }
                 });
}

Tensor slice_cols(const Tensor& a, int from, int to) {
  if (a.rank() != 2 || from < 0 || to > a.extent(1) || from >= to) {
    std::ostringstream os;
    os << "slice_cols: invalid range [" << from << "," << to << ") for shape "
       << shape_str(a.shape());
    throw std::invalid_argument(os.str());
  }
  const int n = a.extent(0), d = a.extent(1), w = to - from;
  std::vector<double> out(static_cast<std::size_t>(n) * w);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < w; ++j) {
      out[static_cast<std::size_t>(i) * w + j] = a.data()[static_cast<std::size_t>(i) * d + from + j];
    }
  }
  return make_op({n, w}, std::move(out), {a.node()}, [n, d, w, from](Node& o) {
    Node& p = *o.parents[0];
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < w; ++j) {
        accumulate(p, static_cast<std::size_t>(i) * d + from + j,
                   o.grad[static_cast<std::size_t>(i) * w + j]);
      }
    }
  });
}

Tensor column(const Tensor& a, int col) {
  if (a.rank() != 2 || col < 0 || col >= a.extent(1)) {
    std::ostringstream os;
    os << "column: index " << col << " out of range for shape " << shape_str(a.shape());
    throw std::invalid_argument(os.str());
  }
  const int n = a.extent(0), d = a.extent(1);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a.data()[static_cast<std::size_t>(i) * d + col];
  return make_op({n}, std::move(out), {a.node()}, [n, d, col](Node& o) {
    Node& p = *o.parents[0];
    for (int i = 0; i < n; ++i) {
      accumulate(p, static_cast<std::size_t>(i) * d + col, o.grad[static_cast<std::size_t>(i)]);
    }
  });
}

Tensor reshape(const Tensor& a, std::vector<int> shape) {
  if (checked_size(shape) != a.data().size()) shape_error("reshape", a.shape(), shape);
  std::vector<double> out(a.data());
  return make_op(std::move(shape), std::move(out), {a.node()}, [](Node& o) {
    Node& p = *o.parents[0];
    for (std::size_t i = 0; i < o.data.size(); ++i) accumulate(p, i, o.grad[i]);
  });
}

Tensor gather_rows(const Tensor& a, const std::vector<int>& rows) {
  if (a.rank() != 2) {
    throw std::invalid_argument("gather_rows: need a 2-D tensor, got " + shape_str(a.shape()));
  }
  const int n = a.extent(0), d = a.extent(1);
  std::vector<double> out(rows.size() * static_cast<std::size_t>(d));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] < 0 || rows[r] >= n) {
      std::ostringstream os;
      os << "gather_rows: row " << rows[r] << " out of range for shape " << shape_str(a.shape());
      throw std::invalid_argument(os.str());
    }
    for (int j = 0; j < d; ++j) {
      out[r * d + j] = a.data()[static_cast<std::size_t>(rows[r]) * d + j];
    }
  }
  return make_op({static_cast<int>(rows.size()), d}, std::move(out), {a.node()},
                 [rows, d](Node& o) {
                   Node& p = *o.parents[0];
                   for (std::size_t r = 0; r < rows.size(); ++r) {
                     for (int j = 0; j < d; ++j) {
                       accumulate(p, static_cast<std::size_t>(rows[r]) * d + j,
                                  o.grad[r * d + j]);
                     }
                   }
                 });
}

Tensor scatter_mean(const Tensor& src, const std::vector<int>& targets, const Tensor& base) {
  if (src.rank() != 2 || base.rank() != 2 || src.extent(1) != base.extent(1)) {
    shape_error("scatter_mean", src.shape(), base.shape());
  }
  if (static_cast<int>(targets.size()) != src.extent(0)) {
    std::ostringstream os;
    os << "scatter_mean: " << targets.size() << " targets for " << src.extent(0) << " rows";
    throw std::invalid_argument(os.str());
  }
  const int n = base.extent(0), d = base.extent(1);
  std::vector<int> counts(static_cast<std::size_t>(n), 0);
  for (int t : targets) {
    if (t < 0 || t >= n) {
      std::ostringstream os;
      os << "scatter_mean: target " << t << " out of range for base " << shape_str(base.shape());
      throw std::invalid_argument(os.str());
    }
    ++counts[static_cast<std::size_t>(t)];
  }
  std::vector<double> out(base.data());
  for (int t = 0; t < n; ++t) {
    if (counts[static_cast<std::size_t>(t)] > 0) {
      for (int j = 0; j < d; ++j) out[static_cast<std::size_t>(t) * d + j] = 0.0;
    }
  }
  // Ascending source-row order fixes the floating-point summation order.
  for (std::size_t r = 0; r < targets.size(); ++r) {
    for (int j = 0; j < d; ++j) {
      out[static_cast<std::size_t>(targets[r]) * d + j] += src.data()[r * d + j];
    }
  }
  for (int t = 0; t < n; ++t) {
    const int c = counts[static_cast<std::size_t>(t)];
    if (c > 0) {
      for (int j = 0; j < d; ++j) out[static_cast<std::size_t>(t) * d + j] /= c;
    }
  }
  return make_op({n, d}, std::move(out), {src.node(), base.node()},
                 [targets, counts, d](Node& o) {
                   Node& psrc = *o.parents[0];
                   Node& pbase = *o.parents[1];
                   for (std::size_t r = 0; r < targets.size(); ++r) {
                     const int c = counts[static_cast<std::size_t>(targets[r])];
                     for (int j = 0; j < d; ++j) {
                       accumulate(psrc, r * d + j,
                                  o.grad[static_cast<std::size_t>(targets[r]) * d + j] / c);
                     }
                   }
                   for (std::size_t t = 0; t < counts.size(); ++t) {
                     if (counts[t] == 0) {
                       for (int j = 0; j < d; ++j) {
                         accumulate(pbase, t * static_cast<std::size_t>(d) + j,
                                    o.grad[t * static_cast<std::size_t>(d) + j]);
                       }
                     }
                   }
                 });
}

Tensor sum(const Tensor& a) {
  double s = 0.0;
  for (double v : a.data()) s += v;
  return make_op({1}, {s}, {a.node()}, [](Node& o) {
    Node& p = *o.parents[0];
    for (std::size_t i = 0; i < p.data.size(); ++i) accumulate(p, i, o.grad[0]);
  });
}

Tensor mean(const Tensor& a, int axis) {
  if (a.rank() == 1) {
    if (axis != 0) throw std::invalid_argument("mean: axis must be 0 for 1-D input");
    const std::size_t n = a.data().size();
    if (n == 0) throw std::invalid_argument("mean: empty tensor");
    double s = 0.0;
    for (double v : a.data()) s += v;
    return make_op({1}, {s / static_cast<double>(n)}, {a.node()}, [n](Node& o) {
      Node& p = *o.parents[0];
      const double g = o.grad[0] / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) accumulate(p, i, g);
    });
  }
  if (a.rank() != 2 || (axis != 0 && axis != 1)) {
    throw std::invalid_argument("mean: unsupported axis for shape " + shape_str(a.shape()));
  }
  const int n = a.extent(0), d = a.extent(1);
  if (n == 0 || d == 0) throw std::invalid_argument("mean: empty tensor");
  if (axis == 0) {
    std::vector<double> out(static_cast<std::size_t>(d), 0.0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) out[static_cast<std::size_t>(j)] += a.data()[static_cast<std::size_t>(i) * d + j];
    }
    for (double& v : out) v /= n;
    return make_op({d}, std::move(out), {a.node()}, [n, d](Node& o) {
      Node& p = *o.parents[0];
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) {
          accumulate(p, static_cast<std::size_t>(i) * d + j, o.grad[static_cast<std::size_t>(j)] / n);
        }
      }
    });
  }
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) out[static_cast<std::size_t>(i)] += a.data()[static_cast<std::size_t>(i) * d + j];
  }
  for (double& v : out) v /= d;
  return make_op({n}, std::move(out), {a.node()}, [n, d](Node& o) {
    Node& p = *o.parents[0];
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) {
        accumulate(p, static_cast<std::size_t>(i) * d + j, o.grad[static_cast<std::size_t>(i)] / d);
      }
    }
  });
}

namespace {

template <typename Fwd, typename Bwd>
Tensor unary(const Tensor& a, Fwd fwd, Bwd bwd) {
  std::vector<double> out(a.data().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd(a.data()[i]);
  return make_op(a.shape(), std::move(out), {a.node()}, [bwd](Node& o) {
    Node& p = *o.parents[0];
    for (std::size_t i = 0; i < o.data.size(); ++i) {
      accumulate(p, i, bwd(p.data[i], o.data[i]) * o.grad[i]);
    }
  });
}

}  // namespace

Tensor relu(const Tensor& a) {
  return unary(
      a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor sigmoid(const Tensor& a) {
  return unary(
      a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor sqrt(const Tensor& a) {
  for (double v : a.data()) {
    if (v < 0.0) throw std::domain_error("sqrt: negative input");
  }
  return unary(
      a, [](double x) { return std::sqrt(x); },
      [](double, double y) { return 0.5 / y; });
}

Tensor abs(const Tensor& a) {
  return unary(
      a, [](double x) { return std::fabs(x); },
      [](double x, double) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}

Tensor l2_norm(const Tensor& a, int axis) {
  if (a.rank() == 1) {
    if (axis != 0) throw std::invalid_argument("l2_norm: axis must be 0 for 1-D input");
    double s = 0.0;
    for (double v : a.data()) s += v * v;
    const double norm = std::sqrt(s);
    return make_op({1}, {norm}, {a.node()}, [](Node& o) {
      Node& p = *o.parents[0];
      const double norm = o.data[0];
      if (norm == 0.0) return;  // subgradient 0 at the kink
      for (std::size_t i = 0; i < p.data.size(); ++i) {
        accumulate(p, i, o.grad[0] * p.data[i] / norm);
      }
    });
  }
  if (a.rank() != 2 || axis != 1) {
    throw std::invalid_argument("l2_norm: unsupported axis for shape " + shape_str(a.shape()));
  }
  const int n = a.extent(0), d = a.extent(1);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) {
      const double v = a.data()[static_cast<std::size_t>(i) * d + j];
      s += v * v;
    }
    out[static_cast<std::size_t>(i)] = std::sqrt(s);
  }
  return make_op({n}, std::move(out), {a.node()}, [n, d](Node& o) {
    Node& p = *o.parents[0];
    for (int i = 0; i < n; ++i) {
      const double norm = o.data[static_cast<std::size_t>(i)];
      if (norm == 0.0) continue;
      for (int j = 0; j < d; ++j) {
        accumulate(p, static_cast<std::size_t>(i) * d + j,
                   o.grad[static_cast<std::size_t>(i)] * p.data[static_cast<std::size_t>(i) * d + j] / norm);
      }
    }
  });
}

}  // namespace sglayout::ad
