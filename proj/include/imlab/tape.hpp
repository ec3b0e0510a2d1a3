#ifndef IMLAB_TAPE_HPP
#define IMLAB_TAPE_HPP

#include "imlab/params.hpp"
#include "imlab/tensor.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace imlab {

// Reverse-mode tape.  Every op records its output value and a closure that
// scatters the output gradient back to its inputs; backward() walks nodes in
// reverse creation order (creation order is already topological).  Parameter
// leaves accumulate their gradient into the bound ParamStore, so repeated
// backward calls accumulate until ParamStore::zero_grads().
template <typename Scalar>
class Tape {
 public:
  using Ref = int;

  struct Node {
    Tensor<Scalar> value;
    Tensor<Scalar> grad;  // lazily sized on first contribution
    bool needs_grad = false;
    std::function<void(Tape&)> back;
  };

  Ref constant(Tensor<Scalar> v) { return push(std::move(v), false); }

  Ref param(ParamStore<Scalar>& store, const std::string& name) {
    auto& entry = store.entry(name);
    Tensor<Scalar>* sink = &entry.grad;
    Ref r = push(entry.value, true);
    set_back(r, [r, sink](Tape& t) { sink->array() += t.grad_of(r).array(); });
    return r;
  }

  const Tensor<Scalar>& val(Ref r) const { return nodes_[static_cast<std::size_t>(r)].value; }
  bool needs_grad(Ref r) const { return nodes_[static_cast<std::size_t>(r)].needs_grad; }

  // Gradient buffer of a node, allocated on demand.
  Tensor<Scalar>& grad_of(Ref r) {
    Node& n = nodes_[static_cast<std::size_t>(r)];
    if (n.grad.size() == 0 && n.value.size() > 0) n.grad = Tensor<Scalar>(n.value.shape());
    return n.grad;
  }

  void backward(Ref loss) {
    if (val(loss).size() != 1) throw std::invalid_argument("backward: loss must be scalar");
    grad_of(loss)[0] = Scalar(1);
    for (int i = loss; i >= 0; --i) {
      Node& n = nodes_[static_cast<std::size_t>(i)];
      if (!n.needs_grad || !n.back) continue;
      if (n.grad.size() == 0) continue;  // never contributed to the loss
      n.back(*this);
    }
  }

  Ref push(Tensor<Scalar> v, bool needs) {
    Node n;
    n.value = std::move(v);
    n.needs_grad = needs;
    nodes_.push_back(std::move(n));
    return static_cast<Ref>(nodes_.size()) - 1;
  }

  void set_back(Ref r, std::function<void(Tape&)> fn) {
    nodes_[static_cast<std::size_t>(r)].back = std::move(fn);
  }

  std::size_t size() const { return nodes_.size(); }

 private:
  std::vector<Node> nodes_;
};

namespace detail {

template <typename Scalar>
inline void expect_2d(const Tensor<Scalar>& t, const char* who) {
  if (t.ndim() != 2) throw std::invalid_argument(std::string(who) + ": expected 2-d tensor");
}

}  // namespace detail

// Expression-building free functions over a tape.

// y = a (m x k) * b (k x n)
template <typename S>
int matmul(Tape<S>& t, int a, int b) {
  const auto& A = t.val(a);
  const auto& B = t.val(b);
  detail::expect_2d(A, "matmul");
  detail::expect_2d(B, "matmul");
  if (A.dim(1) != B.dim(0))
    throw std::invalid_argument("matmul: inner dims " + std::to_string(A.dim(1)) + " vs " +
                                std::to_string(B.dim(0)));
  Tensor<S> y({A.dim(0), B.dim(1)});
  y.mat2().noalias() = A.mat2() * B.mat2();
  const bool na = t.needs_grad(a), nb = t.needs_grad(b);
  int out = t.push(std::move(y), na || nb);
  if (na || nb)
    t.set_back(out, [a, b, out, na, nb](Tape<S>& tp) {
      auto gy = tp.grad_of(out).mat2();
      if (na) tp.grad_of(a).mat2().noalias() += gy * tp.val(b).mat2().transpose();
      if (nb) tp.grad_of(b).mat2().noalias() += tp.val(a).mat2().transpose() * gy;
    });
  return out;
}

// x (B x O) + bias (O), broadcast over rows
template <typename S>
int add_rowvec(Tape<S>& t, int x, int b) {
  const auto& X = t.val(x);
  const auto& Bv = t.val(b);
  detail::expect_2d(X, "add_rowvec");
  if (Bv.size() != X.dim(1)) throw std::invalid_argument("add_rowvec: bias size mismatch");
  Tensor<S> y(X.shape());
  y.mat2() = X.mat2();
  y.mat2().rowwise() += Bv.mat(1, Bv.size()).row(0);
  const bool nx = t.needs_grad(x), nb = t.needs_grad(b);
  int out = t.push(std::move(y), nx || nb);
  if (nx || nb)
    t.set_back(out, [x, b, out, nx, nb](Tape<S>& tp) {
      auto gy = tp.grad_of(out).mat2();
      if (nx) tp.grad_of(x).mat2() += gy;
      if (nb) tp.grad_of(b).mat(1, tp.grad_of(b).size()).row(0) += gy.colwise().sum();
    });
  return out;
}

template <typename S>
int relu(Tape<S>& t, int x) {
  Tensor<S> y(t.val(x).shape());
  y.array() = t.val(x).array().max(S(0));
  int out = t.push(std::move(y), t.needs_grad(x));
  if (t.needs_grad(x))
    t.set_back(out, [x, out](Tape<S>& tp) {
      tp.grad_of(x).array() +=
          tp.grad_of(out).array() * (tp.val(x).array() > S(0)).template cast<S>();
    });
  return out;
}

// Data copy with a new shape (same element count).
template <typename S>
int reshape(Tape<S>& t, int x, std::vector<int> shape) {
  Tensor<S> y(std::move(shape), t.val(x).array());
  int out = t.push(std::move(y), t.needs_grad(x));
  if (t.needs_grad(x))
    t.set_back(out, [x, out](Tape<S>& tp) {
      tp.grad_of(x).array() += tp.grad_of(out).array();
    });
  return out;
}

// Row-wise log-softmax.
template <typename S>
int log_softmax(Tape<S>& t, int x) {
  const auto& X = t.val(x);
  detail::expect_2d(X, "log_softmax");
  Tensor<S> y(X.shape());
  const int rows = X.dim(0), cols = X.dim(1);
  auto xm = X.mat2();
  auto ym = y.mat2();
  for (int i = 0; i < rows; ++i) {
    const S mx = xm.row(i).maxCoeff();
    S sum = S(0);
    for (int j = 0; j < cols; ++j) sum += std::exp(xm(i, j) - mx);
    const S lse = mx + std::log(sum);
    for (int j = 0; j < cols; ++j) ym(i, j) = xm(i, j) - lse;
  }
  int out = t.push(std::move(y), t.needs_grad(x));
  if (t.needs_grad(x))
    t.set_back(out, [x, out](Tape<S>& tp) {
      auto gy = tp.grad_of(out).mat2();
      auto ym2 = tp.val(out).mat2();
      auto gx = tp.grad_of(x).mat2();
      for (int i = 0; i < gy.rows(); ++i) {
        const S gsum = gy.row(i).sum();
        gx.row(i) += gy.row(i) - (ym2.row(i).array().exp() * gsum).matrix();
      }
    });
  return out;
}

// Per-row column gather: y[i] = x(i, idx[i]); output (B x 1).
template <typename S>
int pick(Tape<S>& t, int x, std::vector<int> idx) {
  const auto& X = t.val(x);
  detail::expect_2d(X, "pick");
  if (static_cast<int>(idx.size()) != X.dim(0)) throw std::invalid_argument("pick: index count");
  Tensor<S> y({X.dim(0), 1});
  auto xm = X.mat2();
  for (int i = 0; i < X.dim(0); ++i) y[i] = xm(i, idx[static_cast<std::size_t>(i)]);
  int out = t.push(std::move(y), t.needs_grad(x));
  if (t.needs_grad(x))
    t.set_back(out, [x, out, idx = std::move(idx)](Tape<S>& tp) {
      auto gx = tp.grad_of(x).mat2();
      const auto& gy = tp.grad_of(out);
      for (int i = 0; i < gx.rows(); ++i) gx(i, idx[static_cast<std::size_t>(i)]) += gy[i];
    });
  return out;
}

template <typename S>
int exp(Tape<S>& t, int x) {
  Tensor<S> y(t.val(x).shape());
  y.array() = t.val(x).array().exp();
  int out = t.push(std::move(y), t.needs_grad(x));
  if (t.needs_grad(x))
    t.set_back(out, [x, out](Tape<S>& tp) {
      tp.grad_of(x).array() += tp.grad_of(out).array() * tp.val(out).array();
    });
  return out;
}

namespace detail {

enum class BinKind { Add, Sub, Mul, Min };

template <typename S>
int binary(Tape<S>& t, int a, int b, BinKind kind) {
  const auto& A = t.val(a);
  const auto& B = t.val(b);
  if (!A.same_shape(B)) throw std::invalid_argument("elementwise op: shape mismatch");
  Tensor<S> y(A.shape());
  switch (kind) {
    case BinKind::Add: y.array() = A.array() + B.array(); break;
    case BinKind::Sub: y.array() = A.array() - B.array(); break;
    case BinKind::Mul: y.array() = A.array() * B.array(); break;
    case BinKind::Min: y.array() = A.array().min(B.array()); break;
  }
  const bool na = t.needs_grad(a), nb = t.needs_grad(b);
  int out = t.push(std::move(y), na || nb);
  if (na || nb)
    t.set_back(out, [a, b, out, na, nb, kind](Tape<S>& tp) {
      const auto& gy = tp.grad_of(out).array();
      switch (kind) {
        case BinKind::Add:
          if (na) tp.grad_of(a).array() += gy;
          if (nb) tp.grad_of(b).array() += gy;
          break;
        case BinKind::Sub:
          if (na) tp.grad_of(a).array() += gy;
          if (nb) tp.grad_of(b).array() -= gy;
          break;
        case BinKind::Mul:
          if (na) tp.grad_of(a).array() += gy * tp.val(b).array();
          if (nb) tp.grad_of(b).array() += gy * tp.val(a).array();
          break;
        case BinKind::Min: {
          // ties route to the first argument
          auto amask = (tp.val(a).array() <= tp.val(b).array()).template cast<S>();
          if (na) tp.grad_of(a).array() += gy * amask;
          if (nb) tp.grad_of(b).array() += gy * (S(1) - amask);
          break;
        }
      }
    });
  return out;
}

}  // namespace detail

template <typename S>
int add(Tape<S>& t, int a, int b) { return detail::binary(t, a, b, detail::BinKind::Add); }
template <typename S>
int sub(Tape<S>& t, int a, int b) { return detail::binary(t, a, b, detail::BinKind::Sub); }
template <typename S>
int mul(Tape<S>& t, int a, int b) { return detail::binary(t, a, b, detail::BinKind::Mul); }
template <typename S>
int minimum(Tape<S>& t, int a, int b) { return detail::binary(t, a, b, detail::BinKind::Min); }

template <typename S>
int scale(Tape<S>& t, int x, S c) {
  Tensor<S> y(t.val(x).shape());
  y.array() = t.val(x).array() * c;
  int out = t.push(std::move(y), t.needs_grad(x));
  if (t.needs_grad(x))
    t.set_back(out, [x, out, c](Tape<S>& tp) {
      tp.grad_of(x).array() += tp.grad_of(out).array() * c;
    });
  return out;
}

template <typename S>
int clamp(Tape<S>& t, int x, S lo, S hi) {
  Tensor<S> y(t.val(x).shape());
  y.array() = t.val(x).array().max(lo).min(hi);
  int out = t.push(std::move(y), t.needs_grad(x));
  if (t.needs_grad(x))
    t.set_back(out, [x, out, lo, hi](Tape<S>& tp) {
      const auto& xv = tp.val(x).array();
      tp.grad_of(x).array() +=
          tp.grad_of(out).array() * ((xv > lo && xv < hi).template cast<S>());
    });
  return out;
}

template <typename S>
int square(Tape<S>& t, int x) {
  Tensor<S> y(t.val(x).shape());
  y.array() = t.val(x).array().square();
  int out = t.push(std::move(y), t.needs_grad(x));
  if (t.needs_grad(x))
    t.set_back(out, [x, out](Tape<S>& tp) {
      tp.grad_of(x).array() += S(2) * tp.grad_of(out).array() * tp.val(x).array();
    });
  return out;
}

namespace detail {

template <typename S>
int reduce(Tape<S>& t, int x, bool mean) {
  const auto& X = t.val(x);
  Tensor<S> y({1});
  const S n = static_cast<S>(X.size());
  y[0] = X.array().sum();
  if (mean) y[0] /= n;
  int out = t.push(std::move(y), t.needs_grad(x));
  if (t.needs_grad(x))
    t.set_back(out, [x, out, mean, n](Tape<S>& tp) {
      const S g = mean ? tp.grad_of(out)[0] / n : tp.grad_of(out)[0];
      tp.grad_of(x).array() += g;
    });
  return out;
}

}  // namespace detail

template <typename S>
int sum(Tape<S>& t, int x) { return detail::reduce(t, x, false); }
template <typename S>
int mean(Tape<S>& t, int x) { return detail::reduce(t, x, true); }

// Row sums: (B x C) -> (B x 1)
template <typename S>
int row_sum(Tape<S>& t, int x) {
  const auto& X = t.val(x);
  detail::expect_2d(X, "row_sum");
  Tensor<S> y({X.dim(0), 1});
  y.mat2() = X.mat2().rowwise().sum();
  int out = t.push(std::move(y), t.needs_grad(x));
  if (t.needs_grad(x))
    t.set_back(out, [x, out](Tape<S>& tp) {
      auto gx = tp.grad_of(x).mat2();
      const auto& gy = tp.grad_of(out);
      for (int i = 0; i < gx.rows(); ++i) gx.row(i).array() += gy[i];
    });
  return out;
}

template <typename S>
int concat_cols(Tape<S>& t, int a, int b) {
  const auto& A = t.val(a);
  const auto& B = t.val(b);
  detail::expect_2d(A, "concat_cols");
  detail::expect_2d(B, "concat_cols");
  if (A.dim(0) != B.dim(0)) throw std::invalid_argument("concat_cols: row mismatch");
  const int rows = A.dim(0), ca = A.dim(1), cb = B.dim(1);
  Tensor<S> y({rows, ca + cb});
  y.mat2().leftCols(ca) = A.mat2();
  y.mat2().rightCols(cb) = B.mat2();
  const bool na = t.needs_grad(a), nb = t.needs_grad(b);
  int out = t.push(std::move(y), na || nb);
  if (na || nb)
    t.set_back(out, [a, b, out, na, nb, ca, cb](Tape<S>& tp) {
      auto gy = tp.grad_of(out).mat2();
      if (na) tp.grad_of(a).mat2() += gy.leftCols(ca);
      if (nb) tp.grad_of(b).mat2() += gy.rightCols(cb);
    });
  return out;
}

namespace detail {

template <typename S>
void im2col(const S* src, int C, int H, int W, int K, int stride, int pad, int oh, int ow,
            typename Tensor<S>::MapMat cols) {
  for (int c = 0; c < C; ++c)
    for (int ky = 0; ky < K; ++ky)
      for (int kx = 0; kx < K; ++kx) {
        const int row = (c * K + ky) * K + kx;
        for (int oy = 0; oy < oh; ++oy) {
          const int iy = oy * stride - pad + ky;
          for (int ox = 0; ox < ow; ++ox) {
            const int ix = ox * stride - pad + kx;
            const bool in = iy >= 0 && iy < H && ix >= 0 && ix < W;
            cols(row, oy * ow + ox) = in ? src[(c * H + iy) * W + ix] : S(0);
          }
        }
      }
}

template <typename S>
void col2im(const typename Tensor<S>::Mat& gcols, int C, int H, int W, int K, int stride, int pad,
            int oh, int ow, S* dst) {
  for (int c = 0; c < C; ++c)
    for (int ky = 0; ky < K; ++ky)
      for (int kx = 0; kx < K; ++kx) {
        const int row = (c * K + ky) * K + kx;
        for (int oy = 0; oy < oh; ++oy) {
          const int iy = oy * stride - pad + ky;
          if (iy < 0 || iy >= H) continue;
          for (int ox = 0; ox < ow; ++ox) {
            const int ix = ox * stride - pad + kx;
            if (ix < 0 || ix >= W) continue;
            dst[(c * H + iy) * W + ix] += gcols(row, oy * ow + ox);
          }
        }
      }
}

}  // namespace detail

// 2-d convolution; x (B,C,H,W), w (O,C,K,K), b (O) -> (B,O,OH,OW).
template <typename S>
int conv2d(Tape<S>& t, int x, int w, int b, int stride = 2, int pad = 1) {
  const auto& X = t.val(x);
  const auto& W = t.val(w);
  const auto& Bv = t.val(b);
  if (X.ndim() != 4 || W.ndim() != 4) throw std::invalid_argument("conv2d: rank");
  const int batch = X.dim(0), C = X.dim(1), H = X.dim(2), Wd = X.dim(3);
  const int O = W.dim(0), K = W.dim(2);
  if (W.dim(1) != C || W.dim(3) != K)
    throw std::invalid_argument("conv2d: kernel shape mismatch (channels " +
                                std::to_string(W.dim(1)) + " vs input " + std::to_string(C) + ")");
  if (Bv.size() != O) throw std::invalid_argument("conv2d: bias size");
  const int oh = (H + 2 * pad - K) / stride + 1;
  const int ow = (Wd + 2 * pad - K) / stride + 1;
  const int patch = C * K * K;

  // One im2col buffer for the whole batch; reused by the backward pass.
  auto cols = std::make_shared<Tensor<S>>(std::vector<int>{batch, patch, oh * ow});
  Tensor<S> y({batch, O, oh, ow});
  auto wm = W.mat(O, patch);
  for (int n = 0; n < batch; ++n) {
    typename Tensor<S>::MapMat cs(cols->data() + static_cast<long>(n) * patch * oh * ow, patch,
                                  oh * ow);
    detail::im2col<S>(X.data() + static_cast<long>(n) * C * H * Wd, C, H, Wd, K, stride, pad, oh,
                      ow, cs);
    typename Tensor<S>::MapMat ys(y.data() + static_cast<long>(n) * O * oh * ow, O, oh * ow);
    ys.noalias() = wm * cs;
    ys.colwise() += Bv.mat(Bv.size(), 1).col(0);
  }
  const bool nx = t.needs_grad(x), nw = t.needs_grad(w), nb = t.needs_grad(b);
  int out = t.push(std::move(y), nx || nw || nb);
  if (nx || nw || nb)
    t.set_back(out, [x, w, b, out, cols, batch, C, H, Wd, O, K, stride, pad, oh, ow, patch, nx, nw,
                     nb](Tape<S>& tp) {
      const auto& gy = tp.grad_of(out);
      auto wm2 = tp.val(w).mat(O, patch);
      for (int n = 0; n < batch; ++n) {
        typename Tensor<S>::ConstMapMat gys(gy.data() + static_cast<long>(n) * O * oh * ow, O,
                                            oh * ow);
        typename Tensor<S>::ConstMapMat cs(cols->data() + static_cast<long>(n) * patch * oh * ow,
                                           patch, oh * ow);
        if (nw) tp.grad_of(w).mat(O, patch).noalias() += gys * cs.transpose();
        if (nb) tp.grad_of(b).mat(O, 1).col(0) += gys.rowwise().sum();
        if (nx) {
          typename Tensor<S>::Mat gcols = wm2.transpose() * gys;  // patch x oh*ow
          detail::col2im<S>(gcols, C, H, Wd, K, stride, pad, oh, ow,
                            tp.grad_of(x).data() + static_cast<long>(n) * C * H * Wd);
        }
      }
    });
  return out;
}

}  // namespace imlab

#endif  // IMLAB_TAPE_HPP
