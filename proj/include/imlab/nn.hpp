#ifndef IMLAB_NN_HPP
#define IMLAB_NN_HPP

#include "imlab/rng.hpp"
#include "imlab/tape.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace imlab {

// Semi-orthogonal fill, gain-scaled.  Rows x cols arbitrary; the smaller side
// ends up orthonormal.
template <typename S>
void orthogonal_fill(Tensor<S>& w, int rows, int cols, double gain, Rng& rng) {
  const int big = std::max(rows, cols);
  const int small = std::min(rows, cols);
  Eigen::MatrixXd a(big, small);
  for (int i = 0; i < big; ++i)
    for (int j = 0; j < small; ++j) a(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(big, small);
  // canonicalize signs with R's diagonal
  for (int j = 0; j < small; ++j)
    if (qr.matrixQR()(j, j) < 0) q.col(j) = -q.col(j);
  auto wm = w.mat(rows, cols);
  if (rows >= cols)
    wm = (gain * q).cast<S>();
  else
    wm = (gain * q.transpose()).cast<S>();
}

// Dense layer parameters: <prefix>.w (in x out), <prefix>.b (out).
// Orthogonal weights, zero biases.
template <typename S>
void add_dense(ParamStore<S>& ps, const std::string& prefix, int in, int out, double gain,
               Rng& rng) {
  Tensor<S> w({in, out});
  orthogonal_fill(w, in, out, gain, rng);
  ps.add(prefix + ".w", std::move(w));
  ps.add(prefix + ".b", Tensor<S>({out}));
}

// 3x3 conv parameters: <prefix>.w (out_ch, in_ch, 3, 3), <prefix>.b (out_ch).
template <typename S>
void add_conv3x3(ParamStore<S>& ps, const std::string& prefix, int in_ch, int out_ch, double gain,
                 Rng& rng) {
  Tensor<S> w({out_ch, in_ch, 3, 3});
  orthogonal_fill(w, out_ch, in_ch * 9, gain, rng);
  ps.add(prefix + ".w", std::move(w));
  ps.add(prefix + ".b", Tensor<S>({out_ch}));
}

// y = x * W + b
template <typename S>
int dense(Tape<S>& t, ParamStore<S>& ps, const std::string& prefix, int x) {
  return add_rowvec(t, matmul(t, x, t.param(ps, prefix + ".w")), t.param(ps, prefix + ".b"));
}

// stride-2, pad-1 3x3 convolution (the only configuration used here)
template <typename S>
int conv(Tape<S>& t, ParamStore<S>& ps, const std::string& prefix, int x) {
  return conv2d(t, x, t.param(ps, prefix + ".w"), t.param(ps, prefix + ".b"), 2, 1);
}

// Parameter count of one dense layer.
inline long dense_param_count(int in, int out) { return static_cast<long>(in) * out + out; }

// Parameter count of one 3x3 conv layer.
inline long conv3x3_param_count(int in_ch, int out_ch) {
  return static_cast<long>(in_ch) * out_ch * 9 + out_ch;
}

}  // namespace imlab

#endif  // IMLAB_NN_HPP
