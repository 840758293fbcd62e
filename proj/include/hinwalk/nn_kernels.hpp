#pragma once

// Scalar-generic dense kernels for the policy network: activations, a stable
// softmax and a single recurrent cell step with its reverse-mode adjoint.

#include <Eigen/Dense>
#include <cmath>

namespace hinwalk::nn {

template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Derived>
auto sigmoid(const Eigen::MatrixBase<Derived>& x) {
  using S = typename Derived::Scalar;
  return x.unaryExpr([](S v) {
    if (v >= S(0)) return S(1) / (S(1) + std::exp(-v));
    S e = std::exp(v);
    return e / (S(1) + e);
  });
}

template <class Derived>
auto relu(const Eigen::MatrixBase<Derived>& x) {
  using S = typename Derived::Scalar;
  return x.cwiseMax(S(0));
}

// Max-subtracted log-softmax.
template <class Scalar>
Vec<Scalar> log_softmax(const Vec<Scalar>& s) {
  const Scalar m = s.maxCoeff();
  const Scalar lse = m + std::log((s.array() - m).exp().sum());
  return (s.array() - lse).matrix();
}

template <class Scalar>
Vec<Scalar> softmax(const Vec<Scalar>& s) {
  Vec<Scalar> e = (s.array() - s.maxCoeff()).exp().matrix();
  return e / e.sum();
}

// -sum p ln p from matching probabilities and log-probabilities.
template <class Scalar>
Scalar entropy(const Vec<Scalar>& p, const Vec<Scalar>& log_p) {
  return -(p.array() * log_p.array()).sum();
}

// Activations of one recurrent cell step, kept for the backward pass. Gate
// blocks of the pre-activation are stacked in the order i, f, g, o.
template <class Scalar>
struct LstmCache {
  Vec<Scalar> xh;  // [x ; h_prev]
  Vec<Scalar> i, f, g, o;
  Vec<Scalar> c_prev, c, tanh_c;
};

// h, c are updated in place. weight is 4H x (in + H).
template <class Scalar>
void lstm_forward(const Mat<Scalar>& weight, const Vec<Scalar>& bias, const Vec<Scalar>& x,
                  Vec<Scalar>& h, Vec<Scalar>& c, LstmCache<Scalar>* cache = nullptr) {
  const Eigen::Index H = h.size();
  Vec<Scalar> xh(x.size() + H);
  xh << x, h;
  Vec<Scalar> z = weight * xh + bias;
  Vec<Scalar> gi = sigmoid(z.segment(0, H));
  Vec<Scalar> gf = sigmoid(z.segment(H, H));
  Vec<Scalar> gg = z.segment(2 * H, H).array().tanh().matrix();
  Vec<Scalar> go = sigmoid(z.segment(3 * H, H));
  Vec<Scalar> c_next = gf.cwiseProduct(c) + gi.cwiseProduct(gg);
  Vec<Scalar> tanh_c = c_next.array().tanh().matrix();
  if (cache) {
    cache->xh = xh;
    cache->i = gi;
    cache->f = gf;
    cache->g = gg;
    cache->o = go;
    cache->c_prev = c;
    cache->c = c_next;
    cache->tanh_c = tanh_c;
  }
  h = go.cwiseProduct(tanh_c);
  c = std::move(c_next);
}

// Given dL/dh and the carried dL/dc for this step's outputs, accumulates the
// parameter gradients and returns dL/dx, dL/dh_prev, dL/dc_prev.
template <class Scalar>
void lstm_backward(const Mat<Scalar>& weight, const LstmCache<Scalar>& k, const Vec<Scalar>& dh,
                   const Vec<Scalar>& dc, Mat<Scalar>& d_weight, Vec<Scalar>& d_bias,
                   Vec<Scalar>& dx, Vec<Scalar>& dh_prev, Vec<Scalar>& dc_prev) {
  const Eigen::Index H = dh.size();
  const auto one = Scalar(1);
  Vec<Scalar> dc_total =
      dc + dh.cwiseProduct(k.o).cwiseProduct((one - k.tanh_c.array().square()).matrix());
  Vec<Scalar> dz(4 * H);
  dz.segment(0, H) = dc_total.cwiseProduct(k.g).cwiseProduct((k.i.array() * (one - k.i.array())).matrix());
  dz.segment(H, H) =
      dc_total.cwiseProduct(k.c_prev).cwiseProduct((k.f.array() * (one - k.f.array())).matrix());
  dz.segment(2 * H, H) = dc_total.cwiseProduct(k.i).cwiseProduct((one - k.g.array().square()).matrix());
  dz.segment(3 * H, H) =
      dh.cwiseProduct(k.tanh_c).cwiseProduct((k.o.array() * (one - k.o.array())).matrix());
  d_weight.noalias() += dz * k.xh.transpose();
  d_bias += dz;
  Vec<Scalar> dxh = weight.transpose() * dz;
  const Eigen::Index in = dxh.size() - H;
  dx = dxh.head(in);
  dh_prev = dxh.tail(H);
  dc_prev = dc_total.cwiseProduct(k.f);
}

}  // namespace hinwalk::nn
