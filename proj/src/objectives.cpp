#include "sageforge/objectives.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sageforge::objectives {

template <typename S>
MlmResult<S> mlm_loss(const Matrix<S>& logits, std::span<const TokenId> labels) {
  if (labels.empty()) throw std::invalid_argument("mlm_loss: no labeled positions");
  if (static_cast<std::size_t>(logits.rows()) != labels.size()) {
    throw std::invalid_argument("mlm_loss: one logits row per label expected");
  }
  const auto m = static_cast<S>(labels.size());
  MlmResult<S> r;
  r.d_logits.resize(logits.rows(), logits.cols());
  double total = 0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const auto y = static_cast<Eigen::Index>(labels[static_cast<std::size_t>(i)]);
    if (y < 0 || y >= logits.cols()) throw std::invalid_argument("mlm_loss: label outside the vocabulary");
    const S mx = logits.row(i).maxCoeff();
    auto e = (logits.row(i).array() - mx).exp();
    const S z = e.sum();
    total += static_cast<double>(std::log(z) + mx - logits(i, y));
    r.d_logits.row(i) = e / (z * m);
    r.d_logits(i, y) -= S(1) / m;
  }
  r.loss = static_cast<S>(total / static_cast<double>(labels.size()));
  return r;
}

template <typename S>
Matrix<S> interleave(const Matrix<S>& anchors, const Matrix<S>& positives) {
  if (anchors.rows() != positives.rows() || anchors.cols() != positives.cols()) {
    throw std::invalid_argument("anchors and positives must have the same shape");
  }
  Matrix<S> x(2 * anchors.rows(), anchors.cols());
  for (Eigen::Index i = 0; i < anchors.rows(); ++i) {
    x.row(2 * i) = anchors.row(i);
    x.row(2 * i + 1) = positives.row(i);
  }
  return x;
}

template <typename S>
Matrix<S> cosine_sim_matrix(const Matrix<S>& X) {
  Matrix<S> u = X;
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    const S n = u.row(i).norm();
    if (!(n > S(0))) throw std::invalid_argument("cosine similarity of a zero-norm row");
    u.row(i) /= n;
  }
  Matrix<S> s = u * u.transpose();
  s.diagonal().setOnes();
  return s;
}

template <typename S>
std::vector<S> hard_negative_weights(const Matrix<S>& sim, std::size_t i, S tau) {
  const std::size_t n2 = static_cast<std::size_t>(sim.rows());
  if (n2 < 4) throw std::invalid_argument("hard negative weights need at least two pairs");
  const std::size_t partner = i ^ 1U;
  S mx = -std::numeric_limits<S>::infinity();
  for (std::size_t k = 0; k < n2; ++k) {
    if (k != i && k != partner) mx = std::max(mx, sim(i, k) / tau);
  }
  std::vector<S> w;
  w.reserve(n2 - 2);
  S total = 0;
  for (std::size_t k = 0; k < n2; ++k) {
    if (k == i || k == partner) continue;
    w.push_back(std::exp(sim(i, k) / tau - mx));
    total += w.back();
  }
  for (auto& v : w) v /= total;
  return w;
}

template <typename S>
Matrix<S> hard_negative_weight_matrix(const Matrix<S>& sim, S tau) {
  const auto n2 = sim.rows();
  Matrix<S> g = Matrix<S>::Zero(n2, n2);
  for (Eigen::Index a = 0; a < n2; ++a) {
    const auto w = hard_negative_weights<S>(sim, static_cast<std::size_t>(a), tau);
    std::size_t j = 0;
    for (Eigen::Index k = 0; k < n2; ++k) {
      if (k != a && k != (a ^ 1)) g(a, k) = w[j++];
    }
  }
  return g;
}

template <typename S>
ContrastiveResult<S> contrastive_loss_fixed_gamma(const Matrix<S>& anchors, const Matrix<S>& positives, S tau,
                                                  const Matrix<S>& gamma) {
  if (!(tau > S(0))) throw std::invalid_argument("temperature must be positive");
  const Matrix<S> x = interleave<S>(anchors, positives);
  const auto n2 = x.rows();
  if (n2 < 4) throw std::invalid_argument("contrastive loss needs at least two pairs");
  if (gamma.rows() != n2 || gamma.cols() != n2) throw std::invalid_argument("gamma must be 2N x 2N");
  const S pairs = static_cast<S>(n2 / 2);

  ContrastiveResult<S> r;
  r.sim = cosine_sim_matrix<S>(x);
  r.anchor_terms.resize(static_cast<std::size_t>(n2));
  Matrix<S> g = Matrix<S>::Zero(n2, n2);  // d loss / d sim
  double total = 0;
  for (Eigen::Index a = 0; a < n2; ++a) {
    const Eigen::Index p = a ^ 1;
    S mx = r.sim(a, p) / tau;
    for (Eigen::Index k = 0; k < n2; ++k) {
      if (k != a && k != p && gamma(a, k) > S(0)) mx = std::max(mx, r.sim(a, k) / tau);
    }
    const S ep = std::exp(r.sim(a, p) / tau - mx);
    S denom = ep;
    for (Eigen::Index k = 0; k < n2; ++k) {
      if (k != a && k != p) denom += gamma(a, k) * std::exp(r.sim(a, k) / tau - mx);
    }
    const S term = -(r.sim(a, p) / tau - mx) + std::log(denom);
    r.anchor_terms[static_cast<std::size_t>(a)] = term;
    total += static_cast<double>(term);
    const S scale = S(1) / (pairs * tau * denom);
    g(a, p) += (ep - denom) * scale;
    for (Eigen::Index k = 0; k < n2; ++k) {
      if (k != a && k != p) g(a, k) += gamma(a, k) * std::exp(r.sim(a, k) / tau - mx) * scale;
    }
  }
  r.loss = static_cast<S>(total / static_cast<double>(pairs));

  // d cos(x_a, x_b) / d x_a = (u_b - s_ab u_a) / |x_a|
  Matrix<S> u = x;
  std::vector<S> norms(static_cast<std::size_t>(n2));
  for (Eigen::Index i = 0; i < n2; ++i) {
    norms[static_cast<std::size_t>(i)] = x.row(i).norm();
    u.row(i) /= norms[static_cast<std::size_t>(i)];
  }
  Matrix<S> gs = g + g.transpose();
  gs.diagonal().setZero();
  Matrix<S> dx = gs * u;
  for (Eigen::Index a = 0; a < n2; ++a) {
    const S coeff = (gs.row(a).array() * r.sim.row(a).array()).sum();
    dx.row(a) = (dx.row(a) - coeff * u.row(a)) / norms[static_cast<std::size_t>(a)];
  }
  r.d_anchors.resize(anchors.rows(), anchors.cols());
  r.d_positives.resize(positives.rows(), positives.cols());
  for (Eigen::Index i = 0; i < anchors.rows(); ++i) {
    r.d_anchors.row(i) = dx.row(2 * i);
    r.d_positives.row(i) = dx.row(2 * i + 1);
  }
  return r;
}

template <typename S>
ContrastiveResult<S> contrastive_loss(const Matrix<S>& anchors, const Matrix<S>& positives, S tau) {
  if (!(tau > S(0))) throw std::invalid_argument("temperature must be positive");
  const Matrix<S> sim = cosine_sim_matrix<S>(interleave<S>(anchors, positives));
  return contrastive_loss_fixed_gamma<S>(anchors, positives, tau, hard_negative_weight_matrix<S>(sim, tau));
}

template <typename S>
double in_batch_accuracy(const Matrix<S>& sim) {
  const auto n2 = sim.rows();
  if (n2 < 2) return 0.0;
  std::size_t hits = 0;
  for (Eigen::Index a = 0; a < n2; ++a) {
    const Eigen::Index p = a ^ 1;
    bool best = true;
    for (Eigen::Index k = 0; k < n2 && best; ++k) {
      if (k != a && k != p && sim(a, k) >= sim(a, p)) best = false;
    }
    hits += best ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(n2);
}

#define SAGEFORGE_INSTANTIATE(S)                                                                              \
  template MlmResult<S> mlm_loss<S>(const Matrix<S>&, std::span<const TokenId>);                              \
  template Matrix<S> interleave<S>(const Matrix<S>&, const Matrix<S>&);                                       \
  template Matrix<S> cosine_sim_matrix<S>(const Matrix<S>&);                                                  \
  template std::vector<S> hard_negative_weights<S>(const Matrix<S>&, std::size_t, S);                         \
  template Matrix<S> hard_negative_weight_matrix<S>(const Matrix<S>&, S);                                     \
  template ContrastiveResult<S> contrastive_loss<S>(const Matrix<S>&, const Matrix<S>&, S);                   \
  template ContrastiveResult<S> contrastive_loss_fixed_gamma<S>(const Matrix<S>&, const Matrix<S>&, S,        \
                                                                const Matrix<S>&);                            \
  template double in_batch_accuracy<S>(const Matrix<S>&);

SAGEFORGE_INSTANTIATE(float)
SAGEFORGE_INSTANTIATE(double)

}  // namespace sageforge::objectives
