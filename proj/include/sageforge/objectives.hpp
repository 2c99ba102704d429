#pragma once

#include <span>
#include <vector>

#include "sageforge/encoder.hpp"
#include "sageforge/tokenizer.hpp"

namespace sageforge::objectives {

using encoder::Matrix;

template <typename S>
struct MlmResult {
  S loss = 0;
  Matrix<S> d_logits;  // same shape as logits
};

// Mean cross-entropy; row m of `logits` predicts labels[m]. Throws
// std::invalid_argument when there are no labels or shapes disagree.
template <typename S>
MlmResult<S> mlm_loss(const Matrix<S>& logits, std::span<const TokenId> labels);

// Stacks H and H+ as [h_1, h_1+, h_2, h_2+, ...]; row a's positive is a ^ 1.
template <typename S>
Matrix<S> interleave(const Matrix<S>& anchors, const Matrix<S>& positives);

// Pairwise cosine similarity of the rows of X. Throws std::invalid_argument on
// a zero-norm row.
template <typename S>
Matrix<S> cosine_sim_matrix(const Matrix<S>& X);

template <typename S>
Matrix<S> cosine_sim_matrix(const Matrix<S>& anchors, const Matrix<S>& positives) {
  return cosine_sim_matrix<S>(interleave<S>(anchors, positives));
}

// Softmax at temperature tau over the 2N-2 negatives of anchor i (every row
// except i and i ^ 1), in increasing row order. Throws std::invalid_argument
// when there are no negatives.
template <typename S>
std::vector<S> hard_negative_weights(const Matrix<S>& sim, std::size_t i, S tau);

// Full gamma matrix: gamma(a, k) for negatives, 0 at a and a ^ 1.
template <typename S>
Matrix<S> hard_negative_weight_matrix(const Matrix<S>& sim, S tau);

template <typename S>
struct ContrastiveResult {
  S loss = 0;
  std::vector<S> anchor_terms;  // one per row of the interleaved batch
  Matrix<S> d_anchors;
  Matrix<S> d_positives;
  Matrix<S> sim;
};

inline constexpr double kDefaultTemperature = 0.05;

// Symmetric hard-negative-weighted loss, averaged over pairs. Gamma is treated
// as a constant (no gradient flows through it).
template <typename S>
ContrastiveResult<S> contrastive_loss(const Matrix<S>& anchors, const Matrix<S>& positives, S tau);

// Same loss with externally supplied gamma; its gradient equals the detached
// gradient above when gamma is the matrix computed at the same point.
template <typename S>
ContrastiveResult<S> contrastive_loss_fixed_gamma(const Matrix<S>& anchors, const Matrix<S>& positives, S tau,
                                                  const Matrix<S>& gamma);

// Fraction of rows whose most similar other row is their partner. Ties count
// as misses.
template <typename S>
double in_batch_accuracy(const Matrix<S>& sim);

}  // namespace sageforge::objectives
