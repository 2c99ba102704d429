#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "sageforge/common.hpp"
#include "sageforge/tokenizer.hpp"

namespace sageforge::encoder {

struct EncoderConfig {
  std::size_t layers = 2;
  std::size_t heads = 4;
  std::size_t model_dim = 64;
  std::size_t ff_dim = 256;
  std::size_t vocab_size = 8192;
  std::size_t max_len = 256;
  double dropout = 0.1;
  std::uint64_t seed = 0;

  // "tiny" or "small-desk"; vocab and length come from the caller.
  static EncoderConfig preset(const std::string& name, std::size_t vocab_size, std::size_t max_len);
  // Throws ConfigError.
  void validate() const;
  std::size_t head_dim() const { return model_dim / heads; }

  nlohmann::ordered_json to_json() const;
  static EncoderConfig from_json(const nlohmann::json& j);
  bool operator==(const EncoderConfig&) const = default;
};

struct TensorInfo {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t offset = 0;
  // Weight decay applies to matrices only (not biases or norm gains).
  bool decays() const { return rows > 1 && cols > 1; }
};

std::vector<TensorInfo> parameter_layout(const EncoderConfig& config);
std::size_t parameter_count(const EncoderConfig& config);

template <typename S>
using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename S>
using RowVector = Eigen::Matrix<S, 1, Eigen::Dynamic>;

// Indices into the layout for one transformer block.
struct BlockSlots {
  std::size_t ln1_g, ln1_b, wq, bq, wk, bk, wv, bv, wo, bo, ln2_g, ln2_b, w1, b1, w2, b2;
};

// All parameters (or gradients) as one flat buffer with named tensor views.
template <typename S>
class Params {
 public:
  using MatMap = Eigen::Map<Matrix<S>>;
  using ConstMatMap = Eigen::Map<const Matrix<S>>;

  explicit Params(const EncoderConfig& config);

  const EncoderConfig& config() const { return config_; }
  const std::vector<TensorInfo>& layout() const { return layout_; }
  std::vector<S>& data() { return data_; }
  const std::vector<S>& data() const { return data_; }

  MatMap tensor(std::size_t slot);
  ConstMatMap tensor(std::size_t slot) const;
  std::size_t slot(const std::string& name) const;

  std::size_t tok_emb = 0, pos_emb = 0, lnf_g = 0, lnf_b = 0, mlm_bias = 0;
  std::vector<BlockSlots> blocks;

  void set_zero();
  bool all_finite() const;

  template <typename T>
  Params<T> cast() const {
    Params<T> out(config_);
    for (std::size_t i = 0; i < data_.size(); ++i) out.data()[i] = static_cast<T>(data_[i]);
    return out;
  }

 private:
  EncoderConfig config_;
  std::vector<TensorInfo> layout_;
  std::vector<S> data_;
};

// N(0, 0.02) weights, unit norm gains, zero biases. Deterministic in `seed`;
// float and double initializations agree up to rounding.
template <typename S>
Params<S> init_params(const EncoderConfig& config, std::uint64_t seed);

template <typename S>
struct LayerCache {
  Matrix<S> x_in, xhat1, a, q, k, v, o, attn_mask, xhat2, b, u, g, ffn_mask;
  RowVector<S> rstd1, rstd2;
  std::vector<Matrix<S>> probs;  // per head
};

// Forward state of one sequence, restricted to its non-pad positions.
template <typename S>
struct SequenceState {
  std::vector<TokenId> ids;
  std::vector<std::size_t> positions;
  Matrix<S> emb_mask;
  std::vector<LayerCache<S>> layers;
  Matrix<S> final_xhat;
  RowVector<S> final_rstd;
  Matrix<S> hidden;  // positions x model_dim
};

template <typename S>
struct ForwardPass {
  std::size_t rows = 0;
  std::size_t width = 0;
  bool train = false;
  std::vector<SequenceState<S>> seqs;
};

// `input` and `attention` are rows x width, row-major. Pad positions
// (attention 0) take no part in the computation. Dropout needs `rng` when
// train is set. Throws std::invalid_argument on out-of-range ids, rows
// longer than max_len or rows without any real token.
template <typename S>
ForwardPass<S> forward(const Params<S>& params, std::span<const TokenId> input, std::span<const std::uint8_t> attention,
                       std::size_t rows, std::size_t width, bool train, Rng* rng);

// Hidden states as rows*width x model_dim with zero rows at pads.
template <typename S>
Matrix<S> padded_hidden(const ForwardPass<S>& pass, std::size_t model_dim);

// Accumulates parameter gradients given d(loss)/d(hidden) per sequence
// (same shape as each sequence's hidden). Throws IntegrityError on shape
// mismatch with the forward cache.
template <typename S>
void backward(const Params<S>& params, const ForwardPass<S>& pass, const std::vector<Matrix<S>>& d_hidden,
              Params<S>& grads);

// Mean over non-pad positions: rows x model_dim.
template <typename S>
Matrix<S> pool_mean(const ForwardPass<S>& pass);

// Standalone pooling over a padded tensor (rows*width x dim). Throws
// std::invalid_argument on an all-pad row.
template <typename S>
Matrix<S> pool_mean(const Matrix<S>& hidden, std::span<const std::uint8_t> attention, std::size_t rows,
                    std::size_t width);

// d(loss)/d(hidden) per sequence from d(loss)/d(pooled).
template <typename S>
std::vector<Matrix<S>> pool_mean_backward(const ForwardPass<S>& pass, const Matrix<S>& d_pooled);

// hidden (m x dim) times the tied token embedding, plus the output bias.
template <typename S>
Matrix<S> mlm_logits(const Params<S>& params, const Matrix<S>& hidden);

// Returns d(loss)/d(hidden) and accumulates head gradients.
template <typename S>
Matrix<S> mlm_logits_backward(const Params<S>& params, const Matrix<S>& hidden, const Matrix<S>& d_logits,
                              Params<S>& grads);

struct CheckpointMeta {
  std::string tokenizer_fingerprint;  // hex; empty if unknown
  std::uint64_t step = 0;
};

void save_checkpoint(const std::string& path, const Params<float>& params, const CheckpointMeta& meta);
std::string checkpoint_bytes(const Params<float>& params, const CheckpointMeta& meta);

struct LoadedCheckpoint {
  Params<float> params;
  CheckpointMeta meta;
};

// Throws IntegrityError on malformed files.
LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace sageforge::encoder
