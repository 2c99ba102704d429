#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sageforge/corpus.hpp"
#include "sageforge/denoiser.hpp"
#include "sageforge/encoder.hpp"
#include "sageforge/tokenizer.hpp"

namespace sageforge::trainer {

enum class Stage { Stage1, Stage2, Stage2FromScratch };

std::string_view stage_name(Stage s);
Stage parse_stage(std::string_view s);  // "1", "2", "2-scratch"

struct TrainConfig {
  Stage stage = Stage::Stage1;
  std::string preset = "tiny";
  std::size_t steps = 300;
  std::size_t warmup_steps = 30;
  std::size_t batch_size = 32;
  double base_lr = 3e-4;
  double weight_decay = 0.01;
  std::uint64_t seed = 0;
  double clip_norm = 1.0;
  double tau = 0.05;
  double dropout = 0.1;
  std::size_t max_len = 256;
  denoiser::SchemeConfig mask;
  std::size_t checkpoint_every = 0;  // 0: only the final checkpoint
  std::string out_dir;               // empty: no files written

  // Desk-scale defaults for a stage.
  static TrainConfig defaults(Stage stage);
  void validate() const;  // throws ConfigError
  nlohmann::ordered_json to_json() const;
};

double lr_schedule(std::size_t step, std::size_t steps, std::size_t warmup_steps, double base_lr);
inline double lr_schedule(std::size_t step, const TrainConfig& c) {
  return lr_schedule(step, c.steps, c.warmup_steps, c.base_lr);
}

struct AdamWHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamWState {
  std::vector<float> m;
  std::vector<float> v;
  std::uint64_t t = 0;
  std::size_t skipped = 0;
};

// One decoupled-weight-decay Adam update. `decay` marks elements subject to
// weight decay (empty: all). Returns false, leaving params and moments
// untouched, when a gradient is not finite.
bool optimizer_step(std::span<float> params, std::span<const float> grads, std::span<const std::uint8_t> decay,
                    AdamWState& state, double lr, double weight_decay, const AdamWHyper& hyper = {});

// Per-element decay mask for a parameter layout.
std::vector<std::uint8_t> decay_mask(const encoder::Params<float>& params);

// Scales grads so their global L2 norm is at most max_norm; returns the norm
// before clipping.
double clip_global_norm(std::span<float> grads, double max_norm);

struct TrainReport {
  Stage stage = Stage::Stage1;
  std::vector<double> losses;
  std::vector<double> learning_rates;
  std::vector<double> accuracies;  // Stage II in-batch retrieval accuracy per step
  std::size_t skipped_steps = 0;
  double wall_seconds = 0;
  std::size_t batch_size = 0;
  std::string checkpoint_path;

  // Mean over the last min(20, steps) steps; NaN without steps.
  double final_loss() const;
  double final_accuracy() const;
  nlohmann::ordered_json to_json() const;
  std::string loss_csv() const;
};

struct TrainResult {
  TrainReport report;
  encoder::Params<float> params;
};

// Builds and trains an encoder sized to the tokenizer. Throws
// std::runtime_error on an empty dataset.
TrainResult train_stage1(const TrainConfig& config, const Tokenizer& tokenizer,
                         std::span<const denoiser::Stage1Item> items);

// Continues from `init` (Stage2) or starts from a fresh initialization
// (Stage2FromScratch, `init` must be null).
TrainResult train_stage2(const TrainConfig& config, const Tokenizer& tokenizer,
                         std::span<const corpus::BimodalPair> pairs, const encoder::Params<float>* init);

// [CLS] ids [SEP], tail-truncated to max_len.
std::vector<TokenId> wrap_sequence(std::span<const TokenId> ids, const Tokenizer& tokenizer, std::size_t max_len);

// Pads sequences into a rows x width batch with an attention mask.
struct PaddedBatch {
  std::size_t rows = 0;
  std::size_t width = 0;
  std::vector<TokenId> input;
  std::vector<std::uint8_t> attention;
};
PaddedBatch pad_batch(const std::vector<std::vector<TokenId>>& seqs, TokenId pad_id);

}  // namespace sageforge::trainer
