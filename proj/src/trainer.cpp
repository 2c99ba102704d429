#include "sageforge/trainer.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numeric>
#include <sstream>

#include "sageforge/objectives.hpp"

namespace sageforge::trainer {

using encoder::Matrix;
using encoder::Params;

std::string_view stage_name(Stage s) {
  switch (s) {
    case Stage::Stage1: return "1";
    case Stage::Stage2: return "2";
    case Stage::Stage2FromScratch: return "2-scratch";
  }
  return "?";
}

Stage parse_stage(std::string_view s) {
  if (s == "1") return Stage::Stage1;
  if (s == "2") return Stage::Stage2;
  if (s == "2-scratch") return Stage::Stage2FromScratch;
  throw ConfigError("unknown stage '" + std::string(s) + "' (expected 1, 2 or 2-scratch)");
}

TrainConfig TrainConfig::defaults(Stage stage) {
  TrainConfig c;
  c.stage = stage;
  if (stage == Stage::Stage1) {
    c.steps = 300;
    c.warmup_steps = 30;
    c.batch_size = 32;
    c.base_lr = 3e-4;
  } else {
    c.steps = 600;
    c.warmup_steps = 60;
    c.batch_size = 64;
    c.base_lr = 1e-4;
  }
  return c;
}

void TrainConfig::validate() const {
  if (warmup_steps > steps) throw ConfigError("warmup_steps must not exceed steps");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (stage != Stage::Stage1 && batch_size < 2) throw ConfigError("contrastive training needs batch_size >= 2");
  if (!(base_lr >= 0.0) || !(weight_decay >= 0.0)) throw ConfigError("learning rate and weight decay must be >= 0");
  if (!(tau > 0.0)) throw ConfigError("temperature must be positive");
  if (max_len < 3) throw ConfigError("max_len must be at least 3");
  if (!(mask.dobf_mix >= 0.0 && mask.dobf_mix <= 1.0)) throw ConfigError("mask.dobf_mix must lie in [0, 1]");
  if (!mask.rate.dynamic && !(mask.rate.rate > 0.0 && mask.rate.rate < 1.0)) {
    throw ConfigError("mask.rate must lie in (0, 1)");
  }
}

nlohmann::ordered_json TrainConfig::to_json() const {
  nlohmann::ordered_json j;
  j["stage"] = std::string(stage_name(stage));
  j["preset"] = preset;
  j["steps"] = steps;
  j["warmup_steps"] = warmup_steps;
  j["batch_size"] = batch_size;
  j["base_lr"] = base_lr;
  j["weight_decay"] = weight_decay;
  j["seed"] = seed;
  j["clip_norm"] = clip_norm;
  j["tau"] = tau;
  j["dropout"] = dropout;
  j["max_len"] = max_len;
  j["mask"] = {{"scheme", std::string(denoiser::scheme_name(mask.random_scheme))},
               {"rate", mask.rate.dynamic ? nlohmann::ordered_json("dynamic") : nlohmann::ordered_json(mask.rate.rate)},
               {"dobf_mix", mask.dobf_mix}};
  j["checkpoint_every"] = checkpoint_every;
  j["out_dir"] = out_dir;
  return j;
}

double lr_schedule(std::size_t step, std::size_t steps, std::size_t warmup_steps, double base_lr) {
  if (step >= steps) return 0.0;
  if (step < warmup_steps) return base_lr * static_cast<double>(step) / static_cast<double>(warmup_steps);
  return base_lr * static_cast<double>(steps - step) / static_cast<double>(steps - warmup_steps);
}

bool optimizer_step(std::span<float> params, std::span<const float> grads, std::span<const std::uint8_t> decay,
                    AdamWState& state, double lr, double weight_decay, const AdamWHyper& hyper) {
  if (params.size() != grads.size() || (!decay.empty() && decay.size() != params.size())) {
    throw std::invalid_argument("optimizer_step: shape mismatch");
  }
  for (float g : grads) {
    if (!std::isfinite(g)) {
      ++state.skipped;
      return false;
    }
  }
  if (state.m.size() != params.size()) {
    state.m.assign(params.size(), 0.0F);
    state.v.assign(params.size(), 0.0F);
  }
  ++state.t;
  const double bc1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    const double m = hyper.beta1 * state.m[i] + (1.0 - hyper.beta1) * g;
    const double v = hyper.beta2 * state.v[i] + (1.0 - hyper.beta2) * g * g;
    state.m[i] = static_cast<float>(m);
    state.v[i] = static_cast<float>(v);
    double p = params[i];
    if (decay.empty() || decay[i]) p -= lr * weight_decay * p;
    p -= lr * (m / bc1) / (std::sqrt(v / bc2) + hyper.eps);
    params[i] = static_cast<float>(p);
  }
  return true;
}

std::vector<std::uint8_t> decay_mask(const Params<float>& params) {
  std::vector<std::uint8_t> mask(params.data().size(), 0);
  for (const auto& t : params.layout()) {
    if (t.decays()) std::fill_n(mask.begin() + static_cast<std::ptrdiff_t>(t.offset), t.rows * t.cols, 1);
  }
  return mask;
}

double clip_global_norm(std::span<float> grads, double max_norm) {
  double sq = 0;
  for (float g : grads) sq += static_cast<double>(g) * g;
  const double norm = std::sqrt(sq);
  if (max_norm > 0 && norm > max_norm && std::isfinite(norm)) {
    const auto scale = static_cast<float>(max_norm / norm);
    for (float& g : grads) g *= scale;
  }
  return norm;
}

double TrainReport::final_loss() const {
  if (losses.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t k = std::min<std::size_t>(20, losses.size());
  return std::accumulate(losses.end() - static_cast<std::ptrdiff_t>(k), losses.end(), 0.0) / static_cast<double>(k);
}

double TrainReport::final_accuracy() const {
  if (accuracies.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t k = std::min<std::size_t>(20, accuracies.size());
  return std::accumulate(accuracies.end() - static_cast<std::ptrdiff_t>(k), accuracies.end(), 0.0) /
         static_cast<double>(k);
}

nlohmann::ordered_json TrainReport::to_json() const {
  nlohmann::ordered_json j;
  j["stage"] = std::string(stage_name(stage));
  j["steps"] = losses.size();
  j["batch_size"] = batch_size;
  j["initial_loss"] = losses.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(losses.front());
  j["final_loss"] = losses.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(final_loss());
  if (!accuracies.empty()) {
    j["final_in_batch_accuracy"] = final_accuracy();
    j["chance_accuracy"] = 1.0 / static_cast<double>(2 * batch_size - 1);
  }
  j["skipped_steps"] = skipped_steps;
  j["wall_seconds"] = wall_seconds;
  j["checkpoint"] = checkpoint_path;
  j["losses"] = losses;
  if (!accuracies.empty()) j["in_batch_accuracy"] = accuracies;
  return j;
}

std::string TrainReport::loss_csv() const {
  std::ostringstream out;
  out.precision(9);
  out << "step,loss,lr";
  if (!accuracies.empty()) out << ",in_batch_accuracy";
  out << "\n";
  for (std::size_t i = 0; i < losses.size(); ++i) {
    out << i + 1 << "," << losses[i] << "," << learning_rates[i];
    if (!accuracies.empty()) out << "," << accuracies[i];
    out << "\n";
  }
  return out.str();
}

std::vector<TokenId> wrap_sequence(std::span<const TokenId> ids, const Tokenizer& tokenizer, std::size_t max_len) {
  const std::size_t n = std::min(ids.size(), max_len - 2);
  std::vector<TokenId> out;
  out.reserve(n + 2);
  out.push_back(tokenizer.cls_id());
  out.insert(out.end(), ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n));
  out.push_back(tokenizer.sep_id());
  return out;
}

PaddedBatch pad_batch(const std::vector<std::vector<TokenId>>& seqs, TokenId pad_id) {
  PaddedBatch b;
  b.rows = seqs.size();
  for (const auto& s : seqs) b.width = std::max(b.width, s.size());
  b.input.assign(b.rows * b.width, pad_id);
  b.attention.assign(b.rows * b.width, 0);
  for (std::size_t r = 0; r < b.rows; ++r) {
    std::copy(seqs[r].begin(), seqs[r].end(), b.input.begin() + static_cast<std::ptrdiff_t>(r * b.width));
    std::fill_n(b.attention.begin() + static_cast<std::ptrdiff_t>(r * b.width), seqs[r].size(), 1);
  }
  return b;
}

namespace {

// Epoch-wise sampling without replacement.
class BatchSampler {
 public:
  BatchSampler(std::size_t n, Rng rng) : n_(n), rng_(rng) { reshuffle(); }

  std::vector<std::size_t> next(std::size_t k) {
    std::vector<std::size_t> out;
    while (out.size() < k) {
      if (cursor_ == order_.size()) reshuffle();
      // Within one batch every index appears at most once.
      if (std::find(out.begin(), out.end(), order_[cursor_]) != out.end() && out.size() < n_) {
        reshuffle();
        continue;
      }
      out.push_back(order_[cursor_++]);
    }
    return out;
  }

 private:
  void reshuffle() {
    order_.resize(n_);
    std::iota(order_.begin(), order_.end(), 0);
    for (std::size_t i = n_; i > 1; --i) std::swap(order_[i - 1], order_[rng_.uniform_index(i)]);
    cursor_ = 0;
  }

  std::size_t n_;
  Rng rng_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
};

encoder::EncoderConfig encoder_config(const TrainConfig& config, const Tokenizer& tokenizer) {
  auto ec = encoder::EncoderConfig::preset(config.preset, tokenizer.vocab_size(), config.max_len);
  ec.dropout = config.dropout;
  ec.seed = config.seed;
  return ec;
}

std::string checkpoint_path(const TrainConfig& config, std::string_view tag) {
  return (std::filesystem::path(config.out_dir) / ("stage" + std::string(stage_name(config.stage)) + "-" +
                                                   std::string(tag) + ".ckpt"))
      .string();
}

void maybe_checkpoint(const TrainConfig& config, const Tokenizer& tokenizer, const Params<float>& params,
                      std::size_t step, bool final_step, TrainReport& report) {
  if (config.out_dir.empty()) return;
  const bool periodic = config.checkpoint_every > 0 && step > 0 && step % config.checkpoint_every == 0;
  if (!periodic && !final_step) return;
  std::filesystem::create_directories(config.out_dir);
  encoder::CheckpointMeta meta{hex64(tokenizer.fingerprint()), step};
  if (periodic) encoder::save_checkpoint(checkpoint_path(config, "step" + std::to_string(step)), params, meta);
  if (final_step) {
    report.checkpoint_path = checkpoint_path(config, "final");
    encoder::save_checkpoint(report.checkpoint_path, params, meta);
  }
}

// Clip, update and record one step.
void apply_update(const TrainConfig& config, Params<float>& params, Params<float>& grads,
                  const std::vector<std::uint8_t>& decay, AdamWState& opt, std::size_t step, double loss,
                  TrainReport& report) {
  const double lr = lr_schedule(step, config);
  auto& g = grads.data();
  clip_global_norm(g, config.clip_norm);
  if (!std::isfinite(loss) || !optimizer_step(params.data(), g, decay, opt, lr, config.weight_decay)) {
    if (std::isfinite(loss)) {
      log::warn("non-finite gradient; step " + std::to_string(step + 1) + " skipped");
    } else {
      ++opt.skipped;
      log::warn("non-finite loss; step " + std::to_string(step + 1) + " skipped");
    }
  }
  report.losses.push_back(loss);
  report.learning_rates.push_back(lr);
  report.skipped_steps = opt.skipped;
}

}  // namespace

TrainResult train_stage1(const TrainConfig& config, const Tokenizer& tokenizer,
                         std::span<const denoiser::Stage1Item> items) {
  config.validate();
  if (config.stage != Stage::Stage1) throw ConfigError("train_stage1 called with a Stage II config");
  if (items.empty()) throw std::runtime_error("stage I dataset is empty");
  const auto t0 = std::chrono::steady_clock::now();

  Rng master(config.seed);
  Rng init_rng = master.fork(1);
  BatchSampler sampler(items.size(), master.fork(2));
  Rng mask_rng = master.fork(3);
  Rng dropout_rng = master.fork(4);

  const auto ec = encoder_config(config, tokenizer);
  TrainResult result{TrainReport{}, encoder::init_params<float>(ec, init_rng.next())};
  auto& params = result.params;
  auto& report = result.report;
  report.stage = config.stage;
  report.batch_size = config.batch_size;
  Params<float> grads(ec);
  AdamWState opt;
  const auto decay = decay_mask(params);
  auto mask_cfg = config.mask;
  mask_cfg.max_len = config.max_len;

  for (std::size_t step = 0; step < config.steps; ++step) {
    std::vector<denoiser::Stage1Item> batch_items;
    for (std::size_t i : sampler.next(std::min(config.batch_size, items.size()))) batch_items.push_back(items[i]);
    const auto batch = denoiser::collate_stage1(batch_items, mask_cfg, tokenizer, mask_rng);
    grads.set_zero();
    double loss = 0;
    if (!batch.labels.empty()) {
      const auto pass = encoder::forward<float>(params, batch.input, batch.attention, batch.rows, batch.width, true,
                                                &dropout_rng);
      // Row index within each sequence's compact hidden states equals the
      // padded position: pads only trail.
      Matrix<float> h(static_cast<Eigen::Index>(batch.labels.size()), static_cast<Eigen::Index>(ec.model_dim));
      std::vector<TokenId> labels;
      for (std::size_t i = 0; i < batch.labels.size(); ++i) {
        const auto& l = batch.labels[i];
        h.row(static_cast<Eigen::Index>(i)) = pass.seqs[l.row].hidden.row(static_cast<Eigen::Index>(l.position));
        labels.push_back(l.label);
      }
      const auto logits = encoder::mlm_logits<float>(params, h);
      const auto mlm = objectives::mlm_loss<float>(logits, labels);
      loss = mlm.loss;
      const Matrix<float> dh = encoder::mlm_logits_backward<float>(params, h, mlm.d_logits, grads);
      std::vector<Matrix<float>> d_hidden;
      for (const auto& s : pass.seqs) d_hidden.push_back(Matrix<float>::Zero(s.hidden.rows(), s.hidden.cols()));
      for (std::size_t i = 0; i < batch.labels.size(); ++i) {
        const auto& l = batch.labels[i];
        d_hidden[l.row].row(static_cast<Eigen::Index>(l.position)) += dh.row(static_cast<Eigen::Index>(i));
      }
      encoder::backward<float>(params, pass, d_hidden, grads);
    } else {
      loss = std::numeric_limits<double>::quiet_NaN();
    }
    apply_update(config, params, grads, decay, opt, step, loss, report);
    maybe_checkpoint(config, tokenizer, params, step + 1, false, report);
  }
  maybe_checkpoint(config, tokenizer, params, config.steps, true, report);
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

TrainResult train_stage2(const TrainConfig& config, const Tokenizer& tokenizer,
                         std::span<const corpus::BimodalPair> pairs, const Params<float>* init) {
  config.validate();
  if (config.stage == Stage::Stage1) throw ConfigError("train_stage2 called with a Stage I config");
  if (config.stage == Stage::Stage2 && init == nullptr) {
    throw ConfigError("stage 2 needs an initial checkpoint; use 2-scratch to start from random weights");
  }
  if (config.stage == Stage::Stage2FromScratch && init != nullptr) {
    throw ConfigError("2-scratch starts from random weights; do not pass a checkpoint");
  }
  if (pairs.size() < 2) throw std::runtime_error("stage II dataset needs at least two pairs");
  const auto t0 = std::chrono::steady_clock::now();

  Rng master(config.seed);
  Rng init_rng = master.fork(1);
  BatchSampler sampler(pairs.size(), master.fork(2));
  Rng dropout_rng = master.fork(4);

  const auto ec = encoder_config(config, tokenizer);
  TrainResult result{TrainReport{}, init ? *init : encoder::init_params<float>(ec, init_rng.next())};
  auto& params = result.params;
  if (init != nullptr && params.config().vocab_size != tokenizer.vocab_size()) {
    throw ConfigError("initial checkpoint vocabulary does not match the tokenizer");
  }
  auto& report = result.report;
  report.stage = config.stage;
  const std::size_t n = std::min(config.batch_size, pairs.size());
  report.batch_size = n;
  Params<float> grads(params.config());
  AdamWState opt;
  const auto decay = decay_mask(params);
  const std::size_t max_len = std::min(config.max_len, params.config().max_len);

  std::vector<std::vector<TokenId>> summaries;
  std::vector<std::vector<TokenId>> codes;
  for (const auto& p : pairs) {
    summaries.push_back(wrap_sequence(tokenizer.encode_ids(p.summary.text), tokenizer, max_len));
    codes.push_back(wrap_sequence(tokenizer.encode_ids(p.positive_view), tokenizer, max_len));
  }

  for (std::size_t step = 0; step < config.steps; ++step) {
    const auto idx = sampler.next(n);
    std::vector<std::vector<TokenId>> seqs;
    for (std::size_t i : idx) seqs.push_back(summaries[i]);
    for (std::size_t i : idx) seqs.push_back(codes[i]);
    const auto batch = pad_batch(seqs, tokenizer.pad_id());
    grads.set_zero();
    const auto pass = encoder::forward<float>(params, batch.input, batch.attention, batch.rows, batch.width, true,
                                              &dropout_rng);
    const Matrix<float> pooled = encoder::pool_mean<float>(pass);
    const Matrix<float> anchors = pooled.topRows(static_cast<Eigen::Index>(n));
    const Matrix<float> positives = pooled.bottomRows(static_cast<Eigen::Index>(n));
    const auto cl = objectives::contrastive_loss<float>(anchors, positives, static_cast<float>(config.tau));
    Matrix<float> d_pooled(pooled.rows(), pooled.cols());
    d_pooled.topRows(static_cast<Eigen::Index>(n)) = cl.d_anchors;
    d_pooled.bottomRows(static_cast<Eigen::Index>(n)) = cl.d_positives;
    encoder::backward<float>(params, pass, encoder::pool_mean_backward<float>(pass, d_pooled), grads);
    report.accuracies.push_back(objectives::in_batch_accuracy<float>(cl.sim));
    apply_update(config, params, grads, decay, opt, step, cl.loss, report);
    maybe_checkpoint(config, tokenizer, params, step + 1, false, report);
  }
  maybe_checkpoint(config, tokenizer, params, config.steps, true, report);
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace sageforge::trainer
