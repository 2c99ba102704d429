#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "sageforge/common.hpp"
#include "sageforge/obfuscator.hpp"
#include "sageforge/tokenizer.hpp"

namespace sageforge::denoiser {

enum class Scheme { FullMask, Conv801010, Dobf };

std::string_view scheme_name(Scheme s);

struct MaskedExample {
  std::vector<TokenId> input_ids;
  std::vector<std::pair<std::size_t, TokenId>> labels;  // (position, original id), increasing
  Scheme scheme = Scheme::FullMask;
};

// max(1, round-half-up(rate * n)), or 0 when n is 0.
std::size_t selection_count(std::size_t n, double rate);

// Uniform sample without replacement, returned sorted. Throws
// std::invalid_argument unless 0 < rate < 1.
std::vector<std::size_t> select_mask_positions(std::span<const std::size_t> maskable, double rate, Rng& rng);

struct MaskRate {
  bool dynamic = false;
  double rate = 0.15;
  double dynamic_lo = 0.10;
  double dynamic_hi = 0.50;
};

// Fixed rate, or a fresh draw from U[lo, hi] in dynamic mode.
double draw_rate(const MaskRate& rate, Rng& rng);

MaskedExample apply_full_mask(std::span<const TokenId> ids, std::span<const std::size_t> positions, TokenId mask_id);

// 80% [MASK], 10% unchanged, 10% a random id from `replacements` different
// from the original (when `replacements` offers one).
MaskedExample apply_80_10_10(std::span<const TokenId> ids, std::span<const std::size_t> positions, Rng& rng,
                             std::span<const TokenId> replacements, TokenId mask_id);

MaskedExample apply_dobf_mask(const obfuscator::DobfExample& ex);

struct SchemeConfig {
  Scheme random_scheme = Scheme::FullMask;  // FullMask or Conv801010
  MaskRate rate;
  double dobf_mix = 0.5;
  std::size_t max_len = 256;  // including [CLS] and [SEP]
};

// A function prepared for Stage I: its plain token ids and, when it has
// identifiers and the tokenizer can represent every placeholder, its DOBF view.
struct Stage1Item {
  std::vector<TokenId> ids;
  std::optional<obfuscator::DobfExample> dobf;
};

Stage1Item prepare_stage1_item(std::string_view source, Language language, const Tokenizer& tokenizer);

struct BatchLabel {
  std::size_t row = 0;
  std::size_t position = 0;
  TokenId label = 0;
};

struct Stage1Batch {
  std::size_t rows = 0;
  std::size_t width = 0;
  std::vector<TokenId> input;        // rows x width, row-major
  std::vector<std::uint8_t> attention;  // 1 on real tokens, 0 on [PAD]
  std::vector<BatchLabel> labels;     // sorted by (row, position)
  std::vector<Scheme> schemes;        // per row
};

// Wraps each item as [CLS] tokens [SEP] (tail-truncated to max_len), picks DOBF
// or random masking per item and pads to the longest row. Items left with no
// labels are dropped.
Stage1Batch collate_stage1(std::span<const Stage1Item> items, const SchemeConfig& config, const Tokenizer& tokenizer,
                           Rng& rng);

}  // namespace sageforge::denoiser
