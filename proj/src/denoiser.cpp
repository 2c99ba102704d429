#include "sageforge/denoiser.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sageforge::denoiser {

std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::FullMask: return "full";
    case Scheme::Conv801010: return "80-10-10";
    case Scheme::Dobf: return "dobf";
  }
  return "unknown";
}

std::size_t selection_count(std::size_t n, double rate) {
  if (n == 0) return 0;
  const auto k = static_cast<std::size_t>(std::floor(rate * static_cast<double>(n) + 0.5));
  return std::clamp<std::size_t>(k, 1, n);
}

std::vector<std::size_t> select_mask_positions(std::span<const std::size_t> maskable, double rate, Rng& rng) {
  if (!(rate > 0.0 && rate < 1.0)) throw std::invalid_argument("mask rate must lie in (0, 1)");
  const std::size_t k = selection_count(maskable.size(), rate);
  std::vector<std::size_t> pool(maskable.begin(), maskable.end());
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.uniform_index(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

double draw_rate(const MaskRate& rate, Rng& rng) {
  return rate.dynamic ? rng.uniform(rate.dynamic_lo, rate.dynamic_hi) : rate.rate;
}

MaskedExample apply_full_mask(std::span<const TokenId> ids, std::span<const std::size_t> positions, TokenId mask_id) {
  MaskedExample ex;
  ex.scheme = Scheme::FullMask;
  ex.input_ids.assign(ids.begin(), ids.end());
  for (std::size_t p : positions) {
    ex.labels.emplace_back(p, ids[p]);
    ex.input_ids[p] = mask_id;
  }
  return ex;
}

MaskedExample apply_80_10_10(std::span<const TokenId> ids, std::span<const std::size_t> positions, Rng& rng,
                             std::span<const TokenId> replacements, TokenId mask_id) {
  MaskedExample ex;
  ex.scheme = Scheme::Conv801010;
  ex.input_ids.assign(ids.begin(), ids.end());
  for (std::size_t p : positions) {
    ex.labels.emplace_back(p, ids[p]);
    const double u = rng.uniform01();
    if (u < 0.8) {
      ex.input_ids[p] = mask_id;
    } else if (u >= 0.9 && !replacements.empty()) {
      TokenId r = replacements[rng.uniform_index(replacements.size())];
      if (r == ids[p] && replacements.size() > 1) {
        // Shift to another id so the replacement always differs.
        const auto at = static_cast<std::size_t>(std::find(replacements.begin(), replacements.end(), r) -
                                                 replacements.begin());
        const std::size_t off = 1 + rng.uniform_index(replacements.size() - 1);
        r = replacements[(at + off) % replacements.size()];
      }
      ex.input_ids[p] = r;
    }
  }
  return ex;
}

MaskedExample apply_dobf_mask(const obfuscator::DobfExample& dobf) {
  MaskedExample ex;
  ex.scheme = Scheme::Dobf;
  ex.input_ids = dobf.input_ids;
  ex.labels = dobf.label_map;
  return ex;
}

Stage1Item prepare_stage1_item(std::string_view source, Language language, const Tokenizer& tokenizer) {
  Stage1Item item;
  item.ids = tokenizer.encode_ids(source);
  const auto obf = obfuscator::obfuscate(source, language);
  if (obf.identifier_map.empty()) return item;
  try {
    item.dobf = obfuscator::build_mask_map(obf, tokenizer);
  } catch (const IntegrityError&) {
    // More placeholders than the tokenizer reserves; random masking only.
  }
  return item;
}

Stage1Batch collate_stage1(std::span<const Stage1Item> items, const SchemeConfig& config, const Tokenizer& tokenizer,
                           Rng& rng) {
  if (config.max_len < 3) throw ConfigError("seq.max_len must be at least 3");
  const std::size_t budget = config.max_len - 2;
  const auto replacements = tokenizer.ordinary_ids();

  std::vector<MaskedExample> rows;
  for (const auto& item : items) {
    const bool coin = rng.bernoulli(config.dobf_mix);
    MaskedExample ex;
    if (coin && item.dobf) {
      ex = apply_dobf_mask(*item.dobf);
      if (ex.input_ids.size() > budget) {
        ex.input_ids.resize(budget);
        std::erase_if(ex.labels, [&](const auto& l) { return l.first >= budget; });
      }
    } else {
      const std::size_t n = std::min(item.ids.size(), budget);
      std::span<const TokenId> ids(item.ids.data(), n);
      std::vector<std::size_t> maskable;
      for (std::size_t i = 0; i < n; ++i) {
        if (!tokenizer.is_special(ids[i])) maskable.push_back(i);
      }
      const double rate = draw_rate(config.rate, rng);
      const auto positions = maskable.empty() ? std::vector<std::size_t>{}
                                              : select_mask_positions(maskable, rate, rng);
      ex = config.random_scheme == Scheme::Conv801010
               ? apply_80_10_10(ids, positions, rng, replacements, tokenizer.mask_id())
               : apply_full_mask(ids, positions, tokenizer.mask_id());
    }
    if (ex.labels.empty()) continue;
    rows.push_back(std::move(ex));
  }

  Stage1Batch b;
  b.rows = rows.size();
  for (const auto& r : rows) b.width = std::max(b.width, r.input_ids.size() + 2);
  b.input.assign(b.rows * b.width, tokenizer.pad_id());
  b.attention.assign(b.rows * b.width, 0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& ex = rows[r];
    TokenId* row = b.input.data() + r * b.width;
    std::uint8_t* att = b.attention.data() + r * b.width;
    row[0] = tokenizer.cls_id();
    std::copy(ex.input_ids.begin(), ex.input_ids.end(), row + 1);
    row[ex.input_ids.size() + 1] = tokenizer.sep_id();
    std::fill(att, att + ex.input_ids.size() + 2, 1);
    for (const auto& [pos, label] : ex.labels) b.labels.push_back({r, pos + 1, label});
    b.schemes.push_back(ex.scheme);
  }
  return b;
}

}  // namespace sageforge::denoiser
