#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sageforge/common.hpp"

namespace sageforge {

using TokenId = std::int32_t;

struct EncodedToken {
  TokenId id;
  ByteSpan span;
  bool operator==(const EncodedToken&) const = default;
};

struct TokenizerOptions {
  // Number of c_i / f_i / v_i placeholder specials reserved per family.
  std::size_t placeholders_per_family = 64;
  // Merges whose pair frequency falls below this stop training early.
  std::size_t min_pair_frequency = 2;
};

// Byte-level BPE. Ids 0..255 are raw bytes, followed by the special tokens
// ([PAD], [CLS], [SEP], [MASK], placeholders) and then learned merges.
class Tokenizer {
 public:
  static constexpr std::string_view kFormatVersion = "bpe-v1";

  // Learns merges by repeatedly taking the most frequent adjacent pair
  // (ties broken by the lexicographic order of the pair's bytes).
  // `seed` is recorded in the tokenizer file; training itself draws no
  // randomness.
  static Tokenizer train(std::span<const std::string> corpus, std::size_t vocab_size,
                         std::uint64_t seed, const TokenizerOptions& options = {});

  // Plain encoding. Special-token text is treated as ordinary bytes.
  std::vector<EncodedToken> encode(std::string_view s) const;
  std::vector<TokenId> encode_ids(std::string_view s) const;

  // Encodes each boundary range independently of its surroundings so that no
  // token straddles a boundary edge. A boundary whose text is exactly a
  // special token yields that single special id.
  std::vector<EncodedToken> encode_with_boundaries(std::string_view s,
                                                   std::span<const ByteSpan> boundaries) const;

  std::string decode(std::span<const TokenId> ids) const;

  std::size_t vocab_size() const { return tokens_.size(); }
  std::string_view token_bytes(TokenId id) const;
  bool is_special(TokenId id) const { return id >= first_special_ && id < first_merge_; }
  std::optional<TokenId> special_id(std::string_view text) const;
  // Ids that may be drawn as random replacements (bytes and merges).
  std::vector<TokenId> ordinary_ids() const;

  TokenId pad_id() const { return first_special_ + 0; }
  TokenId cls_id() const { return first_special_ + 1; }
  TokenId sep_id() const { return first_special_ + 2; }
  TokenId mask_id() const { return first_special_ + 3; }

  std::size_t num_merges() const { return merges_.size(); }
  std::pair<TokenId, TokenId> merge(std::size_t rank) const { return merges_.at(rank); }
  std::uint64_t seed() const { return seed_; }
  // Digest of vocabulary and merges; checkpoints record it to detect mismatches.
  std::uint64_t fingerprint() const;

  nlohmann::ordered_json to_json() const;
  static Tokenizer from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static Tokenizer load(const std::string& path);

  // Chunks never merged across: letter runs, digit runs, '_', whitespace
  // runs, punctuation runs.
  static std::vector<ByteSpan> pretokenize(std::string_view s);

 private:
  Tokenizer() = default;
  void init_base(const TokenizerOptions& options);
  TokenId add_merge(TokenId left, TokenId right);
  void encode_chunk(std::string_view s, std::size_t offset, std::vector<EncodedToken>& out) const;

  std::vector<std::string> tokens_;  // id -> bytes
  std::vector<std::pair<TokenId, TokenId>> merges_;
  std::unordered_map<std::uint64_t, std::pair<std::int32_t, TokenId>> merge_rank_;  // pair -> (rank, id)
  std::unordered_map<std::string, TokenId> special_lookup_;
  std::unordered_map<std::string, TokenId> ordinary_lookup_;
  TokenId first_special_ = 256;
  TokenId first_merge_ = 256;
  std::uint64_t seed_ = 0;
  TokenizerOptions options_;
};

}  // namespace sageforge
