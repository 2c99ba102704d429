#include "sageforge/tokenizer.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <stdexcept>

namespace sageforge {

namespace {

std::uint64_t pair_key(TokenId a, TokenId b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

enum class CharClass { Letter, Digit, Underscore, Space, Punct };

CharClass classify(unsigned char c) {
  if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80) return CharClass::Letter;
  if (c >= '0' && c <= '9') return CharClass::Digit;
  if (c == '_') return CharClass::Underscore;
  if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v')
    return CharClass::Space;
  return CharClass::Punct;
}

// GPT-2 style reversible mapping of bytes onto printable code points, so
// token strings are valid UTF-8 in the JSON file.
const std::array<std::string, 256>& byte_to_unicode() {
  static const std::array<std::string, 256> table = [] {
    std::array<std::string, 256> t;
    auto encode_cp = [](std::uint32_t cp) {
      std::string out;
      if (cp < 0x80) {
        out += static_cast<char>(cp);
      } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
      } else {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
      }
      return out;
    };
    std::uint32_t next = 256;
    for (int b = 0; b < 256; ++b) {
      const bool printable = (b >= '!' && b <= '~') || (b >= 0xA1 && b <= 0xAC) || (b >= 0xAE);
      t[b] = encode_cp(printable ? static_cast<std::uint32_t>(b) : next++);
    }
    return t;
  }();
  return table;
}

std::string to_printable(std::string_view bytes) {
  const auto& table = byte_to_unicode();
  std::string out;
  for (unsigned char c : bytes) out += table[c];
  return out;
}

std::string from_printable(std::string_view text) {
  static const std::map<std::string, unsigned char> reverse = [] {
    std::map<std::string, unsigned char> m;
    const auto& table = byte_to_unicode();
    for (int b = 0; b < 256; ++b) m[table[b]] = static_cast<unsigned char>(b);
    return m;
  }();
  std::string out;
  for (std::size_t i = 0; i < text.size();) {
    const auto c = static_cast<unsigned char>(text[i]);
    const std::size_t len = c < 0x80 ? 1 : (c & 0xE0) == 0xC0 ? 2 : (c & 0xF0) == 0xE0 ? 3 : 4;
    auto it = reverse.find(std::string(text.substr(i, len)));
    if (it == reverse.end()) throw std::invalid_argument("tokenizer file: unmappable token text");
    out += static_cast<char>(it->second);
    i += len;
  }
  return out;
}

}  // namespace

std::vector<ByteSpan> Tokenizer::pretokenize(std::string_view s) {
  std::vector<ByteSpan> chunks;
  std::size_t i = 0;
  while (i < s.size()) {
    const CharClass cls = classify(static_cast<unsigned char>(s[i]));
    std::size_t j = i + 1;
    if (cls != CharClass::Underscore) {
      while (j < s.size() && classify(static_cast<unsigned char>(s[j])) == cls) ++j;
    }
    chunks.push_back({i, j});
    i = j;
  }
  return chunks;
}

void Tokenizer::init_base(const TokenizerOptions& options) {
  options_ = options;
  tokens_.clear();
  merges_.clear();
  merge_rank_.clear();
  special_lookup_.clear();
  ordinary_lookup_.clear();
  for (int b = 0; b < 256; ++b) {
    tokens_.emplace_back(1, static_cast<char>(b));
    ordinary_lookup_.emplace(tokens_.back(), b);
  }
  first_special_ = 256;
  std::vector<std::string> specials = {"[PAD]", "[CLS]", "[SEP]", "[MASK]"};
  for (char family : {'c', 'f', 'v'}) {
    for (std::size_t i = 0; i < options.placeholders_per_family; ++i) {
      specials.push_back(std::string(1, family) + "_" + std::to_string(i));
    }
  }
  for (auto& sp : specials) {
    special_lookup_[sp] = static_cast<TokenId>(tokens_.size());
    tokens_.push_back(std::move(sp));
  }
  first_merge_ = static_cast<TokenId>(tokens_.size());
}

TokenId Tokenizer::add_merge(TokenId left, TokenId right) {
  std::string bytes = tokens_[left] + tokens_[right];
  TokenId id;
  if (auto it = ordinary_lookup_.find(bytes); it != ordinary_lookup_.end()) {
    // Two merge paths can spell the same bytes; they share one id.
    id = it->second;
  } else {
    id = static_cast<TokenId>(tokens_.size());
    ordinary_lookup_.emplace(bytes, id);
    tokens_.push_back(std::move(bytes));
  }
  merge_rank_[pair_key(left, right)] = {static_cast<std::int32_t>(merges_.size()), id};
  merges_.emplace_back(left, right);
  return id;
}

Tokenizer Tokenizer::train(std::span<const std::string> corpus, std::size_t vocab_size,
                           std::uint64_t seed, const TokenizerOptions& options) {
  Tokenizer tok;
  tok.init_base(options);
  tok.seed_ = seed;
  if (vocab_size <= tok.tokens_.size()) {
    throw ConfigError("vocab_size " + std::to_string(vocab_size) +
                      " leaves no room for merges (bytes + specials = " +
                      std::to_string(tok.tokens_.size()) + ")");
  }

  std::map<std::string, std::size_t> chunk_counts;
  for (const auto& text : corpus) {
    for (const auto& span : pretokenize(text)) {
      ++chunk_counts[text.substr(span.begin, span.size())];
    }
  }
  std::vector<std::vector<TokenId>> words;
  std::vector<std::size_t> freqs;
  words.reserve(chunk_counts.size());
  for (const auto& [chunk, count] : chunk_counts) {
    if (chunk.size() < 2) continue;
    std::vector<TokenId> syms;
    for (unsigned char c : chunk) syms.push_back(static_cast<TokenId>(c));
    words.push_back(std::move(syms));
    freqs.push_back(count);
  }

  std::unordered_map<std::uint64_t, std::size_t> pair_counts;
  while (tok.tokens_.size() < vocab_size) {
    pair_counts.clear();
    for (std::size_t w = 0; w < words.size(); ++w) {
      const auto& syms = words[w];
      for (std::size_t k = 0; k + 1 < syms.size(); ++k) {
        pair_counts[pair_key(syms[k], syms[k + 1])] += freqs[w];
      }
    }
    std::uint64_t best = 0;
    std::size_t best_count = 0;
    for (const auto& [key, count] : pair_counts) {
      if (count < best_count) continue;
      if (count == best_count) {
        const auto a = static_cast<TokenId>(key >> 32), b = static_cast<TokenId>(key & 0xffffffff);
        const auto ba = static_cast<TokenId>(best >> 32), bb = static_cast<TokenId>(best & 0xffffffff);
        if (std::tie(tok.tokens_[a], tok.tokens_[b]) >= std::tie(tok.tokens_[ba], tok.tokens_[bb]))
          continue;
      }
      best = key;
      best_count = count;
    }
    if (best_count < std::max<std::size_t>(1, options.min_pair_frequency)) break;

    const auto left = static_cast<TokenId>(best >> 32);
    const auto right = static_cast<TokenId>(best & 0xffffffff);
    const TokenId merged = tok.add_merge(left, right);
    for (auto& syms : words) {
      std::size_t out = 0;
      for (std::size_t k = 0; k < syms.size(); ++k) {
        if (k + 1 < syms.size() && syms[k] == left && syms[k + 1] == right) {
          syms[out++] = merged;
          ++k;
        } else {
          syms[out++] = syms[k];
        }
      }
      syms.resize(out);
    }
  }
  return tok;
}

void Tokenizer::encode_chunk(std::string_view s, std::size_t offset,
                             std::vector<EncodedToken>& out) const {
  struct Sym {
    TokenId id;
    std::size_t begin, end;
  };
  std::vector<Sym> syms;
  syms.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    syms.push_back({static_cast<TokenId>(static_cast<unsigned char>(s[i])), i, i + 1});
  }
  while (syms.size() > 1) {
    std::int32_t best_rank = -1;
    TokenId best_id = -1;
    std::size_t best_pos = 0;
    for (std::size_t k = 0; k + 1 < syms.size(); ++k) {
      auto it = merge_rank_.find(pair_key(syms[k].id, syms[k + 1].id));
      if (it == merge_rank_.end()) continue;
      if (best_rank < 0 || it->second.first < best_rank) {
        best_rank = it->second.first;
        best_id = it->second.second;
        best_pos = k;
      }
    }
    if (best_rank < 0) break;
    const auto [left, right] = merges_[static_cast<std::size_t>(best_rank)];
    std::vector<Sym> next;
    next.reserve(syms.size());
    for (std::size_t k = 0; k < syms.size(); ++k) {
      if (k >= best_pos && k + 1 < syms.size() && syms[k].id == left && syms[k + 1].id == right) {
        next.push_back({best_id, syms[k].begin, syms[k + 1].end});
        ++k;
      } else {
        next.push_back(syms[k]);
      }
    }
    syms = std::move(next);
  }
  for (const auto& sym : syms) out.push_back({sym.id, {offset + sym.begin, offset + sym.end}});
}

std::vector<EncodedToken> Tokenizer::encode(std::string_view s) const {
  std::vector<EncodedToken> out;
  out.reserve(s.size() / 2 + 1);
  for (const auto& chunk : pretokenize(s)) {
    encode_chunk(s.substr(chunk.begin, chunk.size()), chunk.begin, out);
  }
  return out;
}

std::vector<TokenId> Tokenizer::encode_ids(std::string_view s) const {
  std::vector<TokenId> ids;
  for (const auto& t : encode(s)) ids.push_back(t.id);
  return ids;
}

std::vector<EncodedToken> Tokenizer::encode_with_boundaries(
    std::string_view s, std::span<const ByteSpan> boundaries) const {
  std::vector<ByteSpan> sorted(boundaries.begin(), boundaries.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const ByteSpan& a, const ByteSpan& b) { return a.begin < b.begin; });
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    if (sorted[k].begin > sorted[k].end || sorted[k].end > s.size()) {
      throw std::invalid_argument("encode_with_boundaries: boundary outside input");
    }
    if (k > 0 && sorted[k - 1].end > sorted[k].begin) {
      throw std::invalid_argument("encode_with_boundaries: overlapping boundaries");
    }
  }
  std::vector<EncodedToken> out;
  auto encode_segment = [&](std::size_t begin, std::size_t end) {
    if (begin == end) return;
    for (auto t : encode(s.substr(begin, end - begin))) {
      t.span.begin += begin;
      t.span.end += begin;
      out.push_back(t);
    }
  };
  std::size_t cursor = 0;
  for (const auto& b : sorted) {
    encode_segment(cursor, b.begin);
    const auto text = s.substr(b.begin, b.size());
    if (auto sp = special_id(text)) {
      out.push_back({*sp, b});
    } else {
      encode_segment(b.begin, b.end);
    }
    cursor = b.end;
  }
  encode_segment(cursor, s.size());
  return out;
}

std::string Tokenizer::decode(std::span<const TokenId> ids) const {
  std::string out;
  for (TokenId id : ids) out += token_bytes(id);
  return out;
}

std::string_view Tokenizer::token_bytes(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw std::invalid_argument("unknown token id " + std::to_string(id));
  }
  return tokens_[static_cast<std::size_t>(id)];
}

std::optional<TokenId> Tokenizer::special_id(std::string_view text) const {
  auto it = special_lookup_.find(std::string(text));
  if (it == special_lookup_.end()) return std::nullopt;
  return it->second;
}

std::vector<TokenId> Tokenizer::ordinary_ids() const {
  std::vector<TokenId> ids;
  for (TokenId id = 0; id < static_cast<TokenId>(tokens_.size()); ++id) {
    if (!is_special(id)) ids.push_back(id);
  }
  return ids;
}

std::uint64_t Tokenizer::fingerprint() const {
  std::uint64_t h = fnv1a64("bpe-v1");
  for (const auto& t : tokens_) {
    h = fnv1a64(t, h);
    h = fnv1a64(std::string_view("\x00", 1), h);
  }
  return h;
}

nlohmann::ordered_json Tokenizer::to_json() const {
  nlohmann::ordered_json j;
  j["version"] = kFormatVersion;
  j["seed"] = seed_;
  j["placeholders_per_family"] = options_.placeholders_per_family;
  nlohmann::ordered_json specials = nlohmann::ordered_json::array();
  for (TokenId id = first_special_; id < first_merge_; ++id) specials.push_back(tokens_[id]);
  j["specials"] = specials;
  nlohmann::ordered_json vocab = nlohmann::ordered_json::object();
  for (TokenId id = 0; id < static_cast<TokenId>(tokens_.size()); ++id) {
    if (is_special(id)) continue;
    vocab[to_printable(tokens_[id])] = id;
  }
  j["vocab"] = vocab;
  nlohmann::ordered_json merges = nlohmann::ordered_json::array();
  for (const auto& [a, b] : merges_) {
    merges.push_back(to_printable(tokens_[a]) + " " + to_printable(tokens_[b]));
  }
  j["merges"] = merges;
  return j;
}

Tokenizer Tokenizer::from_json(const nlohmann::json& j) {
  if (j.value("version", "") != kFormatVersion) {
    throw ConfigError("unsupported tokenizer format (expected bpe-v1)");
  }
  TokenizerOptions options;
  options.placeholders_per_family = j.at("placeholders_per_family").get<std::size_t>();
  Tokenizer tok;
  tok.init_base(options);
  tok.seed_ = j.value("seed", std::uint64_t{0});
  const auto& specials = j.at("specials");
  if (specials.size() != static_cast<std::size_t>(tok.first_merge_ - tok.first_special_)) {
    throw ConfigError("tokenizer file: special token table does not match placeholder count");
  }
  for (std::size_t k = 0; k < specials.size(); ++k) {
    if (specials[k].get<std::string>() != tok.tokens_[tok.first_special_ + k]) {
      throw ConfigError("tokenizer file: unexpected special token order");
    }
  }
  for (const auto& entry : j.at("merges")) {
    const auto text = entry.get<std::string>();
    const auto space = text.find(' ');
    if (space == std::string::npos) throw ConfigError("tokenizer file: malformed merge");
    const auto left = tok.ordinary_lookup_.find(from_printable(text.substr(0, space)));
    const auto right = tok.ordinary_lookup_.find(from_printable(text.substr(space + 1)));
    if (left == tok.ordinary_lookup_.end() || right == tok.ordinary_lookup_.end()) {
      throw ConfigError("tokenizer file: merge references unknown token");
    }
    tok.add_merge(left->second, right->second);
  }
  for (const auto& [text, id] : j.at("vocab").items()) {
    const auto idx = id.get<TokenId>();
    if (idx < 0 || static_cast<std::size_t>(idx) >= tok.tokens_.size() ||
        tok.tokens_[idx] != from_printable(text)) {
      throw ConfigError("tokenizer file: vocab disagrees with merges");
    }
  }
  return tok;
}

void Tokenizer::save(const std::string& path) const { write_file(path, to_json().dump(1) + "\n"); }

Tokenizer Tokenizer::load(const std::string& path) {
  return from_json(nlohmann::json::parse(read_file(path)));
}

}  // namespace sageforge
