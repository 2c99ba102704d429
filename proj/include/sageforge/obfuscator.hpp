#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sageforge/common.hpp"
#include "sageforge/syntax.hpp"
#include "sageforge/tokenizer.hpp"

namespace sageforge::obfuscator {

struct PlaceholderSpan {
  std::string placeholder;
  ByteSpan span;  // in obfuscated_text
  bool operator==(const PlaceholderSpan&) const = default;
};

struct ObfuscationResult {
  std::string obfuscated_text;
  // Ordered c_0.., f_0.., v_0.. ; placeholder -> original identifier.
  std::vector<std::pair<std::string, std::string>> identifier_map;
  std::vector<PlaceholderSpan> placeholder_spans;  // in document order

  const std::string* original_of(std::string_view placeholder) const;
};

// Renames classes (c_i), functions (f_i) and variables, parameters and
// assigned attributes (v_i) defined in the unit. Free names are renamed too
// (f_i when called, v_i otherwise) unless they are builtins or imports.
// Attribute names not assigned in the unit, keyword-argument names and
// identifiers inside error regions, strings and comments stay intact.
ObfuscationResult obfuscate(std::string_view source, const syntax::SyntaxTree& tree);
ObfuscationResult obfuscate(std::string_view source, Language language);

// Inverse of obfuscate. Throws IntegrityError when spans and map disagree.
std::string deobfuscate(const ObfuscationResult& result);

struct DobfExample {
  std::vector<TokenId> input_ids;  // placeholders expanded to [MASK] runs
  std::vector<std::pair<std::size_t, TokenId>> label_map;  // (position, label), increasing positions
  std::vector<TokenId> target_ids;  // input_ids with every mask replaced by its label
};

// Encodes the obfuscated text with placeholder spans as atomic specials and
// expands each into one [MASK] per subword of the original identifier.
// Throws IntegrityError when a placeholder is not a tokenizer special.
DobfExample build_mask_map(const ObfuscationResult& result, const Tokenizer& tokenizer);

}  // namespace sageforge::obfuscator
