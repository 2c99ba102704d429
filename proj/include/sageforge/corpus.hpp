#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sageforge/common.hpp"
#include "sageforge/syntax.hpp"
#include "sageforge/tokenizer.hpp"

namespace sageforge::corpus {

struct SourceFile {
  std::string path;
  Language language = Language::Python;
  std::string content;  // valid UTF-8
  std::uint64_t content_hash = 0;
};

// Repairs `content` and hashes the repaired bytes.
SourceFile make_source_file(std::string path, Language language, std::string_view content);

struct IngestResult {
  std::vector<SourceFile> files;
  std::vector<std::string> warnings;
};

// Files under `root` (recursive) with the language's extension, sorted by
// path. Files that cannot be read or are not UTF-8 are skipped with a warning.
// Throws std::runtime_error if root is not a readable directory.
IngestResult ingest_directory(const std::filesystem::path& root, Language language);

// Spans are absolute offsets into the owning file's content.
struct SourceFunction {
  std::uint64_t file_hash = 0;
  std::string name;
  ByteSpan span;            // `def` (or `async`) through the end of the body
  ByteSpan signature_span;  // through the ':' ending the header
  ByteSpan body_span;
  std::vector<ByteSpan> return_statement_spans;  // includes nested defs
  std::optional<ByteSpan> docstring_span;        // the string literal
  std::optional<std::string> docstring;          // literal contents, quotes stripped
  std::string source_text;                       // content[span]
  std::size_t body_code_lines = 0;               // lines with code, excluding docstring and comments
  Language language = Language::Python;

  ByteSpan relative(ByteSpan s) const { return {s.begin - span.begin, s.end - span.begin}; }
};

// Every function definition outside error regions, in source order.
std::vector<SourceFunction> extract_functions(const SourceFile& file);
std::vector<SourceFunction> extract_functions(const SourceFile& file, const syntax::SyntaxTree& tree);

struct Summary {
  std::string text;
  std::size_t token_count = 0;
};

// Docstring cleaning without token counting: repair, URL removal, HTML and
// doctag removal, first sentence, whitespace collapse.
std::string clean_summary_text(std::string_view docstring);

std::optional<Summary> extract_summary(std::string_view docstring, const Tokenizer& tokenizer);

enum class FilterReason { Ok, NoDocstring, NotEnglish, TooShort, TooLong, EmptyBody };

std::string_view filter_reason_name(FilterReason r);

struct FilterVerdict {
  bool accepted = false;
  FilterReason reason = FilterReason::NoDocstring;
};

inline constexpr std::size_t kMinSummaryTokens = 3;
inline constexpr std::size_t kMaxSummaryTokens = 256;

bool looks_english(std::string_view text);

FilterVerdict filter_bimodal(const SourceFunction& fn, const std::optional<Summary>& summary);

struct HardPositive {
  std::string text;
  bool fallback = false;
};

// Function body with the signature, every return statement and the docstring
// removed, dedented. Falls back to the whole body (returns kept) if nothing
// is left.
HardPositive make_hard_positive(const SourceFunction& fn);

struct BimodalPair {
  Summary summary;
  std::string positive_view;
  bool fallback = false;
  Language language = Language::Python;
  std::string origin_hash;
  std::string origin_path;
  std::string origin_name;
  std::string origin_text;  // full function source; not serialized
};

struct PairDataset {
  std::vector<BimodalPair> pairs;
  std::map<FilterReason, std::size_t> histogram;  // reasons that occurred
  std::size_t functions = 0;
};

struct PairOptions {
  std::size_t threads = 1;
};

// Deterministic for identical inputs regardless of `threads`.
PairDataset build_pair_dataset(std::span<const SourceFile> files, const Tokenizer& tokenizer,
                               const PairOptions& options = {});

std::string pair_to_jsonl_line(const BimodalPair& pair);
void write_pairs_jsonl(const std::string& path, std::span<const BimodalPair> pairs);
std::vector<BimodalPair> read_pairs_jsonl(const std::string& path);
std::string histogram_json(const PairDataset& dataset);

// Mean lexical overlaps between code regions and docstring/summary tokens,
// computed over functions that have a docstring. Whitespace-only tokens are
// ignored.
struct OverlapTable {
  std::size_t functions = 0;
  double signature_vs_docstring = 0;
  double body_vs_docstring = 0;
  double signature_vs_summary = 0;
  double body_vs_summary = 0;
};

OverlapTable overlap_table(std::span<const SourceFile> files, const Tokenizer& tokenizer);

// Mean overlap of summary tokens with the hard positive and with the full
// function text, over the given pairs.
struct OverlapReduction {
  std::size_t pairs = 0;
  double summary_vs_positive = 0;
  double summary_vs_function = 0;
};

OverlapReduction overlap_reduction(std::span<const BimodalPair> pairs, const Tokenizer& tokenizer);

// Token ids of `text` with whitespace-only tokens dropped.
std::vector<TokenId> content_tokens(std::string_view text, const Tokenizer& tokenizer);

}  // namespace sageforge::corpus
