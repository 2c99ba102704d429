#include "sageforge/corpus.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace sageforge::corpus {

namespace fs = std::filesystem;
using syntax::Field;
using syntax::kNoNode;
using syntax::LexKind;
using syntax::NodeId;
using syntax::NodeKind;
using syntax::SyntaxTree;

SourceFile make_source_file(std::string path, Language language, std::string_view content) {
  SourceFile f;
  f.path = std::move(path);
  f.language = language;
  f.content = repair_utf8(content);
  f.content_hash = fnv1a64(f.content);
  return f;
}

IngestResult ingest_directory(const fs::path& root, Language language) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw std::runtime_error("input directory not found: " + root.string());
  }
  std::vector<fs::path> paths;
  const auto ext = language_extension(language);
  for (fs::recursive_directory_iterator it(root, ec), end; it != end; it.increment(ec)) {
    if (ec) break;
    if (it->is_regular_file(ec) && it->path().extension() == ext) paths.push_back(it->path());
  }
  if (ec) throw std::runtime_error("cannot read directory " + root.string() + ": " + ec.message());
  std::sort(paths.begin(), paths.end());

  IngestResult out;
  for (const auto& p : paths) {
    std::ifstream in(p, std::ios::binary);
    if (!in) {
      out.warnings.push_back("unreadable file skipped: " + p.string());
      log::warn(out.warnings.back());
      continue;
    }
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (!is_valid_utf8(bytes)) {
      out.warnings.push_back("non-UTF-8 file skipped: " + p.string());
      log::warn(out.warnings.back());
      continue;
    }
    out.files.push_back(make_source_file(p.string(), language, bytes));
  }
  return out;
}

namespace {

std::string strip_string_quotes(std::string_view lit) {
  std::size_t i = 0;
  while (i < lit.size() && lit[i] != '"' && lit[i] != '\'') ++i;
  lit.remove_prefix(i);
  if (lit.size() >= 6 && (lit.starts_with("\"\"\"") || lit.starts_with("'''"))) {
    lit.remove_prefix(3);
    if (lit.size() >= 3 && (lit.ends_with("\"\"\"") || lit.ends_with("'''"))) lit.remove_suffix(3);
  } else if (!lit.empty()) {
    const char q = lit.front();
    lit.remove_prefix(1);
    if (!lit.empty() && lit.back() == q) lit.remove_suffix(1);
  }
  return std::string(lit);
}

// The string leaf of a docstring statement, or kNoNode.
NodeId docstring_leaf(const SyntaxTree& tree, NodeId body) {
  for (NodeId stmt : tree.node(body).children) {
    const auto& s = tree.node(stmt);
    if (s.kind == NodeKind::Leaf) {
      if (tree.tokens()[static_cast<std::size_t>(s.token)].kind == LexKind::Comment) continue;
      return kNoNode;
    }
    if (s.kind != NodeKind::ExprStmt || s.children.size() != 1) return kNoNode;
    NodeId e = s.children.front();
    if (tree.node(e).kind == NodeKind::StringConcat) e = tree.node(e).children.front();
    const auto& en = tree.node(e);
    if (en.kind == NodeKind::Leaf && tree.tokens()[static_cast<std::size_t>(en.token)].kind == LexKind::String) {
      return e;
    }
    return kNoNode;
  }
  return kNoNode;
}

SourceFunction make_function(const SourceFile& file, const SyntaxTree& tree, NodeId def) {
  const auto& node = tree.node(def);
  const NodeId name = tree.child_by_field(def, Field::Name);
  const NodeId body = tree.child_by_field(def, Field::Body);

  SourceFunction fn;
  fn.file_hash = file.content_hash;
  fn.language = file.language;
  fn.name = std::string(tree.text(name));
  fn.span = node.span;
  fn.body_span = tree.node(body).span;
  // The header ends at the ':' leaf just before the body.
  std::size_t header_end = fn.body_span.begin;
  for (std::size_t i = 1; i < node.children.size(); ++i) {
    if (node.children[i] == body) header_end = tree.node(node.children[i - 1]).span.end;
  }
  fn.signature_span = {node.span.begin, header_end};
  fn.source_text = file.content.substr(fn.span.begin, fn.span.size());

  tree.walk(body, [&](NodeId n) {
    if (tree.node(n).kind == NodeKind::ReturnStmt) fn.return_statement_spans.push_back(tree.node(n).span);
  });

  const NodeId doc = docstring_leaf(tree, body);
  if (doc != kNoNode) {
    fn.docstring_span = tree.node(doc).span;
    fn.docstring = strip_string_quotes(tree.text(doc));
  }

  std::vector<std::size_t> lines;
  tree.walk(body, [&](NodeId n) {
    const auto& nn = tree.node(n);
    if (nn.kind != NodeKind::Leaf || n == doc) return;
    if (tree.tokens()[static_cast<std::size_t>(nn.token)].kind == LexKind::Comment) return;
    lines.push_back(tree.line_of(nn.span.begin));
  });
  std::sort(lines.begin(), lines.end());
  fn.body_code_lines = static_cast<std::size_t>(std::unique(lines.begin(), lines.end()) - lines.begin());
  return fn;
}

}  // namespace

std::vector<SourceFunction> extract_functions(const SourceFile& file) {
  const auto tree = syntax::parse(file.content, file.language);
  return extract_functions(file, tree);
}

std::vector<SourceFunction> extract_functions(const SourceFile& file, const SyntaxTree& tree) {
  std::vector<SourceFunction> out;
  tree.walk(tree.root(), [&](NodeId n) {
    if (tree.node(n).kind == NodeKind::FunctionDef && !tree.inside_error(n)) {
      out.push_back(make_function(file, tree, n));
    }
  });
  return out;
}

std::string clean_summary_text(std::string_view docstring) {
  static const std::regex url(R"(https?://\S+)");
  static const std::regex html(R"(<[^>]+>)");
  static const std::regex sphinx(R"(:(param|parameter|arg|argument|key|keyword|type|raises|raise|except|exception|var|ivar|cvar|vartype|returns|return|rtype)\b[^:\n]*:)");
  static const std::regex javadoc(R"(@(param|arg|argument|type|returns|return|rtype|throws|raises|exception|see|since|author|deprecated)\b)");

  std::string s = repair_utf8(docstring);
  s = std::regex_replace(s, url, "");
  s = std::regex_replace(s, html, "");
  s = std::regex_replace(s, sphinx, "");
  s = std::regex_replace(s, javadoc, "");

  // Leading blank lines are not a paragraph break.
  std::size_t start = s.find_first_not_of(" \t\r\n");
  if (start == std::string::npos) return "";
  std::size_t cut = s.size();
  for (std::size_t i = start; i < s.size(); ++i) {
    const char c = s[i];
    if ((c == '.' || c == '!' || c == '?') &&
        (i + 1 == s.size() || std::isspace(static_cast<unsigned char>(s[i + 1])))) {
      cut = i + 1;
      break;
    }
    if (c == '\n') {
      std::size_t j = i + 1;
      while (j < s.size() && (s[j] == ' ' || s[j] == '\t' || s[j] == '\r')) ++j;
      if (j == s.size() || s[j] == '\n') {
        cut = i;
        break;
      }
    }
  }

  std::string out;
  bool pending_space = false;
  for (std::size_t i = start; i < cut; ++i) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (std::isspace(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(c));
  }
  return out;
}

std::optional<Summary> extract_summary(std::string_view docstring, const Tokenizer& tokenizer) {
  std::string text = clean_summary_text(docstring);
  if (text.empty()) return std::nullopt;
  Summary s;
  s.token_count = tokenizer.encode(text).size();
  s.text = std::move(text);
  return s;
}

std::string_view filter_reason_name(FilterReason r) {
  switch (r) {
    case FilterReason::Ok: return "Ok";
    case FilterReason::NoDocstring: return "NoDocstring";
    case FilterReason::NotEnglish: return "NotEnglish";
    case FilterReason::TooShort: return "TooShort";
    case FilterReason::TooLong: return "TooLong";
    case FilterReason::EmptyBody: return "EmptyBody";
  }
  return "Unknown";
}

bool looks_english(std::string_view text) {
  std::size_t chars = 0;
  std::size_t ascii = 0;
  bool letter = false;
  for (unsigned char c : text) {
    if ((c & 0xC0) == 0x80) continue;  // continuation byte
    ++chars;
    if (c < 0x80) {
      ++ascii;
      if (std::isalpha(c)) letter = true;
    }
  }
  return letter && ascii * 10 >= chars * 9;
}

FilterVerdict filter_bimodal(const SourceFunction& fn, const std::optional<Summary>& summary) {
  auto reject = [](FilterReason r) { return FilterVerdict{false, r}; };
  if (!fn.docstring || !summary) return reject(FilterReason::NoDocstring);
  if (!looks_english(summary->text)) return reject(FilterReason::NotEnglish);
  if (summary->token_count < kMinSummaryTokens) return reject(FilterReason::TooShort);
  if (summary->token_count > kMaxSummaryTokens) return reject(FilterReason::TooLong);
  if (fn.body_code_lines <= 1) return reject(FilterReason::EmptyBody);
  return {true, FilterReason::Ok};
}

namespace {

std::size_t leading_ws(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  return i;
}

bool blank(std::string_view line) { return leading_ws(line) == line.size(); }

// Removes the relative byte ranges in `cuts` from `text`. Lines that lose
// bytes and end up blank disappear; the rest is dedented.
std::string cut_and_dedent(std::string_view text, std::vector<ByteSpan> cuts) {
  std::sort(cuts.begin(), cuts.end(), [](const ByteSpan& a, const ByteSpan& b) { return a.begin < b.begin; });
  std::vector<std::string> lines;
  std::size_t ci = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string kept;
    bool touched = false;
    for (std::size_t i = pos; i < nl; ++i) {
      while (ci < cuts.size() && cuts[ci].end <= i) ++ci;
      if (ci < cuts.size() && cuts[ci].begin <= i) {
        touched = true;
        continue;
      }
      kept.push_back(text[i]);
    }
    if (touched) {
      while (!kept.empty() && (kept.back() == ' ' || kept.back() == '\t' || kept.back() == '\r')) kept.pop_back();
      if (!blank(kept)) lines.push_back(std::move(kept));
    } else {
      lines.push_back(std::move(kept));
    }
    if (nl == text.size()) break;
    pos = nl + 1;
  }
  while (!lines.empty() && blank(lines.back())) lines.pop_back();
  std::size_t first = 0;
  while (first < lines.size() && blank(lines[first])) ++first;
  std::size_t indent = std::string::npos;
  for (std::size_t i = first; i < lines.size(); ++i) {
    if (!blank(lines[i])) indent = std::min(indent, leading_ws(lines[i]));
  }
  std::string out;
  for (std::size_t i = first; i < lines.size(); ++i) {
    if (i > first) out.push_back('\n');
    if (!blank(lines[i])) out.append(lines[i], indent, std::string::npos);
  }
  return out;
}

}  // namespace

HardPositive make_hard_positive(const SourceFunction& fn) {
  std::vector<ByteSpan> cuts{fn.relative(fn.signature_span)};
  if (fn.docstring_span) cuts.push_back(fn.relative(*fn.docstring_span));
  std::vector<ByteSpan> with_returns = cuts;
  for (const auto& r : fn.return_statement_spans) with_returns.push_back(fn.relative(r));

  HardPositive hp;
  hp.text = cut_and_dedent(fn.source_text, with_returns);
  if (!hp.text.empty()) return hp;
  hp.fallback = true;
  hp.text = cut_and_dedent(fn.source_text, cuts);
  if (hp.text.empty()) hp.text = cut_and_dedent(fn.source_text, {fn.relative(fn.signature_span)});
  return hp;
}

namespace {

struct FileOutcome {
  std::vector<BimodalPair> pairs;
  std::vector<FilterReason> verdicts;
};

FileOutcome process_file(const SourceFile& file, const Tokenizer& tokenizer) {
  FileOutcome out;
  for (const auto& fn : extract_functions(file)) {
    std::optional<Summary> summary;
    if (fn.docstring) summary = extract_summary(*fn.docstring, tokenizer);
    const auto verdict = filter_bimodal(fn, summary);
    out.verdicts.push_back(verdict.reason);
    if (!verdict.accepted) continue;
    auto hp = make_hard_positive(fn);
    BimodalPair pair;
    pair.summary = std::move(*summary);
    pair.positive_view = std::move(hp.text);
    pair.fallback = hp.fallback;
    pair.language = fn.language;
    pair.origin_hash = hex64(fnv1a64(fn.source_text, fn.file_hash ^ (fn.span.begin * 0x9e3779b97f4a7c15ULL)));
    pair.origin_path = file.path;
    pair.origin_name = fn.name;
    pair.origin_text = fn.source_text;
    out.pairs.push_back(std::move(pair));
  }
  return out;
}

}  // namespace

PairDataset build_pair_dataset(std::span<const SourceFile> files, const Tokenizer& tokenizer,
                               const PairOptions& options) {
  std::vector<FileOutcome> outcomes(files.size());
  const std::size_t threads = std::max<std::size_t>(1, std::min(options.threads, files.size()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < files.size(); ++i) outcomes[i] = process_file(files[i], tokenizer);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < files.size(); i = next++) outcomes[i] = process_file(files[i], tokenizer);
      });
    }
    for (auto& th : pool) th.join();
  }

  PairDataset ds;
  for (auto& o : outcomes) {
    for (auto r : o.verdicts) ++ds.histogram[r];
    ds.functions += o.verdicts.size();
    for (auto& p : o.pairs) ds.pairs.push_back(std::move(p));
  }
  return ds;
}

std::string pair_to_jsonl_line(const BimodalPair& pair) {
  nlohmann::ordered_json j;
  j["summary"] = pair.summary.text;
  j["code"] = pair.positive_view;
  j["lang"] = std::string(language_name(pair.language));
  j["origin_hash"] = pair.origin_hash;
  j["fallback"] = pair.fallback;
  return j.dump() + "\n";
}

void write_pairs_jsonl(const std::string& path, std::span<const BimodalPair> pairs) {
  std::string out;
  for (const auto& p : pairs) out += pair_to_jsonl_line(p);
  write_file(path, out);
}

std::vector<BimodalPair> read_pairs_jsonl(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<BimodalPair> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    BimodalPair p;
    p.summary.text = j.at("summary").get<std::string>();
    p.positive_view = j.at("code").get<std::string>();
    p.language = parse_language(j.at("lang").get<std::string>());
    p.origin_hash = j.at("origin_hash").get<std::string>();
    p.fallback = j.at("fallback").get<bool>();
    out.push_back(std::move(p));
  }
  return out;
}

std::string histogram_json(const PairDataset& dataset) {
  nlohmann::ordered_json j;
  j["functions"] = dataset.functions;
  j["pairs"] = dataset.pairs.size();
  j["fallback_pairs"] = std::count_if(dataset.pairs.begin(), dataset.pairs.end(),
                                      [](const BimodalPair& p) { return p.fallback; });
  nlohmann::ordered_json h = nlohmann::ordered_json::object();
  for (const auto& [reason, count] : dataset.histogram) h[std::string(filter_reason_name(reason))] = count;
  j["verdicts"] = h;
  return j.dump(2) + "\n";
}

std::vector<TokenId> content_tokens(std::string_view text, const Tokenizer& tokenizer) {
  std::vector<TokenId> out;
  for (const auto& t : tokenizer.encode(text)) {
    if (text.substr(t.span.begin, t.span.size()).find_first_not_of(" \t\r\n") != std::string_view::npos) {
      out.push_back(t.id);
    }
  }
  return out;
}

OverlapTable overlap_table(std::span<const SourceFile> files, const Tokenizer& tokenizer) {
  OverlapTable t;
  std::size_t with_summary = 0;
  for (const auto& file : files) {
    for (const auto& fn : extract_functions(file)) {
      if (!fn.docstring) continue;
      const auto doc = content_tokens(*fn.docstring, tokenizer);
      const auto sig = content_tokens(file.content.substr(fn.signature_span.begin, fn.signature_span.size()), tokenizer);
      std::vector<ByteSpan> cuts{fn.relative(fn.signature_span), fn.relative(*fn.docstring_span)};
      const auto body = content_tokens(cut_and_dedent(fn.source_text, cuts), tokenizer);
      ++t.functions;
      t.signature_vs_docstring += syntax::lexical_overlap(sig, doc);
      t.body_vs_docstring += syntax::lexical_overlap(body, doc);
      const auto summary = clean_summary_text(*fn.docstring);
      if (summary.empty()) continue;
      const auto sum = content_tokens(summary, tokenizer);
      ++with_summary;
      t.signature_vs_summary += syntax::lexical_overlap(sig, sum);
      t.body_vs_summary += syntax::lexical_overlap(body, sum);
    }
  }
  if (t.functions > 0) {
    t.signature_vs_docstring /= static_cast<double>(t.functions);
    t.body_vs_docstring /= static_cast<double>(t.functions);
  }
  if (with_summary > 0) {
    t.signature_vs_summary /= static_cast<double>(with_summary);
    t.body_vs_summary /= static_cast<double>(with_summary);
  }
  return t;
}

OverlapReduction overlap_reduction(std::span<const BimodalPair> pairs, const Tokenizer& tokenizer) {
  OverlapReduction r;
  for (const auto& p : pairs) {
    const auto sum = content_tokens(p.summary.text, tokenizer);
    r.summary_vs_positive += syntax::lexical_overlap(sum, content_tokens(p.positive_view, tokenizer));
    r.summary_vs_function += syntax::lexical_overlap(sum, content_tokens(p.origin_text, tokenizer));
    ++r.pairs;
  }
  if (r.pairs > 0) {
    r.summary_vs_positive /= static_cast<double>(r.pairs);
    r.summary_vs_function /= static_cast<double>(r.pairs);
  }
  return r;
}

}  // namespace sageforge::corpus
