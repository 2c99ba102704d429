#include "sageforge/obfuscator.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>
#include <unordered_set>

namespace sageforge::obfuscator {

using syntax::Field;
using syntax::kNoNode;
using syntax::LexKind;
using syntax::NodeId;
using syntax::NodeKind;
using syntax::SyntaxTree;

const std::string* ObfuscationResult::original_of(std::string_view placeholder) const {
  for (const auto& [p, orig] : identifier_map) {
    if (p == placeholder) return &orig;
  }
  return nullptr;
}

namespace {

enum Family { kClass = 0, kFunction = 1, kVariable = 2 };
constexpr char kFamilyPrefix[] = {'c', 'f', 'v'};

bool is_name_leaf(const SyntaxTree& tree, NodeId n) {
  const auto& node = tree.node(n);
  return node.kind == NodeKind::Leaf &&
         tree.tokens()[static_cast<std::size_t>(node.token)].kind == LexKind::Name &&
         !syntax::is_python_keyword(tree.text(n));
}

bool is_builtin(std::string_view name) {
  static const std::unordered_set<std::string_view> kBuiltins = {
    "ArithmeticError", "AssertionError", "AttributeError", "BaseException", "BlockingIOError",
    "BrokenPipeError", "BufferError", "BytesWarning", "ChildProcessError",
    "ConnectionAbortedError", "ConnectionError", "ConnectionRefusedError", "ConnectionResetError",
    "DeprecationWarning", "EOFError", "Ellipsis", "EncodingWarning", "EnvironmentError",
    "Exception", "False", "FileExistsError", "FileNotFoundError", "FloatingPointError",
    "FutureWarning", "GeneratorExit", "IOError", "ImportError", "ImportWarning",
    "IndentationError", "IndexError", "InterruptedError", "IsADirectoryError", "KeyError",
    "KeyboardInterrupt", "LookupError", "MemoryError", "ModuleNotFoundError", "NameError", "None",
    "NotADirectoryError", "NotImplemented", "NotImplementedError", "OSError", "OverflowError",
    "PendingDeprecationWarning", "PermissionError", "ProcessLookupError", "RecursionError",
    "ReferenceError", "ResourceWarning", "RuntimeError", "RuntimeWarning", "StopAsyncIteration",
    "StopIteration", "SyntaxError", "SyntaxWarning", "SystemError", "SystemExit", "TabError",
    "TimeoutError", "True", "TypeError", "UnboundLocalError", "UnicodeDecodeError",
    "UnicodeEncodeError", "UnicodeError", "UnicodeTranslateError", "UnicodeWarning", "UserWarning",
    "ValueError", "Warning", "ZeroDivisionError", "abs", "aiter", "all", "anext", "any", "ascii",
    "bin", "bool", "breakpoint", "bytearray", "bytes", "callable", "chr", "classmethod", "compile",
    "complex", "copyright", "credits", "delattr", "dict", "dir", "divmod", "enumerate", "eval",
    "exec", "exit", "filter", "float", "format", "frozenset", "getattr", "globals", "hasattr",
    "hash", "help", "hex", "id", "input", "int", "isinstance", "issubclass", "iter", "len",
    "license", "list", "locals", "map", "max", "memoryview", "min", "next", "object", "oct",
    "open", "ord", "pow", "print", "property", "quit", "range", "repr", "reversed", "round", "set",
    "setattr", "slice", "sorted", "staticmethod", "str", "sum", "super", "tuple", "type", "vars",
    "zip", "__name__", "__file__", "__doc__", "__builtins__", "__import__"
  };
  return kBuiltins.count(name) > 0;
}

bool binds_target(NodeKind parent) {
  switch (parent) {
    case NodeKind::Assignment:
    case NodeKind::AugAssignment:
    case NodeKind::AnnAssignment:
    case NodeKind::For:
    case NodeKind::WithItem:
    case NodeKind::NamedExpr:
    case NodeKind::CompFor:
      return true;
    default:
      return false;
  }
}

class DefinitionCollector {
 public:
  explicit DefinitionCollector(const SyntaxTree& tree) : tree_(tree) {}

  std::unordered_map<std::string, Family> run() {
    tree_.walk(tree_.root(), [&](NodeId n) { visit(n); });
    for (const auto& name : imported_) families_.erase(name);
    collect_free_names();
    return std::move(families_);
  }

 private:
  void define(NodeId leaf, Family fam) {
    if (!is_name_leaf(tree_, leaf) || tree_.inside_error(leaf)) return;
    const std::string text(tree_.text(leaf));
    auto [it, inserted] = families_.emplace(text, fam);
    if (!inserted && fam < it->second) it->second = fam;
  }

  void define_target(NodeId n) {
    const auto& node = tree_.node(n);
    switch (node.kind) {
      case NodeKind::Leaf:
        define(n, kVariable);
        break;
      case NodeKind::Tuple:
      case NodeKind::List:
      case NodeKind::Paren:
      case NodeKind::Starred:
        for (NodeId c : node.children) define_target(c);
        break;
      case NodeKind::Attribute: {
        const NodeId attr = tree_.child_by_field(n, Field::Attr);
        if (attr != kNoNode) define(attr, kVariable);
        break;
      }
      default:
        break;
    }
  }

  void visit(NodeId n) {
    const auto& node = tree_.node(n);
    const NodeId parent = node.parent;
    if (parent == kNoNode) return;
    const NodeKind pk = tree_.node(parent).kind;
    if (node.kind == NodeKind::Leaf && node.field == Field::Name) {
      if (pk == NodeKind::ClassDef) define(n, kClass);
      if (pk == NodeKind::FunctionDef) define(n, kFunction);
      if (pk == NodeKind::Parameter) define(n, kVariable);
      if (pk == NodeKind::ImportAlias) imported_.insert(std::string(tree_.text(n)));
    }
    if (node.kind == NodeKind::Leaf && node.field == Field::Alias) {
      if (pk == NodeKind::ImportAlias) imported_.insert(std::string(tree_.text(n)));
      if (pk == NodeKind::ExceptClause) define(n, kVariable);
    }
    if (node.field == Field::Target && binds_target(pk)) define_target(n);
  }

  // Names used but never bound here. Builtins, imports, attribute names and
  // keyword-argument names stay; the rest become f_i when called, v_i otherwise.
  void collect_free_names() {
    std::unordered_map<std::string, Family> free;
    for (NodeId leaf : tree_.leaves()) {
      if (!is_name_leaf(tree_, leaf) || tree_.inside_error(leaf)) continue;
      std::string text(tree_.text(leaf));
      if (families_.count(text) || imported_.count(text) || is_builtin(text)) continue;
      const auto& node = tree_.node(leaf);
      if (node.parent == kNoNode) continue;
      const NodeKind pk = tree_.node(node.parent).kind;
      if (node.field == Field::Attr || node.field == Field::Alias) continue;
      if (node.field == Field::Name) continue;
      if (pk == NodeKind::Import || pk == NodeKind::ImportFrom || pk == NodeKind::ImportAlias ||
          pk == NodeKind::Global || pk == NodeKind::Nonlocal) {
        continue;
      }
      const Family fam = node.field == Field::Function && pk == NodeKind::Call ? kFunction : kVariable;
      auto [it, inserted] = free.emplace(std::move(text), fam);
      if (!inserted && fam < it->second) it->second = fam;
    }
    families_.merge(free);
  }

  const SyntaxTree& tree_;
  std::unordered_map<std::string, Family> families_;
  std::unordered_set<std::string> imported_;
};

bool inside_import(const SyntaxTree& tree, NodeId n) {
  for (NodeId a = tree.node(n).parent; a != kNoNode; a = tree.node(a).parent) {
    const auto k = tree.node(a).kind;
    if (k == NodeKind::Import || k == NodeKind::ImportFrom) return true;
    if (k == NodeKind::Block || k == NodeKind::Module) return false;
  }
  return false;
}

}  // namespace

ObfuscationResult obfuscate(std::string_view source, const SyntaxTree& tree) {
  const auto families = DefinitionCollector(tree).run();

  struct Occurrence {
    ByteSpan span;
    std::string placeholder;
  };
  std::vector<Occurrence> occurrences;
  std::unordered_map<std::string, std::string> assigned;  // original -> placeholder
  std::vector<std::string> per_family[3];
  std::size_t counters[3] = {0, 0, 0};

  for (NodeId leaf : tree.leaves()) {
    if (!is_name_leaf(tree, leaf) || tree.inside_error(leaf) || inside_import(tree, leaf)) continue;
    const std::string text(tree.text(leaf));
    const auto fam = families.find(text);
    if (fam == families.end()) continue;
    auto it = assigned.find(text);
    if (it == assigned.end()) {
      const int f = fam->second;
      std::string ph = std::string(1, kFamilyPrefix[f]) + "_" + std::to_string(counters[f]++);
      per_family[f].push_back(text);
      it = assigned.emplace(text, std::move(ph)).first;
    }
    occurrences.push_back({tree.node(leaf).span, it->second});
  }

  ObfuscationResult r;
  for (int f = 0; f < 3; ++f) {
    for (std::size_t i = 0; i < per_family[f].size(); ++i) {
      r.identifier_map.emplace_back(std::string(1, kFamilyPrefix[f]) + "_" + std::to_string(i), per_family[f][i]);
    }
  }
  std::size_t pos = 0;
  for (const auto& occ : occurrences) {
    r.obfuscated_text.append(source.substr(pos, occ.span.begin - pos));
    const std::size_t begin = r.obfuscated_text.size();
    r.obfuscated_text.append(occ.placeholder);
    r.placeholder_spans.push_back({occ.placeholder, {begin, r.obfuscated_text.size()}});
    pos = occ.span.end;
  }
  r.obfuscated_text.append(source.substr(pos));
  return r;
}

ObfuscationResult obfuscate(std::string_view source, Language language) {
  const auto tree = syntax::parse(source, language);
  return obfuscate(source, tree);
}

std::string deobfuscate(const ObfuscationResult& result) {
  const std::string_view text = result.obfuscated_text;
  std::string out;
  std::size_t pos = 0;
  for (const auto& ps : result.placeholder_spans) {
    if (ps.span.begin < pos || ps.span.end > text.size() || ps.span.end < ps.span.begin) {
      throw IntegrityError("placeholder span out of order or out of range");
    }
    if (text.substr(ps.span.begin, ps.span.size()) != ps.placeholder) {
      throw IntegrityError("text at placeholder span does not match '" + ps.placeholder + "'");
    }
    const std::string* original = result.original_of(ps.placeholder);
    if (original == nullptr) throw IntegrityError("placeholder '" + ps.placeholder + "' missing from map");
    out.append(text.substr(pos, ps.span.begin - pos));
    out.append(*original);
    pos = ps.span.end;
  }
  out.append(text.substr(pos));
  return out;
}

DobfExample build_mask_map(const ObfuscationResult& result, const Tokenizer& tokenizer) {
  std::vector<ByteSpan> bounds;
  bounds.reserve(result.placeholder_spans.size());
  for (const auto& ps : result.placeholder_spans) bounds.push_back(ps.span);
  const auto tokens = tokenizer.encode_with_boundaries(result.obfuscated_text, bounds);

  std::map<std::string, std::vector<TokenId>> label_cache;
  DobfExample ex;
  std::size_t k = 0;
  for (const auto& tok : tokens) {
    while (k < bounds.size() && bounds[k].end <= tok.span.begin) ++k;
    const bool is_placeholder = k < bounds.size() && bounds[k] == tok.span;
    if (!is_placeholder) {
      if (k < bounds.size() && bounds[k].overlaps(tok.span)) {
        throw IntegrityError("placeholder '" + result.placeholder_spans[k].placeholder + "' was split by the tokenizer");
      }
      ex.input_ids.push_back(tok.id);
      ex.target_ids.push_back(tok.id);
      continue;
    }
    const auto& ph = result.placeholder_spans[k].placeholder;
    const auto special = tokenizer.special_id(ph);
    if (!special || *special != tok.id) {
      throw IntegrityError("placeholder '" + ph + "' is not an atomic tokenizer special");
    }
    auto cached = label_cache.find(ph);
    if (cached == label_cache.end()) {
      const std::string* original = result.original_of(ph);
      if (original == nullptr) throw IntegrityError("placeholder '" + ph + "' missing from map");
      cached = label_cache.emplace(ph, tokenizer.encode_ids(*original)).first;
      if (cached->second.empty()) throw IntegrityError("identifier for '" + ph + "' encodes to no tokens");
    }
    for (TokenId label : cached->second) {
      ex.label_map.emplace_back(ex.input_ids.size(), label);
      ex.input_ids.push_back(tokenizer.mask_id());
      ex.target_ids.push_back(label);
    }
  }
  return ex;
}

}  // namespace sageforge::obfuscator
