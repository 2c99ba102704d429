#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sageforge/common.hpp"
#include "sageforge/tokenizer.hpp"

namespace sageforge::syntax {

enum class LexKind { Name, Number, String, Op, Comment, Newline, Indent, Dedent, EndMarker, Error };

struct LexToken {
  LexKind kind;
  ByteSpan span;
};

// Python tokenizer with INDENT/DEDENT synthesis and implicit line joining
// inside brackets. Never throws; malformed input yields Error tokens.
std::vector<LexToken> lex_python(std::string_view source);

bool is_python_keyword(std::string_view word);

enum class NodeKind {
  Module,
  Block,
  Error,
  Leaf,
  // statements
  FunctionDef,
  ClassDef,
  Decorated,
  Decorator,
  ReturnStmt,
  ExprStmt,
  Assignment,
  AugAssignment,
  AnnAssignment,
  Import,
  ImportFrom,
  ImportAlias,
  Global,
  Nonlocal,
  SimpleStmt,  // pass, break, continue, raise, del, assert
  If,
  ElifClause,
  ElseClause,
  For,
  While,
  Try,
  ExceptClause,
  FinallyClause,
  With,
  WithItem,
  // expressions
  Parameters,
  Parameter,
  Lambda,
  Call,
  Arguments,
  KeywordArgument,
  Attribute,
  Subscript,
  Slice,
  BinaryOp,
  UnaryOp,
  BoolOp,
  Compare,
  Conditional,
  NamedExpr,
  Starred,
  Tuple,
  List,
  Dict,
  Set,
  Pair,
  Paren,
  Comprehension,
  CompFor,
  CompIf,
  Await,
  Yield,
  StringConcat,
};

std::string_view node_kind_name(NodeKind kind);

// Role of a child inside its parent, in the spirit of tree-sitter fields.
enum class Field {
  None,
  Name,
  Parameters,
  ReturnType,
  Body,
  Superclasses,
  Function,
  Arguments,
  Object,
  Attr,
  Target,
  Value,
  Annotation,
  Default,
  Iter,
  Alias,
  Type,
};

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

struct Node {
  NodeKind kind = NodeKind::Leaf;
  Field field = Field::None;
  ByteSpan span;
  NodeId parent = kNoNode;
  std::vector<NodeId> children;
  std::int32_t token = -1;  // index into tokens() for leaves
};

// Lossless concrete syntax tree. Immutable after construction.
class SyntaxTree {
 public:
  SyntaxTree(std::string source, std::vector<LexToken> tokens, std::vector<Node> nodes, NodeId root);

  std::string_view source() const { return source_; }
  const std::vector<LexToken>& tokens() const { return tokens_; }
  const Node& node(NodeId id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  std::size_t node_count() const { return nodes_.size(); }
  NodeId root() const { return root_; }

  std::string_view text(NodeId id) const;
  std::string_view token_text(std::int32_t token) const;
  // First child of `id` carrying `field`, or kNoNode.
  NodeId child_by_field(NodeId id, Field field) const;
  // Leaf nodes (including comments) in source order.
  std::vector<NodeId> leaves() const;
  bool has_error() const;
  bool inside_error(NodeId id) const;
  // 0-based line of a byte offset.
  std::size_t line_of(std::size_t offset) const;

  // Pre-order traversal of the subtree rooted at `id`.
  template <typename Visitor>
  void walk(NodeId id, Visitor&& visit) const {
    std::vector<NodeId> stack{id};
    while (!stack.empty()) {
      const NodeId n = stack.back();
      stack.pop_back();
      visit(n);
      const auto& ch = node(n).children;
      for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
    }
  }

 private:
  std::string source_;
  std::vector<LexToken> tokens_;
  std::vector<Node> nodes_;
  NodeId root_;
  std::vector<std::size_t> line_starts_;
};

SyntaxTree parse(std::string_view source, Language language);

enum class TokenCategory { Identifier, Keyword, Operator, Delimiter, Literal };
enum class IdentifierRole { ClassName, FunctionName, FunctionArg, Variable, Call };

std::string_view category_name(TokenCategory c);
std::string_view role_name(IdentifierRole r);

struct CategorizedToken {
  ByteSpan span;
  std::string text;
  TokenCategory category;
  bool nl_flag = false;     // string literals, docstrings, comments
  bool is_comment = false;  // comments are folded into Literal
  bool is_string = false;
  std::optional<IdentifierRole> identifier_role;
  NodeId leaf = kNoNode;
};

// One entry per non-whitespace leaf, in source order.
std::vector<CategorizedToken> categorize_tokens(const SyntaxTree& tree);

struct DistributionReport {
  std::size_t total = 0;
  std::size_t identifier = 0;
  std::size_t keyword = 0;
  std::size_t op = 0;
  std::size_t delimiter = 0;
  std::size_t literal = 0;
  std::size_t string_literal = 0;  // strings and comments
  std::size_t nl = 0;
  std::size_t pl = 0;

  double pl_token_fraction() const;
  double nl_token_fraction() const;
  double identifier_fraction_of_pl() const;
  double identifier_fraction_of_all() const;
  double string_literal_fraction_of_literals() const;

  void merge(const DistributionReport& other);
};

// Counts subword tokens by the category of the source token containing them.
DistributionReport token_distribution(std::span<const std::string> sources, Language language,
                                      const Tokenizer& tokenizer);

// |{t in segment : t in set(reference)}| / |segment|, 0 for an empty segment.
double lexical_overlap(std::span<const TokenId> segment, std::span<const TokenId> reference);

}  // namespace sageforge::syntax
