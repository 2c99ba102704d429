#include "sageforge/syntax.hpp"

#include <algorithm>
#include <unordered_set>

namespace sageforge::syntax {

std::string_view node_kind_name(NodeKind kind) {
  switch (kind) {
    case NodeKind::Module: return "module";
    case NodeKind::Block: return "block";
    case NodeKind::Error: return "ERROR";
    case NodeKind::Leaf: return "leaf";
    case NodeKind::FunctionDef: return "function_definition";
    case NodeKind::ClassDef: return "class_definition";
    case NodeKind::Decorated: return "decorated_definition";
    case NodeKind::Decorator: return "decorator";
    case NodeKind::ReturnStmt: return "return_statement";
    case NodeKind::ExprStmt: return "expression_statement";
    case NodeKind::Assignment: return "assignment";
    case NodeKind::AugAssignment: return "augmented_assignment";
    case NodeKind::AnnAssignment: return "annotated_assignment";
    case NodeKind::Import: return "import_statement";
    case NodeKind::ImportFrom: return "import_from_statement";
    case NodeKind::ImportAlias: return "aliased_import";
    case NodeKind::Global: return "global_statement";
    case NodeKind::Nonlocal: return "nonlocal_statement";
    case NodeKind::SimpleStmt: return "simple_statement";
    case NodeKind::If: return "if_statement";
    case NodeKind::ElifClause: return "elif_clause";
    case NodeKind::ElseClause: return "else_clause";
    case NodeKind::For: return "for_statement";
    case NodeKind::While: return "while_statement";
    case NodeKind::Try: return "try_statement";
    case NodeKind::ExceptClause: return "except_clause";
    case NodeKind::FinallyClause: return "finally_clause";
    case NodeKind::With: return "with_statement";
    case NodeKind::WithItem: return "with_item";
    case NodeKind::Parameters: return "parameters";
    case NodeKind::Parameter: return "parameter";
    case NodeKind::Lambda: return "lambda";
    case NodeKind::Call: return "call";
    case NodeKind::Arguments: return "argument_list";
    case NodeKind::KeywordArgument: return "keyword_argument";
    case NodeKind::Attribute: return "attribute";
    case NodeKind::Subscript: return "subscript";
    case NodeKind::Slice: return "slice";
    case NodeKind::BinaryOp: return "binary_operator";
    case NodeKind::UnaryOp: return "unary_operator";
    case NodeKind::BoolOp: return "boolean_operator";
    case NodeKind::Compare: return "comparison_operator";
    case NodeKind::Conditional: return "conditional_expression";
    case NodeKind::NamedExpr: return "named_expression";
    case NodeKind::Starred: return "starred";
    case NodeKind::Tuple: return "tuple";
    case NodeKind::List: return "list";
    case NodeKind::Dict: return "dictionary";
    case NodeKind::Set: return "set";
    case NodeKind::Pair: return "pair";
    case NodeKind::Paren: return "parenthesized_expression";
    case NodeKind::Comprehension: return "comprehension";
    case NodeKind::CompFor: return "for_in_clause";
    case NodeKind::CompIf: return "if_clause";
    case NodeKind::Await: return "await";
    case NodeKind::Yield: return "yield";
    case NodeKind::StringConcat: return "concatenated_string";
  }
  return "unknown";
}

SyntaxTree::SyntaxTree(std::string source, std::vector<LexToken> tokens, std::vector<Node> nodes,
                       NodeId root)
    : source_(std::move(source)), tokens_(std::move(tokens)), nodes_(std::move(nodes)), root_(root) {
  line_starts_.push_back(0);
  for (std::size_t i = 0; i < source_.size(); ++i) {
    if (source_[i] == '\n') line_starts_.push_back(i + 1);
  }
}

std::string_view SyntaxTree::text(NodeId id) const {
  const auto& s = node(id).span;
  return std::string_view(source_).substr(s.begin, s.size());
}

std::string_view SyntaxTree::token_text(std::int32_t token) const {
  const auto& s = tokens_.at(static_cast<std::size_t>(token)).span;
  return std::string_view(source_).substr(s.begin, s.size());
}

NodeId SyntaxTree::child_by_field(NodeId id, Field field) const {
  for (NodeId c : node(id).children) {
    if (node(c).field == field) return c;
  }
  return kNoNode;
}

std::vector<NodeId> SyntaxTree::leaves() const {
  std::vector<NodeId> out;
  walk(root_, [&](NodeId n) {
    if (node(n).kind == NodeKind::Leaf) out.push_back(n);
  });
  return out;
}

bool SyntaxTree::has_error() const {
  for (const auto& n : nodes_) {
    if (n.kind == NodeKind::Error) return true;
  }
  return false;
}

bool SyntaxTree::inside_error(NodeId id) const {
  for (NodeId n = id; n != kNoNode; n = node(n).parent) {
    if (node(n).kind == NodeKind::Error) return true;
  }
  return false;
}

std::size_t SyntaxTree::line_of(std::size_t offset) const {
  auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), offset);
  return static_cast<std::size_t>(it - line_starts_.begin()) - 1;
}

std::string_view category_name(TokenCategory c) {
  switch (c) {
    case TokenCategory::Identifier: return "identifier";
    case TokenCategory::Keyword: return "keyword";
    case TokenCategory::Operator: return "operator";
    case TokenCategory::Delimiter: return "delimiter";
    case TokenCategory::Literal: return "literal";
  }
  return "unknown";
}

std::string_view role_name(IdentifierRole r) {
  switch (r) {
    case IdentifierRole::ClassName: return "class_name";
    case IdentifierRole::FunctionName: return "function_name";
    case IdentifierRole::FunctionArg: return "function_arg";
    case IdentifierRole::Variable: return "variable";
    case IdentifierRole::Call: return "call";
  }
  return "unknown";
}

namespace {

bool is_delimiter(std::string_view op) {
  static const std::unordered_set<std::string_view> delimiters = {
      "(", ")", "[", "]", "{", "}", ",", ":", ".", ";", "->", "..."};
  return delimiters.contains(op);
}

IdentifierRole identifier_role(const SyntaxTree& tree, NodeId leaf) {
  const Node& n = tree.node(leaf);
  const NodeId parent = n.parent;
  if (parent == kNoNode) return IdentifierRole::Variable;
  const Node& p = tree.node(parent);
  if (n.field == Field::Name) {
    if (p.kind == NodeKind::ClassDef) return IdentifierRole::ClassName;
    if (p.kind == NodeKind::FunctionDef) return IdentifierRole::FunctionName;
    if (p.kind == NodeKind::Parameter) return IdentifierRole::FunctionArg;
  }
  if (n.field == Field::Function && p.kind == NodeKind::Call) return IdentifierRole::Call;
  if (n.field == Field::Attr && p.kind == NodeKind::Attribute && p.field == Field::Function &&
      p.parent != kNoNode && tree.node(p.parent).kind == NodeKind::Call) {
    return IdentifierRole::Call;
  }
  for (NodeId a = parent; a != kNoNode; a = tree.node(a).parent) {
    const NodeKind k = tree.node(a).kind;
    if (k == NodeKind::Decorator) return IdentifierRole::Call;
    if (k == NodeKind::Decorated || k == NodeKind::Block || k == NodeKind::Module) break;
  }
  return IdentifierRole::Variable;
}

}  // namespace

std::vector<CategorizedToken> categorize_tokens(const SyntaxTree& tree) {
  std::vector<CategorizedToken> out;
  for (NodeId leaf : tree.leaves()) {
    const Node& n = tree.node(leaf);
    const LexToken& t = tree.tokens()[static_cast<std::size_t>(n.token)];
    CategorizedToken ct;
    ct.span = t.span;
    ct.text = std::string(tree.token_text(n.token));
    ct.leaf = leaf;
    switch (t.kind) {
      case LexKind::Name:
        if (ct.text == "True" || ct.text == "False") {
          ct.category = TokenCategory::Literal;
        } else if (is_python_keyword(ct.text)) {
          ct.category = TokenCategory::Keyword;
        } else {
          ct.category = TokenCategory::Identifier;
          ct.identifier_role = identifier_role(tree, leaf);
        }
        break;
      case LexKind::Number:
        ct.category = TokenCategory::Literal;
        break;
      case LexKind::String:
        ct.category = TokenCategory::Literal;
        ct.is_string = true;
        ct.nl_flag = true;
        break;
      case LexKind::Comment:
        ct.category = TokenCategory::Literal;
        ct.is_comment = true;
        ct.nl_flag = true;
        break;
      case LexKind::Op: {
        const bool decorator_at = ct.text == "@" && n.parent != kNoNode &&
                                  tree.node(n.parent).kind == NodeKind::Decorator;
        ct.category = (decorator_at || is_delimiter(ct.text)) ? TokenCategory::Delimiter
                                                              : TokenCategory::Operator;
        break;
      }
      default:
        // Lexer error tokens: unterminated strings read as literals, stray
        // characters as operators.
        if (!ct.text.empty() && (ct.text.front() == '"' || ct.text.front() == '\'' ||
                                 ct.text.find_first_of("\"'") != std::string::npos)) {
          ct.category = TokenCategory::Literal;
          ct.is_string = true;
          ct.nl_flag = true;
        } else {
          ct.category = TokenCategory::Operator;
        }
        break;
    }
    out.push_back(std::move(ct));
  }
  return out;
}

double DistributionReport::pl_token_fraction() const {
  return total == 0 ? 0.0 : static_cast<double>(pl) / static_cast<double>(total);
}
double DistributionReport::nl_token_fraction() const {
  return total == 0 ? 0.0 : static_cast<double>(nl) / static_cast<double>(total);
}
double DistributionReport::identifier_fraction_of_pl() const {
  return pl == 0 ? 0.0 : static_cast<double>(identifier) / static_cast<double>(pl);
}
double DistributionReport::identifier_fraction_of_all() const {
  return total == 0 ? 0.0 : static_cast<double>(identifier) / static_cast<double>(total);
}
double DistributionReport::string_literal_fraction_of_literals() const {
  return literal == 0 ? 0.0 : static_cast<double>(string_literal) / static_cast<double>(literal);
}

void DistributionReport::merge(const DistributionReport& o) {
  total += o.total;
  identifier += o.identifier;
  keyword += o.keyword;
  op += o.op;
  delimiter += o.delimiter;
  literal += o.literal;
  string_literal += o.string_literal;
  nl += o.nl;
  pl += o.pl;
}

DistributionReport token_distribution(std::span<const std::string> sources, Language language,
                                      const Tokenizer& tokenizer) {
  DistributionReport report;
  for (const auto& source : sources) {
    const SyntaxTree tree = parse(source, language);
    const auto cats = categorize_tokens(tree);
    std::vector<ByteSpan> bounds;
    bounds.reserve(cats.size());
    for (const auto& c : cats) bounds.push_back(c.span);
    const auto pieces = tokenizer.encode_with_boundaries(source, bounds);
    std::size_t k = 0;
    for (const auto& piece : pieces) {
      while (k < cats.size() && cats[k].span.end <= piece.span.begin) ++k;
      if (k == cats.size() || !cats[k].span.contains(piece.span)) continue;  // whitespace
      const auto& c = cats[k];
      ++report.total;
      switch (c.category) {
        case TokenCategory::Identifier: ++report.identifier; break;
        case TokenCategory::Keyword: ++report.keyword; break;
        case TokenCategory::Operator: ++report.op; break;
        case TokenCategory::Delimiter: ++report.delimiter; break;
        case TokenCategory::Literal: ++report.literal; break;
      }
      if (c.is_string || c.is_comment) ++report.string_literal;
      if (c.nl_flag) {
        ++report.nl;
      } else {
        ++report.pl;
      }
    }
  }
  return report;
}

double lexical_overlap(std::span<const TokenId> segment, std::span<const TokenId> reference) {
  if (segment.empty()) return 0.0;
  const std::unordered_set<TokenId> ref(reference.begin(), reference.end());
  std::size_t hits = 0;
  for (TokenId t : segment) hits += ref.contains(t) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(segment.size());
}

}  // namespace sageforge::syntax
