#include <algorithm>
#include <string_view>

#include "sageforge/syntax.hpp"

namespace sageforge::syntax {

namespace {

constexpr std::string_view kAugOps[] = {"+=", "-=", "*=", "/=", "//=", "%=", "@=",
                                        "&=", "|=", "^=", ">>=", "<<=", "**="};

struct ParseFailure {};

// Recursive-descent parser over the significant (non-comment) tokens. Each
// statement is parsed transactionally: on failure the parser rewinds and
// wraps the statement's tokens (and any indented block that follows) in an
// Error node.
class Parser {
 public:
  Parser(std::string_view src, const std::vector<LexToken>& tokens) : src_(src), all_(tokens) {
    for (std::size_t k = 0; k < tokens.size(); ++k) {
      if (tokens[k].kind != LexKind::Comment) sig_.push_back(static_cast<std::int32_t>(k));
    }
  }

  std::pair<std::vector<Node>, NodeId> run() {
    const NodeId module = make(NodeKind::Module);
    while (kind() != LexKind::EndMarker) {
      if (kind() == LexKind::Newline || kind() == LexKind::Dedent) {
        ++pos_;
        continue;
      }
      for (NodeId s : statement()) add(module, s);
    }
    nodes_[module].span = {0, src_.size()};
    attach_comments(module);
    return {std::move(nodes_), module};
  }

 private:
  // ---- token access -------------------------------------------------------

  const LexToken& tok(std::size_t ahead = 0) const {
    const std::size_t k = std::min(pos_ + ahead, sig_.size() - 1);
    return all_[static_cast<std::size_t>(sig_[k])];
  }
  LexKind kind(std::size_t ahead = 0) const { return tok(ahead).kind; }
  std::string_view text(std::size_t ahead = 0) const {
    const auto& t = tok(ahead);
    return src_.substr(t.span.begin, t.span.size());
  }
  bool at_op(std::string_view op, std::size_t ahead = 0) const {
    return kind(ahead) == LexKind::Op && text(ahead) == op;
  }
  bool at_kw(std::string_view kw, std::size_t ahead = 0) const {
    return kind(ahead) == LexKind::Name && text(ahead) == kw;
  }
  bool at_name(std::size_t ahead = 0) const {
    return kind(ahead) == LexKind::Name && !is_python_keyword(text(ahead));
  }
  bool at_end_of_line() const {
    return kind() == LexKind::Newline || kind() == LexKind::EndMarker;
  }

  bool at_expression_start() const {
    switch (kind()) {
      case LexKind::Number:
      case LexKind::String:
        return true;
      case LexKind::Name: {
        const auto t = text();
        return !is_python_keyword(t) || t == "None" || t == "True" || t == "False" ||
               t == "not" || t == "lambda" || t == "await" || t == "yield";
      }
      case LexKind::Op: {
        const auto t = text();
        return t == "(" || t == "[" || t == "{" || t == "-" || t == "+" || t == "~" ||
               t == "*" || t == "**" || t == "...";
      }
      default:
        return false;
    }
  }

  // ---- node construction ----------------------------------------------------

  NodeId make(NodeKind k) {
    Node n;
    n.kind = k;
    n.span = {tok().span.begin, tok().span.begin};
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size() - 1);
  }

  void add(NodeId parent, NodeId child, Field field = Field::None) {
    nodes_[child].parent = parent;
    nodes_[child].field = field;
    auto& p = nodes_[parent];
    if (p.children.empty()) {
      p.span = nodes_[child].span;
    } else {
      p.span.end = std::max(p.span.end, nodes_[child].span.end);
    }
    p.children.push_back(child);
  }

  NodeId leaf() {
    const std::int32_t index = sig_[pos_];
    if (all_[index].kind == LexKind::EndMarker) throw ParseFailure{};
    Node n;
    n.kind = NodeKind::Leaf;
    n.span = all_[index].span;
    n.token = index;
    nodes_.push_back(std::move(n));
    ++pos_;
    return static_cast<NodeId>(nodes_.size() - 1);
  }

  NodeId expect_op(std::string_view op) {
    if (!at_op(op)) throw ParseFailure{};
    return leaf();
  }
  NodeId expect_kw(std::string_view kw) {
    if (!at_kw(kw)) throw ParseFailure{};
    return leaf();
  }
  NodeId expect_name() {
    if (!at_name()) throw ParseFailure{};
    return leaf();
  }
  void expect_newline() {
    if (kind() == LexKind::Newline) {
      ++pos_;
    } else if (kind() != LexKind::EndMarker) {
      throw ParseFailure{};
    }
  }

  // ---- statements -----------------------------------------------------------

  std::vector<NodeId> statement() {
    const std::size_t saved_pos = pos_;
    const std::size_t saved_nodes = nodes_.size();
    try {
      return statement_inner();
    } catch (const ParseFailure&) {
      pos_ = saved_pos;
      nodes_.resize(saved_nodes);
      return {recover()};
    }
  }

  std::vector<NodeId> statement_inner() {
    if (kind() == LexKind::Indent) throw ParseFailure{};
    if (at_op("@")) return {decorated()};
    if (kind() == LexKind::Name) {
      const auto t = text();
      if (t == "def") return {function_def(kNoNode)};
      if (t == "class") return {class_def()};
      if (t == "if") return {if_stmt()};
      if (t == "while") return {while_stmt()};
      if (t == "for") return {for_stmt(kNoNode)};
      if (t == "try") return {try_stmt()};
      if (t == "with") return {with_stmt(kNoNode)};
      if (t == "async") {
        const NodeId async_kw = leaf();
        if (at_kw("def")) return {function_def(async_kw)};
        if (at_kw("for")) return {for_stmt(async_kw)};
        if (at_kw("with")) return {with_stmt(async_kw)};
        throw ParseFailure{};
      }
    }
    std::vector<NodeId> out;
    simple_line(out);
    return out;
  }

  // Consumes the rest of a malformed statement into an Error node.
  NodeId recover() {
    const NodeId err = make(NodeKind::Error);
    bool consumed = false;
    auto take = [&]() {
      const LexKind k = kind();
      if (k == LexKind::EndMarker) return false;
      if (k == LexKind::Newline || k == LexKind::Indent || k == LexKind::Dedent) {
        ++pos_;
      } else {
        add(err, leaf());
      }
      consumed = true;
      return true;
    };
    auto take_block = [&]() {
      int level = 0;
      do {
        if (kind() == LexKind::Indent) ++level;
        if (kind() == LexKind::Dedent) --level;
        if (!take()) break;
      } while (level > 0);
    };
    if (kind() == LexKind::Indent) {
      take_block();
    } else {
      while (kind() != LexKind::Newline && kind() != LexKind::EndMarker) {
        if (kind() == LexKind::Indent) {
          take_block();
        } else if (kind() == LexKind::Dedent) {
          break;
        } else {
          take();
        }
      }
      if (kind() == LexKind::Newline) take();
      if (kind() == LexKind::Indent) take_block();
    }
    if (!consumed) take();
    return err;
  }

  void simple_line(std::vector<NodeId>& out) {
    while (true) {
      const NodeId s = small_stmt();
      out.push_back(s);
      if (at_op(";")) {
        add(s, leaf());
        if (at_end_of_line()) break;
        continue;
      }
      break;
    }
    expect_newline();
  }

  NodeId block() {
    const NodeId b = make(NodeKind::Block);
    if (kind() == LexKind::Newline) {
      ++pos_;
      if (kind() != LexKind::Indent) throw ParseFailure{};
      ++pos_;
      while (kind() != LexKind::Dedent && kind() != LexKind::EndMarker) {
        for (NodeId s : statement()) add(b, s);
      }
      if (kind() == LexKind::Dedent) ++pos_;
    } else {
      std::vector<NodeId> line;
      simple_line(line);
      for (NodeId s : line) add(b, s);
    }
    if (nodes_[b].children.empty()) throw ParseFailure{};
    return b;
  }

  NodeId decorated() {
    const NodeId d = make(NodeKind::Decorated);
    while (at_op("@")) {
      const NodeId dec = make(NodeKind::Decorator);
      add(dec, leaf());
      add(dec, named_expression(), Field::Value);
      expect_newline();
      add(d, dec);
    }
    if (at_kw("def")) {
      add(d, function_def(kNoNode));
    } else if (at_kw("class")) {
      add(d, class_def());
    } else if (at_kw("async")) {
      const NodeId async_kw = leaf();
      add(d, function_def(async_kw));
    } else {
      throw ParseFailure{};
    }
    return d;
  }

  NodeId function_def(NodeId async_kw) {
    const NodeId f = make(NodeKind::FunctionDef);
    if (async_kw != kNoNode) add(f, async_kw);
    add(f, expect_kw("def"));
    add(f, expect_name(), Field::Name);
    add(f, parameters(true), Field::Parameters);
    if (at_op("->")) {
      add(f, leaf());
      add(f, expression(), Field::ReturnType);
    }
    add(f, expect_op(":"));
    add(f, block(), Field::Body);
    return f;
  }

  // Parenthesized (def) or bare (lambda) parameter list.
  NodeId parameters(bool parenthesized) {
    const NodeId p = make(NodeKind::Parameters);
    if (parenthesized) add(p, expect_op("("));
    auto at_close = [&] { return parenthesized ? at_op(")") : at_op(":"); };
    while (!at_close()) {
      if (at_op("/")) {
        add(p, leaf());
      } else {
        const NodeId param = make(NodeKind::Parameter);
        if (at_op("*") || at_op("**")) {
          add(param, leaf());
          if (at_name()) add(param, leaf(), Field::Name);
        } else {
          add(param, expect_name(), Field::Name);
        }
        if (parenthesized && at_op(":")) {
          add(param, leaf());
          add(param, expression(), Field::Annotation);
        }
        if (at_op("=")) {
          add(param, leaf());
          add(param, expression(), Field::Default);
        }
        add(p, param);
      }
      if (!at_op(",")) break;
      add(p, leaf());
    }
    if (parenthesized) add(p, expect_op(")"));
    return p;
  }

  NodeId class_def() {
    const NodeId c = make(NodeKind::ClassDef);
    add(c, expect_kw("class"));
    add(c, expect_name(), Field::Name);
    if (at_op("(")) add(c, arguments(), Field::Superclasses);
    add(c, expect_op(":"));
    add(c, block(), Field::Body);
    return c;
  }

  NodeId if_stmt() {
    const NodeId n = make(NodeKind::If);
    add(n, expect_kw("if"));
    add(n, named_expression(), Field::Value);
    add(n, expect_op(":"));
    add(n, block(), Field::Body);
    while (at_kw("elif")) {
      const NodeId e = make(NodeKind::ElifClause);
      add(e, leaf());
      add(e, named_expression(), Field::Value);
      add(e, expect_op(":"));
      add(e, block(), Field::Body);
      add(n, e);
    }
    else_clause(n);
    return n;
  }

  void else_clause(NodeId n) {
    if (!at_kw("else")) return;
    const NodeId e = make(NodeKind::ElseClause);
    add(e, leaf());
    add(e, expect_op(":"));
    add(e, block(), Field::Body);
    add(n, e);
  }

  NodeId while_stmt() {
    const NodeId n = make(NodeKind::While);
    add(n, expect_kw("while"));
    add(n, named_expression(), Field::Value);
    add(n, expect_op(":"));
    add(n, block(), Field::Body);
    else_clause(n);
    return n;
  }

  NodeId for_stmt(NodeId async_kw) {
    const NodeId n = make(NodeKind::For);
    if (async_kw != kNoNode) add(n, async_kw);
    add(n, expect_kw("for"));
    add(n, target_list(), Field::Target);
    add(n, expect_kw("in"));
    add(n, star_expressions(), Field::Iter);
    add(n, expect_op(":"));
    add(n, block(), Field::Body);
    else_clause(n);
    return n;
  }

  NodeId try_stmt() {
    const NodeId n = make(NodeKind::Try);
    add(n, expect_kw("try"));
    add(n, expect_op(":"));
    add(n, block(), Field::Body);
    bool handlers = false;
    while (at_kw("except")) {
      handlers = true;
      const NodeId e = make(NodeKind::ExceptClause);
      add(e, leaf());
      if (at_op("*")) add(e, leaf());
      if (!at_op(":")) {
        add(e, expression(), Field::Type);
        if (at_op(",")) {
          // Tuple of exception types without parentheses is invalid Python 3.
          throw ParseFailure{};
        }
        if (at_kw("as")) {
          add(e, leaf());
          add(e, expect_name(), Field::Alias);
        }
      }
      add(e, expect_op(":"));
      add(e, block(), Field::Body);
      add(n, e);
    }
    if (handlers) else_clause(n);
    if (at_kw("finally")) {
      const NodeId f = make(NodeKind::FinallyClause);
      add(f, leaf());
      add(f, expect_op(":"));
      add(f, block(), Field::Body);
      add(n, f);
    } else if (!handlers) {
      throw ParseFailure{};
    }
    return n;
  }

  NodeId with_item() {
    const NodeId item = make(NodeKind::WithItem);
    add(item, expression(), Field::Value);
    if (at_kw("as")) {
      add(item, leaf());
      add(item, star_target(), Field::Target);
    }
    return item;
  }

  NodeId with_stmt(NodeId async_kw) {
    const NodeId n = make(NodeKind::With);
    if (async_kw != kNoNode) add(n, async_kw);
    add(n, expect_kw("with"));
    const std::size_t saved_pos = pos_;
    const std::size_t saved_nodes = nodes_.size();
    std::vector<NodeId> items;
    try {
      items.push_back(with_item());
      while (at_op(",")) {
        items.push_back(leaf());
        items.push_back(with_item());
      }
      if (!at_op(":")) throw ParseFailure{};
    } catch (const ParseFailure&) {
      // Parenthesized item list: with (a as b, c as d):
      pos_ = saved_pos;
      nodes_.resize(saved_nodes);
      items.clear();
      items.push_back(expect_op("("));
      while (!at_op(")")) {
        items.push_back(with_item());
        if (!at_op(",")) break;
        items.push_back(leaf());
      }
      items.push_back(expect_op(")"));
    }
    for (NodeId it : items) add(n, it);
    add(n, expect_op(":"));
    add(n, block(), Field::Body);
    return n;
  }

  NodeId small_stmt() {
    if (kind() == LexKind::Name) {
      const auto t = text();
      if (t == "return") {
        const NodeId n = make(NodeKind::ReturnStmt);
        add(n, leaf());
        if (at_expression_start()) add(n, star_expressions(), Field::Value);
        return n;
      }
      if (t == "pass" || t == "break" || t == "continue") {
        const NodeId n = make(NodeKind::SimpleStmt);
        add(n, leaf());
        return n;
      }
      if (t == "raise") {
        const NodeId n = make(NodeKind::SimpleStmt);
        add(n, leaf());
        if (at_expression_start()) {
          add(n, expression(), Field::Value);
          if (at_kw("from")) {
            add(n, leaf());
            add(n, expression());
          }
        }
        return n;
      }
      if (t == "global" || t == "nonlocal") {
        const NodeId n = make(t == "global" ? NodeKind::Global : NodeKind::Nonlocal);
        add(n, leaf());
        add(n, expect_name(), Field::Name);
        while (at_op(",")) {
          add(n, leaf());
          add(n, expect_name(), Field::Name);
        }
        return n;
      }
      if (t == "del") {
        const NodeId n = make(NodeKind::SimpleStmt);
        add(n, leaf());
        add(n, star_expressions(), Field::Target);
        return n;
      }
      if (t == "assert") {
        const NodeId n = make(NodeKind::SimpleStmt);
        add(n, leaf());
        add(n, expression(), Field::Value);
        if (at_op(",")) {
          add(n, leaf());
          add(n, expression());
        }
        return n;
      }
      if (t == "import") return import_stmt();
      if (t == "from") return import_from();
    }
    return expression_statement();
  }

  void dotted_name(NodeId into, bool first_is_binding) {
    add(into, expect_name(), first_is_binding ? Field::Name : Field::None);
    while (at_op(".")) {
      add(into, leaf());
      add(into, expect_name());
    }
  }

  NodeId import_stmt() {
    const NodeId n = make(NodeKind::Import);
    add(n, leaf());
    while (true) {
      const NodeId alias = make(NodeKind::ImportAlias);
      dotted_name(alias, true);
      if (at_kw("as")) {
        add(alias, leaf());
        add(alias, expect_name(), Field::Alias);
      }
      add(n, alias);
      if (!at_op(",")) break;
      add(n, leaf());
    }
    return n;
  }

  NodeId import_from() {
    const NodeId n = make(NodeKind::ImportFrom);
    add(n, leaf());
    bool any = false;
    while (at_op(".") || at_op("...")) {
      add(n, leaf());
      any = true;
    }
    if (at_name()) {
      const NodeId module = make(NodeKind::ImportAlias);
      dotted_name(module, false);
      add(n, module);
      any = true;
    }
    if (!any) throw ParseFailure{};
    add(n, expect_kw("import"));
    if (at_op("*")) {
      add(n, leaf());
      return n;
    }
    const bool paren = at_op("(");
    if (paren) add(n, leaf());
    while (true) {
      const NodeId alias = make(NodeKind::ImportAlias);
      add(alias, expect_name(), Field::Name);
      if (at_kw("as")) {
        add(alias, leaf());
        add(alias, expect_name(), Field::Alias);
      }
      add(n, alias);
      if (!at_op(",")) break;
      add(n, leaf());
      if (paren && at_op(")")) break;
    }
    if (paren) add(n, expect_op(")"));
    return n;
  }

  bool at_aug_op() const {
    if (kind() != LexKind::Op) return false;
    const auto t = text();
    return std::find(std::begin(kAugOps), std::end(kAugOps), t) != std::end(kAugOps);
  }

  NodeId rhs() { return at_kw("yield") ? yield_expr() : star_expressions(); }

  NodeId expression_statement() {
    const NodeId first = rhs();
    if (at_op("=")) {
      const NodeId n = make(NodeKind::Assignment);
      std::vector<NodeId> parts{first};
      std::vector<NodeId> eqs;
      while (at_op("=")) {
        eqs.push_back(leaf());
        parts.push_back(rhs());
      }
      for (std::size_t k = 0; k < parts.size(); ++k) {
        add(n, parts[k], k + 1 < parts.size() ? Field::Target : Field::Value);
        if (k < eqs.size()) add(n, eqs[k]);
      }
      return n;
    }
    if (at_aug_op()) {
      const NodeId n = make(NodeKind::AugAssignment);
      add(n, first, Field::Target);
      add(n, leaf());
      add(n, rhs(), Field::Value);
      return n;
    }
    if (at_op(":")) {
      const NodeId n = make(NodeKind::AnnAssignment);
      add(n, first, Field::Target);
      add(n, leaf());
      add(n, expression(), Field::Annotation);
      if (at_op("=")) {
        add(n, leaf());
        add(n, rhs(), Field::Value);
      }
      return n;
    }
    const NodeId n = make(NodeKind::ExprStmt);
    add(n, first, Field::Value);
    return n;
  }

  // ---- expressions ----------------------------------------------------------

  // Targets of `for` loops and comprehensions: `in` terminates them.
  NodeId target_list() {
    const bool saved = no_in_;
    no_in_ = true;
    const NodeId t = star_expressions();
    no_in_ = saved;
    return t;
  }

  NodeId star_target() {
    const bool saved = no_in_;
    no_in_ = true;
    NodeId t;
    if (at_op("*")) {
      t = make(NodeKind::Starred);
      add(t, leaf());
      add(t, primary(), Field::Value);
    } else {
      t = primary();
    }
    no_in_ = saved;
    return t;
  }

  NodeId star_expressions() {
    const NodeId first = star_expression();
    if (!at_op(",")) return first;
    const NodeId t = make(NodeKind::Tuple);
    add(t, first);
    while (at_op(",")) {
      add(t, leaf());
      if (!at_expression_start()) break;
      add(t, star_expression());
    }
    return t;
  }

  NodeId star_expression() {
    if (at_op("*")) {
      const NodeId s = make(NodeKind::Starred);
      add(s, leaf());
      add(s, bitwise_or(), Field::Value);
      return s;
    }
    return expression();
  }

  NodeId star_named_expression() {
    if (at_op("*")) return star_expression();
    return named_expression();
  }

  NodeId named_expression() {
    if (at_name() && at_op(":=", 1)) {
      const NodeId n = make(NodeKind::NamedExpr);
      add(n, leaf(), Field::Target);
      add(n, leaf());
      add(n, expression(), Field::Value);
      return n;
    }
    return expression();
  }

  NodeId expression() {
    if (at_kw("lambda")) return lambda_expr();
    const NodeId cond = disjunction();
    if (!at_kw("if")) return cond;
    const NodeId n = make(NodeKind::Conditional);
    add(n, cond);
    add(n, leaf());
    add(n, disjunction());
    add(n, expect_kw("else"));
    add(n, expression());
    return n;
  }

  NodeId lambda_expr() {
    const NodeId n = make(NodeKind::Lambda);
    add(n, leaf());
    add(n, parameters(false), Field::Parameters);
    add(n, expect_op(":"));
    add(n, expression(), Field::Body);
    return n;
  }

  template <typename Next>
  NodeId left_assoc(NodeKind k, Next next, std::initializer_list<std::string_view> ops, bool keyword) {
    NodeId left = next();
    while (true) {
      bool matched = false;
      for (auto op : ops) {
        if (keyword ? at_kw(op) : at_op(op)) {
          matched = true;
          break;
        }
      }
      if (!matched) return left;
      const NodeId n = make(k);
      add(n, left);
      add(n, leaf());
      add(n, next());
      left = n;
    }
  }

  NodeId disjunction() {
    return left_assoc(NodeKind::BoolOp, [this] { return conjunction(); }, {"or"}, true);
  }
  NodeId conjunction() {
    return left_assoc(NodeKind::BoolOp, [this] { return inversion(); }, {"and"}, true);
  }
  NodeId inversion() {
    if (at_kw("not")) {
      const NodeId n = make(NodeKind::UnaryOp);
      add(n, leaf());
      add(n, inversion());
      return n;
    }
    return comparison();
  }

  bool at_compare_op() const {
    if (kind() == LexKind::Op) {
      const auto t = text();
      return t == "==" || t == "!=" || t == "<" || t == ">" || t == "<=" || t == ">=";
    }
    if (at_kw("in")) return !no_in_;
    if (at_kw("is")) return true;
    if (at_kw("not") && at_kw("in", 1)) return !no_in_;
    return false;
  }

  NodeId comparison() {
    const NodeId first = bitwise_or();
    if (!at_compare_op()) return first;
    const NodeId n = make(NodeKind::Compare);
    add(n, first);
    while (at_compare_op()) {
      if (at_kw("not") || (at_kw("is") && at_kw("not", 1))) add(n, leaf());
      add(n, leaf());
      add(n, bitwise_or());
    }
    return n;
  }

  NodeId bitwise_or() {
    return left_assoc(NodeKind::BinaryOp, [this] { return bitwise_xor(); }, {"|"}, false);
  }
  NodeId bitwise_xor() {
    return left_assoc(NodeKind::BinaryOp, [this] { return bitwise_and(); }, {"^"}, false);
  }
  NodeId bitwise_and() {
    return left_assoc(NodeKind::BinaryOp, [this] { return shift_expr(); }, {"&"}, false);
  }
  NodeId shift_expr() {
    return left_assoc(NodeKind::BinaryOp, [this] { return sum(); }, {"<<", ">>"}, false);
  }
  NodeId sum() {
    return left_assoc(NodeKind::BinaryOp, [this] { return term(); }, {"+", "-"}, false);
  }
  NodeId term() {
    return left_assoc(NodeKind::BinaryOp, [this] { return factor(); }, {"*", "/", "//", "%", "@"},
                      false);
  }

  NodeId factor() {
    if (at_op("+") || at_op("-") || at_op("~")) {
      const NodeId n = make(NodeKind::UnaryOp);
      add(n, leaf());
      add(n, factor());
      return n;
    }
    return power();
  }

  NodeId power() {
    NodeId base;
    if (at_kw("await")) {
      base = make(NodeKind::Await);
      add(base, leaf());
      add(base, primary(), Field::Value);
    } else {
      base = primary();
    }
    if (!at_op("**")) return base;
    const NodeId n = make(NodeKind::BinaryOp);
    add(n, base);
    add(n, leaf());
    add(n, factor());
    return n;
  }

  NodeId primary() {
    NodeId node = atom();
    while (true) {
      if (at_op(".")) {
        const NodeId a = make(NodeKind::Attribute);
        add(a, node, Field::Object);
        add(a, leaf());
        add(a, expect_name(), Field::Attr);
        node = a;
      } else if (at_op("(")) {
        const NodeId c = make(NodeKind::Call);
        add(c, node, Field::Function);
        add(c, arguments(), Field::Arguments);
        node = c;
      } else if (at_op("[")) {
        const NodeId s = make(NodeKind::Subscript);
        add(s, node, Field::Value);
        subscript_body(s);
        node = s;
      } else {
        return node;
      }
    }
  }

  NodeId atom() {
    switch (kind()) {
      case LexKind::Name: {
        const auto t = text();
        if (!is_python_keyword(t) || t == "None" || t == "True" || t == "False") return leaf();
        throw ParseFailure{};
      }
      case LexKind::Number:
        return leaf();
      case LexKind::String: {
        if (kind(1) != LexKind::String) return leaf();
        const NodeId n = make(NodeKind::StringConcat);
        while (kind() == LexKind::String) add(n, leaf());
        return n;
      }
      case LexKind::Op: {
        const auto t = text();
        if (t == "...") return leaf();
        if (t == "(") return bracketed([this] { return paren_atom(); });
        if (t == "[") return bracketed([this] { return list_atom(); });
        if (t == "{") return bracketed([this] { return brace_atom(); });
        throw ParseFailure{};
      }
      default:
        throw ParseFailure{};
    }
  }

  template <typename F>
  NodeId bracketed(F f) {
    const bool saved = no_in_;
    no_in_ = false;
    const NodeId n = f();
    no_in_ = saved;
    return n;
  }

  bool at_comp_for() const { return at_kw("for") || (at_kw("async") && at_kw("for", 1)); }

  void comp_clauses(NodeId into) {
    while (at_comp_for()) {
      const NodeId f = make(NodeKind::CompFor);
      if (at_kw("async")) add(f, leaf());
      add(f, expect_kw("for"));
      add(f, target_list(), Field::Target);
      add(f, expect_kw("in"));
      add(f, disjunction(), Field::Iter);
      add(into, f);
      while (at_kw("if")) {
        const NodeId c = make(NodeKind::CompIf);
        add(c, leaf());
        add(c, disjunction(), Field::Value);
        add(into, c);
      }
    }
  }

  NodeId paren_atom() {
    const NodeId open = leaf();
    if (at_op(")")) {
      const NodeId t = make(NodeKind::Tuple);
      add(t, open);
      add(t, leaf());
      return t;
    }
    if (at_kw("yield")) {
      const NodeId p = make(NodeKind::Paren);
      add(p, open);
      add(p, yield_expr());
      add(p, expect_op(")"));
      return p;
    }
    const NodeId first = star_named_expression();
    if (at_comp_for()) {
      const NodeId c = make(NodeKind::Comprehension);
      add(c, open);
      add(c, first, Field::Value);
      comp_clauses(c);
      add(c, expect_op(")"));
      return c;
    }
    if (at_op(",")) {
      const NodeId t = make(NodeKind::Tuple);
      add(t, open);
      add(t, first);
      while (at_op(",")) {
        add(t, leaf());
        if (at_op(")")) break;
        add(t, star_named_expression());
      }
      add(t, expect_op(")"));
      return t;
    }
    const NodeId p = make(NodeKind::Paren);
    add(p, open);
    add(p, first);
    add(p, expect_op(")"));
    return p;
  }

  NodeId list_atom() {
    const NodeId open = leaf();
    if (at_op("]")) {
      const NodeId l = make(NodeKind::List);
      add(l, open);
      add(l, leaf());
      return l;
    }
    const NodeId first = star_named_expression();
    if (at_comp_for()) {
      const NodeId c = make(NodeKind::Comprehension);
      add(c, open);
      add(c, first, Field::Value);
      comp_clauses(c);
      add(c, expect_op("]"));
      return c;
    }
    const NodeId l = make(NodeKind::List);
    add(l, open);
    add(l, first);
    while (at_op(",")) {
      add(l, leaf());
      if (at_op("]")) break;
      add(l, star_named_expression());
    }
    add(l, expect_op("]"));
    return l;
  }

  NodeId dict_or_set_item(bool& is_dict) {
    if (at_op("**")) {
      is_dict = true;
      const NodeId s = make(NodeKind::Starred);
      add(s, leaf());
      add(s, bitwise_or(), Field::Value);
      return s;
    }
    const NodeId key = star_named_expression();
    if (!at_op(":")) return key;
    is_dict = true;
    const NodeId p = make(NodeKind::Pair);
    add(p, key);
    add(p, leaf());
    add(p, expression(), Field::Value);
    return p;
  }

  NodeId brace_atom() {
    const NodeId open = leaf();
    if (at_op("}")) {
      const NodeId d = make(NodeKind::Dict);
      add(d, open);
      add(d, leaf());
      return d;
    }
    bool is_dict = false;
    const NodeId first = dict_or_set_item(is_dict);
    if (at_comp_for()) {
      const NodeId c = make(NodeKind::Comprehension);
      add(c, open);
      add(c, first, Field::Value);
      comp_clauses(c);
      add(c, expect_op("}"));
      return c;
    }
    std::vector<NodeId> items{first};
    while (at_op(",")) {
      items.push_back(leaf());
      if (at_op("}")) break;
      items.push_back(dict_or_set_item(is_dict));
    }
    const NodeId n = make(is_dict ? NodeKind::Dict : NodeKind::Set);
    add(n, open);
    for (NodeId it : items) add(n, it);
    add(n, expect_op("}"));
    return n;
  }

  NodeId arguments() {
    const bool saved = no_in_;
    no_in_ = false;
    const NodeId args = make(NodeKind::Arguments);
    add(args, expect_op("("));
    while (!at_op(")")) {
      if (at_op("*") || at_op("**")) {
        const NodeId s = make(NodeKind::Starred);
        add(s, leaf());
        add(s, expression(), Field::Value);
        add(args, s);
      } else if (at_name() && at_op("=", 1)) {
        const NodeId kw = make(NodeKind::KeywordArgument);
        add(kw, leaf(), Field::Name);
        add(kw, leaf());
        add(kw, expression(), Field::Value);
        add(args, kw);
      } else {
        const NodeId value = named_expression();
        if (at_comp_for()) {
          const NodeId c = make(NodeKind::Comprehension);
          add(c, value, Field::Value);
          comp_clauses(c);
          add(args, c);
        } else {
          add(args, value);
        }
      }
      if (!at_op(",")) break;
      add(args, leaf());
    }
    add(args, expect_op(")"));
    no_in_ = saved;
    return args;
  }

  NodeId slice_item() {
    if (!at_op(":")) {
      const NodeId first = star_named_expression();
      if (!at_op(":")) return first;
      const NodeId s = make(NodeKind::Slice);
      add(s, first);
      slice_rest(s);
      return s;
    }
    const NodeId s = make(NodeKind::Slice);
    slice_rest(s);
    return s;
  }

  void slice_rest(NodeId s) {
    add(s, expect_op(":"));
    if (!at_op(":") && !at_op("]") && !at_op(",")) add(s, expression());
    if (at_op(":")) {
      add(s, leaf());
      if (!at_op("]") && !at_op(",")) add(s, expression());
    }
  }

  void subscript_body(NodeId s) {
    const bool saved = no_in_;
    no_in_ = false;
    add(s, leaf());
    while (!at_op("]")) {
      add(s, slice_item());
      if (!at_op(",")) break;
      add(s, leaf());
    }
    add(s, expect_op("]"));
    no_in_ = saved;
  }

  NodeId yield_expr() {
    const NodeId y = make(NodeKind::Yield);
    add(y, expect_kw("yield"));
    if (at_kw("from")) {
      add(y, leaf());
      add(y, expression(), Field::Value);
    } else if (at_expression_start()) {
      add(y, star_expressions(), Field::Value);
    }
    return y;
  }

  // ---- comments -------------------------------------------------------------

  void attach_comments(NodeId root) {
    for (std::size_t k = 0; k < all_.size(); ++k) {
      if (all_[k].kind != LexKind::Comment) continue;
      Node n;
      n.kind = NodeKind::Leaf;
      n.span = all_[k].span;
      n.token = static_cast<std::int32_t>(k);
      nodes_.push_back(std::move(n));
      insert_leaf(root, static_cast<NodeId>(nodes_.size() - 1));
    }
  }

  void insert_leaf(NodeId into, NodeId lf) {
    const ByteSpan s = nodes_[lf].span;
    NodeId current = into;
    while (true) {
      auto& ch = nodes_[current].children;
      auto it = std::find_if(ch.begin(), ch.end(), [&](NodeId c) {
        const Node& cn = nodes_[c];
        return cn.kind != NodeKind::Leaf && cn.span.begin < s.begin && s.end <= cn.span.end;
      });
      if (it != ch.end()) {
        current = *it;
        continue;
      }
      auto pos = std::find_if(ch.begin(), ch.end(),
                              [&](NodeId c) { return nodes_[c].span.begin >= s.end; });
      ch.insert(pos, lf);
      nodes_[lf].parent = current;
      return;
    }
  }

  std::string_view src_;
  const std::vector<LexToken>& all_;
  std::vector<std::int32_t> sig_;
  std::size_t pos_ = 0;
  std::vector<Node> nodes_;
  bool no_in_ = false;
};

}  // namespace

SyntaxTree parse(std::string_view source, Language language) {
  if (language != Language::Python) {
    throw ConfigError("no grammar registered for language");
  }
  auto tokens = lex_python(source);
  auto [nodes, root] = Parser(source, tokens).run();
  return SyntaxTree(std::string(source), std::move(tokens), std::move(nodes), root);
}

}  // namespace sageforge::syntax
