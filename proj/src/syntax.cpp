#include "bevalkit/syntax.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <optional>
#include <set>
#include <sstream>

namespace bevalkit {

std::string_view op_name(Op op) {
  switch (op) {
    case Op::Int: return "int";
    case Op::Bool: return "bool";
    case Op::Ident: return "ident";
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "/";
    case Op::Mod: return "mod";
    case Op::Pow: return "**";
    case Op::Neg: return "neg";
    case Op::Eq: return "=";
    case Op::Neq: return "/=";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Gt: return ">";
    case Op::Ge: return ">=";
    case Op::And: return "&";
    case Op::Or: return "or";
    case Op::Not: return "not";
    case Op::Implies: return "=>";
    case Op::Equiv: return "<=>";
    case Op::ForAll: return "!";
    case Op::Exists: return "#";
    case Op::SetExt: return "{}";
    case Op::Interval: return "..";
    case Op::PowerSet: return "POW";
    case Op::Union: return "\\/";
    case Op::Inter: return "/\\";
    case Op::Member: return ":";
    case Op::NotMember: return "/:";
    case Op::Subset: return "<:";
    case Op::Maplet: return "|->";
    case Op::Relations: return "<->";
    case Op::TotalFun: return "-->";
    case Op::PartialFun: return "+->";
    case Op::Apply: return "apply";
    case Op::Dom: return "dom";
    case Op::Ran: return "ran";
    case Op::Card: return "card";
    case Op::SeqExt: return "[]";
    case Op::Size: return "size";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Expr

Expr::Expr() {
  static const std::shared_ptr<const Node> kTrue = [] {
    auto n = std::make_shared<Node>();
    n->op = Op::Bool;
    n->value = 1;
    return std::shared_ptr<const Node>(std::move(n));
  }();
  node_ = kTrue;
}

Expr Expr::integer(std::int64_t value) {
  auto n = std::make_shared<Node>();
  n->op = Op::Int;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::boolean(bool value) {
  auto n = std::make_shared<Node>();
  n->op = Op::Bool;
  n->value = value ? 1 : 0;
  return Expr(std::move(n));
}

Expr Expr::ident(std::string name) {
  auto n = std::make_shared<Node>();
  n->op = Op::Ident;
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::unary(Op op, Expr operand) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->args.push_back(std::move(operand));
  return Expr(std::move(n));
}

Expr Expr::binary(Op op, Expr lhs, Expr rhs) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->args.push_back(std::move(lhs));
  n->args.push_back(std::move(rhs));
  return Expr(std::move(n));
}

Expr Expr::nary(Op op, std::vector<Expr> args) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->args = std::move(args);
  return Expr(std::move(n));
}

Expr Expr::quantifier(Op op, std::string var, Expr domain, Expr body) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->name = std::move(var);
  n->args.push_back(std::move(domain));
  n->args.push_back(std::move(body));
  return Expr(std::move(n));
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  return (a <=> b) == std::strong_ordering::equal;
}

std::strong_ordering operator<=>(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.op() <=> b.op(); c != 0) return c;
  if (auto c = a.value() <=> b.value(); c != 0) return c;
  if (auto c = a.name().compare(b.name()); c != 0)
    return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  if (auto c = a.arity() <=> b.arity(); c != 0) return c;
  for (std::size_t i = 0; i < a.arity(); ++i) {
    if (auto c = a.arg(i) <=> b.arg(i); c != 0) return c;
  }
  return std::strong_ordering::equal;
}

// ---------------------------------------------------------------------------
// Lexer

ParseError::ParseError(const std::string& message, int line, int column, std::string token)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message +
                         (token.empty() ? std::string() : " near '" + token + "'")),
      line_(line),
      column_(column),
      token_(std::move(token)),
      detail_(message) {}

namespace {

// Longest match first.
constexpr std::array<std::string_view, 30> kSymbols = {
    "<=>", "<->", "-->", "+->", "|->",                                      //
    "<=",  ">=",  "/=",  "=>",  "==",  "<:", "/:", "\\/", "/\\", "..", "**",  //
    "+",   "-",   "*",   "/",   "=",   "<",  ">",  "&",   ":",   "(",  ")",   //
    "{",   "}",   ",",
};
constexpr std::array<std::string_view, 5> kExtraSymbols = {"[", "]", ".", "!", "#"};

const std::set<std::string, std::less<>>& keywords() {
  static const std::set<std::string, std::less<>> kw = {"or",  "not", "mod", "TRUE", "FALSE",
                                                        "POW", "dom", "ran", "card", "size"};
  return kw;
}

}  // namespace

std::vector<Token> tokenize(std::string_view text, int first_line) {
  std::vector<Token> out;
  int line = first_line;
  int column = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
      ++i;
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    const std::size_t start = i;
    const int tl = line;
    const int tc = column;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      out.push_back({TokenKind::Int, std::string(text.substr(i, j - i)), start, tl, tc});
      advance(j - i);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
        ++j;
      out.push_back({TokenKind::Ident, std::string(text.substr(i, j - i)), start, tl, tc});
      advance(j - i);
      continue;
    }
    std::string_view matched;
    for (auto sym : kSymbols) {
      if (text.substr(i, sym.size()) == sym) {
        matched = sym;
        break;
      }
    }
    if (matched.empty()) {
      for (auto sym : kExtraSymbols) {
        if (text.substr(i, 1) == sym) {
          matched = sym;
          break;
        }
      }
    }
    if (matched.empty()) {
      throw ParseError("unknown operator", tl, tc, std::string(1, c));
    }
    out.push_back({TokenKind::Symbol, std::string(matched), start, tl, tc});
    advance(matched.size());
  }
  out.push_back({TokenKind::End, "", text.size(), line, column});
  return out;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

// Binding strength, loosest first.
enum Prec : int {
  kPrecEquiv = 1,
  kPrecImplies = 2,
  kPrecOr = 3,
  kPrecAnd = 4,
  kPrecNot = 5,
  kPrecCompare = 6,
  kPrecSetOp = 7,
  kPrecInterval = 8,
  kPrecAdditive = 9,
  kPrecMultiplicative = 10,
  kPrecUnary = 11,
  kPrecPower = 12,
  kPrecPrimary = 13,
};

struct BinarySpec {
  std::string_view text;
  Op op;
};

constexpr BinarySpec kCompareOps[] = {
    {"=", Op::Eq},  {"/=", Op::Neq}, {"<", Op::Lt},         {"<=", Op::Le}, {">", Op::Gt},
    {">=", Op::Ge}, {":", Op::Member}, {"/:", Op::NotMember}, {"<:", Op::Subset},
};
constexpr BinarySpec kSetOps[] = {
    {"\\/", Op::Union},      {"/\\", Op::Inter},     {"|->", Op::Maplet},
    {"<->", Op::Relations},  {"-->", Op::TotalFun},  {"+->", Op::PartialFun},
};

class Parser {
 public:
  Parser(std::string_view text, int first_line) : tokens_(tokenize(text, first_line)) {}

  Expr parse_all() {
    if (peek().kind == TokenKind::End) fail("empty input");
    Expr e = parse_equiv();
    if (peek().kind != TokenKind::End) {
      if (is_symbol(")")) fail("unbalanced parentheses: unexpected ')'");
      fail("unexpected token");
    }
    return e;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  const Token& next() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }
  bool is_symbol(std::string_view s, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == TokenKind::Symbol && t.text == s;
  }
  bool is_keyword(std::string_view s) const {
    return peek().kind == TokenKind::Ident && peek().text == s;
  }
  [[noreturn]] void fail(const std::string& message) const {
    const Token& t = peek();
    throw ParseError(message, t.line, t.column, t.kind == TokenKind::End ? "<end>" : t.text);
  }
  void expect(std::string_view s) {
    if (is_symbol(s)) {
      next();
      return;
    }
    if (s == ")" && (peek().kind == TokenKind::End || is_symbol("}") || is_symbol("]")))
      fail("unbalanced parentheses: missing ')'");
    fail("expected '" + std::string(s) + "'");
  }

  Expr parse_equiv() {
    Expr lhs = parse_implies();
    while (is_symbol("<=>")) {
      next();
      lhs = Expr::binary(Op::Equiv, lhs, parse_implies());
    }
    return lhs;
  }

  Expr parse_implies() {
    Expr lhs = parse_or();
    if (is_symbol("=>")) {
      next();
      return Expr::binary(Op::Implies, lhs, parse_implies());
    }
    return lhs;
  }

  Expr parse_or() {
    Expr lhs = parse_and();
    while (is_keyword("or")) {
      next();
      lhs = Expr::binary(Op::Or, lhs, parse_and());
    }
    return lhs;
  }

  Expr parse_and() {
    Expr lhs = parse_not();
    while (is_symbol("&")) {
      next();
      lhs = Expr::binary(Op::And, lhs, parse_not());
    }
    return lhs;
  }

  Expr parse_not() {
    if (is_keyword("not")) {
      next();
      return Expr::unary(Op::Not, parse_not());
    }
    return parse_compare();
  }

  Expr parse_compare() {
    Expr lhs = parse_setop();
    for (;;) {
      const BinarySpec* hit = nullptr;
      for (const auto& spec : kCompareOps) {
        if (is_symbol(spec.text)) hit = &spec;
      }
      if (!hit) return lhs;
      next();
      lhs = Expr::binary(hit->op, lhs, parse_setop());
    }
  }

  Expr parse_setop() {
    Expr lhs = parse_interval();
    for (;;) {
      const BinarySpec* hit = nullptr;
      for (const auto& spec : kSetOps) {
        if (is_symbol(spec.text)) hit = &spec;
      }
      if (!hit) return lhs;
      next();
      lhs = Expr::binary(hit->op, lhs, parse_interval());
    }
  }

  Expr parse_interval() {
    Expr lhs = parse_additive();
    while (is_symbol("..")) {
      next();
      lhs = Expr::binary(Op::Interval, lhs, parse_additive());
    }
    return lhs;
  }

  Expr parse_additive() {
    Expr lhs = parse_multiplicative();
    for (;;) {
      if (is_symbol("+")) {
        next();
        lhs = Expr::binary(Op::Add, lhs, parse_multiplicative());
      } else if (is_symbol("-")) {
        next();
        lhs = Expr::binary(Op::Sub, lhs, parse_multiplicative());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_multiplicative() {
    Expr lhs = parse_unary();
    for (;;) {
      Op op;
      if (is_symbol("*")) {
        op = Op::Mul;
      } else if (is_symbol("/")) {
        op = Op::Div;
      } else if (is_keyword("mod")) {
        op = Op::Mod;
      } else {
        return lhs;
      }
      next();
      lhs = Expr::binary(op, lhs, parse_unary());
    }
  }

  Expr parse_unary() {
    if (is_symbol("-")) {
      next();
      const bool bare_literal = peek().kind == TokenKind::Int;
      Expr operand = parse_unary();
      // `-5` is a literal; `-(5)` stays a negation.
      if (bare_literal && operand.is(Op::Int)) return Expr::integer(-operand.value());
      return Expr::unary(Op::Neg, operand);
    }
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_postfix();
    if (is_symbol("**")) {
      next();
      return Expr::binary(Op::Pow, base, parse_unary());
    }
    return base;
  }

  Expr parse_postfix() {
    const bool callable = !(peek().kind == TokenKind::Int || is_keyword("TRUE") ||
                            is_keyword("FALSE") || is_symbol("!") || is_symbol("#"));
    Expr e = parse_primary();
    while (callable && is_symbol("(")) {
      next();
      Expr arg = parse_arguments(")");
      e = Expr::binary(Op::Apply, e, arg);
    }
    return e;
  }

  // f(x, y) applies f to the maplet x |-> y.
  Expr parse_arguments(std::string_view close) {
    Expr arg = parse_equiv();
    while (is_symbol(",")) {
      next();
      arg = Expr::binary(Op::Maplet, arg, parse_equiv());
    }
    expect(close);
    return arg;
  }

  std::vector<Expr> parse_list(std::string_view close) {
    std::vector<Expr> items;
    if (is_symbol(close)) {
      next();
      return items;
    }
    items.push_back(parse_equiv());
    while (is_symbol(",")) {
      next();
      items.push_back(parse_equiv());
    }
    if (!is_symbol(close)) {
      if (peek().kind == TokenKind::End) fail("unbalanced brackets: missing '" + std::string(close) + "'");
      fail("expected ',' or '" + std::string(close) + "'");
    }
    next();
    return items;
  }

  Expr parse_builtin(Op op) {
    next();
    if (!is_symbol("(")) fail("expected '(' after " + std::string(op_name(op)));
    next();
    Expr arg = parse_equiv();
    expect(")");
    return Expr::unary(op, arg);
  }

  Expr parse_primary() {
    const Token& t = peek();
    if (t.kind == TokenKind::Int) {
      std::int64_t v = 0;
      auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
      if (ec != std::errc()) fail("integer literal out of range");
      next();
      return Expr::integer(v);
    }
    if (t.kind == TokenKind::Ident) {
      if (t.text == "TRUE" || t.text == "FALSE") {
        const bool v = t.text == "TRUE";
        next();
        return Expr::boolean(v);
      }
      if (t.text == "POW") return parse_builtin(Op::PowerSet);
      if (t.text == "dom") return parse_builtin(Op::Dom);
      if (t.text == "ran") return parse_builtin(Op::Ran);
      if (t.text == "card") return parse_builtin(Op::Card);
      if (t.text == "size") return parse_builtin(Op::Size);
      if (keywords().count(t.text)) fail("unexpected keyword");
      std::string name = t.text;
      next();
      return Expr::ident(std::move(name));
    }
    if (t.kind == TokenKind::End) fail("unexpected end of input");
    if (is_symbol("(")) {
      next();
      Expr e = parse_equiv();
      expect(")");
      return e;
    }
    if (is_symbol("{")) {
      next();
      return Expr::nary(Op::SetExt, parse_list("}"));
    }
    if (is_symbol("[")) {
      next();
      return Expr::nary(Op::SeqExt, parse_list("]"));
    }
    if (is_symbol("!") || is_symbol("#")) return parse_quantifier();
    if (is_symbol(")")) fail("unbalanced parentheses: unexpected ')'");
    fail("unexpected token");
  }

  Expr parse_quantifier() {
    const Op op = is_symbol("!") ? Op::ForAll : Op::Exists;
    const Token& head = peek();
    const int line = head.line;
    const int column = head.column;
    next();
    if (peek().kind != TokenKind::Ident || keywords().count(peek().text))
      fail("expected a bound identifier");
    std::string var = next().text;
    expect(".");
    if (!is_symbol("(")) fail("expected '(' after quantified variable");
    next();
    Expr body = parse_equiv();
    expect(")");

    auto constrains = [&](const Expr& e) {
      return e.is(Op::Member) && e.arg(0).is_ident(var);
    };
    auto reject = [&]() -> Expr {
      throw ParseError("quantifier body must begin with '" + var + " : <domain>'", line, column,
                       std::string(op == Op::ForAll ? "!" : "#") + var);
    };
    // Peels the leftmost conjunct `var : D` off an `&` chain.
    auto peel = [&](auto&& self, const Expr& chain, Expr& domain) -> std::optional<Expr> {
      if (constrains(chain)) {
        domain = chain.arg(1);
        return std::nullopt;
      }
      if (!chain.is(Op::And)) reject();
      auto rest = self(self, chain.arg(0), domain);
      if (!rest) return chain.arg(1);
      return Expr::binary(Op::And, *rest, chain.arg(1));
    };

    Expr domain;
    if (op == Op::ForAll) {
      if (!body.is(Op::Implies)) reject();
      auto guard_rest = peel(peel, body.arg(0), domain);
      Expr inner = guard_rest ? Expr::binary(Op::Implies, *guard_rest, body.arg(1)) : body.arg(1);
      return Expr::quantifier(op, std::move(var), domain, inner);
    }
    auto rest = peel(peel, body, domain);
    return Expr::quantifier(op, std::move(var), domain, rest ? *rest : Expr::boolean(true));
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_predicate(std::string_view text, int first_line) {
  return Parser(text, first_line).parse_all();
}

// ---------------------------------------------------------------------------
// Renderer

namespace {

int precedence(const Expr& e) {
  switch (e.op()) {
    case Op::Equiv: return kPrecEquiv;
    case Op::Implies: return kPrecImplies;
    case Op::Or: return kPrecOr;
    case Op::And: return kPrecAnd;
    case Op::Not: return kPrecNot;
    case Op::Eq:
    case Op::Neq:
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge:
    case Op::Member:
    case Op::NotMember:
    case Op::Subset: return kPrecCompare;
    case Op::Union:
    case Op::Inter:
    case Op::Maplet:
    case Op::Relations:
    case Op::TotalFun:
    case Op::PartialFun: return kPrecSetOp;
    case Op::Interval: return kPrecInterval;
    case Op::Add:
    case Op::Sub: return kPrecAdditive;
    case Op::Mul:
    case Op::Div:
    case Op::Mod: return kPrecMultiplicative;
    case Op::Neg: return kPrecUnary;
    case Op::Pow: return kPrecPower;
    case Op::Int: return e.value() < 0 ? kPrecUnary : kPrecPrimary;
    default: return kPrecPrimary;
  }
}

bool is_function_set(const Expr& e) {
  return e.is(Op::TotalFun) || e.is(Op::PartialFun) || e.is(Op::Relations);
}

bool right_associative(Op op) { return op == Op::Implies || op == Op::Pow; }

std::string_view infix_text(Op op) {
  switch (op) {
    case Op::Mod: return "mod";
    case Op::Or: return "or";
    default: return op_name(op);
  }
}

void render_to(std::ostringstream& out, const Expr& e);

// Operands of operators: relation/function set constructions are always
// parenthesized, `x : (1..8 --> {0,1})`.
void render_operand(std::ostringstream& out, const Expr& child, bool parens) {
  if (parens || is_function_set(child)) {
    out << '(';
    render_to(out, child);
    out << ')';
  } else {
    render_to(out, child);
  }
}

void render_binary(std::ostringstream& out, const Expr& e, std::string_view sep) {
  const int p = precedence(e);
  const bool right = right_associative(e.op());
  const int lp = precedence(e.arg(0));
  const int rp = precedence(e.arg(1));
  render_operand(out, e.arg(0), right ? lp <= p : lp < p);
  out << sep;
  render_operand(out, e.arg(1), right ? rp < p : rp <= p);
}

void render_list(std::ostringstream& out, std::span<const Expr> items) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out << ',';
    render_to(out, items[i]);
  }
}

bool callable_without_parens(const Expr& f) {
  switch (f.op()) {
    case Op::Ident:
    case Op::Apply:
    case Op::SetExt:
    case Op::SeqExt:
    case Op::Dom:
    case Op::Ran:
    case Op::Card:
    case Op::Size:
    case Op::PowerSet: return true;
    default: return false;
  }
}

void render_to(std::ostringstream& out, const Expr& e) {
  switch (e.op()) {
    case Op::Int: out << e.value(); return;
    case Op::Bool: out << (e.truth() ? "TRUE" : "FALSE"); return;
    case Op::Ident: out << e.name(); return;
    case Op::Neg: {
      const Expr& x = e.arg(0);
      const bool parens = precedence(x) <= kPrecUnary || x.is(Op::Int);
      out << '-';
      render_operand(out, x, parens);
      return;
    }
    case Op::Not:
      out << "not(";
      render_to(out, e.arg(0));
      out << ')';
      return;
    case Op::PowerSet:
    case Op::Dom:
    case Op::Ran:
    case Op::Card:
    case Op::Size:
      out << op_name(e.op()) << '(';
      render_to(out, e.arg(0));
      out << ')';
      return;
    case Op::SetExt:
      out << '{';
      render_list(out, e.args());
      out << '}';
      return;
    case Op::SeqExt:
      out << '[';
      render_list(out, e.args());
      out << ']';
      return;
    case Op::Apply:
      render_operand(out, e.arg(0), !callable_without_parens(e.arg(0)));
      out << '(';
      render_to(out, e.arg(1));
      out << ')';
      return;
    case Op::Interval: render_binary(out, e, ".."); return;
    case Op::ForAll:
    case Op::Exists: {
      const bool all = e.is(Op::ForAll);
      const Expr head = Expr::binary(Op::Member, Expr::ident(e.name()), e.domain());
      out << (all ? '!' : '#') << e.name() << ".(";
      render_binary(out, Expr::binary(all ? Op::Implies : Op::And, head, e.body()),
                    all ? " => " : " & ");
      out << ')';
      return;
    }
    default: {
      std::string sep = " ";
      sep += infix_text(e.op());
      sep += ' ';
      render_binary(out, e, sep);
      return;
    }
  }
}

}  // namespace

std::string render(const Expr& e) {
  std::ostringstream out;
  render_to(out, e);
  return out.str();
}

// ---------------------------------------------------------------------------
// Definitions

void DefinitionTable::add(std::string name, Expr body) {
  if (index_.count(name)) throw std::invalid_argument("duplicate definition '" + name + "'");
  index_.emplace(name, entries_.size());
  entries_.emplace_back(std::move(name), std::move(body));
}

const Expr* DefinitionTable::find(std::string_view name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &entries_[it->second].second;
}

void DefinitionTable::check_acyclic() const {
  enum class Mark { White, Grey, Black };
  std::vector<Mark> mark(entries_.size(), Mark::White);
  std::vector<std::string> path;
  auto visit = [&](auto&& self, std::size_t i) -> void {
    mark[i] = Mark::Grey;
    path.push_back(entries_[i].first);
    for (const auto& ref : free_identifiers(entries_[i].second)) {
      auto it = index_.find(ref);
      if (it == index_.end()) continue;
      if (mark[it->second] == Mark::Grey) {
        std::string cycle;
        auto from = std::find(path.begin(), path.end(), ref);
        for (; from != path.end(); ++from) cycle += *from + " -> ";
        throw std::invalid_argument("cyclic definition: " + cycle + ref);
      }
      if (mark[it->second] == Mark::White) self(self, it->second);
    }
    path.pop_back();
    mark[i] = Mark::Black;
  };
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (mark[i] == Mark::White) visit(visit, i);
  }
}

DefinitionTable parse_definitions(std::string_view text, int first_line) {
  DefinitionTable table;
  int line_no = first_line;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    const auto first = line.find_first_not_of(" \t\r");
    if (first != std::string_view::npos && line.substr(first, 2) != "//") {
      const auto eq = line.find("==");
      const std::string_view head = line.substr(0, eq);
      const auto tokens = tokenize(head, line_no);
      if (eq == std::string_view::npos || tokens.size() != 2 ||
          tokens[0].kind != TokenKind::Ident || keywords().count(tokens[0].text)) {
        throw ParseError("expected 'NAME == <expression>'", line_no, static_cast<int>(first) + 1,
                         std::string(line.substr(first)));
      }
      // Column positions inside the body stay relative to the line start.
      std::string body(eq + 2, ' ');
      body += line.substr(eq + 2);
      table.add(tokens[0].text, parse_predicate(body, line_no));
    }
    if (end == text.size()) break;
    start = end + 1;
    ++line_no;
  }
  table.check_acyclic();
  return table;
}

// ---------------------------------------------------------------------------
// Tree utilities

namespace {

void collect_free(const Expr& e, std::vector<std::string>& bound, std::vector<std::string>& out) {
  if (e.is(Op::Ident)) {
    if (std::find(bound.begin(), bound.end(), e.name()) == bound.end() &&
        std::find(out.begin(), out.end(), e.name()) == out.end())
      out.push_back(e.name());
    return;
  }
  if (e.is(Op::ForAll) || e.is(Op::Exists)) {
    collect_free(e.domain(), bound, out);
    bound.push_back(e.name());
    collect_free(e.body(), bound, out);
    bound.pop_back();
    return;
  }
  for (const auto& a : e.args()) collect_free(a, bound, out);
}

}  // namespace

std::vector<std::string> free_identifiers(const Expr& e) {
  std::vector<std::string> bound;
  std::vector<std::string> out;
  collect_free(e, bound, out);
  return out;
}

bool occurs_free(const Expr& e, std::string_view name) {
  if (e.is(Op::Ident)) return e.name() == name;
  if (e.is(Op::ForAll) || e.is(Op::Exists)) {
    return occurs_free(e.domain(), name) || (e.name() != name && occurs_free(e.body(), name));
  }
  for (const auto& a : e.args()) {
    if (occurs_free(a, name)) return true;
  }
  return false;
}

Expr substitute(const Expr& e, std::string_view name, const Expr& replacement) {
  if (!occurs_free(e, name)) return e;
  if (e.is(Op::Ident)) return replacement;
  if (e.is(Op::ForAll) || e.is(Op::Exists)) {
    Expr domain = substitute(e.domain(), name, replacement);
    Expr body = e.name() == name ? e.body() : substitute(e.body(), name, replacement);
    return Expr::quantifier(e.op(), e.name(), domain, body);
  }
  std::vector<Expr> args;
  args.reserve(e.arity());
  for (const auto& a : e.args()) args.push_back(substitute(a, name, replacement));
  return Expr::nary(e.op(), std::move(args));
}

std::vector<Expr> conjuncts(const Expr& e) {
  std::vector<Expr> out;
  auto walk = [&](auto&& self, const Expr& x) -> void {
    if (x.is(Op::And)) {
      self(self, x.arg(0));
      self(self, x.arg(1));
    } else {
      out.push_back(x);
    }
  };
  walk(walk, e);
  return out;
}

Expr conjunction(std::span<const Expr> parts) {
  if (parts.empty()) return Expr::boolean(true);
  Expr acc = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) acc = Expr::binary(Op::And, acc, parts[i]);
  return acc;
}

bool is_builtin_set_name(std::string_view name) {
  return name == "INTEGER" || name == "NATURAL" || name == "NATURAL1" || name == "INT" ||
         name == "NAT" || name == "NAT1" || name == "BOOL";
}

}  // namespace bevalkit
