#include "bevalkit/eval.hpp"

#include <algorithm>
#include <chrono>
#include <charconv>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

namespace bevalkit {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::True: return "TRUE";
    case Verdict::False: return "FALSE";
    case Verdict::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

std::string_view to_string(UnknownReason r) {
  switch (r) {
    case UnknownReason::Timeout: return "timeout";
    case UnknownReason::UnboundedDomain: return "unbounded-domain";
    case UnknownReason::UnsupportedConstruct: return "unsupported-construct";
    case UnknownReason::UnknownIdentifier: return "unknown-identifier";
    case UnknownReason::IllDefined: return "ill-defined";
  }
  return "unsupported-construct";
}

// ---------------------------------------------------------------------------
// EvalParams

void EvalParams::validate() const {
  if (minint >= maxint)
    throw std::invalid_argument("MININT must be smaller than MAXINT");
  if (timeout_ms <= 0) throw std::invalid_argument("TIME_OUT must be positive");
}

std::pair<std::int64_t, std::int64_t> EvalParams::integer_range() const {
  if (!clpfd) return {minint, maxint};
  return {std::max(minint, kClpfdMin), std::min(maxint, kClpfdMax)};
}

std::string EvalParams::to_flag_string() const {
  std::ostringstream out;
  out << "-p MAXINT " << maxint << " -p MININT " << minint << " -p TIME_OUT " << timeout_ms;
  if (init) out << " -p init";
  if (kodkod) out << " -p KODKOD TRUE";
  if (smt) out << " -p SMT TRUE";
  if (clpfd) out << " -p CLPFD TRUE";
  return out.str();
}

namespace {

std::int64_t parse_flag_int(std::string_view name, std::string_view text) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw std::invalid_argument("parameter " + std::string(name) + " expects an integer, got '" +
                                std::string(text) + "'");
  return v;
}

std::optional<bool> parse_flag_bool(std::string_view text) {
  if (text == "TRUE" || text == "true") return true;
  if (text == "FALSE" || text == "false") return false;
  return std::nullopt;
}

}  // namespace

EvalParams EvalParams::from_flag_string(std::string_view text) {
  std::vector<std::string> words;
  {
    std::istringstream in{std::string(text)};
    std::string w;
    while (in >> w) words.push_back(w);
  }
  EvalParams params;
  std::size_t i = 0;
  auto need_value = [&](const std::string& name) -> const std::string& {
    if (i >= words.size()) throw std::invalid_argument("parameter " + name + " needs a value");
    return words[i++];
  };
  auto need_bool = [&](const std::string& name) {
    const auto& w = need_value(name);
    auto b = parse_flag_bool(w);
    if (!b) throw std::invalid_argument("parameter " + name + " expects TRUE or FALSE");
    return *b;
  };
  while (i < words.size()) {
    if (words[i] != "-p")
      throw std::invalid_argument("expected '-p' before '" + words[i] + "'");
    ++i;
    const std::string name = need_value("-p");
    if (name == "MAXINT") {
      params.maxint = parse_flag_int(name, need_value(name));
    } else if (name == "MININT") {
      params.minint = parse_flag_int(name, need_value(name));
    } else if (name == "TIME_OUT") {
      params.timeout_ms = parse_flag_int(name, need_value(name));
    } else if (name == "init") {
      params.init = true;
      if (i < words.size()) {
        if (auto b = parse_flag_bool(words[i])) {
          params.init = *b;
          ++i;
        }
      }
    } else if (name == "KODKOD") {
      params.kodkod = need_bool(name);
    } else if (name == "SMT") {
      params.smt = need_bool(name);
    } else if (name == "CLPFD") {
      params.clpfd = need_bool(name);
    } else {
      throw std::invalid_argument("unknown parameter '" + name + "'");
    }
  }
  params.validate();
  return params;
}

// ---------------------------------------------------------------------------
// Expansion

Expr expand(const Expr& e, const DefinitionTable& defs) {
  if (defs.empty()) return e;
  std::map<std::string, Expr, std::less<>> memo;
  std::vector<std::string> bound;
  auto walk = [&](auto&& self, const Expr& x) -> Expr {
    if (x.is(Op::Ident)) {
      if (std::find(bound.begin(), bound.end(), x.name()) != bound.end()) return x;
      const Expr* body = defs.find(x.name());
      if (!body) return x;
      if (auto it = memo.find(x.name()); it != memo.end()) return it->second;
      // Definition bodies are closed apart from other definitions.
      std::vector<std::string> saved;
      saved.swap(bound);
      Expr out = self(self, *body);
      bound.swap(saved);
      memo.emplace(x.name(), out);
      return out;
    }
    if (x.is(Op::ForAll) || x.is(Op::Exists)) {
      Expr domain = self(self, x.domain());
      bound.push_back(x.name());
      Expr body = self(self, x.body());
      bound.pop_back();
      return Expr::quantifier(x.op(), x.name(), domain, body);
    }
    if (x.arity() == 0) return x;
    std::vector<Expr> args;
    args.reserve(x.arity());
    bool changed = false;
    for (const auto& a : x.args()) {
      args.push_back(self(self, a));
      changed = changed || !(args.back() == a);
    }
    return changed ? Expr::nary(x.op(), std::move(args)) : x;
  };
  return walk(walk, e);
}

// ---------------------------------------------------------------------------
// Evaluator

namespace {

using SteadyClock = std::chrono::steady_clock;

// Deadline expiry or cancellation; unwinds the whole evaluation.
struct Interrupted {};

struct Truth {
  Verdict verdict = Verdict::Unknown;
  UnknownReason reason = UnknownReason::UnsupportedConstruct;
  std::string detail;
  std::vector<Binding> witness;

  static Truth yes() { return {Verdict::True, {}, {}, {}}; }
  static Truth no() { return {Verdict::False, {}, {}, {}}; }
  static Truth of(bool b) { return b ? yes() : no(); }
  static Truth unknown(UnknownReason r, std::string detail) {
    return {Verdict::Unknown, r, std::move(detail), {}};
  }
  static Truth unknown(const EvalError& err) { return unknown(err.reason(), err.what()); }

  bool is_true() const { return verdict == Verdict::True; }
  bool is_false() const { return verdict == Verdict::False; }
  bool is_unknown() const { return verdict == Verdict::Unknown; }
};

[[noreturn]] void type_error(const std::string& what) {
  throw EvalError(UnknownReason::UnsupportedConstruct, "type mismatch: " + what);
}

[[noreturn]] void cap_exceeded(const std::string& what, std::int64_t n) {
  throw EvalError(UnknownReason::UnsupportedConstruct,
                  what + " of " + std::to_string(n) + " elements exceeds the enumeration cap");
}

bool is_symbolic_set(const Expr& s) {
  switch (s.op()) {
    case Op::Interval:
    case Op::PowerSet:
    case Op::TotalFun:
    case Op::PartialFun:
    case Op::Relations:
    case Op::Union:
    case Op::Inter:
    case Op::Mul:
      return true;
    case Op::Ident: return is_builtin_set_name(s.name());
    default: return false;
  }
}

// Quantifier domain: an integer range or a function space enumerated lazily,
// or a finite set.
struct Domain {
  bool is_range = true;
  std::int64_t lo = 0;
  std::int64_t hi = -1;
  Value set;
  // Function space `set --> codomain` (or `+->` when partial).
  bool is_functions = false;
  bool partial = false;
  Value codomain;
};

class Evaluator {
 public:
  Evaluator(const EvalParams& params, const EvalControl& control, SteadyClock::time_point deadline)
      : params_(params), cancel_(control.cancel), deadline_(deadline) {
    std::tie(lo_, hi_) = params.integer_range();
    for (const auto& b : control.bindings) env_.push_back(b);
  }

  // ---- expressions ------------------------------------------------------

  Value value(const Expr& e) {
    tick();
    switch (e.op()) {
      case Op::Int: return bounded(e.value());
      case Op::Bool: return Value::boolean(e.truth());
      case Op::Ident: return lookup(e.name());
      case Op::Add: return arith(e);
      case Op::Sub: {
        Value a = value(e.arg(0));
        Value b = value(e.arg(1));
        if (a.is_int() && b.is_int()) return checked_sub(a.as_int(), b.as_int());
        if (a.is_set() && b.is_set()) return difference(a, b);
        type_error("'-' needs two integers or two sets");
      }
      case Op::Mul: {
        Value a = value(e.arg(0));
        Value b = value(e.arg(1));
        if (a.is_int() && b.is_int()) return checked_mul(a.as_int(), b.as_int());
        if (a.is_set() && b.is_set()) return product(a, b);
        type_error("'*' needs two integers or two sets");
      }
      case Op::Div:
      case Op::Mod:
      case Op::Pow: return arith(e);
      case Op::Neg: {
        Value a = value(e.arg(0));
        if (!a.is_int()) type_error("unary '-' needs an integer");
        return bounded(-static_cast<__int128>(a.as_int()));
      }
      case Op::SetExt: {
        std::vector<Value> items;
        items.reserve(e.arity());
        for (const auto& a : e.args()) items.push_back(value(a));
        return Value::set(std::move(items));
      }
      case Op::SeqExt: {
        std::vector<Value> items;
        items.reserve(e.arity());
        for (std::size_t i = 0; i < e.arity(); ++i)
          items.push_back(Value::pair(bounded(static_cast<std::int64_t>(i) + 1), value(e.arg(i))));
        return Value::sorted_set(std::move(items));
      }
      case Op::Interval: {
        auto [lo, hi] = int_pair(e, "'..'");
        return range_set(lo, hi);
      }
      case Op::PowerSet: return power_set(as_set(value(e.arg(0)), "POW"));
      case Op::Union: {
        Value a = as_set(value(e.arg(0)), "'\\/'");
        Value b = as_set(value(e.arg(1)), "'\\/'");
        std::vector<Value> out;
        std::set_union(a.elements().begin(), a.elements().end(), b.elements().begin(),
                       b.elements().end(), std::back_inserter(out));
        return Value::sorted_set(std::move(out));
      }
      case Op::Inter: {
        Value a = as_set(value(e.arg(0)), "'/\\'");
        Value b = as_set(value(e.arg(1)), "'/\\'");
        std::vector<Value> out;
        std::set_intersection(a.elements().begin(), a.elements().end(), b.elements().begin(),
                              b.elements().end(), std::back_inserter(out));
        return Value::sorted_set(std::move(out));
      }
      case Op::Maplet: return Value::pair(value(e.arg(0)), value(e.arg(1)));
      case Op::Relations: {
        Value pairs = product(as_set(value(e.arg(0)), "'<->'"), as_set(value(e.arg(1)), "'<->'"));
        return power_set(pairs);
      }
      case Op::TotalFun:
      case Op::PartialFun:
        return functions(as_set(value(e.arg(0)), std::string(op_name(e.op()))),
                         as_set(value(e.arg(1)), std::string(op_name(e.op()))),
                         e.is(Op::PartialFun));
      case Op::Apply: return apply(value(e.arg(0)), value(e.arg(1)));
      case Op::Dom:
      case Op::Ran: {
        Value r = as_relation(value(e.arg(0)), std::string(op_name(e.op())));
        std::vector<Value> out;
        out.reserve(r.size());
        for (const auto& p : r.elements()) out.push_back(e.is(Op::Dom) ? p.first() : p.second());
        return Value::set(std::move(out));
      }
      case Op::Card: return bounded(card(e.arg(0)));
      case Op::Size: {
        Value s = value(e.arg(0));
        if (!s.is_set()) type_error("size needs a sequence");
        std::int64_t i = 1;
        for (const auto& p : s.elements()) {
          if (!p.is_pair() || !p.first().is_int() || p.first().as_int() != i)
            throw EvalError(UnknownReason::IllDefined, "size of a set that is not a sequence");
          ++i;
        }
        return bounded(static_cast<std::int64_t>(s.size()));
      }
      default: {
        Truth t = truth(e);
        if (t.is_unknown()) throw EvalError(t.reason, t.detail);
        return Value::boolean(t.is_true());
      }
    }
  }

  // ---- predicates (Kleene three-valued) ----------------------------------

  Truth truth(const Expr& e) {
    tick();
    switch (e.op()) {
      case Op::Bool: return Truth::of(e.truth());
      case Op::And: {
        Truth a = truth(e.arg(0));
        if (a.is_false()) return a;
        Truth b = truth(e.arg(1));
        if (b.is_false()) return b;
        if (a.is_unknown()) return a;
        return b;
      }
      case Op::Or: {
        Truth a = truth(e.arg(0));
        if (a.is_true()) return a;
        Truth b = truth(e.arg(1));
        if (b.is_true()) return b;
        if (a.is_unknown()) return a;
        if (b.is_unknown()) return b;
        a.witness.insert(a.witness.end(), b.witness.begin(), b.witness.end());
        return a;
      }
      case Op::Implies: {
        Truth a = truth(e.arg(0));
        if (a.is_false()) return Truth::yes();
        Truth b = truth(e.arg(1));
        if (b.is_true()) return b;
        if (a.is_unknown()) return a;
        return b;
      }
      case Op::Equiv: {
        Truth a = truth(e.arg(0));
        Truth b = truth(e.arg(1));
        if (a.is_unknown()) return a;
        if (b.is_unknown()) return b;
        return Truth::of(a.verdict == b.verdict);
      }
      case Op::Not: {
        Truth a = truth(e.arg(0));
        if (a.is_unknown()) return a;
        return Truth::of(a.is_false());
      }
      case Op::ForAll:
      case Op::Exists: return quantify(e);
      default: return atom(e);
    }
  }

  // ---- top level -----------------------------------------------------------

  // Evaluates `H1 & ... & Hn => goal`. Free identifiers constrained by a
  // hypothesis `id = <closed>` are bound to that value; those constrained by
  // `id : <closed set>` are universally quantified over it.
  Truth check(std::vector<Expr> hyps, Expr goal) {
    std::vector<Expr> flat;
    for (const auto& h : hyps) {
      for (auto& c : conjuncts(h)) flat.push_back(std::move(c));
    }
    while (goal.is(Op::Implies)) {
      for (auto& c : conjuncts(goal.arg(0))) flat.push_back(std::move(c));
      goal = goal.arg(1);
    }

    std::vector<std::string> known;
    for (const auto& b : env_) known.push_back(b.name);
    auto is_known = [&](const std::string& n) {
      return is_builtin_set_name(n) || std::find(known.begin(), known.end(), n) != known.end();
    };
    auto closed = [&](const Expr& x, const std::string& self) {
      for (const auto& n : free_identifiers(x)) {
        if (n == self || !is_known(n)) return false;
      }
      return true;
    };

    std::vector<bool> used(flat.size(), false);
    binders_.clear();
    for (bool progress = true; progress;) {
      progress = false;
      for (std::size_t i = 0; i < flat.size() && !progress; ++i) {
        if (used[i]) continue;
        const Expr& h = flat[i];
        if (h.is(Op::Eq) || h.is(Op::Member)) {
          for (int side = 0; side < (h.is(Op::Eq) ? 2 : 1); ++side) {
            const Expr& id = h.arg(side);
            const Expr& rhs = h.arg(1 - side);
            if (!id.is(Op::Ident) || is_known(id.name()) || !closed(rhs, id.name())) continue;
            binders_.push_back({h.is(Op::Eq), id.name(), rhs, i});
            known.push_back(id.name());
            used[i] = true;
            progress = true;
            break;
          }
        }
      }
    }
    hyps_ = std::move(flat);
    goal_ = std::move(goal);
    return chain(0);
  }

 private:
  struct Binder {
    bool is_let;
    std::string name;
    Expr source;
    std::size_t hyp_index;
  };

  void tick() {
    if ((++steps_ & 0xFF) != 0) return;
    if (cancel_ && cancel_->load(std::memory_order_relaxed)) throw Interrupted{};
    if (SteadyClock::now() > deadline_) throw Interrupted{};
  }

  Truth chain(std::size_t i) {
    if (i == binders_.size()) return leaf();
    const Binder& b = binders_[i];
    if (b.is_let) {
      Value v;
      try {
        v = value(b.source);
      } catch (const EvalError&) {
        // Left unbound; uses of the identifier report why.
        return chain(i + 1);
      }
      env_.push_back({b.name, v});
      Truth t = chain(i + 1);
      env_.pop_back();
      if (t.is_false()) t.witness.insert(t.witness.begin(), Binding{b.name, v});
      return t;
    }
    Domain d;
    try {
      d = domain_of(b.source);
    } catch (const EvalError&) {
      // As for a failed let: the hypothesis is judged in the leaf.
      return chain(i + 1);
    }
    std::vector<Expr> guards;
    for (std::size_t h = 0; h < hyps_.size(); ++h) {
      if (h != b.hyp_index) guards.push_back(hyps_[h]);
    }
    return for_each(b.name, d, guards, /*universal=*/true, [&] { return chain(i + 1); });
  }

  Truth leaf() {
    std::optional<Truth> unknown;
    for (const auto& h : hyps_) {
      Truth t = truth(h);
      if (t.is_false()) return Truth::yes();
      if (t.is_unknown() && !unknown) unknown = std::move(t);
    }
    Truth g = truth(goal_);
    if (g.is_true()) return g;
    if (unknown) return *unknown;
    return g;
  }

  Truth quantify(const Expr& e) {
    Domain d;
    try {
      d = domain_of(e.domain());
    } catch (const EvalError& err) {
      return Truth::unknown(err);
    }
    const bool universal = e.is(Op::ForAll);
    std::vector<Expr> guards;
    if (universal) {
      if (e.body().is(Op::Implies)) guards = conjuncts(e.body().arg(0));
    } else {
      guards = conjuncts(e.body());
    }
    return for_each(e.name(), d, guards, universal, [&] { return truth(e.body()); });
  }

  template <class Body>
  Truth for_each(const std::string& var, Domain d, const std::vector<Expr>& guards, bool universal,
                 Body&& body) {
    if (params_.smt) d = prune(var, std::move(d), guards);
    std::optional<Truth> unknown;
    auto visit = [&](const Value& v) -> std::optional<Truth> {
      tick();
      env_.push_back({var, v});
      Truth t = body();
      env_.pop_back();
      if (universal && t.is_false()) {
        t.witness.insert(t.witness.begin(), Binding{var, v});
        return t;
      }
      if (!universal && t.is_true()) return Truth::yes();
      if (t.is_unknown() && !unknown) unknown = std::move(t);
      return std::nullopt;
    };
    const bool reverse = params_.kodkod;
    if (d.is_range) {
      if (d.lo <= d.hi) {
        for (std::int64_t k = 0, n = d.hi - d.lo; k <= n; ++k) {
          const std::int64_t x = reverse ? d.hi - k : d.lo + k;
          if (auto r = visit(Value::integer(x))) return *r;
        }
      }
    } else if (d.is_functions) {
      auto dom = d.set.elements();
      auto rng = d.codomain.elements();
      const std::size_t n = dom.size();
      const std::size_t choices = rng.size() + (d.partial ? 1 : 0);
      if (choices == 0 && n > 0) return Truth::of(universal);
      // Digit value `rng.size()` leaves the argument out of a partial function.
      std::vector<std::size_t> digit(n, 0);
      auto choice = [&](std::size_t i) { return reverse ? choices - 1 - digit[i] : digit[i]; };
      for (;;) {
        std::vector<Value> pairs;
        pairs.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
          if (choice(i) < rng.size()) pairs.push_back(Value::pair(dom[i], rng[choice(i)]));
        }
        if (auto r = visit(Value::sorted_set(std::move(pairs)))) return *r;
        std::size_t k = n;
        while (k > 0 && ++digit[k - 1] == choices) digit[--k] = 0;
        if (k == 0) break;
      }
    } else {
      auto items = d.set.elements();
      for (std::size_t k = 0; k < items.size(); ++k) {
        if (auto r = visit(items[reverse ? items.size() - 1 - k : k])) return *r;
      }
    }
    if (unknown) return *unknown;
    return Truth::of(universal);
  }

  // Narrows a domain with guards `var op <expr>`; dropped values make some
  // guard false, so the quantifier's verdict is unchanged.
  Domain prune(const std::string& var, Domain d, const std::vector<Expr>& guards) {
    std::int64_t lo = std::numeric_limits<std::int64_t>::min();
    std::int64_t hi = std::numeric_limits<std::int64_t>::max();
    bool narrowed = false;
    auto bound_of = [&](const Expr& x) -> std::optional<std::int64_t> {
      if (occurs_free(x, var)) return std::nullopt;
      try {
        Value v = value(x);
        if (v.is_int()) return v.as_int();
      } catch (const EvalError&) {
      }
      return std::nullopt;
    };
    auto apply = [&](Op op, std::int64_t c) {
      narrowed = true;
      switch (op) {
        case Op::Lt: hi = std::min(hi, c - 1); break;
        case Op::Le: hi = std::min(hi, c); break;
        case Op::Gt: lo = std::max(lo, c + 1); break;
        case Op::Ge: lo = std::max(lo, c); break;
        case Op::Eq:
          lo = std::max(lo, c);
          hi = std::min(hi, c);
          break;
        default: narrowed = false; break;
      }
    };
    auto mirror = [](Op op) {
      switch (op) {
        case Op::Lt: return Op::Gt;
        case Op::Le: return Op::Ge;
        case Op::Gt: return Op::Lt;
        case Op::Ge: return Op::Le;
        default: return op;
      }
    };
    for (const auto& g : guards) {
      switch (g.op()) {
        case Op::Lt:
        case Op::Le:
        case Op::Gt:
        case Op::Ge:
        case Op::Eq:
          if (g.arg(0).is_ident(var)) {
            if (auto c = bound_of(g.arg(1))) apply(g.op(), *c);
          } else if (g.arg(1).is_ident(var)) {
            if (auto c = bound_of(g.arg(0))) apply(mirror(g.op()), *c);
          }
          break;
        case Op::Member:
          if (g.arg(0).is_ident(var) && g.arg(1).is(Op::Interval)) {
            auto a = bound_of(g.arg(1).arg(0));
            auto b = bound_of(g.arg(1).arg(1));
            if (a && b) {
              apply(Op::Ge, *a);
              apply(Op::Le, *b);
            }
          }
          break;
        default: break;
      }
    }
    if (!narrowed || d.is_functions) return d;
    if (d.is_range) {
      d.lo = std::max(d.lo, lo);
      d.hi = std::min(d.hi, hi);
      return d;
    }
    std::vector<Value> kept;
    for (const auto& v : d.set.elements()) {
      if (!v.is_int() || (v.as_int() >= lo && v.as_int() <= hi)) kept.push_back(v);
    }
    d.set = Value::sorted_set(std::move(kept));
    return d;
  }

  Domain domain_of(const Expr& s) {
    Domain d;
    if (s.is(Op::Interval)) {
      std::tie(d.lo, d.hi) = int_pair(s, "'..'");
      return d;
    }
    if (s.is(Op::Ident) && is_builtin_set_name(s.name()) && !bound(s.name()) &&
        s.name() != "BOOL") {
      std::tie(d.lo, d.hi) = builtin_range(s.name());
      return d;
    }
    d.is_range = false;
    if (s.is(Op::TotalFun) || s.is(Op::PartialFun)) {
      d.is_functions = true;
      d.partial = s.is(Op::PartialFun);
      d.set = as_set(value(s.arg(0)), std::string(op_name(s.op())));
      d.codomain = as_set(value(s.arg(1)), std::string(op_name(s.op())));
      return d;
    }
    d.set = as_set(value(s), "quantifier domain");
    return d;
  }

  Truth atom(const Expr& e) {
    try {
      switch (e.op()) {
        case Op::Eq:
        case Op::Neq: {
          Value a = value(e.arg(0));
          Value b = value(e.arg(1));
          if (a.kind() != b.kind())
            type_error("'" + std::string(op_name(e.op())) + "' between " + render(e.arg(0)) + " and " +
                       render(e.arg(1)));
          return Truth::of((a == b) == e.is(Op::Eq));
        }
        case Op::Lt:
        case Op::Le:
        case Op::Gt:
        case Op::Ge: {
          auto [a, b] = int_pair(e, std::string(op_name(e.op())));
          switch (e.op()) {
            case Op::Lt: return Truth::of(a < b);
            case Op::Le: return Truth::of(a <= b);
            case Op::Gt: return Truth::of(a > b);
            default: return Truth::of(a >= b);
          }
        }
        case Op::Member: return Truth::of(member(value(e.arg(0)), e.arg(1)));
        case Op::NotMember: return Truth::of(!member(value(e.arg(0)), e.arg(1)));
        case Op::Subset: return Truth::of(subset(e.arg(0), e.arg(1)));
        default: {
          Value v = value(e);
          if (!v.is_bool()) type_error("predicate expected, found " + render(e));
          return Truth::of(v.as_bool());
        }
      }
    } catch (const EvalError& err) {
      return Truth::unknown(err);
    }
  }

  // ---- membership and cardinality without materialization -----------------

  bool member(const Value& x, const Expr& s) {
    tick();
    switch (s.op()) {
      case Op::Interval: {
        auto [lo, hi] = int_pair(s, "'..'");
        return x.is_int() && x.as_int() >= lo && x.as_int() <= hi;
      }
      case Op::Ident:
        if (is_builtin_set_name(s.name()) && !bound(s.name())) {
          if (s.name() == "BOOL") return x.is_bool();
          if (!x.is_int()) return false;
          auto [lo, hi] = builtin_range(s.name());
          // INTEGER and NATURAL are not clipped for membership.
          if (s.name() == "INTEGER") return true;
          if (s.name() == "NATURAL") return x.as_int() >= 0;
          if (s.name() == "NATURAL1") return x.as_int() >= 1;
          return x.as_int() >= lo && x.as_int() <= hi;
        }
        break;
      case Op::PowerSet:
        if (!x.is_set()) return false;
        for (const auto& v : x.elements()) {
          if (!member(v, s.arg(0))) return false;
        }
        return true;
      case Op::Relations:
      case Op::TotalFun:
      case Op::PartialFun: {
        if (!x.is_set()) return false;
        const Value* prev = nullptr;
        for (const auto& p : x.elements()) {
          if (!p.is_pair()) return false;
          if (s.op() != Op::Relations && prev && prev->first() == p.first()) return false;
          if (!member(p.first(), s.arg(0)) || !member(p.second(), s.arg(1))) return false;
          prev = &p;
        }
        if (s.is(Op::TotalFun)) return static_cast<std::int64_t>(x.size()) == card(s.arg(0));
        return true;
      }
      case Op::Union: return member(x, s.arg(0)) || member(x, s.arg(1));
      case Op::Inter: return member(x, s.arg(0)) && member(x, s.arg(1));
      case Op::Mul:
        if (x.is_pair()) return member(x.first(), s.arg(0)) && member(x.second(), s.arg(1));
        break;
      case Op::SetExt:
        for (const auto& a : s.args()) {
          if (value(a) == x) return true;
        }
        return false;
      default: break;
    }
    return as_set(value(s), "membership").contains(x);
  }

  bool subset(const Expr& a, const Expr& b) {
    Value lhs = as_set(value(a), "'<:'");
    if (is_symbolic_set(b)) {
      for (const auto& v : lhs.elements()) {
        if (!member(v, b)) return false;
      }
      return true;
    }
    Value rhs = as_set(value(b), "'<:'");
    return std::includes(rhs.elements().begin(), rhs.elements().end(), lhs.elements().begin(),
                         lhs.elements().end());
  }

  std::int64_t card(const Expr& s) {
    tick();
    switch (s.op()) {
      case Op::Interval: {
        auto [lo, hi] = int_pair(s, "'..'");
        return hi < lo ? 0 : checked(static_cast<__int128>(hi) - lo + 1);
      }
      case Op::TotalFun: return power(card(s.arg(1)), card(s.arg(0)));
      case Op::PartialFun: return power(checked(static_cast<__int128>(card(s.arg(1))) + 1), card(s.arg(0)));
      case Op::Relations:
        return power(2, checked(static_cast<__int128>(card(s.arg(0))) * card(s.arg(1))));
      case Op::PowerSet: return power(2, card(s.arg(0)));
      case Op::Mul: return checked(static_cast<__int128>(card(s.arg(0))) * card(s.arg(1)));
      case Op::Ident:
        if (is_builtin_set_name(s.name()) && !bound(s.name())) {
          if (s.name() == "BOOL") return 2;
          if (s.name() == "INTEGER" || s.name() == "NATURAL" || s.name() == "NATURAL1")
            throw EvalError(UnknownReason::UnboundedDomain, "card of infinite set " + s.name());
          auto [lo, hi] = builtin_range(s.name());
          return hi < lo ? 0 : hi - lo + 1;
        }
        break;
      default: break;
    }
    return static_cast<std::int64_t>(as_set(value(s), "card").size());
  }

  // ---- helpers -------------------------------------------------------------

  bool bound(const std::string& name) const {
    return std::any_of(env_.rbegin(), env_.rend(), [&](const Binding& b) { return b.name == name; });
  }

  Value lookup(const std::string& name) {
    for (auto it = env_.rbegin(); it != env_.rend(); ++it) {
      if (it->name == name) return it->value;
    }
    if (is_builtin_set_name(name)) {
      if (name == "BOOL") return Value::set({Value::boolean(false), Value::boolean(true)});
      if (name == "INTEGER" || name == "NATURAL" || name == "NATURAL1")
        throw EvalError(UnknownReason::UnboundedDomain, "cannot enumerate infinite set " + name);
      auto [lo, hi] = builtin_range(name);
      return range_set(lo, hi);
    }
    throw EvalError(UnknownReason::UnknownIdentifier, "unknown identifier " + name);
  }

  std::pair<std::int64_t, std::int64_t> builtin_range(const std::string& name) const {
    std::int64_t lo = lo_;
    std::int64_t hi = hi_;
    if (name == "INT") {
      lo = std::max(lo, params_.minint);
      hi = std::min(hi, params_.maxint);
    } else if (name == "NAT" || name == "NATURAL") {
      lo = std::max<std::int64_t>(lo, 0);
    } else if (name == "NAT1" || name == "NATURAL1") {
      lo = std::max<std::int64_t>(lo, 1);
    }
    return {lo, hi};
  }

  Value bounded(__int128 v) const {
    if (v < lo_ || v > hi_) {
      std::ostringstream msg;
      msg << "integer ";
      if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max())
        msg << static_cast<std::int64_t>(v);
      else
        msg << (v < 0 ? "below -2^63" : "above 2^63");
      msg << " outside " << lo_ << ".." << hi_;
      throw EvalError(UnknownReason::UnboundedDomain, msg.str());
    }
    return Value::integer(static_cast<std::int64_t>(v));
  }

  std::int64_t checked(__int128 v) const { return bounded(v).as_int(); }

  Value checked_sub(std::int64_t a, std::int64_t b) const {
    return bounded(static_cast<__int128>(a) - b);
  }
  Value checked_mul(std::int64_t a, std::int64_t b) const {
    return bounded(static_cast<__int128>(a) * b);
  }

  std::int64_t power(std::int64_t base, std::int64_t exp) const {
    if (exp < 0) throw EvalError(UnknownReason::IllDefined, "negative exponent");
    __int128 result = 1;
    __int128 b = base;
    constexpr __int128 kLimit = static_cast<__int128>(1) << 63;
    while (exp > 0) {
      if (exp & 1) {
        result *= b;
        if (result > kLimit || result < -kLimit) return checked(result);
      }
      exp >>= 1;
      if (exp > 0) {
        b *= b;
        if (b > kLimit) return checked(b);
      }
    }
    return checked(result);
  }

  Value arith(const Expr& e) {
    auto [a, b] = int_pair(e, std::string(op_name(e.op())));
    switch (e.op()) {
      case Op::Add: return bounded(static_cast<__int128>(a) + b);
      case Op::Div:
        if (b == 0) throw EvalError(UnknownReason::IllDefined, "division by zero");
        return bounded(a / b);
      case Op::Mod:
        if (b <= 0) throw EvalError(UnknownReason::IllDefined, "mod by a non-positive number");
        return bounded(a % b);
      case Op::Pow: return Value::integer(power(a, b));
      default: type_error("arithmetic");
    }
  }

  std::pair<std::int64_t, std::int64_t> int_pair(const Expr& e, const std::string& what) {
    Value a = value(e.arg(0));
    Value b = value(e.arg(1));
    if (!a.is_int() || !b.is_int()) type_error(what + " needs integers");
    return {a.as_int(), b.as_int()};
  }

  static Value as_set(Value v, const std::string& what) {
    if (!v.is_set()) type_error(what + " needs a set");
    return v;
  }

  static Value as_relation(Value v, const std::string& what) {
    as_set(v, what);
    if (v.size() > 0 && (!v.elements().front().is_pair() || !v.elements().back().is_pair()))
      type_error(what + " needs a set of pairs");
    return v;
  }

  Value range_set(std::int64_t lo, std::int64_t hi) {
    if (hi < lo) return Value::empty_set();
    const __int128 n = static_cast<__int128>(hi) - lo + 1;
    if (n > kEnumerationCap) cap_exceeded("interval", static_cast<std::int64_t>(n));
    std::vector<Value> out;
    out.reserve(static_cast<std::size_t>(n));
    for (std::int64_t x = lo; x <= hi; ++x) {
      tick();
      out.push_back(Value::integer(x));
    }
    return Value::sorted_set(std::move(out));
  }

  Value difference(const Value& a, const Value& b) {
    std::vector<Value> out;
    std::set_difference(a.elements().begin(), a.elements().end(), b.elements().begin(),
                        b.elements().end(), std::back_inserter(out));
    return Value::sorted_set(std::move(out));
  }

  Value product(const Value& a, const Value& b) {
    const __int128 n = static_cast<__int128>(a.size()) * b.size();
    if (n > kEnumerationCap) cap_exceeded("cartesian product", static_cast<std::int64_t>(n));
    std::vector<Value> out;
    out.reserve(static_cast<std::size_t>(n));
    for (const auto& x : a.elements()) {
      for (const auto& y : b.elements()) {
        tick();
        out.push_back(Value::pair(x, y));
      }
    }
    return Value::sorted_set(std::move(out));
  }

  Value power_set(const Value& s) {
    const std::size_t n = s.size();
    if (n > 20) cap_exceeded("power set", n >= 62 ? std::numeric_limits<std::int64_t>::max()
                                                    : std::int64_t{1} << n);
    std::vector<Value> out;
    out.reserve(std::size_t{1} << n);
    auto items = s.elements();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      tick();
      std::vector<Value> subset;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask & (std::uint64_t{1} << i)) subset.push_back(items[i]);
      }
      out.push_back(Value::sorted_set(std::move(subset)));
    }
    return Value::set(std::move(out));
  }

  // All total (or partial) functions from `dom` to `rng`, as pair sets.
  Value functions(const Value& dom, const Value& rng, bool partial) {
    const std::size_t n = dom.size();
    const std::size_t choices = rng.size() + (partial ? 1 : 0);
    __int128 count = 1;
    for (std::size_t i = 0; i < n && count <= kEnumerationCap; ++i) count *= choices;
    if (count > kEnumerationCap)
      throw EvalError(UnknownReason::UnsupportedConstruct,
                      std::string(partial ? "partial" : "total") +
                          " function set exceeds the enumeration cap of 2^20 elements");
    std::vector<Value> out;
    out.reserve(static_cast<std::size_t>(count));
    if (count == 0) return Value::empty_set();
    auto d = dom.elements();
    auto r = rng.elements();
    std::vector<std::size_t> digit(n, 0);
    for (;;) {
      tick();
      std::vector<Value> pairs;
      pairs.reserve(n);
      for (std::size_t i = 0; i < n; ++i) {
        if (digit[i] < r.size()) pairs.push_back(Value::pair(d[i], r[digit[i]]));
      }
      out.push_back(Value::sorted_set(std::move(pairs)));
      std::size_t k = n;
      while (k > 0) {
        --k;
        if (++digit[k] < choices) break;
        digit[k] = 0;
        if (k == 0) {
          k = n + 1;
          break;
        }
      }
      if (n == 0 || k == n + 1) break;
    }
    return Value::set(std::move(out));
  }

  Value apply(const Value& f, const Value& x) {
    as_relation(f, "function application");
    auto items = f.elements();
    auto it = std::lower_bound(items.begin(), items.end(), x, [](const Value& e, const Value& key) {
      return e.kind() < Value::Kind::Pair || (e.is_pair() && e.first() < key);
    });
    if (it == items.end() || !it->is_pair() || it->first() != x)
      throw EvalError(UnknownReason::IllDefined,
                      "function applied outside its domain at " + x.to_string());
    auto next = it + 1;
    if (next != items.end() && next->is_pair() && next->first() == x)
      throw EvalError(UnknownReason::IllDefined, "relation is not a function at " + x.to_string());
    return it->second();
  }

  const EvalParams& params_;
  const std::atomic<bool>* cancel_;
  SteadyClock::time_point deadline_;
  std::int64_t lo_ = 0;
  std::int64_t hi_ = 0;
  std::uint64_t steps_ = 0;
  std::vector<Binding> env_;
  std::vector<Binder> binders_;
  std::vector<Expr> hyps_;
  Expr goal_;
};

EvalResult to_result(const Truth& t) {
  EvalResult r;
  r.verdict = t.verdict;
  if (t.is_unknown()) {
    r.reason = t.reason;
    r.detail = t.detail;
  }
  if (t.is_false()) r.counterexample = t.witness;
  return r;
}

EvalResult run_check(std::vector<Expr> hyps, Expr goal, const EvalParams& params,
                     const DefinitionTable& defs, const EvalControl& control) {
  const auto start = SteadyClock::now();
  EvalResult result;
  try {
    params.validate();
  } catch (const std::invalid_argument& err) {
    result.verdict = Verdict::Unknown;
    result.reason = UnknownReason::UnsupportedConstruct;
    result.detail = err.what();
    return result;
  }
  const auto deadline = start + std::chrono::milliseconds(params.timeout_ms);
  try {
    if (params.init) {
      for (auto& h : hyps) h = expand(h, defs);
      goal = expand(goal, defs);
    }
    Evaluator ev(params, control, deadline);
    result = to_result(ev.check(std::move(hyps), std::move(goal)));
  } catch (const Interrupted&) {
    result = EvalResult{};
    result.verdict = Verdict::Unknown;
    result.reason = UnknownReason::Timeout;
    result.detail = "time budget of " + std::to_string(params.timeout_ms) + " ms exhausted";
  }
  // Rounded up, so any evaluation reports at least 1 ms.
  const auto us = std::chrono::duration_cast<std::chrono::microseconds>(SteadyClock::now() - start).count();
  result.elapsed_ms = std::max<std::int64_t>(1, (us + 999) / 1000);
  return result;
}

}  // namespace

Value eval_expression(const Expr& e, const EvalParams& params, const DefinitionTable& defs,
                      const EvalControl& control) {
  params.validate();
  const auto deadline = SteadyClock::now() + std::chrono::milliseconds(params.timeout_ms);
  Evaluator ev(params, control, deadline);
  try {
    return ev.value(params.init ? expand(e, defs) : e);
  } catch (const Interrupted&) {
    throw EvalError(UnknownReason::Timeout, "time budget exhausted");
  }
}

EvalResult eval_predicate(const Expr& p, const EvalParams& params, const DefinitionTable& defs,
                          const EvalControl& control) {
  return run_check({}, p, params, defs, control);
}

EvalResult check_po(const ProofObligation& po, const EvalParams& params,
                    const DefinitionTable& defs, const EvalControl& control) {
  return run_check(po.hypotheses, po.goal, params, defs, control);
}

}  // namespace bevalkit
