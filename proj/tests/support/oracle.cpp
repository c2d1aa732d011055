#include "oracle.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>

namespace bevalkit::testing {

namespace {

enum class Tri { T, F, U };

Tri from_bool(bool b) { return b ? Tri::T : Tri::F; }

Tri k_not(Tri a) { return a == Tri::U ? Tri::U : a == Tri::T ? Tri::F : Tri::T; }
Tri k_and(Tri a, Tri b) {
  if (a == Tri::F || b == Tri::F) return Tri::F;
  if (a == Tri::U || b == Tri::U) return Tri::U;
  return Tri::T;
}
Tri k_or(Tri a, Tri b) { return k_not(k_and(k_not(a), k_not(b))); }

struct OValue {
  bool is_set = false;
  std::int64_t i = 0;
  std::set<std::int64_t> s;
};

using Env = std::map<std::string, std::optional<std::int64_t>>;

class Oracle {
 public:
  Oracle(std::int64_t lo, std::int64_t hi) : lo_(lo), hi_(hi) {}

  std::optional<OValue> integer(__int128 v) const {
    if (v < lo_ || v > hi_) return std::nullopt;
    OValue out;
    out.i = static_cast<std::int64_t>(v);
    return out;
  }

  static std::optional<OValue> set(std::set<std::int64_t> s) {
    OValue out;
    out.is_set = true;
    out.s = std::move(s);
    return out;
  }

  std::optional<OValue> eval(const Expr& e, Env& env) const {
    switch (e.op()) {
      case Op::Int: return integer(e.value());
      case Op::Ident: {
        auto it = env.find(e.name());
        if (it == env.end() || !it->second) return std::nullopt;
        return integer(*it->second);
      }
      case Op::Neg: {
        auto a = eval(e.arg(0), env);
        if (!a) return std::nullopt;
        return integer(-static_cast<__int128>(a->i));
      }
      case Op::Card: {
        auto a = eval(e.arg(0), env);
        if (!a) return std::nullopt;
        return integer(static_cast<__int128>(a->s.size()));
      }
      case Op::SetExt: {
        std::set<std::int64_t> out;
        for (const auto& item : e.args()) {
          auto v = eval(item, env);
          if (!v) return std::nullopt;
          out.insert(v->i);
        }
        return set(std::move(out));
      }
      case Op::Interval: {
        auto a = eval(e.arg(0), env);
        auto b = eval(e.arg(1), env);
        if (!a || !b) return std::nullopt;
        std::set<std::int64_t> out;
        for (std::int64_t k = a->i; k <= b->i; ++k) out.insert(k);
        return set(std::move(out));
      }
      default: break;
    }
    auto a = eval(e.arg(0), env);
    auto b = eval(e.arg(1), env);
    if (!a || !b) return std::nullopt;
    if (a->is_set) {
      std::set<std::int64_t> out;
      for (auto k : a->s) {
        const bool in_b = b->s.count(k) > 0;
        if (e.is(Op::Union) || (e.is(Op::Inter) && in_b) || (e.is(Op::Sub) && !in_b)) out.insert(k);
      }
      if (e.is(Op::Union)) out.insert(b->s.begin(), b->s.end());
      return set(std::move(out));
    }
    const __int128 x = a->i;
    const __int128 y = b->i;
    switch (e.op()) {
      case Op::Add: return integer(x + y);
      case Op::Sub: return integer(x - y);
      case Op::Mul: return integer(x * y);
      case Op::Div:
        if (y == 0) return std::nullopt;
        return integer(x / y);
      case Op::Mod:
        if (y <= 0) return std::nullopt;
        return integer(x % y);
      case Op::Pow: {
        if (y < 0) return std::nullopt;
        __int128 r = 1;
        for (__int128 k = 0; k < y; ++k) {
          r *= x;
          if (r > hi_ || r < lo_) {
            return std::nullopt;
          }
        }
        return integer(r);
      }
      default: throw std::logic_error("oracle: unexpected operator " + std::string(op_name(e.op())));
    }
  }

  Tri truth(const Expr& p, Env& env) const {
    switch (p.op()) {
      case Op::Bool: return from_bool(p.truth());
      case Op::And: return k_and(truth(p.arg(0), env), truth(p.arg(1), env));
      case Op::Or: return k_or(truth(p.arg(0), env), truth(p.arg(1), env));
      case Op::Not: return k_not(truth(p.arg(0), env));
      case Op::Implies: return k_or(k_not(truth(p.arg(0), env)), truth(p.arg(1), env));
      case Op::Equiv: {
        Tri a = truth(p.arg(0), env);
        Tri b = truth(p.arg(1), env);
        if (a == Tri::U || b == Tri::U) return Tri::U;
        return from_bool(a == b);
      }
      case Op::ForAll:
      case Op::Exists: {
        auto dom = eval(p.domain(), env);
        if (!dom) return Tri::U;
        const bool all = p.is(Op::ForAll);
        Tri acc = all ? Tri::T : Tri::F;
        Env inner = env;
        for (auto k : dom->s) {
          inner[p.name()] = k;
          Tri t = truth(p.body(), inner);
          acc = all ? k_and(acc, t) : k_or(acc, t);
        }
        return acc;
      }
      default: break;
    }
    auto a = eval(p.arg(0), env);
    auto b = eval(p.arg(1), env);
    if (!a || !b) return Tri::U;
    switch (p.op()) {
      case Op::Eq: return from_bool(a->is_set ? a->s == b->s : a->i == b->i);
      case Op::Neq: return from_bool(a->is_set ? a->s != b->s : a->i != b->i);
      case Op::Lt: return from_bool(a->i < b->i);
      case Op::Le: return from_bool(a->i <= b->i);
      case Op::Gt: return from_bool(a->i > b->i);
      case Op::Ge: return from_bool(a->i >= b->i);
      case Op::Member: return from_bool(b->s.count(a->i) > 0);
      case Op::NotMember: return from_bool(b->s.count(a->i) == 0);
      case Op::Subset: return from_bool(std::includes(b->s.begin(), b->s.end(), a->s.begin(), a->s.end()));
      default: throw std::logic_error("oracle: unexpected predicate " + std::string(op_name(p.op())));
    }
  }

 private:
  std::int64_t lo_;
  std::int64_t hi_;
};

}  // namespace

Verdict oracle_verdict(const OracleCase& c, const EvalParams& params) {
  std::int64_t lo = params.minint;
  std::int64_t hi = params.maxint;
  if (params.clpfd) {
    lo = std::max<std::int64_t>(lo, -(std::int64_t{1} << 28));
    hi = std::min<std::int64_t>(hi, (std::int64_t{1} << 28) - 1);
  }
  const Oracle oracle(lo, hi);

  Expr whole = c.po.goal;
  for (auto it = c.po.hypotheses.rbegin(); it != c.po.hypotheses.rend(); ++it)
    whole = Expr::binary(Op::Implies, *it, whole);

  bool any_unknown = false;
  bool any_false = false;
  Env env;
  auto visit = [&](auto&& self, std::size_t k) -> void {
    if (any_false) return;
    if (k == c.vars.size()) {
      Tri t = oracle.truth(whole, env);
      any_false = t == Tri::F;
      any_unknown = any_unknown || t == Tri::U;
      return;
    }
    const CaseVar& v = c.vars[k];
    if (v.let) {
      auto value = oracle.eval(*v.let, env);
      env[v.name] = value ? std::optional(value->i) : std::nullopt;
      self(self, k + 1);
    } else {
      for (std::int64_t x = v.lo; x <= v.hi; ++x) {
        env[v.name] = x;
        self(self, k + 1);
      }
    }
    env.erase(v.name);
  };
  visit(visit, 0);
  if (any_false) return Verdict::False;
  return any_unknown ? Verdict::Unknown : Verdict::True;
}

}  // namespace bevalkit::testing
