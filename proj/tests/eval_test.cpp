#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <thread>

#include "bevalkit/eval.hpp"
#include "generators.hpp"

namespace bevalkit {
namespace {

using std::chrono::milliseconds;
using std::chrono::steady_clock;

EvalResult eval(const std::string& text, const EvalParams& params = {}, const DefinitionTable& defs = {}) {
  return eval_predicate(parse_predicate(text), params, defs);
}

ProofObligation po_of(std::vector<std::string> hyps, const std::string& goal) {
  ProofObligation po;
  po.name = "T";
  for (const auto& h : hyps) po.hypotheses.push_back(parse_predicate(h));
  po.goal = parse_predicate(goal);
  return po;
}

DefinitionTable byte_defs() { return parse_definitions("BYTE == (1..8 --> {0,1})"); }

TEST(Params, DefaultsAndValidation) {
  EvalParams p;
  EXPECT_EQ(p.minint, -65536);
  EXPECT_EQ(p.maxint, 65536);
  EXPECT_EQ(p.timeout_ms, 10000);
  EXPECT_FALSE(p.init || p.kodkod || p.smt || p.clpfd);
  EXPECT_NO_THROW(p.validate());
  p.minint = p.maxint;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.timeout_ms = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Params, FlagStringRoundTrip) {
  EXPECT_EQ(EvalParams{}.to_flag_string(), "-p MAXINT 65536 -p MININT -65536 -p TIME_OUT 10000");
  testing::Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    EvalParams p = testing::random_params(rng);
    p.timeout_ms = 1 + static_cast<std::int64_t>(rng() % 100000);
    EXPECT_EQ(EvalParams::from_flag_string(p.to_flag_string()), p) << p.to_flag_string();
  }
  EvalParams q = EvalParams::from_flag_string("-p init -p KODKOD TRUE -p SMT TRUE -p CLPFD TRUE");
  EXPECT_TRUE(q.init && q.kodkod && q.smt && q.clpfd);
  EXPECT_THROW(EvalParams::from_flag_string("-p BOGUS 1"), std::invalid_argument);
  EXPECT_THROW(EvalParams::from_flag_string("-p MAXINT ten"), std::invalid_argument);
  EXPECT_THROW(EvalParams::from_flag_string("MAXINT 10"), std::invalid_argument);
}

TEST(Params, ClpfdNarrowsTheRange) {
  EvalParams p;
  p.minint = -(std::int64_t{1} << 40);
  p.maxint = std::int64_t{1} << 40;
  p.clpfd = true;
  EXPECT_EQ(p.integer_range(), std::make_pair(kClpfdMin, kClpfdMax));
  EXPECT_EQ(eval("2 ** 28 = 268435456", p).verdict, Verdict::Unknown);
  p.clpfd = false;
  EXPECT_EQ(eval("2 ** 28 = 268435456", p).verdict, Verdict::True);
}

TEST(Expand, ReplacesDefinitionsRecursively) {
  Expr e = expand(parse_predicate("[0,0,0,0,0,0,0,0] : BYTE"), byte_defs());
  EXPECT_EQ(render(e), "[0,0,0,0,0,0,0,0] : (1..8 --> {0,1})");
  DefinitionTable chain = parse_definitions("BIT == {0,1}\nBV2 == (0..1 --> BIT)");
  EXPECT_EQ(render(expand(parse_predicate("v : BV2"), chain)), "v : (0..1 --> {0,1})");
  Expr plain = parse_predicate("x + 1 = y");
  EXPECT_EQ(expand(plain, {}), plain);
}

TEST(Expressions, Values) {
  auto value = [](const std::string& text) {
    Expr p = parse_predicate("x = " + text);
    return eval_expression(p.arg(1), {}, {});
  };
  EXPECT_EQ(value("card({})"), Value::integer(0));
  EXPECT_EQ(value("{3,1,3}"), Value::set({Value::integer(1), Value::integer(3)}));
  EXPECT_EQ(value("[7,8]"), value("{1 |-> 7, 2 |-> 8}"));
  EXPECT_EQ(value("-7 / 2"), Value::integer(-3));
  EXPECT_EQ(value("7 mod 3"), Value::integer(1));
  EXPECT_THROW(value("7 mod 0"), EvalError);
  EXPECT_THROW(value("unknown_name + 1"), EvalError);
}

TEST(Expressions, CardinalityOfFunctionSpaceMatchesEnumeration) {
  int maps = 0;
  for (int f1 = 0; f1 < 2; ++f1)
    for (int f2 = 0; f2 < 2; ++f2)
      for (int f3 = 0; f3 < 2; ++f3)
        for (int f4 = 0; f4 < 2; ++f4) ++maps;
  Expr p = parse_predicate("x = card(1..4 --> {0,1})");
  EXPECT_EQ(eval_expression(p.arg(1), {}, {}), Value::integer(maps));
}

TEST(Expressions, PowerMatchesRepeatedMultiplication) {
  std::int64_t expected = 1;
  for (int i = 0; i < 10; ++i) expected *= 2;
  Expr p = parse_predicate("x = 2 ** 10");
  EXPECT_EQ(eval_expression(p.arg(1), {}, {}), Value::integer(expected));
}

TEST(Predicates, Examples) {
  EXPECT_EQ(eval("(1..8 --> {0,1}) = (1..8 --> {0,1})").verdict, Verdict::True);
  EXPECT_EQ(eval("BYTE = (1..8 --> {0,1}) => (card(BYTE) = 256)").verdict, Verdict::True);
  EXPECT_EQ(eval("card(1..8 --> {0,1}) = 255").verdict, Verdict::False);
  EXPECT_EQ(eval("!x.(x : 1..3 => x < 4)").verdict, Verdict::True);
  EXPECT_EQ(eval("#x.(x : 1..3 & x > 3)").verdict, Verdict::False);
  EXPECT_EQ(eval("[5,6] = {1 |-> 5, 2 |-> 6}").verdict, Verdict::True);
  EXPECT_EQ(eval("size([4,4,4]) = 3").verdict, Verdict::True);
  EXPECT_EQ(eval("dom({1 |-> 2, 3 |-> 4}) = {1,3} & ran({1 |-> 2}) = {2}").verdict, Verdict::True);
  EXPECT_EQ(eval("{1 |-> 5}(1) = 5").verdict, Verdict::True);
  EXPECT_EQ(eval("{1,2} <: 1..3 & 4 /: 1..3 & {} : POW(1..2)").verdict, Verdict::True);
  EXPECT_EQ(eval("card(POW(1..3)) = 8 & card({1,2} * {1,2,3}) = 6").verdict, Verdict::True);
}

TEST(Predicates, KleeneConnectives) {
  EXPECT_EQ(eval("1 / 0 = 1 or TRUE").verdict, Verdict::True);
  EXPECT_EQ(eval("1 / 0 = 1 & FALSE").verdict, Verdict::False);
  EXPECT_EQ(eval("1 / 0 = 1 => TRUE").verdict, Verdict::True);
  EXPECT_EQ(eval("FALSE => 1 / 0 = 1").verdict, Verdict::True);
  EXPECT_EQ(eval("not(1 / 0 = 1)").verdict, Verdict::Unknown);
  EXPECT_EQ(eval("1 / 0 = 1 <=> TRUE").verdict, Verdict::Unknown);
}

TEST(CheckPo, Examples) {
  const auto start = steady_clock::now();
  EvalResult byte = check_po(po_of({"BYTE = (1..8 --> {0,1})"}, "card(BYTE) = 256"), {}, {});
  EXPECT_LT(steady_clock::now() - start, milliseconds(10000));
  EXPECT_EQ(byte.verdict, Verdict::True);
  EXPECT_GE(byte.elapsed_ms, 1);
  EXPECT_FALSE(byte.counterexample);

  EXPECT_EQ(check_po(po_of({}, "TRUE"), {}, {}).verdict, Verdict::True);
  EXPECT_EQ(check_po(po_of({"x : 1..10"}, "x ** 2 <= 100"), {}, {}).verdict, Verdict::True);

  EvalResult r = check_po(po_of({"x : 1..10"}, "x ** 2 < 100"), {}, {});
  ASSERT_EQ(r.verdict, Verdict::False);
  ASSERT_TRUE(r.counterexample);
  EXPECT_EQ(*r.counterexample, (std::vector<Binding>{{"x", Value::integer(10)}}));
}

TEST(CheckPo, InitControlsDefinitionDependence) {
  ProofObligation po = po_of({}, "[0,0,0,0,0,0,0,0] : BYTE");
  EvalParams with_init;
  with_init.init = true;
  EXPECT_EQ(check_po(po, with_init, byte_defs()).verdict, Verdict::True);
  EvalResult without = check_po(po, {}, byte_defs());
  EXPECT_EQ(without.verdict, Verdict::Unknown);
  EXPECT_EQ(without.reason, UnknownReason::UnknownIdentifier);
  EXPECT_EQ(check_po(po, with_init, {}).reason, UnknownReason::UnknownIdentifier);
}

TEST(CheckPo, UnknownReasons) {
  EXPECT_EQ(eval("card(INTEGER) > 0").reason, UnknownReason::UnboundedDomain);
  EXPECT_EQ(eval("70000 > 0").reason, UnknownReason::UnboundedDomain);
  EXPECT_EQ(eval("(1..21 --> {0,1}) = (1..21 --> {0,1})").reason, UnknownReason::UnsupportedConstruct);
  EXPECT_EQ(eval("{1} = 1").reason, UnknownReason::UnsupportedConstruct);
  EXPECT_EQ(eval("y = 1").reason, UnknownReason::UnknownIdentifier);
  EXPECT_EQ(eval("1 / 0 = 1").reason, UnknownReason::IllDefined);
  EXPECT_EQ(eval("{1 |-> 2}(3) = 2").reason, UnknownReason::IllDefined);
  EvalResult r = eval("card(INTEGER) > 0");
  EXPECT_FALSE(r.counterexample);
  EXPECT_FALSE(r.detail.empty());
}

TEST(CheckPo, SymbolicCardinalityAvoidsMaterialization) {
  EvalResult r = eval("card(1..16 --> {0,1}) = 65536");
  EXPECT_EQ(r.verdict, Verdict::True);
}

TEST(CheckPo, UnboundIdentifierTakesItsEquationalHypothesis) {
  EXPECT_EQ(check_po(po_of({"p = 1", "k = 0"}, "p = 2 ** k"), {}, {}).verdict, Verdict::True);
  EXPECT_EQ(check_po(po_of({"k : 0..12", "p = 2 ** k"}, "p + p = 2 ** (k + 1)"), {}, {}).verdict,
            Verdict::True);
}

constexpr const char* kAdversarial = "!f.(f : (1..20 --> {0,1}) => dom(f) = 1..20 & card(ran(f)) : 1..2)";

TEST(Timeout, ExpiresWithinBudgetPlusSlack) {
  EvalParams p;
  p.timeout_ms = 1000;
  const auto start = steady_clock::now();
  EvalResult r = eval(kAdversarial, p);
  const auto wall = steady_clock::now() - start;
  EXPECT_EQ(r.verdict, Verdict::Unknown);
  EXPECT_EQ(r.reason, UnknownReason::Timeout);
  EXPECT_LE(wall, milliseconds(p.timeout_ms + 500));
  EXPECT_FALSE(r.counterexample);
}

TEST(Timeout, CancelFlagInterrupts) {
  std::atomic<bool> cancel{false};
  EvalControl control;
  control.cancel = &cancel;
  std::thread stopper([&] {
    std::this_thread::sleep_for(milliseconds(100));
    cancel = true;
  });
  const auto start = steady_clock::now();
  EvalResult r = eval_predicate(parse_predicate(kAdversarial), {}, {}, control);
  stopper.join();
  EXPECT_EQ(r.reason, UnknownReason::Timeout);
  EXPECT_LT(steady_clock::now() - start, milliseconds(2000));
}

TEST(Properties, CounterexamplesFalsifyTheirPo) {
  testing::Rng rng(11);
  int checked = 0;
  for (int i = 0; i < 600; ++i) {
    testing::OracleCase c = testing::random_oracle_case(rng);
    const EvalParams params = testing::random_params(rng);
    EvalResult r = check_po(c.po, params, {});
    ASSERT_EQ(r.counterexample.has_value(), r.verdict == Verdict::False);
    if (r.verdict != Verdict::False) continue;
    EvalControl control;
    for (const auto& b : *r.counterexample) {
      for (const auto& v : c.vars)
        if (v.name == b.name) control.bindings.push_back(b);
    }
    ++checked;
    EXPECT_EQ(check_po(c.po, params, {}, control).verdict, Verdict::False) << render(c.po.goal);
  }
  EXPECT_GT(checked, 50);
}

TEST(Properties, AntecedentStrengthening) {
  testing::Rng rng(12);
  int strengthened = 0;
  for (int i = 0; i < 600; ++i) {
    testing::OracleCase c = testing::random_oracle_case(rng, 256);
    const EvalParams params = testing::random_params(rng);
    if (check_po(c.po, params, {}).verdict != Verdict::True) continue;
    testing::OracleCase extra = testing::random_oracle_case(rng, 4);
    ProofObligation stronger = c.po;
    stronger.hypotheses.push_back(extra.po.goal);
    stronger.hypotheses.insert(stronger.hypotheses.begin(), extra.po.goal);
    ++strengthened;
    EXPECT_NE(check_po(stronger, params, {}).verdict, Verdict::False) << render(extra.po.goal);
  }
  EXPECT_GT(strengthened, 50);
}

TEST(Properties, FlagsNeverFlipDefiniteVerdicts) {
  testing::Rng rng(13);
  for (int i = 0; i < 300; ++i) {
    testing::OracleCase c = testing::random_oracle_case(rng);
    std::optional<Verdict> definite;
    for (int flags = 0; flags < 16; ++flags) {
      EvalParams p;
      p.init = flags & 1;
      p.kodkod = flags & 2;
      p.smt = flags & 4;
      p.clpfd = flags & 8;
      Verdict v = check_po(c.po, p, {}).verdict;
      if (v == Verdict::Unknown) continue;
      if (!definite) definite = v;
      ASSERT_EQ(v, *definite) << render(c.po.goal) << " with " << p.to_flag_string();
    }
  }
}

}  // namespace
}  // namespace bevalkit
