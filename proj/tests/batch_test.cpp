#include <gtest/gtest.h>

#include <omp.h>

#include "bevalkit/batch.hpp"
#include "generators.hpp"

namespace bevalkit {
namespace {

std::vector<ProofObligation> corpus(std::uint64_t seed, int n) {
  testing::Rng rng(seed);
  std::vector<ProofObligation> pos;
  for (int i = 0; i < n; ++i) {
    testing::OracleCase c = testing::random_oracle_case(rng);
    c.po.name = "Gen_" + std::to_string(i);
    pos.push_back(std::move(c.po));
  }
  return pos;
}

void expect_same(const std::vector<EvalResult>& a, const std::vector<EvalResult>& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].verdict, b[i].verdict) << i;
    EXPECT_EQ(a[i].reason, b[i].reason) << i;
    EXPECT_EQ(a[i].counterexample, b[i].counterexample) << i;
    EXPECT_EQ(a[i].detail, b[i].detail) << i;
  }
}

TEST(Batch, ParallelMatchesSerial) {
  const auto pos = corpus(71, 400);
  testing::Rng rng(72);
  for (int round = 0; round < 4; ++round) {
    const EvalParams params = testing::random_params(rng);
    expect_same(check_batch(pos, params, {}), check_batch_serial(pos, params, {}));
  }
}

TEST(Batch, ThreadCountDoesNotMatter) {
  const auto pos = corpus(73, 200);
  const auto reference = check_batch_serial(pos, {}, {});
  const int saved = omp_get_max_threads();
  for (int threads : {1, 2, 3, 8}) {
    omp_set_num_threads(threads);
    expect_same(check_batch(pos, {}, {}), reference);
  }
  omp_set_num_threads(saved);
}

TEST(Batch, EmptyAndDefinitions) {
  EXPECT_TRUE(check_batch({}, {}, {}).empty());
  ProofObligation po;
  po.name = "Init";
  po.goal = parse_predicate("[0,0,0,0,0,0,0,0] : BYTE");
  EvalParams p;
  p.init = true;
  const DefinitionTable defs = parse_definitions("BYTE == (1..8 --> {0,1})");
  const std::vector<ProofObligation> pos(16, po);
  for (const auto& r : check_batch(pos, p, defs)) EXPECT_EQ(r.verdict, Verdict::True);
}

TEST(Batch, CancelReachesEveryWorker) {
  ProofObligation slow;
  slow.name = "Slow";
  slow.goal = parse_predicate("!f.(f : (1..20 --> {0,1}) => card(ran(f)) : 1..2)");
  const std::vector<ProofObligation> pos(4, slow);
  std::atomic<bool> cancel{true};
  EvalControl control;
  control.cancel = &cancel;
  for (const auto& r : check_batch(pos, {}, {}, control)) EXPECT_EQ(r.reason, UnknownReason::Timeout);
}

}  // namespace
}  // namespace bevalkit
