#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace pebble;

namespace {

BilevelInstance instance(Vertex r, std::vector<Vertex> s, std::uint64_t lower, std::optional<std::uint64_t> upper,
                         Sense sense = Sense::descending) {
  BilevelInstance inst;
  inst.root = r;
  inst.support = std::move(s);
  inst.lower = lower;
  inst.upper = upper;
  inst.sense = sense;
  return inst;
}

void expect_valid_witness(const Graph& g, const BilevelInstance& inst, const BilevelOutcome& out) {
  ASSERT_EQ(out.status, Status::optimal);
  EXPECT_EQ(out.witness.size(), out.value);
  EXPECT_GE(out.value, inst.lower);
  for (Vertex v : out.witness.support())
    EXPECT_NE(std::find(inst.support.begin(), inst.support.end(), v), inst.support.end());
  EXPECT_FALSE(testing_support::reaches_root(g, out.witness, inst.root));
}

}  // namespace

TEST(Leader, SpecExamples) {
  const Graph p3 = catalog("path:3");
  auto inst = instance(2, {0}, 1, 10);
  auto out = max_unsolvable(p3, inst);
  EXPECT_EQ(out.value, 3u);
  expect_valid_witness(p3, inst, out);

  const Graph k3 = catalog("complete:3");
  inst = instance(2, {0}, 1, 10);
  out = max_unsolvable(k3, inst);
  EXPECT_EQ(out.value, 1u);
  expect_valid_witness(k3, inst, out);
}

TEST(Leader, InfeasibleAboveMaximum) {
  const Graph p3 = catalog("path:3");
  EXPECT_EQ(max_unsolvable(p3, instance(2, {0}, 4, 10)).status, Status::infeasible);
  EXPECT_EQ(max_unsolvable(p3, instance(2, {0}, 4, 10, Sense::ascending)).status, Status::infeasible);
}

TEST(Leader, CubeHasNoLargeUnsolvableConfigurations) {
  const Graph q3 = catalog("cube:3");
  std::mt19937_64 rng(2);
  for (Vertex r = 0; r < 8; ++r) {
    std::vector<Vertex> rest;
    for (Vertex v = 0; v < 8; ++v)
      if (v != r) rest.push_back(v);
    for (int t = 0; t < 3; ++t) {
      std::shuffle(rest.begin(), rest.end(), rng);
      std::vector<Vertex> s(rest.begin(), rest.begin() + 4);
      EXPECT_EQ(max_unsolvable(q3, instance(r, s, 8, 16)).status, Status::infeasible);
      bool any = false;
      testing_support::for_each_configuration(8, s, 8, [&](const Configuration& p) {
        any = any || !testing_support::reaches_root(q3, p, r);
      });
      EXPECT_FALSE(any);
    }
  }
}

TEST(Leader, SensesAgree) {
  std::mt19937_64 rng(4);
  for (int it = 0; it < 60; ++it) {
    const Graph g = testing_support::random_connected_graph(rng, 3 + rng() % 4, rng() % 4);
    const Vertex r = static_cast<Vertex>(rng() % g.order());
    std::vector<Vertex> s;
    for (Vertex v = 0; v < g.order(); ++v)
      if (v != r && rng() % 2) s.push_back(v);
    if (s.empty()) continue;
    const auto a = max_unsolvable(g, instance(r, s, 1, std::nullopt, Sense::descending));
    const auto b = max_unsolvable(g, instance(r, s, 1, std::nullopt, Sense::ascending));
    EXPECT_EQ(a.status, b.status);
    EXPECT_EQ(a.value, b.value);
    if (a.status == Status::optimal) expect_valid_witness(g, instance(r, s, 1, std::nullopt), a);
  }
}

TEST(Leader, UpperBoundClipsValue) {
  const Graph p4 = catalog("path:4");
  const auto out = max_unsolvable(p4, instance(3, {0, 1}, 1, 5));
  ASSERT_EQ(out.status, Status::optimal);
  EXPECT_EQ(out.value, 5u);
}

TEST(Leader, RejectsBadInstances) {
  const Graph p3 = catalog("path:3");
  EXPECT_THROW(max_unsolvable(p3, instance(2, {}, 1, 3)), std::invalid_argument);
  EXPECT_THROW(max_unsolvable(p3, instance(2, {2}, 1, 3)), std::invalid_argument);
  EXPECT_THROW(max_unsolvable(p3, instance(2, {0, 0}, 1, 3)), std::invalid_argument);
  EXPECT_THROW(max_unsolvable(p3, instance(2, {0}, 0, 3)), std::invalid_argument);
  EXPECT_THROW(max_unsolvable(p3, instance(2, {0}, 5, 3)), std::invalid_argument);
  EXPECT_THROW(max_unsolvable(p3, instance(2, {7}, 1, 3)), GraphError);
}

TEST(Leader, TimeCapAndFallback) {
  const Graph g = lemke1();
  auto inst = instance(0, {1, 2, 3, 4, 5, 6, 7}, 1, std::nullopt);
  inst.time_cap = std::chrono::duration<double>(0);
  EXPECT_EQ(max_unsolvable(g, inst).status, Status::timed_out);
  const auto fb = solve_with_fallback(g, inst);
  EXPECT_TRUE(fb.retried);
  EXPECT_EQ(fb.sense_used, Sense::ascending);
  EXPECT_EQ(fb.outcome.status, Status::timed_out);

  inst.time_cap.reset();
  const auto ok = solve_with_fallback(g, inst);
  EXPECT_FALSE(ok.retried);
  EXPECT_EQ(ok.outcome.status, Status::optimal);
  EXPECT_EQ(ok.outcome.value, 7u);
}

TEST(PiSupport, Examples) {
  EXPECT_EQ(pi_support(catalog("path:3"), 2, std::vector<Vertex>{0}), 4u);
  EXPECT_EQ(pi_support(catalog("cycle:4"), 0, std::vector<Vertex>{2}), 4u);
  EXPECT_EQ(pi_support(catalog("complete:4"), 0, std::vector<Vertex>{1, 2, 3}), 4u);
}

TEST(PiSupport, MonotoneInSupport) {
  std::mt19937_64 rng(9);
  for (int it = 0; it < 40; ++it) {
    const Graph g = testing_support::random_connected_graph(rng, 4 + rng() % 3, rng() % 4);
    const Vertex r = static_cast<Vertex>(rng() % g.order());
    std::vector<Vertex> t;
    for (Vertex v = 0; v < g.order(); ++v)
      if (v != r) t.push_back(v);
    std::shuffle(t.begin(), t.end(), rng);
    std::vector<Vertex> s(t.begin(), t.begin() + 1 + static_cast<long>(rng() % t.size()));
    EXPECT_LE(pi_support(g, r, s), pi_support(g, r, t));
  }
}

TEST(Leader, SingleVertexCaps) {
  const Graph p4 = catalog("path:4");
  EXPECT_EQ(single_vertex_cap(p4, 0, 3), 7u);
  EXPECT_EQ(default_upper(p4, 3, std::vector<Vertex>{0, 1, 2}), 7u + 3u + 1u);
}
