#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "helpers.hpp"

using namespace pebble;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("pebble_orch_" + name);
  std::filesystem::remove(p);
  std::filesystem::remove(p.string() + ".manifest.json");
  return p;
}

ResultRecord record(std::string key, Vertex root, Status st, double secs, bool retried = false) {
  ResultRecord r;
  r.key = std::move(key);
  r.root = root;
  r.status = st;
  r.elapsed_s = secs;
  r.retried = retried;
  if (st == Status::optimal) r.value = 5;
  return r;
}

}  // namespace

TEST(Plan, BalancedAcrossWorkers) {
  const JobPlan plan = make_plan(catalog("cube:3"), "cube:3", 4, 7, 8, 16, 2);
  ASSERT_EQ(plan.roots.size(), 1u);
  std::vector<std::size_t> roots_per_worker(2, 0);
  for (const auto& r : plan.roots) ++roots_per_worker[r.worker];
  EXPECT_LE(std::max(roots_per_worker[0], roots_per_worker[1]) - std::min(roots_per_worker[0], roots_per_worker[1]),
            1u);
  std::set<std::string> keys;
  for (const auto& i : plan.instances) {
    EXPECT_LT(i.worker, 2u);
    EXPECT_TRUE(keys.insert(i.key).second);
  }

  const JobPlan lemke = make_plan(lemke1(), "lemke1", 2, 4, 1, std::nullopt, 3);
  std::vector<std::size_t> per(3, 0);
  for (const auto& r : lemke.roots) ++per[r.worker];
  EXPECT_LE(*std::max_element(per.begin(), per.end()) - *std::min_element(per.begin(), per.end()), 1u);
  for (std::size_t i = 1; i < lemke.roots.size(); ++i) EXPECT_GE(lemke.roots[i - 1].blocks, lemke.roots[i].blocks);
  const auto reps = orbit_representatives(lemke1());
  for (const auto& i : lemke.instances) EXPECT_NE(std::find(reps.begin(), reps.end(), i.root), reps.end());

  for (const auto& i : make_plan(lemke1(), "lemke1", 2, 4, 1, std::nullopt, 1).instances) EXPECT_EQ(i.worker, 0u);
  EXPECT_THROW(make_plan(lemke1(), "lemke1", 2, 4, 1, std::nullopt, 0), std::invalid_argument);
}

TEST(Plan, JsonRoundTrip) {
  const JobPlan plan = make_plan(lemke1(), "lemke1", 2, 4, 3, std::nullopt, 2);
  const auto path = temp_file("plan.json");
  save_plan(plan, path);
  const JobPlan back = load_plan(path);
  EXPECT_EQ(back.graph, plan.graph);
  EXPECT_EQ(back.lower, 3u);
  EXPECT_FALSE(back.upper);
  ASSERT_EQ(back.instances.size(), plan.instances.size());
  for (std::size_t i = 0; i < plan.instances.size(); ++i) {
    EXPECT_EQ(back.instances[i].key, plan.instances[i].key);
    EXPECT_EQ(back.instances[i].support, plan.instances[i].support);
    EXPECT_EQ(back.instances[i].upper, plan.instances[i].upper);
  }
  std::filesystem::remove(path);
}

TEST(Run, EmptyPlan) {
  JobPlan plan;
  plan.graph = "path:3";
  RunOptions opt;
  opt.out = temp_file("empty.jsonl");
  EXPECT_TRUE(run(plan, opt).empty());
  EXPECT_TRUE(read_records(opt.out).empty());
}

TEST(Run, ResumeSkipsRecordedWork) {
  const JobPlan plan = make_plan(lemke1(), "lemke1", 2, 3, 1, std::nullopt, 1);
  RunOptions opt;
  opt.out = temp_file("resume.jsonl");
  opt.max_instances = 4;
  EXPECT_EQ(run(plan, opt).size(), 4u);
  opt.max_instances.reset();
  opt.resume = true;
  opt.threads = 3;
  EXPECT_EQ(run(plan, opt).size(), plan.instances.size() - 4);
  EXPECT_TRUE(run(plan, opt).empty());
  const auto latest = latest_records(read_records(opt.out));
  EXPECT_EQ(latest.size(), plan.instances.size());
  EXPECT_EQ(read_records(opt.out).size(), plan.instances.size());
  EXPECT_TRUE(std::filesystem::exists(opt.out.string() + ".manifest.json"));
}

TEST(Run, TornLastLineIsIgnored) {
  const JobPlan plan = make_plan(lemke1(), "lemke1", 2, 3, 1, std::nullopt, 1);
  RunOptions opt;
  opt.out = temp_file("torn.jsonl");
  opt.max_instances = 2;
  run(plan, opt);
  {
    std::ofstream out(opt.out, std::ios::app);
    out << "{\"key\": \"" << plan.instances[5].key << "\", \"root\": 0, \"sta";
  }
  opt.max_instances.reset();
  opt.resume = true;
  run(plan, opt);
  std::size_t skipped = 0;
  const auto records = read_records(opt.out, &skipped);
  EXPECT_EQ(skipped, 1u);
  EXPECT_EQ(records.size(), plan.instances.size());
  EXPECT_EQ(latest_records(records).size(), plan.instances.size());
}

TEST(Run, TinyCapRetriesWithFlippedSense) {
  const JobPlan plan = make_plan(lemke1(), "lemke1", 2, 3, 1, std::nullopt, 1);
  RunOptions opt;
  opt.out = temp_file("retry.jsonl");
  opt.time_cap = std::chrono::duration<double>(0);
  opt.max_instances = 2;
  const auto written = run(plan, opt);
  ASSERT_EQ(written.size(), 4u);
  for (std::size_t i = 0; i < 4; i += 2) {
    EXPECT_EQ(written[i].status, Status::timed_out);
    EXPECT_FALSE(written[i].retried);
    EXPECT_EQ(written[i].sense, Sense::descending);
    EXPECT_EQ(written[i + 1].key, written[i].key);
    EXPECT_TRUE(written[i + 1].retried);
    EXPECT_EQ(written[i + 1].sense, Sense::ascending);
  }
  const RunSummary s = report(written);
  EXPECT_EQ(s.instance_count, 2u);
  EXPECT_EQ(s.incomplete, 2u);
  EXPECT_EQ(s.retried, 2u);
}

TEST(Run, ShardsPartitionThePlan) {
  const JobPlan plan = make_plan(lemke1(), "lemke1", 1, 2, 1, std::nullopt, 2);
  std::size_t total = 0;
  for (std::size_t shard = 0; shard < 2; ++shard) {
    RunOptions opt;
    opt.out = temp_file("shard" + std::to_string(shard) + ".jsonl");
    opt.shard = shard;
    opt.shards = 2;
    for (const auto& r : run(plan, opt)) {
      ++total;
      const auto it = std::find_if(plan.instances.begin(), plan.instances.end(),
                                   [&](const PlannedInstance& i) { return i.key == r.key; });
      ASSERT_NE(it, plan.instances.end());
      EXPECT_EQ(it->worker, shard);
    }
  }
  EXPECT_EQ(total, plan.instances.size());
}

TEST(Report, TableSemantics) {
  const RunSummary two = report({record("a", 0, Status::infeasible, 1.0), record("b", 3, Status::infeasible, 3.0)});
  ASSERT_TRUE(two.t_avg);
  EXPECT_EQ(*two.t_avg, 2.0);
  EXPECT_EQ(*two.t_total, 4.0);
  EXPECT_EQ(two.instance_count, 2u);
  EXPECT_EQ(two.orbit_count, 2u);

  const RunSummary none = report({});
  EXPECT_EQ(none.instance_count, 0u);
  EXPECT_EQ(none.orbit_count, 0u);
  EXPECT_FALSE(none.t_avg);
  EXPECT_FALSE(none.t_total);
}

TEST(Report, RetrySupersedesTimeout) {
  const RunSummary s = report({record("a", 0, Status::timed_out, 9.0), record("a", 0, Status::optimal, 1.0, true),
                               record("b", 0, Status::infeasible, 3.0)});
  EXPECT_EQ(s.instance_count, 2u);
  EXPECT_EQ(s.incomplete, 0u);
  EXPECT_EQ(s.retried, 1u);
  EXPECT_EQ(s.optimal, 1u);
  EXPECT_EQ(*s.t_avg, 2.0);
  EXPECT_EQ(*s.max_value, 5u);
}

TEST(Records, JsonFields) {
  ResultRecord r = record("r1:2.3:1-4", 1, Status::optimal, 0.5);
  r.support = {2, 3};
  const auto j = to_json(r);
  for (const char* f : {"key", "root", "support", "status", "value", "elapsed_s", "nodes", "sense", "retried"})
    EXPECT_TRUE(j.contains(f)) << f;
  const ResultRecord back = record_from_json(j);
  EXPECT_EQ(back.key, r.key);
  EXPECT_EQ(back.value, r.value);
  EXPECT_EQ(back.support, r.support);
  EXPECT_TRUE(to_json(record("x", 0, Status::infeasible, 1))["value"].is_null());
}
