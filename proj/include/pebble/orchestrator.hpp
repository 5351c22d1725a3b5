#pragma once

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "pebble/catalog.hpp"
#include "pebble/leader.hpp"
#include "pebble/pipeline.hpp"

namespace pebble {

inline constexpr const char* kVersion = "1.0.0";

struct PlannedInstance {
  std::string key;
  Vertex root = 0;
  std::vector<Vertex> support;
  std::uint64_t lower = 1;
  std::uint64_t upper = 1;
  std::size_t worker = 0;
};

/// Summary of one root orbit inside a plan.
struct RootGroup {
  Vertex root = 0;
  std::size_t orbit_size = 0;
  std::uint64_t class_count = 0;
  std::size_t blocks = 0;
  std::size_t worker = 0;
};

struct JobPlan {
  std::string graph;  // catalog spec, re-read by every worker
  std::size_t k = 0;
  std::size_t c = 0;
  std::uint64_t lower = 1;
  std::optional<std::uint64_t> upper;
  std::size_t workers = 1;
  FamilyOrder order = FamilyOrder::shuffled;
  std::uint64_t order_seed = 0;
  std::vector<RootGroup> roots;
  std::vector<PlannedInstance> instances;
};

/// "r<root>:<s1>.<s2>...:<L>-<U>"; stable across runs so logs can be resumed.
inline std::string instance_key(Vertex root, const std::vector<Vertex>& support, std::uint64_t lower,
                                std::uint64_t upper) {
  std::string key = "r" + std::to_string(root) + ":";
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (i) key += '.';
    key += std::to_string(support[i]);
  }
  return key + ":" + std::to_string(lower) + "-" + std::to_string(upper);
}

/// One instance per covering block of every orbit representative.  Roots
/// are dealt to workers round-robin in order of decreasing block count.
inline JobPlan make_plan(const Graph& g, std::string graph_spec, std::size_t k, std::size_t c, std::uint64_t lower,
                         std::optional<std::uint64_t> upper, std::size_t workers,
                         FamilyOrder order = FamilyOrder::shuffled, std::uint64_t order_seed = 0) {
  if (workers < 1) throw std::invalid_argument("workers must be at least 1");
  if (lower < 1 || (upper && *upper < lower)) throw std::invalid_argument("bounds must satisfy 1 <= L <= U");
  JobPlan plan;
  plan.graph = std::move(graph_spec);
  plan.k = k;
  plan.c = c;
  plan.lower = lower;
  plan.upper = upper;
  plan.workers = workers;
  plan.order = order;
  plan.order_seed = order_seed;

  auto roots = plan_support_k(g, k, c, order, order_seed);
  std::stable_sort(roots.begin(), roots.end(), [](const RootPlan& a, const RootPlan& b) {
    return a.design.sets.size() > b.design.sets.size();
  });
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const RootPlan& rp = roots[i];
    const std::size_t worker = i % workers;
    plan.roots.push_back({rp.root, rp.orbit.size(), rp.class_count, rp.design.sets.size(), worker});
    for (VertexSet block : rp.design.sets) {
      PlannedInstance inst;
      inst.root = rp.root;
      inst.support = block.to_vector();
      inst.lower = lower;
      inst.upper = upper.value_or(std::max(lower, default_upper(g, rp.root, inst.support)));
      inst.key = instance_key(inst.root, inst.support, inst.lower, inst.upper);
      inst.worker = worker;
      plan.instances.push_back(std::move(inst));
    }
  }
  return plan;
}

inline nlohmann::json to_json(const JobPlan& plan) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["graph"] = plan.graph;
  j["k"] = plan.k;
  j["c"] = plan.c;
  j["lower"] = plan.lower;
  j["upper"] = plan.upper ? nlohmann::json(*plan.upper) : nlohmann::json(nullptr);
  j["workers"] = plan.workers;
  j["family_order"] = plan.order == FamilyOrder::shuffled ? "shuffled" : "lexicographic";
  j["order_seed"] = plan.order_seed;
  auto& roots = j["roots"] = nlohmann::json::array();
  for (const auto& r : plan.roots)
    roots.push_back({{"root", r.root},
                     {"orbit_size", r.orbit_size},
                     {"classes", r.class_count},
                     {"blocks", r.blocks},
                     {"worker", r.worker}});
  auto& insts = j["instances"] = nlohmann::json::array();
  for (const auto& i : plan.instances)
    insts.push_back({{"key", i.key},
                     {"root", i.root},
                     {"support", i.support},
                     {"lower", i.lower},
                     {"upper", i.upper},
                     {"worker", i.worker}});
  return j;
}

inline JobPlan plan_from_json(const nlohmann::json& j) {
  JobPlan plan;
  plan.graph = j.at("graph").get<std::string>();
  plan.k = j.at("k").get<std::size_t>();
  plan.c = j.at("c").get<std::size_t>();
  plan.lower = j.at("lower").get<std::uint64_t>();
  if (!j.at("upper").is_null()) plan.upper = j.at("upper").get<std::uint64_t>();
  plan.workers = j.at("workers").get<std::size_t>();
  plan.order = j.value("family_order", "shuffled") == "lexicographic" ? FamilyOrder::lexicographic
                                                                       : FamilyOrder::shuffled;
  plan.order_seed = j.value("order_seed", std::uint64_t{0});
  for (const auto& r : j.at("roots"))
    plan.roots.push_back({r.at("root").get<Vertex>(), r.at("orbit_size").get<std::size_t>(),
                          r.at("classes").get<std::uint64_t>(), r.at("blocks").get<std::size_t>(),
                          r.at("worker").get<std::size_t>()});
  std::set<std::string> keys;
  for (const auto& i : j.at("instances")) {
    PlannedInstance inst;
    inst.key = i.at("key").get<std::string>();
    inst.root = i.at("root").get<Vertex>();
    inst.support = i.at("support").get<std::vector<Vertex>>();
    inst.lower = i.at("lower").get<std::uint64_t>();
    inst.upper = i.at("upper").get<std::uint64_t>();
    inst.worker = i.at("worker").get<std::size_t>();
    if (!keys.insert(inst.key).second) throw std::invalid_argument("duplicate instance key " + inst.key);
    plan.instances.push_back(std::move(inst));
  }
  return plan;
}

inline void save_plan(const JobPlan& plan, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json(plan).dump(1) << '\n';
}

inline JobPlan load_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return plan_from_json(nlohmann::json::parse(in));
}

struct ResultRecord {
  std::string key;
  Vertex root = 0;
  std::vector<Vertex> support;
  Status status = Status::infeasible;
  std::optional<std::uint64_t> value;  // set when Optimal
  double elapsed_s = 0;
  std::uint64_t nodes = 0;
  Sense sense = Sense::descending;
  bool retried = false;

  /// Whether this record settles its key (a TimedOut first attempt does not).
  bool final() const { return status != Status::timed_out || retried; }
};

inline nlohmann::json to_json(const ResultRecord& r) {
  return {{"key", r.key},
          {"root", r.root},
          {"support", r.support},
          {"status", to_string(r.status)},
          {"value", r.value ? nlohmann::json(*r.value) : nlohmann::json(nullptr)},
          {"elapsed_s", r.elapsed_s},
          {"nodes", r.nodes},
          {"sense", to_string(r.sense)},
          {"retried", r.retried}};
}

inline ResultRecord record_from_json(const nlohmann::json& j) {
  ResultRecord r;
  r.key = j.at("key").get<std::string>();
  r.root = j.at("root").get<Vertex>();
  r.support = j.at("support").get<std::vector<Vertex>>();
  const std::string status = j.at("status").get<std::string>();
  if (status == "Infeasible")
    r.status = Status::infeasible;
  else if (status == "Optimal")
    r.status = Status::optimal;
  else if (status == "TimedOut")
    r.status = Status::timed_out;
  else
    throw std::invalid_argument("unknown status " + status);
  if (!j.at("value").is_null()) r.value = j.at("value").get<std::uint64_t>();
  r.elapsed_s = j.at("elapsed_s").get<double>();
  r.nodes = j.at("nodes").get<std::uint64_t>();
  const std::string sense = j.at("sense").get<std::string>();
  if (sense != "desc" && sense != "asc") throw std::invalid_argument("unknown sense " + sense);
  r.sense = sense == "desc" ? Sense::descending : Sense::ascending;
  r.retried = j.at("retried").get<bool>();
  return r;
}

/// Reads a result log.  Lines that do not parse (typically the last line of
/// a run that was killed mid-write) are skipped and counted.
inline std::vector<ResultRecord> read_records(const std::filesystem::path& path, std::size_t* skipped = nullptr) {
  std::vector<ResultRecord> out;
  std::size_t bad = 0;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception&) {
      ++bad;
    }
  }
  if (skipped) *skipped = bad;
  return out;
}

/// Last record per key, with a final record always taking precedence over
/// a TimedOut first attempt.
inline std::map<std::string, ResultRecord> latest_records(const std::vector<ResultRecord>& records) {
  std::map<std::string, ResultRecord> out;
  for (const auto& r : records) {
    auto it = out.find(r.key);
    if (it == out.end())
      out.emplace(r.key, r);
    else if (r.final() || !it->second.final())
      it->second = r;
  }
  return out;
}

struct RunOptions {
  std::size_t shard = 0;
  std::size_t shards = 1;
  std::chrono::duration<double> time_cap = std::chrono::seconds(1800);
  std::filesystem::path out = "results.jsonl";
  bool resume = false;
  std::size_t threads = 1;
  /// Stop after starting this many instances (leaves the rest for a resume).
  std::optional<std::size_t> max_instances;
};

namespace detail {

/// Serialises appends to the result log; each record is flushed and synced
/// before the call returns.
class RecordWriter {
 public:
  RecordWriter(const std::filesystem::path& path, bool append) {
    bool needs_newline = false;
    if (append && std::filesystem::exists(path) && std::filesystem::file_size(path) > 0) {
      std::ifstream in(path, std::ios::binary);
      in.seekg(-1, std::ios::end);
      needs_newline = in.get() != '\n';
    }
    file_ = std::fopen(path.c_str(), append ? "ab" : "wb");
    if (!file_) throw std::runtime_error("cannot open " + path.string());
    if (needs_newline) std::fputc('\n', file_);
  }
  RecordWriter(const RecordWriter&) = delete;
  RecordWriter& operator=(const RecordWriter&) = delete;
  ~RecordWriter() { std::fclose(file_); }

  void write(const ResultRecord& r) {
    const std::string line = to_json(r).dump() + "\n";
    std::lock_guard lock(mu_);
    std::fwrite(line.data(), 1, line.size(), file_);
    std::fflush(file_);
    ::fsync(::fileno(file_));
    written_.push_back(r);
  }

  std::vector<ResultRecord> take() {
    std::lock_guard lock(mu_);
    return std::move(written_);
  }

 private:
  std::FILE* file_ = nullptr;
  std::mutex mu_;
  std::vector<ResultRecord> written_;
};

inline ResultRecord make_record(const PlannedInstance& inst, const BilevelOutcome& out, Sense sense, bool retried) {
  ResultRecord r;
  r.key = inst.key;
  r.root = inst.root;
  r.support = inst.support;
  r.status = out.status;
  if (out.status == Status::optimal) r.value = out.value;
  r.elapsed_s = out.elapsed.count();
  r.nodes = out.nodes;
  r.sense = sense;
  r.retried = retried;
  return r;
}

}  // namespace detail

/// Writes the run manifest next to the result log.
inline void write_manifest(const JobPlan& plan, const RunOptions& opt) {
  nlohmann::json m{{"graph", plan.graph},
                   {"k", plan.k},
                   {"c", plan.c},
                   {"lower", plan.lower},
                   {"upper", plan.upper ? nlohmann::json(*plan.upper) : nlohmann::json(nullptr)},
                   {"version", kVersion},
                   {"shard", std::to_string(opt.shard) + "/" + std::to_string(opt.shards)},
                   {"time_cap_s", opt.time_cap.count()},
                   {"instances", plan.instances.size()}};
  std::ofstream out(opt.out.string() + ".manifest.json");
  out << m.dump(1) << '\n';
}

/// Executes this shard's unfinished instances, appending records to
/// opt.out as they complete.  A TimedOut attempt is logged, then rerun once
/// with the opposite scan sense.  Returns the records written by this call.
inline std::vector<ResultRecord> run(const JobPlan& plan, const RunOptions& opt) {
  if (opt.shards < 1 || opt.shard >= opt.shards) throw std::invalid_argument("shard must satisfy 0 <= i < W");
  const Graph g = catalog(plan.graph);

  std::map<std::string, ResultRecord> known;
  if (opt.resume && std::filesystem::exists(opt.out)) known = latest_records(read_records(opt.out));

  struct Job {
    const PlannedInstance* inst;
    bool retry_only;
    Sense first_sense;
  };
  std::vector<Job> jobs;
  for (const auto& inst : plan.instances) {
    if (inst.worker % opt.shards != opt.shard) continue;
    auto it = known.find(inst.key);
    if (it == known.end())
      jobs.push_back({&inst, false, Sense::descending});
    else if (!it->second.final())
      jobs.push_back({&inst, true, it->second.sense});
  }
  if (opt.max_instances && jobs.size() > *opt.max_instances) jobs.resize(*opt.max_instances);

  write_manifest(plan, opt);
  detail::RecordWriter writer(opt.out, opt.resume);
  std::atomic<std::size_t> next{0};
  std::mutex error_mu;
  std::exception_ptr error;

  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        const Job& job = jobs[i];
        BilevelInstance bi;
        bi.root = job.inst->root;
        bi.support = job.inst->support;
        bi.lower = job.inst->lower;
        bi.upper = job.inst->upper;
        bi.time_cap = opt.time_cap;
        bi.sense = job.first_sense;
        if (!job.retry_only) {
          const BilevelOutcome out = max_unsolvable(g, bi);
          writer.write(detail::make_record(*job.inst, out, bi.sense, false));
          if (out.status != Status::timed_out) continue;
        }
        bi.sense = flipped(bi.sense);
        writer.write(detail::make_record(*job.inst, max_unsolvable(g, bi), bi.sense, true));
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        next = jobs.size();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(opt.threads, jobs.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return writer.take();
}

struct RunSummary {
  std::size_t orbit_count = 0;     // distinct roots
  std::size_t instance_count = 0;  // distinct keys
  std::optional<double> t_avg;     // mean elapsed seconds over final records
  std::optional<double> t_total;   // t_avg * instance_count
  std::size_t incomplete = 0;      // failed in both senses
  std::size_t retried = 0;         // settled after a sense flip
  std::size_t infeasible = 0;
  std::size_t optimal = 0;
  std::optional<std::uint64_t> max_value;
};

inline RunSummary report(const std::vector<ResultRecord>& records) {
  RunSummary s;
  std::set<Vertex> roots;
  double sum = 0;
  for (const auto& [key, r] : latest_records(records)) {
    roots.insert(r.root);
    ++s.instance_count;
    sum += r.elapsed_s;
    if (r.retried) ++s.retried;
    switch (r.status) {
      case Status::infeasible: ++s.infeasible; break;
      case Status::optimal:
        ++s.optimal;
        if (r.value) s.max_value = std::max(s.max_value.value_or(0), *r.value);
        break;
      case Status::timed_out: ++s.incomplete; break;
    }
  }
  s.orbit_count = roots.size();
  if (s.instance_count > 0) {
    s.t_avg = sum / static_cast<double>(s.instance_count);
    s.t_total = *s.t_avg * static_cast<double>(s.instance_count);
  }
  return s;
}

inline nlohmann::json to_json(const RunSummary& s) {
  auto opt = [](const auto& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  return {{"orbit_count", s.orbit_count}, {"instance_count", s.instance_count},
          {"t_avg", opt(s.t_avg)},        {"t_total", opt(s.t_total)},
          {"incomplete", s.incomplete},   {"retried", s.retried},
          {"infeasible", s.infeasible},   {"optimal", s.optimal},
          {"max_value", opt(s.max_value)}};
}

}  // namespace pebble
