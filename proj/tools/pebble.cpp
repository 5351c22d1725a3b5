#include <charconv>
#include <chrono>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pebble/pebble.hpp"

using nlohmann::json;
using namespace pebble;

namespace {

std::vector<Vertex> parse_vertex_list(const std::string& text) {
  std::vector<Vertex> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find_first_of(",. ", pos);
    if (end == std::string::npos) end = text.size();
    if (end > pos) {
      Vertex v = 0;
      auto [p, ec] = std::from_chars(text.data() + pos, text.data() + end, v);
      if (ec != std::errc() || p != text.data() + end) throw std::invalid_argument("bad vertex list: " + text);
      out.push_back(v);
    }
    pos = end + 1;
  }
  return out;
}

Sense parse_sense(const std::string& s) {
  if (s == "desc") return Sense::descending;
  if (s == "asc") return Sense::ascending;
  throw std::invalid_argument("sense must be desc or asc");
}

json config_json(const Configuration& p) {
  json j = json::object();
  for (Vertex v = 0; v < p.order(); ++v)
    if (p[v]) j[std::to_string(v)] = p[v];
  return j;
}

json outcome_json(const BilevelOutcome& o) {
  json j{{"status", to_string(o.status)},
         {"elapsed_s", o.elapsed.count()},
         {"nodes", o.nodes},
         {"follower_calls", o.follower_calls}};
  if (o.status == Status::optimal) {
    j["value"] = o.value;
    j["witness"] = config_json(o.witness);
  }
  return j;
}

json report_json(const PebblingReport& rep) {
  json per_root = json::array();
  for (const auto& rv : rep.per_root) per_root.push_back({{"root", rv.root}, {"orbit", rv.orbit}, {"value", rv.value}});
  json j{{"graph", rep.graph},
         {"quantity", to_string(rep.quantity)},
         {"value", rep.value},
         {"complete", rep.complete},
         {"per_root", per_root},
         {"instances", rep.instances.size()}};
  if (rep.certificate.order() > 0 && rep.certificate.size() > 0) {
    j["certificate"] = config_json(rep.certificate);
    j["certificate_root"] = rep.certificate_root;
  }
  std::size_t retried = 0, timed_out = 0;
  for (const auto& i : rep.instances) {
    retried += i.retried;
    timed_out += i.outcome.status == Status::timed_out;
  }
  j["retried"] = retried;
  j["timed_out"] = timed_out;
  return j;
}

std::optional<std::chrono::duration<double>> cap_from(double secs) {
  if (secs <= 0) return std::nullopt;
  return std::chrono::duration<double>(secs);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph pebbling numbers through exact bilevel search"};
  app.require_subcommand(1);

  std::string graph, config, support_text, sense_text = "desc", shard_text = "0/1", out_path, in_path, plan_path;
  std::string g_spec, h_spec, order_text = "shuffled";
  Vertex root = 0;
  std::uint64_t target = 0, lower = 1, seed = 0, sample_seed = 0;
  std::optional<std::uint64_t> upper;
  std::optional<std::size_t> sample, max_instances;
  std::size_t k = 4, c = 8, workers = 1, threads = 1;
  double time_cap = 0;
  bool class0 = false, resume = false;

  auto* solve = app.add_subcommand("solve", "Most pebbles a configuration can move onto a root");
  solve->add_option("--graph", graph, "Graph spec")->required();
  solve->add_option("--config", config, "Configuration as v:count,...")->required();
  solve->add_option("--root", root, "Root vertex")->required();
  solve->add_option("--target", target, "Stop once this many arrive (0 = maximise)");

  auto* pis = app.add_subcommand("pis", "Largest unsolvable configuration supported inside S");
  pis->add_option("--graph", graph, "Graph spec")->required();
  pis->add_option("--root", root, "Root vertex")->required();
  pis->add_option("--support", support_text, "Support vertices, comma separated")->required();
  pis->add_option("--lower", lower, "Smallest size of interest");
  pis->add_option("--upper", upper, "Largest size of interest");
  pis->add_option("--sense", sense_text, "Scan direction: desc or asc");
  pis->add_option("--time-cap", time_cap, "Seconds before giving up (0 = none)");

  auto* orbits = app.add_subcommand("orbits", "Automorphism group order and vertex orbits");
  orbits->add_option("--graph", graph, "Graph spec")->required();

  auto* classes = app.add_subcommand("classes", "k-subset classes under the root stabiliser");
  classes->add_option("--graph", graph, "Graph spec")->required();
  classes->add_option("--k", k, "Support size")->required();

  auto* cover = app.add_subcommand("cover", "Greedy covering designs for every root orbit");
  cover->add_option("--graph", graph, "Graph spec")->required();
  cover->add_option("--k", k, "Support size")->required();
  cover->add_option("--c", c, "Block capacity")->required();
  cover->add_option("--order", order_text, "Family order: shuffled or lex");
  cover->add_option("--seed", seed, "Shuffle seed");

  auto* pi_cmd = app.add_subcommand("pi", "Pebbling number");
  pi_cmd->add_option("--graph", graph, "Graph spec")->required();

  auto* pik = app.add_subcommand("pik", "Support-k pebbling number bound through covering blocks");
  pik->add_option("--graph", graph, "Graph spec")->required();
  pik->add_option("--k", k, "Support size")->required();
  pik->add_option("--c", c, "Block capacity")->required();
  auto* class0_flag = pik->add_flag("--class0", class0, "Use L = |V| (Class-0 test)");
  pik->add_option("--lower", lower, "Smallest size of interest")->excludes(class0_flag);
  pik->add_option("--upper", upper, "Largest size of interest");
  pik->add_option("--sample", sample, "Run only this many random blocks");
  pik->add_option("--sample-seed", sample_seed, "Seed for --sample");
  pik->add_option("--time-cap", time_cap, "Seconds per instance (0 = none)");

  auto* twopp = app.add_subcommand("twopp", "Search for a 2-pebbling property violation");
  twopp->add_option("--graph", graph, "Graph spec")->required();

  auto* graham = app.add_subcommand("graham", "Check pi_k(G x H) <= pi(G) pi(H) on covering blocks");
  graham->set_help_flag("--help", "Print this help message and exit");
  graham->add_option("--g", g_spec, "First factor")->required();
  graham->add_option("--h", h_spec, "Second factor")->required();
  graham->add_option("--k", k, "Support size")->required();
  graham->add_option("--c", c, "Block capacity")->required();
  graham->add_option("--sample", sample, "Run only this many random blocks");
  graham->add_option("--sample-seed", sample_seed, "Seed for --sample");
  graham->add_option("--time-cap", time_cap, "Seconds per instance (0 = none)");

  auto* plan_cmd = app.add_subcommand("plan", "Write a batch plan");
  plan_cmd->add_option("--graph", graph, "Graph spec")->required();
  plan_cmd->add_option("--k", k, "Support size")->required();
  plan_cmd->add_option("--c", c, "Block capacity")->required();
  plan_cmd->add_option("--lower", lower, "L for every instance");
  plan_cmd->add_option("--upper", upper, "U for every instance (default: per-instance cap)");
  plan_cmd->add_option("--workers", workers, "Number of shards");
  plan_cmd->add_option("--seed", seed, "Shuffle seed for the covering order");
  plan_cmd->add_option("--out", out_path, "Plan file")->required();

  auto* batch = app.add_subcommand("batch", "Run one shard of a plan");
  batch->add_option("--plan", plan_path, "Plan file")->required();
  batch->add_option("--shard", shard_text, "Shard as i/W");
  batch->add_option("--time-cap", time_cap, "Seconds per instance")->default_val(1800);
  batch->add_option("--out", out_path, "Result log (JSON lines)")->required();
  batch->add_flag("--resume", resume, "Skip instances already recorded in --out");
  batch->add_option("--threads", threads, "Worker threads");
  batch->add_option("--max-instances", max_instances, "Stop after this many instances");

  auto* report_cmd = app.add_subcommand("report", "Summarise a result log");
  report_cmd->add_option("--in", in_path, "Result log")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) {
      const Graph g = catalog(graph);
      const Configuration p = parse_configuration(config, g.order());
      FollowerOptions opt;
      opt.target = target;
      const DeliveryResult res = max_deliverable(g, p, root, opt);
      json moves = json::array();
      for (Arc a : res.moves) moves.push_back({a.from, a.to});
      std::cout << json{{"delivered", res.delivered}, {"moves", moves}, {"nodes", res.nodes}}.dump(1) << '\n';
    } else if (*pis) {
      const Graph g = catalog(graph);
      BilevelInstance inst;
      inst.root = root;
      inst.support = parse_vertex_list(support_text);
      inst.lower = lower;
      inst.upper = upper;
      inst.sense = parse_sense(sense_text);
      inst.time_cap = cap_from(time_cap);
      std::cout << outcome_json(max_unsolvable(g, inst)).dump(1) << '\n';
    } else if (*orbits) {
      const Graph g = catalog(graph);
      const AutGroup grp = automorphisms(g);
      std::cout << json{{"graph", g.name()}, {"group_order", grp.order}, {"orbits", vertex_orbits(g, grp)}}.dump(1)
                << '\n';
    } else if (*classes) {
      const Graph g = catalog(graph);
      json per_root = json::array();
      std::uint64_t total = 0;
      const auto orbs = vertex_orbits(g);
      for (const auto& orbit : orbs) {
        const auto sc = support_class_reps(g, orbit.front(), k, false);
        per_root.push_back({{"root", orbit.front()}, {"orbit_size", orbit.size()}, {"classes", sc.class_count}});
        total += sc.class_count;
      }
      const std::uint64_t naive = g.order() * binomial(g.order() - 1, k);
      std::cout << json{{"graph", g.name()},
                        {"roots", orbs.size()},
                        {"classes", total},
                        {"naive", naive},
                        {"ratio", static_cast<double>(naive) / static_cast<double>(total)},
                        {"per_root", per_root}}
                       .dump(1)
                << '\n';
    } else if (*cover) {
      const Graph g = catalog(graph);
      const FamilyOrder order = order_text == "lex" ? FamilyOrder::lexicographic : FamilyOrder::shuffled;
      json per_root = json::array();
      std::size_t total = 0;
      bool valid = true;
      for (const auto& orbit : vertex_orbits(g)) {
        const auto sc = support_class_reps(g, orbit.front(), k);
        const auto fam = ordered_family(sc.reps, order, seed);
        const auto design = greedy_cover(fam, c, orbit.front());
        valid = valid && validate_cover(design, sc.reps);
        per_root.push_back({{"root", orbit.front()}, {"classes", sc.class_count}, {"blocks", design.sets.size()}});
        total += design.sets.size();
      }
      std::cout << json{{"graph", g.name()}, {"blocks", total}, {"valid", valid}, {"per_root", per_root}}.dump(1)
                << '\n';
    } else if (*pi_cmd) {
      std::cout << report_json(pi_report(catalog(graph))).dump(1) << '\n';
    } else if (*pik) {
      const Graph g = catalog(graph);
      SupportKOptions opt;
      opt.lower = class0 ? g.order() : lower;
      opt.upper = upper;
      opt.sample = sample;
      opt.sample_seed = sample_seed;
      opt.time_cap = cap_from(time_cap);
      std::cout << report_json(pi_k_upper(g, k, c, opt)).dump(1) << '\n';
    } else if (*twopp) {
      const auto res = two_pebbling_witness(catalog(graph));
      json j{{"pebbling_number", res.pebbling_number},
             {"checked", res.configurations_checked},
             {"search", res.complete ? "complete" : "equality slice only"}};
      if (res.witness) {
        j["witness"] = {{"config", config_json(res.witness->config)},
                        {"root", res.witness->root},
                        {"on_root", res.witness->on_root},
                        {"size", res.witness->config.size()},
                        {"support", res.witness->config.support().size()}};
      } else {
        j["witness"] = nullptr;
      }
      std::cout << j.dump(1) << '\n';
    } else if (*graham) {
      SupportKOptions opt;
      opt.sample = sample;
      opt.sample_seed = sample_seed;
      opt.time_cap = cap_from(time_cap);
      const auto rep = graham_support_check(catalog(g_spec), catalog(h_spec), k, c, opt);
      std::cout << json{{"pi_g", rep.pi_g},
                        {"pi_h", rep.pi_h},
                        {"bound", rep.bound},
                        {"completed", rep.completed},
                        {"infeasible", rep.infeasible},
                        {"consistent", rep.consistent},
                        {"support_k", report_json(rep.support_k)}}
                       .dump(1)
                << '\n';
    } else if (*plan_cmd) {
      const Graph g = catalog(graph);
      const JobPlan plan = make_plan(g, graph, k, c, lower, upper, workers, FamilyOrder::shuffled, seed);
      save_plan(plan, out_path);
      std::vector<std::size_t> load(workers, 0);
      for (const auto& i : plan.instances) ++load[i.worker];
      std::cout << json{{"roots", plan.roots.size()}, {"instances", plan.instances.size()}, {"per_worker", load}}.dump()
                << '\n';
    } else if (*batch) {
      RunOptions opt;
      const auto slash = shard_text.find('/');
      if (slash == std::string::npos) throw std::invalid_argument("--shard must look like i/W");
      opt.shard = std::stoul(shard_text.substr(0, slash));
      opt.shards = std::stoul(shard_text.substr(slash + 1));
      opt.time_cap = std::chrono::duration<double>(time_cap);
      opt.out = out_path;
      opt.resume = resume;
      opt.threads = threads;
      opt.max_instances = max_instances;
      const auto written = run(load_plan(plan_path), opt);
      std::cout << json{{"written", written.size()}, {"summary", to_json(report(written))}}.dump() << '\n';
    } else if (*report_cmd) {
      std::size_t skipped = 0;
      const auto records = read_records(in_path, &skipped);
      json j = to_json(report(records));
      j["unreadable_lines"] = skipped;
      std::cout << j.dump(1) << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
