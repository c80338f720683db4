#include "red/contention.hpp"

#include <algorithm>
#include <functional>
#include <tuple>

#include "red/simulator.hpp"

namespace red {

namespace {

/// Reachability within one DAG: reach[u][v] iff a path u -> v exists.
std::vector<std::vector<char>> reachability(const Topology& topo) {
  const auto n = topo.size();
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  const auto& order = topo.order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    auto u = *it;
    for (auto v : topo.succs(u)) {
      reach[u][v] = 1;
      for (std::size_t x = 0; x < n; ++x) reach[u][x] |= reach[v][x];
    }
  }
  return reach;
}

struct Candidate {
  CoRunner runner;
  std::size_t dag_index = 0;
  Topology::Index index = 0;
  std::string key;
};

}  // namespace

std::vector<CoRunner> heaviest_corunner_mix(const DagId& dag, const NodeId& node, std::span<const DagSpec> workload,
                                            std::size_t max_size) {
  std::vector<Topology> topos;
  std::vector<std::vector<std::vector<char>>> reach;
  std::optional<std::pair<std::size_t, Topology::Index>> target;
  for (std::size_t d = 0; d < workload.size(); ++d) {
    topos.emplace_back(workload[d]);
    reach.push_back(reachability(topos.back()));
    if (workload[d].id == dag) {
      if (auto i = topos.back().index_of(node)) target = {d, *i};
    }
  }
  if (!target) throw Error(ErrorCode::NodeNotFound, node_key(dag, node));

  auto concurrent = [&](std::size_t da, Topology::Index a, std::size_t db, Topology::Index b) {
    if (da != db) return true;
    return a != b && !reach[da][a][b] && !reach[da][b][a];
  };

  std::vector<Candidate> cands;
  for (std::size_t d = 0; d < workload.size(); ++d) {
    for (Topology::Index i = 0; i < topos[d].size(); ++i) {
      if (d == target->first && i == target->second) continue;
      if (!concurrent(d, i, target->first, target->second)) continue;
      const auto& a = workload[d].nodes.at(topos[d].id(i));
      cands.push_back({{workload[d].id, topos[d].id(i), a.mem_mb, a.wcet}, d, i, node_key(workload[d].id, topos[d].id(i))});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.key < b.key; });

  std::vector<std::size_t> best, cur;
  double best_mem = -1.0;
  Duration best_wcet{};
  std::function<void(std::size_t, double, Duration)> search = [&](std::size_t from, double mem, Duration wcet) {
    // cur is built in key order, so the first subset reaching a (mem, wcet)
    // score is the lexicographically smallest.
    if (mem > best_mem || (mem == best_mem && wcet > best_wcet)) {
      best = cur;
      best_mem = mem;
      best_wcet = wcet;
    }
    if (cur.size() == max_size) return;
    for (std::size_t c = from; c < cands.size(); ++c) {
      bool ok = true;
      for (auto p : cur) {
        if (!concurrent(cands[p].dag_index, cands[p].index, cands[c].dag_index, cands[c].index)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      cur.push_back(c);
      search(c + 1, mem + cands[c].runner.mem_mb, wcet + cands[c].runner.wcet);
      cur.pop_back();
    }
  };
  search(0, 0.0, Duration::zero());

  std::vector<CoRunner> out;
  for (auto i : best) out.push_back(cands[i].runner);
  return out;
}

Duration profile_contention(const DagId& dag, const NodeId& node, std::span<const DagSpec> workload,
                            const PlatformModel& platform, const ExecModel& exec, std::span<const std::uint64_t> seeds,
                            std::span<const InterferenceWindow> interference) {
  const std::size_t slots = platform.slot_count();
  auto mix = heaviest_corunner_mix(dag, node, workload, slots > 0 ? slots - 1 : 0);

  const NodeAttrs* target = nullptr;
  for (const auto& d : workload) {
    if (d.id == dag) target = &d.nodes.at(node);
  }

  auto single = [](const std::string& id, const NodeAttrs& src, Duration deadline) {
    DagTemplate t;
    t.dag.id = id;
    NodeAttrs a;
    a.wcet = src.wcet;
    a.mem_mb = src.mem_mb;
    t.dag.nodes.emplace("n", a);
    t.dag.deadline = deadline;
    return t;
  };
  Workload w;
  w.platform = platform;
  w.exec = exec;
  w.exec.io_probability = 0.0;
  w.exec.oom_probability = 0.0;
  w.interference.assign(interference.begin(), interference.end());
  // Co-runners carry earlier deadlines, so they take their slots first.
  for (std::size_t i = 0; i < mix.size(); ++i) {
    NodeAttrs a;
    a.wcet = mix[i].wcet;
    a.mem_mb = mix[i].mem_mb;
    w.dags.push_back(single("co" + std::to_string(i), a, Duration{1}));
  }
  w.dags.push_back(single("target", *target, Duration{2}));
  // The tiny deadlines only order the queue; give the run room to finish.
  Duration total = target->wcet;
  for (const auto& m : mix) total += m.wcet;
  w.scheduler.horizon = 100 * total + from_seconds(1);

  Duration worst{};
  for (auto seed : seeds) {
    auto res = run(w, Variant::EDF, seed);
    for (const auto& e : res.trace.events) {
      if (e.kind == TraceKind::Finish && template_of(e.dag) == "target") {
        worst = std::max(worst, e.time - target->wcet);
      }
    }
  }
  return std::max(worst, Duration::zero());
}

ContentionTable profile_atomic_nodes(const Workload& w, std::span<const std::uint64_t> seeds) {
  std::vector<DagSpec> specs;
  for (const auto& t : w.dags) specs.push_back(t.dag);
  ContentionTable table;
  for (const auto& d : specs) {
    for (const auto& [id, a] : d.nodes) {
      if (a.kind != NodeKind::Atomic) continue;
      table[{node_key(d.id, id), w.platform.name}] =
          profile_contention(d.id, id, specs, w.platform, w.exec, seeds, w.interference);
    }
  }
  return table;
}

}  // namespace red
