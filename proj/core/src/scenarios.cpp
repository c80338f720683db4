#include "red/scenarios.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <queue>

#include "red/contention.hpp"

namespace red {

namespace {

// Task models. FLOPs in GFLOPs and ARM memory footprint in MB.
struct Model {
  const char* name;
  double gflops;
  double mem_mb;
};

constexpr Model kLane{"lane", 4.111, 3329};
constexpr Model kSeg{"seg", 2.655, 3359};
constexpr Model kCtrl{"ctrl", 0.465, 3680};
constexpr Model kDet{"det", 0.283, 3593};
constexpr double kMimoGflops = 6.704;
constexpr double kMimoMem = 3718;

// Costs are 10 ms per GFLOP at scale 1. A decoder head is 40% of its
// standalone model; the shared encoder takes the rest of the multi-task net.
constexpr double kMsPerGflop = 10.0;
constexpr double kHeadShare = 0.4;

double encoder_ms() {
  return kMsPerGflop * (kMimoGflops - kHeadShare * (kLane.gflops + kSeg.gflops + kCtrl.gflops + kDet.gflops));
}

NodeAttrs stage(const Model& m, double scale) {
  NodeAttrs a;
  const Duration enc = from_ms(encoder_ms() * scale);
  const Duration dec = from_ms(kMsPerGflop * kHeadShare * m.gflops * scale);
  a.wcet = enc + dec;
  a.mem_mb = std::max(m.mem_mb, kMimoMem);
  a.encoder_ref = "mimonet";
  a.enc_cost = enc;
  a.dec_costs = {dec};
  return a;
}

NodeAttrs standalone(const Model& m, double scale) {
  NodeAttrs a;
  a.wcet = from_ms(kMsPerGflop * m.gflops * scale);
  a.mem_mb = m.mem_mb;
  return a;
}

struct Shape {
  std::vector<std::pair<NodeId, Model>> nodes;
  std::vector<Edge> edges;
};

// Three-stage pipelines: perception, environment understanding, control.
Shape shape_of(const std::string& name) {
  if (name == "cruise") return {{{"L", kLane}, {"S", kSeg}, {"C", kCtrl}}, {{"L", "S"}, {"S", "C"}}};
  if (name == "obstacle") {
    return {{{"L", kLane}, {"S", kSeg}, {"O", kDet}, {"C", kCtrl}}, {{"L", "S"}, {"L", "O"}, {"S", "C"}, {"O", "C"}}};
  }
  if (name == "urban") {
    return {{{"L", kLane}, {"O1", kDet}, {"S", kSeg}, {"O2", kDet}, {"C", kCtrl}},
            {{"L", "S"}, {"L", "O2"}, {"O1", "S"}, {"O1", "O2"}, {"S", "C"}, {"O2", "C"}}};
  }
  if (name == "emergency") {
    return {{{"O", kDet}, {"L", kLane}, {"S", kSeg}, {"C", kCtrl}}, {{"O", "L"}, {"O", "S"}, {"L", "C"}, {"S", "C"}}};
  }
  if (name == "night") return {{{"C1", kCtrl}, {"C2", kCtrl}, {"C3", kCtrl}}, {{"C1", "C2"}, {"C2", "C3"}}};
  throw Error(ErrorCode::UnknownScenario, "unknown scenario '" + name + "'");
}

PlatformModel default_platform() {
  PlatformModel p;
  p.name = "sim2";
  p.rho = 2.0;
  p.tick = from_ms(5);
  p.mem_capacity_mb = 8192;
  p.contention_per_gb = 0.05;
  return p;
}

ExecModel exec_model(const ScenarioOptions& o) {
  ExecModel e;
  e.distribution = ExecDistribution::Uniform;
  e.alpha = 0.7;
  if (o.faults) {
    e.io_probability = 0.05;
    e.io_dwell = from_ms(2);
    e.oom_probability = 0.02;
    e.oom_dwell = from_ms(5);
  }
  return e;
}

Duration total_wcet(const DagSpec& d) {
  Duration s{};
  for (const auto& [_, a] : d.nodes) s += a.wcet;
  return s;
}

Duration deadline_for(const DagSpec& d, const PlatformModel& p, DeadlineMode mode) {
  const double f = mode == DeadlineMode::Tight ? 1.05 : 1.5;
  return Duration{std::llround(f * static_cast<double>(deterministic_makespan(d, p).count()))};
}

// Periodic releases with up to 20% of a period of seeded jitter.
std::vector<TimePoint> jittered(Duration period, std::size_t n, TimePoint offset, std::uint64_t seed,
                                std::string_view tag) {
  std::vector<TimePoint> out;
  for (std::size_t k = 0; k < n; ++k) {
    Rng rng(seed, "arrival", tag, k);
    const auto jitter = static_cast<std::int64_t>(rng.uniform01() * 0.2 * static_cast<double>(period.count()));
    out.push_back(offset + static_cast<std::int64_t>(k) * period + Duration{jitter});
  }
  return out;
}

std::vector<InterferenceWindow> interference_windows(TimePoint end, std::uint64_t seed) {
  std::vector<InterferenceWindow> out;
  const Duration block = from_ms(400);
  for (std::size_t k = 0; TimePoint{static_cast<std::int64_t>(k) * block} < end; ++k) {
    Rng rng(seed, "interference", "", k);
    const TimePoint start = static_cast<std::int64_t>(k) * block + from_ms(200 * rng.uniform01());
    const Duration len = from_ms(80 + 120 * rng.uniform01());
    out.push_back({start, start + len, 1.3 + 0.5 * rng.uniform01()});
  }
  return out;
}

DagSpec pipeline(const std::string& id, const Shape& s, double scale) {
  DagSpec d;
  d.id = id;
  for (const auto& [nid, m] : s.nodes) d.nodes.emplace(nid, stage(m, scale));
  for (const auto& e : s.edges) d.edges.insert(e);
  return d;
}

Duration period_for(Duration work, const PlatformModel& p, double load) {
  return Duration{std::llround(static_cast<double>(work.count()) / (p.rho * load))};
}

void set_next_release(DagSpec& d, Duration period) {
  for (auto& [_, a] : d.nodes) a.next_release = period;
}

Workload base(const ScenarioOptions& o) {
  if (!(o.scale > 0.0)) throw Error(ErrorCode::ValidationError, "scale must be positive");
  if (!(o.load > 0.0)) throw Error(ErrorCode::ValidationError, "load must be positive");
  if (o.instances < 1) throw Error(ErrorCode::ValidationError, "instances must be >= 1");
  Workload w;
  w.platform = default_platform();
  w.exec = exec_model(o);
  return w;
}

TimePoint last_release(const Workload& w) {
  TimePoint t{};
  for (const auto& d : w.dags) t = std::max(t, d.releases().back());
  return t;
}

void finish(Workload& w, const ScenarioOptions& o) {
  if (o.interference) {
    Duration d{};
    for (const auto& t : w.dags) d = std::max(d, t.dag.deadline);
    w.interference = interference_windows(last_release(w) + d, o.seed);
  }
  validate(w);
}

Workload single_pipeline(const std::string& name, const ScenarioOptions& o) {
  Workload w = base(o);
  DagTemplate t;
  t.dag = pipeline(name, shape_of(name), o.scale);
  t.dag.deadline = deadline_for(t.dag, w.platform, o.deadline);
  const Duration period = period_for(total_wcet(t.dag), w.platform, o.load);
  set_next_release(t.dag, period);
  t.arrivals = jittered(period, o.instances, TimePoint::zero(), o.seed, name);
  w.dags.push_back(std::move(t));
  return w;
}

// Segmentation feeding cruise control; object detection is inserted between
// them at t = 3 s and removed again at t = 6 s.
Workload dynamic_mutation(const ScenarioOptions& o) {
  Workload w = base(o);
  DagTemplate t;
  t.dag.id = "nav";
  t.dag.nodes.emplace("seg", stage(kSeg, o.scale));
  t.dag.nodes.emplace("ctrl", stage(kCtrl, o.scale));
  t.dag.edges.insert({"seg", "ctrl"});
  NodeAttrs det = stage(kDet, o.scale);

  DagSpec with_det = t.dag;
  with_det.nodes.emplace("det", det);
  with_det.edges.insert({"seg", "det"});
  with_det.edges.insert({"det", "ctrl"});
  t.dag.deadline = deadline_for(with_det, w.platform, o.deadline);

  const Duration period = period_for(total_wcet(with_det), w.platform, o.load);
  const auto n = static_cast<std::size_t>(from_seconds(9) / period);
  set_next_release(t.dag, period);
  det.next_release = period;
  t.arrivals = jittered(period, std::max<std::size_t>(n, 1), TimePoint::zero(), o.seed, "nav");
  w.dags.push_back(std::move(t));

  w.mutations.push_back({from_seconds(3), "nav", AddNode{"det", det, {"seg"}, {"ctrl"}}});
  w.mutations.push_back({from_seconds(6), "nav", RemoveNode{"det"}});
  return w;
}

// Cruise control at 30 Hz depending on object detection at 33 Hz, both with
// 30 ms deadlines and standalone (non-shared) models.
Workload async_pair(const ScenarioOptions& o) {
  Workload w = base(o);
  const Duration span = from_seconds(2);
  auto make = [&](const DagId& id, const Model& m, Duration period) {
    DagTemplate t;
    t.dag.id = id;
    t.dag.nodes.emplace("n", standalone(m, o.scale));
    t.dag.deadline = from_ms(30);
    set_next_release(t.dag, period);
    t.period = period;
    t.count = static_cast<std::size_t>(span / period);
    return t;
  };
  w.dags.push_back(make("A", kCtrl, Duration{1'000'000'000 / 30}));
  w.dags.push_back(make("B", kDet, Duration{1'000'000'000 / 33}));
  w.cross.push_back({"B", "n", "A", "n"});
  return w;
}

// Cruise releases in phases of ten periods; pct% of the phases carry a
// sensor surge that doubles the release rate.
Workload burst(double pct, const ScenarioOptions& o) {
  if (pct < 0 || pct > 100) throw Error(ErrorCode::UnknownScenario, "burst percentage must be in [0, 100]");
  Workload w = single_pipeline("cruise", o);
  auto& t = w.dags.front();
  const Duration period = t.dag.nodes.begin()->second.next_release;
  const std::size_t phase_len = 10;
  const std::size_t phases = (o.instances + phase_len - 1) / phase_len;
  const auto surged = static_cast<std::size_t>(std::llround(pct / 100.0 * static_cast<double>(phases)));
  std::vector<std::size_t> order(phases);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ra = Rng(o.seed, "burst", "phase", a).uniform01();
    const double rb = Rng(o.seed, "burst", "phase", b).uniform01();
    return ra != rb ? ra < rb : a < b;
  });
  std::vector<TimePoint> extra;
  for (std::size_t i = 0; i < surged; ++i) {
    const std::size_t ph = order[i];
    const std::size_t first = ph * phase_len;
    const std::size_t n = std::min(phase_len, o.instances - first);
    auto more = jittered(period, n, static_cast<std::int64_t>(first) * period + period / 2, o.seed, "surge");
    extra.insert(extra.end(), more.begin(), more.end());
  }
  t.arrivals.insert(t.arrivals.end(), extra.begin(), extra.end());
  std::sort(t.arrivals.begin(), t.arrivals.end());
  // Leave room for a saturated baseline to drain its backlog.
  w.scheduler.horizon = t.arrivals.back() + 100 * t.dag.deadline;
  return w;
}

// Four staggered cruise pipelines; pct% of the twelve stages are monolithic
// kernels whose deadlines come from co-runner contention profiling.
Workload nonpartitionable(double pct, const ScenarioOptions& o) {
  if (pct < 0 || pct > 100) throw Error(ErrorCode::UnknownScenario, "atomic percentage must be in [0, 100]");
  Workload w = base(o);
  const Shape s = shape_of("cruise");
  const std::size_t copies = 4;
  std::vector<std::pair<std::size_t, NodeId>> all;
  for (std::size_t c = 0; c < copies; ++c) {
    DagTemplate t;
    t.dag = pipeline("cruise" + std::to_string(c), s, o.scale);
    for (const auto& [id, _] : t.dag.nodes) all.emplace_back(c, id);
    w.dags.push_back(std::move(t));
  }
  std::sort(all.begin(), all.end(), [&](const auto& a, const auto& b) {
    const double ra = Rng(o.seed, "atomic", a.second, a.first).uniform01();
    const double rb = Rng(o.seed, "atomic", b.second, b.first).uniform01();
    return ra != rb ? ra < rb : a < b;
  });
  const auto n_atomic = static_cast<std::size_t>(std::llround(pct / 100.0 * static_cast<double>(all.size())));
  for (std::size_t i = 0; i < n_atomic; ++i) {
    auto& a = w.dags[all[i].first].dag.nodes.at(all[i].second);
    a.kind = NodeKind::Atomic;
    a.encoder_ref.reset();
    a.enc_cost.reset();
    a.dec_costs.clear();
  }
  Duration work{};
  for (const auto& t : w.dags) work += total_wcet(t.dag);
  const Duration period = period_for(work, w.platform, o.load);
  for (std::size_t c = 0; c < copies; ++c) {
    auto& t = w.dags[c];
    t.dag.deadline = deadline_for(t.dag, w.platform, o.deadline);
    set_next_release(t.dag, period);
    t.arrivals = jittered(period, o.instances, static_cast<std::int64_t>(c) * period / static_cast<std::int64_t>(copies),
                          o.seed, t.dag.id);
  }
  if (n_atomic > 0) {
    const std::vector<std::uint64_t> seeds = {1, 2, 3};
    w.contention = profile_atomic_nodes(w, seeds);
  }
  return w;
}

std::pair<std::string, std::optional<double>> split_param(std::string_view name) {
  auto open = name.find('(');
  if (open == std::string_view::npos || name.back() != ')') return {std::string(name), std::nullopt};
  std::string base(name.substr(0, open));
  std::string arg(name.substr(open + 1, name.size() - open - 2));
  try {
    std::size_t pos = 0;
    double v = std::stod(arg, &pos);
    if (pos != arg.size()) throw std::invalid_argument(arg);
    return {base, v};
  } catch (const std::exception&) {
    throw Error(ErrorCode::UnknownScenario, "bad scenario parameter in '" + std::string(name) + "'");
  }
}

}  // namespace

DeadlineMode parse_deadline_mode(std::string_view s) {
  if (s == "tight") return DeadlineMode::Tight;
  if (s == "loose") return DeadlineMode::Loose;
  throw Error(ErrorCode::ValidationError, "deadline must be tight or loose, got '" + std::string(s) + "'");
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"cruise", "obstacle",         "urban",     "emergency",       "night",
                                                 "dynamic_mutation", "async_pair", "burst", "nonpartitionable"};
  return names;
}

Duration deterministic_makespan(const DagSpec& dag, const PlatformModel& platform) {
  Topology topo(dag);
  const auto n = topo.size();
  std::vector<int> pending(n);
  std::set<Topology::Index> ready;
  for (Topology::Index i = 0; i < n; ++i) {
    pending[i] = static_cast<int>(topo.preds(i).size());
    if (pending[i] == 0) ready.insert(i);
  }
  std::vector<double> speed(platform.slot_count(), 1.0);
  if (platform.slot_count() > platform.full_slots()) speed.back() = platform.fractional_speed();
  std::vector<std::optional<std::pair<TimePoint, Topology::Index>>> slot(speed.size());
  TimePoint now{}, end{};
  std::size_t done = 0;
  while (done < n) {
    for (std::size_t s = 0; s < slot.size() && !ready.empty(); ++s) {
      if (slot[s]) continue;
      auto i = *ready.begin();
      ready.erase(ready.begin());
      const auto c = dag.nodes.at(topo.id(i)).wcet;
      const Duration d{static_cast<std::int64_t>(std::ceil(static_cast<double>(c.count()) / speed[s]))};
      slot[s] = std::make_pair(now + d, i);
    }
    TimePoint next = TimePoint::max();
    for (const auto& s : slot) {
      if (s) next = std::min(next, s->first);
    }
    now = next;
    for (auto& s : slot) {
      if (!s || s->first != now) continue;
      for (auto j : topo.succs(s->second)) {
        if (--pending[j] == 0) ready.insert(j);
      }
      s.reset();
      ++done;
      end = now;
    }
  }
  return end;
}

Workload generate_scenario(std::string_view name, const ScenarioOptions& o) {
  auto [base_name, param] = split_param(name);
  Workload w;
  if (base_name == "burst") {
    w = burst(param.value_or(100.0), o);
  } else if (base_name == "nonpartitionable") {
    w = nonpartitionable(param.value_or(50.0), o);
  } else if (param) {
    throw Error(ErrorCode::UnknownScenario, "scenario '" + base_name + "' takes no parameter");
  } else if (base_name == "dynamic_mutation") {
    w = dynamic_mutation(o);
  } else if (base_name == "async_pair") {
    w = async_pair(o);
  } else {
    w = single_pipeline(base_name, o);
  }
  finish(w, o);
  return w;
}

}  // namespace red
