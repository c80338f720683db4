#include "red/simulator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <unordered_map>

#include "red/deadlines.hpp"
#include "red/overload.hpp"
#include "red/refinement.hpp"
#include "red/runtime.hpp"

namespace red {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::EDF: return "EDF";
    case Variant::RED_FG: return "RED_FG";
    case Variant::RED_IDA: return "RED_IDA";
    case Variant::RED: return "RED";
  }
  return "?";
}

Variant parse_variant(std::string_view s) {
  std::string u;
  for (char c : s) u += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (auto v : kAllVariants) {
    if (to_string(v) == u) return v;
  }
  throw Error(ErrorCode::ValidationError, "unknown variant '" + std::string(s) + "'");
}

std::string unit_id(const std::string& instance, const NodeId& node) { return instance + "/" + node; }

std::string instance_id(const DagId& dag, std::size_t k) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04zu", k);
  return dag + "#" + buf;
}

namespace {

using Index = Topology::Index;

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == '\t' || c == '\n' || c == ';' || c == '\r') c = ' ';
  }
  return s;
}

/// One version of a template as the chosen variant schedules it.
struct Prepared {
  DagId dag_id;
  std::shared_ptr<const DagSpec> spec;
  Topology topo;
  std::vector<Duration> wcet;
  std::vector<double> mem;
  /// Relative sub-deadline from the initial proportional assignment.
  std::vector<Duration> rel_sub;
  /// D_np for atomic nodes.
  std::vector<std::optional<Duration>> dnp;
  /// Contention delay added to the cost basis of atomic nodes.
  std::vector<Duration> delta;
  /// Encoder weights executed by the node, empty if none.
  std::vector<std::string> encoder;
  std::vector<bool> shared_encoder;
  std::vector<std::string> est_key;

  explicit Prepared(std::shared_ptr<const DagSpec> s) : spec(std::move(s)), topo(*spec) {}

  [[nodiscard]] std::vector<Index> entries(const NodeId& n) const {
    if (auto i = topo.index_of(n)) return {*i};
    if (auto i = topo.index_of(encoder_node_id(n))) return {*i};
    return {};
  }
  [[nodiscard]] std::vector<Index> exits(const NodeId& n) const {
    if (auto i = topo.index_of(n)) return {*i};
    std::vector<Index> out;
    for (std::size_t j = 0;; ++j) {
      auto i = topo.index_of(decoder_node_id(n, j));
      if (!i) break;
      out.push_back(*i);
    }
    return out;
  }
};

std::shared_ptr<const Prepared> prepare(const DagSpec& tmpl, Variant variant, const ContentionTable& table,
                                        const std::string& platform) {
  const bool refined = variant != Variant::EDF;
  auto spec = std::make_shared<const DagSpec>(refined ? refine_all(tmpl) : tmpl);
  auto p = std::make_shared<Prepared>(spec);
  p->dag_id = tmpl.id;
  const auto n = p->topo.size();
  p->wcet.resize(n);
  p->mem.resize(n);
  p->dnp.resize(n);
  p->delta.assign(n, Duration::zero());
  p->encoder.resize(n);
  p->shared_encoder.assign(n, false);
  p->est_key.resize(n);
  CostMap basis;
  for (Index i = 0; i < n; ++i) {
    const auto& id = p->topo.id(i);
    const auto& a = spec->nodes.at(id);
    p->wcet[i] = a.wcet;
    p->mem[i] = a.mem_mb;
    p->est_key[i] = node_key(tmpl.id, id);
    if (a.role == NodeRole::SharedEncoder) {
      p->encoder[i] = *a.encoder_ref;
      p->shared_encoder[i] = true;
    } else if (a.enc_cost) {
      // An unrefined MIMONet stage runs its encoder inline.
      p->encoder[i] = a.encoder_ref.value_or(id);
    }
    if (refined && a.kind == NodeKind::Atomic) {
      p->dnp[i] = atomic_deadline(p->est_key[i], a, table, platform);
      p->delta[i] = *p->dnp[i] - a.wcet;
    }
    basis.emplace(id, a.wcet + p->delta[i]);
  }
  p->rel_sub.assign(n, spec->deadline);
  if (refined) {
    auto as = proportional_assign(*spec, spec->deadline, basis, TimePoint::zero());
    for (Index i = 0; i < n; ++i) p->rel_sub[i] = as.node_subdeadlines.at(p->topo.id(i));
  }
  return p;
}

struct NodeState {
  HandlerState h;
  int pending = 0;
  bool queued = false;
  bool published = false;
  bool dropped = false;
  int attempt = 0;
  TimePoint ready_at{};
  TimePoint start{};
  TimePoint sub{};
  TimePoint key{};
  std::vector<std::pair<std::size_t, Index>> waiters;
};

struct Instance {
  std::string id;
  std::size_t tmpl = 0;
  std::shared_ptr<const Prepared> g;
  TimePoint arrival{};
  TimePoint deadline{};
  std::vector<NodeState> nodes;
  std::size_t terminal = 0;
  std::size_t running = 0;
  bool dropped = false;
  bool live = true;
  std::vector<Index> done_this_cycle;
};

struct RunningUnit {
  std::uint64_t serial = 0;
  std::string uid;
  std::vector<std::pair<std::size_t, Index>> members;
  TimePoint start{};
  TimePoint end{};
  double mem = 0.0;
  std::optional<std::pair<TimePoint, TimePoint>> io;
};

enum class Ev { Finish, SyncRelease, Reclaim, Mutation, Release, Barrier, Tick };

struct Event {
  TimePoint t{};
  Ev type = Ev::Tick;
  std::uint64_t seq = 0;
  std::size_t a = 0;
  std::size_t b = 0;

  bool operator>(const Event& o) const {
    if (t != o.t) return t > o.t;
    if (type != o.type) return static_cast<int>(type) > static_cast<int>(o.type);
    return seq > o.seq;
  }
};

class Engine {
 public:
  Engine(const Workload& w, const PlatformModel& p, Variant v, const SchedulerConfig& cfg, std::uint64_t seed)
      : w_(w), p_(p), v_(v), cfg_(cfg), seed_(seed), est_(cfg.k) {}

  SimResult run();

 private:
  bool refined() const { return v_ != Variant::EDF; }
  bool reassigns() const { return v_ == Variant::RED_IDA || v_ == Variant::RED; }
  bool on_demand() const { return v_ == Variant::RED; }

  void push(TimePoint t, Ev type, std::size_t a = 0, std::size_t b = 0) { events_.push({t, type, seq_++, a, b}); }
  void log(TimePoint t, TraceKind k, std::string dag, std::string node, std::string extra) {
    res_.trace.on_event({t, k, std::move(dag), std::move(node), std::move(extra)});
  }
  void advance(TimePoint now) {
    busy_integral_ += static_cast<double>(busy_slots_) * static_cast<double>((now - last_change_).count());
    last_change_ = now;
  }

  void release(TimePoint now, std::size_t tmpl, std::size_t k);
  void mutate(TimePoint now, std::size_t idx);
  void finish(TimePoint now, std::size_t slot, std::uint64_t serial);
  void publish(TimePoint now, std::size_t inst, Index i);
  void resolve(TimePoint now, std::size_t inst, Index i);
  void make_ready(TimePoint now, std::size_t inst, Index i);
  void mark_terminal(TimePoint now, std::size_t inst);
  void drop_instance(TimePoint now, std::size_t inst, const std::set<Index>& victims);
  void cycle(TimePoint now);
  void barriers(TimePoint now, std::size_t inst);
  void reassign(TimePoint now, std::size_t inst);
  void monitor(TimePoint now);
  void dispatch(TimePoint now);
  bool dispatch_unit(TimePoint now, std::vector<std::pair<std::size_t, Index>> members, std::size_t slot);
  TimePoint key_for(const Instance& in, Index i, TimePoint ready_at) const;
  void ensure_periodic(TimePoint now);

  const Workload& w_;
  const PlatformModel& p_;
  Variant v_;
  const SchedulerConfig& cfg_;
  std::uint64_t seed_;

  SimResult res_;
  CostEstimator est_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  std::uint64_t seq_ = 0;
  std::vector<DagSpec> current_;
  std::vector<std::shared_ptr<const Prepared>> prepared_;
  std::vector<std::optional<std::size_t>> last_instance_;
  std::deque<Instance> inst_;
  std::size_t live_ = 0;
  ReadyQueue queue_;
  std::unordered_map<std::string, std::pair<std::size_t, Index>> by_uid_;
  std::vector<std::optional<RunningUnit>> slots_;
  std::vector<double> speed_;
  std::size_t busy_slots_ = 0;
  double busy_integral_ = 0.0;
  double integral_at_tick_ = 0.0;
  TimePoint last_change_{};
  std::uint64_t unit_serial_ = 0;
  std::vector<std::pair<std::size_t, Index>> unpublished_;
  std::set<std::size_t> touched_;
  bool barrier_pending_ = false;
  bool tick_pending_ = false;
  bool tick_due_ = false;
  std::deque<HealthSample> history_;
  long tick_index_ = 0;
  std::size_t first_live_ = 0;
};

TimePoint Engine::key_for(const Instance& in, Index i, TimePoint ready_at) const {
  if (!refined()) return in.deadline;
  TimePoint k = in.nodes[i].sub;
  if (const auto& d = in.g->dnp[i]) k = std::min(k, ready_at + *d);
  return k;
}

void Engine::ensure_periodic(TimePoint now) {
  auto next_grid = [&](Duration period) {
    auto q = (now.count() + period.count() - 1) / period.count();
    return TimePoint{q * period.count()};
  };
  if (!on_demand() && !barrier_pending_) {
    barrier_pending_ = true;
    push(next_grid(p_.tick), Ev::Barrier);
  }
  if (v_ == Variant::RED && !tick_pending_) {
    tick_pending_ = true;
    auto t = next_grid(cfg_.burst.tick);
    if (t == now) t += cfg_.burst.tick;
    push(t, Ev::Tick);
  }
}

void Engine::make_ready(TimePoint now, std::size_t inst, Index i) {
  auto& in = inst_[inst];
  auto& ns = in.nodes[i];
  ns.ready_at = now;
  ns.key = key_for(in, i, now);
  ns.queued = true;
  auto uid = unit_id(in.id, in.g->topo.id(i));
  queue_.push(ns.key, uid);
  by_uid_[uid] = {inst, i};
}

void Engine::release(TimePoint now, std::size_t tmpl, std::size_t k) {
  const auto& g = prepared_[tmpl];
  Instance in;
  in.id = instance_id(g->dag_id, k);
  in.tmpl = tmpl;
  in.g = g;
  in.arrival = now;
  in.deadline = now + g->spec->deadline;
  const auto n = g->topo.size();
  in.nodes.resize(n);
  for (Index i = 0; i < n; ++i) {
    auto& ns = in.nodes[i];
    ns.h = HandlerState{g->topo.id(i), HandlerPhase::Ready, now};
    ns.pending = static_cast<int>(g->topo.preds(i).size());
    ns.sub = now + g->rel_sub[i];
  }
  const std::size_t idx = inst_.size();
  inst_.push_back(std::move(in));
  ++live_;
  res_.instances.push_back({inst_[idx].id, g->dag_id, now, inst_[idx].deadline, g->spec});

  // Cross-DAG waits on the latest instance of the producer DAG.
  for (const auto& c : w_.cross) {
    if (c.to_dag != g->dag_id) continue;
    std::size_t from_t = 0;
    while (prepared_[from_t]->dag_id != c.from_dag) ++from_t;
    if (!last_instance_[from_t]) continue;
    auto& from = inst_[*last_instance_[from_t]];
    auto entries = g->entries(c.to_node);
    for (Index e : from.g->exits(c.from_node)) {
      auto& fs = from.nodes[e];
      for (Index t : entries) {
        res_.cross_edges.emplace_back(unit_id(from.id, from.g->topo.id(e)), unit_id(inst_[idx].id, g->topo.id(t)));
        if (!fs.published && !fs.dropped && !from.dropped) {
          ++inst_[idx].nodes[t].pending;
          fs.waiters.emplace_back(idx, t);
        }
      }
    }
  }
  last_instance_[tmpl] = idx;

  log(now, TraceKind::Release, inst_[idx].id, {},
      "deadline=" + std::to_string(inst_[idx].deadline.count()) + ";nodes=" + std::to_string(n));
  for (Index i = 0; i < n; ++i) {
    if (inst_[idx].nodes[i].pending == 0) make_ready(now, idx, i);
  }
  ensure_periodic(now);
}

void Engine::mutate(TimePoint now, std::size_t idx) {
  const auto& m = w_.mutations[idx];
  std::size_t t = 0;
  while (current_[t].id != m.target_dag) ++t;
  try {
    DagSpec next = apply_mutation(current_[t], m);
    auto prepared = prepare(next, v_, w_.contention, p_.name);
    current_[t] = std::move(next);
    prepared_[t] = std::move(prepared);
    log(now, TraceKind::Mutation, m.target_dag, {}, "op=" + describe(m.op) + ";status=applied");
    if (refined()) log(now, TraceKind::Reassign, m.target_dag, {}, "reason=Mutation");
  } catch (const Error& e) {
    log(now, TraceKind::Mutation, m.target_dag, {},
        "op=" + describe(m.op) + ";status=skipped;reason=" + sanitize(e.what()));
  }
}

void Engine::resolve(TimePoint now, std::size_t inst, Index i) {
  auto waiters = std::move(inst_[inst].nodes[i].waiters);
  inst_[inst].nodes[i].waiters.clear();
  for (auto [wi, wn] : waiters) {
    auto& target = inst_[wi];
    if (--target.nodes[wn].pending == 0 && !target.dropped) make_ready(now, wi, wn);
  }
}

void Engine::publish(TimePoint now, std::size_t inst, Index i) {
  auto& in = inst_[inst];
  auto& ns = in.nodes[i];
  if (ns.published) return;
  ns.published = true;
  if (!in.dropped) {
    for (Index s : in.g->topo.succs(i)) {
      if (--in.nodes[s].pending == 0) make_ready(now, inst, s);
    }
  }
  resolve(now, inst, i);
}

void Engine::mark_terminal(TimePoint, std::size_t inst) {
  auto& in = inst_[inst];
  if (in.live && in.terminal == in.nodes.size() && in.running == 0) {
    in.live = false;
    --live_;
  }
}

void Engine::finish(TimePoint now, std::size_t slot, std::uint64_t serial) {
  if (!slots_[slot] || slots_[slot]->serial != serial) return;
  RunningUnit u = std::move(*slots_[slot]);
  slots_[slot].reset();
  --busy_slots_;
  for (auto [ii, i] : u.members) {
    auto& in = inst_[ii];
    auto& ns = in.nodes[i];
    if (u.io) {
      ns.h = fsm_step(ns.h, HandlerEvent::IoStart, u.io->first);
      ns.h = fsm_step(ns.h, HandlerEvent::IoEnd, u.io->second);
    }
    ns.h = fsm_step(ns.h, HandlerEvent::Finish, now);
    est_.observe(in.g->est_key[i], std::max(Duration{1}, u.end - u.start));
    log(now, TraceKind::Finish, in.id, in.g->topo.id(i), "unit=" + u.uid);
    --in.running;
    ++in.terminal;
    if (in.dropped) {
      ns.published = true;
      resolve(now, ii, i);
    } else {
      in.done_this_cycle.push_back(i);
      touched_.insert(ii);
      if (on_demand()) {
        if (cfg_.barrier_overhead == Duration::zero()) {
          publish(now, ii, i);
        } else {
          push(now + cfg_.barrier_overhead, Ev::SyncRelease, ii, i);
        }
      } else {
        unpublished_.emplace_back(ii, i);
      }
    }
    mark_terminal(now, ii);
  }
}

void Engine::drop_instance(TimePoint now, std::size_t inst, const std::set<Index>& victims) {
  auto& in = inst_[inst];
  if (in.dropped) return;
  in.dropped = true;
  for (Index i = 0; i < in.nodes.size(); ++i) {
    auto& ns = in.nodes[i];
    if (ns.h.state == HandlerPhase::Done || ns.h.state == HandlerPhase::Running ||
        ns.h.state == HandlerPhase::IOWait) {
      continue;
    }
    if (ns.queued) {
      queue_.erase({ns.key, unit_id(in.id, in.g->topo.id(i))});
      ns.queued = false;
    }
    ns.dropped = true;
    ++in.terminal;
    log(now, TraceKind::Drop, in.id, in.g->topo.id(i),
        std::string("reason=Burst;victim=") + (victims.count(i) ? "1" : "0"));
  }
  for (Index i = 0; i < in.nodes.size(); ++i) {
    if (in.nodes[i].h.state != HandlerPhase::Done) resolve(now, inst, i);
  }
  mark_terminal(now, inst);
}

void Engine::barriers(TimePoint now, std::size_t inst) {
  auto& in = inst_[inst];
  if (in.done_this_cycle.empty()) return;
  const auto& topo = in.g->topo;
  std::vector<char> fresh(topo.size(), 0);
  for (Index i : in.done_this_cycle) fresh[i] = 1;
  std::vector<HandlerView> views;
  views.reserve(topo.size());
  for (Index i = 0; i < topo.size(); ++i) {
    const auto& ns = in.nodes[i];
    HandlerView hv;
    hv.node = topo.id(i);
    hv.height = topo.heights()[i];
    hv.shared_encoder = in.g->shared_encoder[i];
    for (Index s : topo.succs(i)) {
      auto st = in.nodes[s].h.state;
      if (st == HandlerPhase::Ready && !in.nodes[s].dropped) hv.consumers_pending = true;
    }
    hv.after = ns.dropped ? HandlerPhase::Ready : ns.h.state;
    hv.before = fresh[i] ? HandlerPhase::Running : hv.after;
    views.push_back(std::move(hv));
  }
  for (const auto& b : emit_barriers(in.id, views, now)) {
    std::string extra = "kind=" + std::string(to_string(b.kind));
    if (b.kind == BarrierKind::LevelComplete) extra += ";level=" + std::to_string(b.level);
    log(now, TraceKind::Barrier, in.id, b.node, extra);
  }
}

void Engine::reassign(TimePoint now, std::size_t inst) {
  auto& in = inst_[inst];
  if (in.dropped || !in.live) return;
  const Duration elapsed = now - in.arrival;
  const Duration budget = in.g->spec->deadline;
  if (elapsed >= budget) return;
  const auto& topo = in.g->topo;
  std::set<NodeId> completed;
  RunningMap running;
  CostMap costs;
  for (Index i = 0; i < topo.size(); ++i) {
    const auto& ns = in.nodes[i];
    const auto& id = topo.id(i);
    if (ns.h.state == HandlerPhase::Done) completed.insert(id);
    if (ns.h.state == HandlerPhase::Running || ns.h.state == HandlerPhase::IOWait) running.emplace(id, now - ns.start);
    costs.emplace(id, est_.estimate(in.g->est_key[i], in.g->wcet[i]) + in.g->delta[i]);
  }
  if (completed.size() == topo.size()) return;
  DeadlineAssignment as;
  try {
    as = reassign_residual(*in.g->spec, completed, elapsed, budget, costs, running);
  } catch (const Error&) {
    return;
  }
  const Duration shift = in.arrival - in.g->spec->arrival;
  for (const auto& [id, d] : as.node_subdeadlines) {
    Index i = *topo.index_of(id);
    auto& ns = in.nodes[i];
    ns.sub = d + shift;
    if (ns.queued) {
      auto uid = unit_id(in.id, id);
      queue_.erase({ns.key, uid});
      ns.key = key_for(in, i, ns.ready_at);
      queue_.push(ns.key, uid);
    }
  }
}

void Engine::monitor(TimePoint now) {
  const double capacity = static_cast<double>(slots_.size()) * static_cast<double>(cfg_.burst.tick.count());
  HealthSample s;
  s.tick = tick_index_++;
  s.u_gpu = capacity > 0 ? std::min(1.0, (busy_integral_ - integral_at_tick_) / capacity) : 0.0;
  s.q_len = queue_.size();
  integral_at_tick_ = busy_integral_;
  history_.push_back(s);
  while (history_.size() > cfg_.burst.w) history_.pop_front();
  std::vector<HealthSample> h(history_.begin(), history_.end());
  if (!detect_overload(h, cfg_.burst)) return;

  // Not-yet-ready work of each live instance. It is charged to the
  // instance's first queued unit when it has one, so dropping the instance
  // removes it from the projection; otherwise it counts as committed work.
  while (first_live_ < inst_.size() && !inst_[first_live_].live) ++first_live_;
  std::map<std::size_t, Duration> pending_work;
  TimePoint latest = now;
  for (std::size_t ii = first_live_; ii < inst_.size(); ++ii) {
    const auto& in = inst_[ii];
    if (!in.live || in.dropped) continue;
    latest = std::max(latest, in.deadline);
    Duration work{};
    for (Index j = 0; j < in.nodes.size(); ++j) {
      const auto& o = in.nodes[j];
      if (o.queued || o.dropped || o.h.state != HandlerPhase::Ready) continue;
      work += est_.estimate(in.g->est_key[j], in.g->wcet[j]);
    }
    pending_work[ii] = work;
  }

  std::vector<DropCandidate> cands;
  for (const auto& key : queue_) {
    auto [ii, i] = by_uid_.at(key.id);
    const auto& in = inst_[ii];
    const auto& ns = in.nodes[i];
    Duration span = in.g->dnp[i] ? *in.g->dnp[i] : ns.sub - in.arrival;
    span = std::max(span, Duration{1});
    DropCandidate c;
    c.key = key;
    c.instance = in.id;
    c.slack = key.deadline - now;
    c.score = criticality_score(c.slack, span);
    c.estimate = est_.estimate(in.g->est_key[i], in.g->wcet[i]);
    if (auto it = pending_work.find(ii); it != pending_work.end()) {
      c.estimate += it->second;
      pending_work.erase(it);
    }
    if (c.score >= cfg_.high_criticality) res_.high_criticality.insert(in.id);
    cands.push_back(std::move(c));
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "u=%.3f;q=%zu", s.u_gpu, s.q_len);
  log(now, TraceKind::OverloadDetected, {}, {}, buf);
  if (!cfg_.burst.enabled || cands.empty()) return;

  Projection proj;
  for (const auto& slot : slots_) {
    if (slot) proj.running_work += slot->end - now;
  }
  for (const auto& [_, work] : pending_work) proj.running_work += work;
  proj.window = latest - now;
  proj.capacity = p_.rho;
  std::map<std::string, std::size_t> inst_of;
  for (const auto& c : cands) inst_of.emplace(c.instance, by_uid_.at(c.key.id).first);
  auto decision = proactive_drop(queue_, cands, cfg_.burst, proj);
  // proactive_drop already removed the queued units; mark them and cascade.
  std::map<std::size_t, std::set<Index>> victims;
  for (const auto& k : decision.victims) {
    auto [ii, i] = by_uid_.at(k.id);
    victims[ii].insert(i);
  }
  for (const auto& k : decision.removed) {
    auto [ii, i] = by_uid_.at(k.id);
    inst_[ii].nodes[i].queued = false;
  }
  for (const auto& name : decision.dropped_instances) {
    auto ii = inst_of.at(name);
    drop_instance(now, ii, victims[ii]);
  }
}

bool Engine::dispatch_unit(TimePoint now, std::vector<std::pair<std::size_t, Index>> members, std::size_t slot) {
  double other_mem = 0.0;
  for (const auto& s : slots_) {
    if (s) other_mem += s->mem;
  }
  const double slowdown =
      active_slowdown(w_.interference, now) * (1.0 + p_.contention_per_gb * other_mem / 1024.0);
  RunningUnit u;
  u.serial = ++unit_serial_;
  u.uid = "u" + std::to_string(u.serial);
  u.start = now;
  Duration dur{};
  bool oom = false;
  bool io = false;
  std::string encoder;
  for (auto [ii, i] : members) {
    auto& in = inst_[ii];
    auto& ns = in.nodes[i];
    queue_.erase({ns.key, unit_id(in.id, in.g->topo.id(i))});
    ns.queued = false;
    ++ns.attempt;
    Rng rng(seed_, in.id, in.g->topo.id(i), static_cast<std::uint64_t>(ns.attempt));
    dur = std::max(dur, sample_exec(in.g->wcet[i], w_.exec, slowdown, rng));
    const double r_oom = rng.uniform01();
    const double r_io = rng.uniform01();
    if (ii == members.front().first && i == members.front().second) {
      oom = r_oom < w_.exec.oom_probability;
      io = r_io < w_.exec.io_probability;
    }
    u.mem = std::max(u.mem, in.g->mem[i]);
    if (encoder.empty()) encoder = in.g->encoder[i];
  }
  if (slot >= p_.full_slots()) {
    dur = Duration{static_cast<std::int64_t>(std::ceil(static_cast<double>(dur.count()) / speed_[slot]))};
  }
  for (auto [ii, i] : members) {
    auto& in = inst_[ii];
    auto& ns = in.nodes[i];
    ns.h = fsm_step(ns.h, HandlerEvent::Dispatch, now);
    ns.start = now;
    std::string extra = "unit=" + u.uid + ";slot=" + std::to_string(slot) + ";deadline=" +
                        std::to_string(ns.key.count()) + ";dur=" + std::to_string(dur.count());
    if (!encoder.empty()) extra += ";enc=" + encoder;
    if (members.size() > 1) extra += ";members=" + std::to_string(members.size());
    log(now, TraceKind::Dispatch, in.id, in.g->topo.id(i), extra);
  }
  if (oom) {
    for (auto [ii, i] : members) {
      auto& in = inst_[ii];
      auto& ns = in.nodes[i];
      ns.h = fsm_step(ns.h, HandlerEvent::MemFail, now);
      log(now, TraceKind::Requeue, in.id, in.g->topo.id(i), "unit=" + u.uid + ";reason=OOM");
      push(now + w_.exec.oom_dwell, Ev::Reclaim, ii, i);
    }
    return false;
  }
  if (io) {
    const TimePoint mid = now + dur / 2;
    u.io = std::make_pair(mid, mid + w_.exec.io_dwell);
    dur += w_.exec.io_dwell;
  }
  u.end = now + dur;
  u.members = std::move(members);
  for (auto [ii, i] : u.members) ++inst_[ii].running;
  push(u.end, Ev::Finish, slot, u.serial);
  slots_[slot] = std::move(u);
  ++busy_slots_;
  return true;
}

void Engine::dispatch(TimePoint now) {
  std::vector<std::size_t> free;
  for (std::size_t s = 0; s < slots_.size(); ++s) {
    if (!slots_[s]) free.push_back(s);
  }
  std::size_t next_free = 0;
  while (next_free < free.size() && !queue_.empty()) {
    std::vector<std::vector<std::pair<std::size_t, Index>>> units;
    const std::size_t want = free.size() - next_free;
    if (v_ == Variant::RED && cfg_.merge_enabled) {
      std::vector<FrontierItem> items;
      items.reserve(queue_.size());
      for (const auto& key : queue_) {
        auto [ii, i] = by_uid_.at(key.id);
        const auto& in = inst_[ii];
        FrontierItem it;
        it.id = key.id;
        it.encoder = in.g->shared_encoder[i] ? in.g->encoder[i] : std::string{};
        it.height = in.g->topo.heights()[i];
        it.predicted_release = in.nodes[i].ready_at;
        it.subdeadline = key.deadline;
        items.push_back(std::move(it));
      }
      for (auto& mu : dynamic_merge(std::move(items), cfg_.gamma)) {
        if (units.size() >= want) break;
        std::vector<std::pair<std::size_t, Index>> members;
        for (const auto& m : mu.members) members.push_back(by_uid_.at(m));
        units.push_back(std::move(members));
      }
    } else {
      for (const auto& key : edf_select(queue_, want)) units.push_back({by_uid_.at(key.id)});
    }
    for (auto& members : units) {
      if (dispatch_unit(now, std::move(members), free[next_free])) ++next_free;
    }
  }
}

void Engine::cycle(TimePoint now) {
  for (auto ii : touched_) {
    if (on_demand()) barriers(now, ii);
    if (reassigns()) reassign(now, ii);
    inst_[ii].done_this_cycle.clear();
  }
  touched_.clear();
  if (tick_due_) {
    tick_due_ = false;
    monitor(now);
  }
  dispatch(now);
}

SimResult Engine::run() {
  validate(w_);
  validate(p_);
  validate(cfg_);
  if (refined()) {
    for (const auto& t : w_.dags) {
      for (const auto& [id, a] : t.dag.nodes) {
        if (a.kind == NodeKind::Atomic && !w_.contention.count({node_key(t.dag.id, id), p_.name})) {
          throw Error(ErrorCode::InvalidWorkload,
                      "atomic node " + node_key(t.dag.id, id) + " has no contention profile for " + p_.name);
        }
      }
    }
  }
  if (w_.dags.empty()) return std::move(res_);

  Duration horizon{};
  for (std::size_t t = 0; t < w_.dags.size(); ++t) {
    current_.push_back(w_.dags[t].dag);
    prepared_.push_back(prepare(w_.dags[t].dag, v_, w_.contention, p_.name));
    auto rel = w_.dags[t].releases();
    for (std::size_t k = 0; k < rel.size(); ++k) push(rel[k], Ev::Release, t, k);
    horizon = std::max(horizon, rel.back() + 10 * w_.dags[t].dag.deadline);
  }
  if (cfg_.horizon) horizon = *cfg_.horizon;
  last_instance_.assign(w_.dags.size(), std::nullopt);
  for (std::size_t i = 0; i < w_.mutations.size(); ++i) push(w_.mutations[i].at, Ev::Mutation, i);

  slots_.assign(p_.slot_count(), std::nullopt);
  speed_.assign(p_.slot_count(), 1.0);
  if (p_.slot_count() > p_.full_slots()) speed_.back() = p_.fractional_speed();

  while (!events_.empty()) {
    const TimePoint now = events_.top().t;
    if (now > horizon) break;
    advance(now);
    while (!events_.empty() && events_.top().t == now) {
      Event e = events_.top();
      events_.pop();
      switch (e.type) {
        case Ev::Finish: finish(now, e.a, e.b); break;
        case Ev::SyncRelease: publish(now, e.a, static_cast<Index>(e.b)); break;
        case Ev::Reclaim: {
          auto& in = inst_[e.a];
          auto& ns = in.nodes[e.b];
          ns.h = fsm_step(ns.h, HandlerEvent::MemReclaim, now);
          if (!in.dropped) make_ready(now, e.a, static_cast<Index>(e.b));
          break;
        }
        case Ev::Mutation: mutate(now, e.a); break;
        case Ev::Release: release(now, e.a, e.b); break;
        case Ev::Barrier: {
          log(now, TraceKind::Barrier, {}, {}, "kind=Periodic");
          auto pending = std::move(unpublished_);
          unpublished_.clear();
          for (auto [ii, i] : pending) publish(now, ii, i);
          barrier_pending_ = false;
          if (live_ > 0) {
            barrier_pending_ = true;
            push(now + p_.tick, Ev::Barrier);
          }
          break;
        }
        case Ev::Tick:
          tick_pending_ = false;
          tick_due_ = true;
          if (live_ > 0) {
            tick_pending_ = true;
            push(now + cfg_.burst.tick, Ev::Tick);
          }
          break;
      }
    }
    cycle(now);
  }

  if (live_ > 0) {
    std::size_t stuck = 0;
    std::string first;
    for (const auto& in : inst_) {
      if (in.live) {
        if (first.empty()) first = in.id;
        ++stuck;
      }
    }
    throw Error(ErrorCode::HorizonExceeded, std::to_string(stuck) + " instance(s) unfinished at horizon " +
                                                std::to_string(horizon.count()) + " ns (first: " + first + ")");
  }
  return std::move(res_);
}

}  // namespace

SimResult run(const Workload& workload, Variant variant, std::uint64_t seed) {
  return run(workload, workload.platform, variant, workload.scheduler, seed);
}

SimResult run(const Workload& workload, const PlatformModel& platform, Variant variant,
              const SchedulerConfig& cfg, std::uint64_t seed) {
  Engine engine(workload, platform, variant, cfg, seed);
  return engine.run();
}

}  // namespace red
