#include "red/workload_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace red {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void parse_fail(const std::string& where, const std::string& why) {
  throw Error(ErrorCode::ParseError, where + ": " + why);
}

[[noreturn]] void invalid(const std::string& where, const std::string& why) {
  throw Error(ErrorCode::ValidationError, where + ": " + why);
}

// Reader over one JSON object that tracks its location and rejects keys it
// was never asked about.
class Obj {
 public:
  Obj(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) parse_fail(where_, "expected an object");
  }

  [[nodiscard]] const std::string& where() const { return where_; }
  [[nodiscard]] std::string at(const std::string& key) const { return where_ + "." + key; }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  const json& get(const std::string& key) {
    if (!has(key)) parse_fail(at(key), "missing required field");
    return j_.at(key);
  }

  std::string str(const std::string& key) {
    const auto& v = get(key);
    if (!v.is_string()) parse_fail(at(key), "expected a string");
    return v.get<std::string>();
  }
  std::string str(const std::string& key, const std::string& dflt) { return has(key) ? str(key) : dflt; }

  double num(const std::string& key) {
    const auto& v = get(key);
    if (!v.is_number()) parse_fail(at(key), "expected a number");
    return v.get<double>();
  }
  double num(const std::string& key, double dflt) { return has(key) ? num(key) : dflt; }

  std::int64_t integer(const std::string& key) {
    const auto& v = get(key);
    if (!v.is_number_integer()) parse_fail(at(key), "expected an integer");
    return v.get<std::int64_t>();
  }
  std::int64_t integer(const std::string& key, std::int64_t dflt) { return has(key) ? integer(key) : dflt; }

  std::size_t count(const std::string& key, std::size_t dflt) {
    if (!has(key)) return dflt;
    auto v = integer(key);
    if (v < 0) invalid(at(key), "must be >= 0");
    return static_cast<std::size_t>(v);
  }

  bool boolean(const std::string& key, bool dflt) {
    if (!has(key)) return dflt;
    const auto& v = get(key);
    if (!v.is_boolean()) parse_fail(at(key), "expected true or false");
    return v.get<bool>();
  }

  Duration ms(const std::string& key) { return from_ms(num(key)); }
  Duration ms(const std::string& key, Duration dflt) { return has(key) ? ms(key) : dflt; }

  const json& array(const std::string& key) {
    const auto& v = get(key);
    if (!v.is_array()) parse_fail(at(key), "expected an array");
    return v;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) invalid(at(it.key()), "unknown field");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

std::string idx(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

std::string elem_str(const json& v, const std::string& where) {
  if (!v.is_string()) parse_fail(where, "expected a string");
  return v.get<std::string>();
}

std::vector<std::string> str_list(Obj& o, const std::string& key) {
  std::vector<std::string> out;
  if (!o.has(key)) return out;
  const auto& a = o.array(key);
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(elem_str(a[i], idx(o.at(key), i)));
  return out;
}

NodeKind parse_kind(const std::string& s, const std::string& where) {
  if (s == "partitionable") return NodeKind::Partitionable;
  if (s == "atomic") return NodeKind::Atomic;
  invalid(where, "unknown kind '" + s + "'");
}

NodeRole parse_role(const std::string& s, const std::string& where) {
  if (s == "ordinary") return NodeRole::Ordinary;
  if (s == "shared_encoder") return NodeRole::SharedEncoder;
  if (s == "decoder") return NodeRole::Decoder;
  invalid(where, "unknown role '" + s + "'");
}

std::string kind_name(NodeKind k) { return k == NodeKind::Atomic ? "atomic" : "partitionable"; }

std::string role_name(NodeRole r) {
  switch (r) {
    case NodeRole::SharedEncoder: return "shared_encoder";
    case NodeRole::Decoder: return "decoder";
    case NodeRole::Ordinary: return "ordinary";
  }
  return "ordinary";
}

NodeAttrs read_attrs(Obj& o) {
  NodeAttrs a;
  a.wcet = o.ms("wcet_ms");
  a.mem_mb = o.num("mem_mb", 0.0);
  a.kind = parse_kind(o.str("kind", "partitionable"), o.at("kind"));
  a.role = parse_role(o.str("role", "ordinary"), o.at("role"));
  a.next_release = o.ms("next_release_ms", Duration::zero());
  if (o.has("encoder_ref")) a.encoder_ref = o.str("encoder_ref");
  if (o.has("enc_cost_ms")) a.enc_cost = o.ms("enc_cost_ms");
  if (o.has("dec_costs_ms")) {
    const auto& d = o.array("dec_costs_ms");
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (!d[i].is_number()) parse_fail(idx(o.at("dec_costs_ms"), i), "expected a number");
      a.dec_costs.push_back(from_ms(d[i].get<double>()));
    }
  }
  return a;
}

DagTemplate read_dag(const json& j, const std::string& where) {
  Obj o(j, where);
  DagTemplate t;
  t.dag.id = o.str("id");
  t.dag.deadline = o.ms("deadline_ms");
  t.dag.arrival = o.ms("arrival_ms", Duration::zero());
  if (o.has("period_ms")) t.period = o.ms("period_ms");
  t.count = o.count("count", 1);
  if (o.has("arrivals_ms")) {
    const auto& a = o.array("arrivals_ms");
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!a[i].is_number()) parse_fail(idx(o.at("arrivals_ms"), i), "expected a number");
      t.arrivals.push_back(from_ms(a[i].get<double>()));
    }
  }
  const auto& nodes = o.array("nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    Obj n(nodes[i], idx(o.at("nodes"), i));
    NodeId id = n.str("id");
    NodeAttrs attrs = read_attrs(n);
    n.finish();
    if (!t.dag.nodes.emplace(id, std::move(attrs)).second) invalid(n.where(), "duplicate node id " + id);
  }
  if (o.has("edges")) {
    const auto& edges = o.array("edges");
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const auto w = idx(o.at("edges"), i);
      if (!edges[i].is_array() || edges[i].size() != 2) parse_fail(w, "expected [from, to]");
      t.dag.edges.insert({elem_str(edges[i][0], w + "[0]"), elem_str(edges[i][1], w + "[1]")});
    }
  }
  o.finish();
  try {
    validate(t.dag);
  } catch (const Error& e) {
    invalid(where + " (" + t.dag.id + ")", e.what());
  }
  return t;
}

Mutation read_mutation(const json& j, const std::string& where) {
  Obj o(j, where);
  Mutation m;
  m.at = o.ms("at_ms");
  m.target_dag = o.str("dag");
  const std::string op = o.str("op");
  if (op == "add_node") {
    AddNode a;
    a.node = o.str("node");
    Obj attrs(o.get("attrs"), o.at("attrs"));
    a.attrs = read_attrs(attrs);
    attrs.finish();
    a.preds = str_list(o, "preds");
    a.succs = str_list(o, "succs");
    m.op = std::move(a);
  } else if (op == "remove_node") {
    m.op = RemoveNode{o.str("node")};
  } else if (op == "add_edge") {
    m.op = AddEdge{o.str("from"), o.str("to")};
  } else if (op == "remove_edge") {
    m.op = RemoveEdge{o.str("from"), o.str("to")};
  } else {
    invalid(o.at("op"), "unknown op '" + op + "'");
  }
  o.finish();
  return m;
}

Workload from_json(const json& root) {
  Obj o(root, "$");
  Workload w;
  w.version = static_cast<int>(o.integer("version"));
  if (w.version != 1) invalid(o.at("version"), "unsupported version " + std::to_string(w.version));

  if (o.has("platform")) {
    Obj p(o.get("platform"), o.at("platform"));
    w.platform.name = p.str("name", w.platform.name);
    w.platform.rho = p.num("rho", w.platform.rho);
    w.platform.tick = p.ms("tick_ms", w.platform.tick);
    w.platform.mem_capacity_mb = p.num("mem_capacity_mb", w.platform.mem_capacity_mb);
    w.platform.contention_per_gb = p.num("contention_per_gb", w.platform.contention_per_gb);
    p.finish();
  }
  if (o.has("exec")) {
    Obj e(o.get("exec"), o.at("exec"));
    const auto dist = e.str("distribution", "deterministic");
    if (dist == "deterministic") {
      w.exec.distribution = ExecDistribution::Deterministic;
    } else if (dist == "uniform") {
      w.exec.distribution = ExecDistribution::Uniform;
    } else {
      invalid(e.at("distribution"), "unknown distribution '" + dist + "'");
    }
    w.exec.alpha = e.num("alpha", w.exec.alpha);
    w.exec.io_probability = e.num("io_probability", w.exec.io_probability);
    w.exec.io_dwell = e.ms("io_dwell_ms", w.exec.io_dwell);
    w.exec.oom_probability = e.num("oom_probability", w.exec.oom_probability);
    w.exec.oom_dwell = e.ms("oom_dwell_ms", w.exec.oom_dwell);
    e.finish();
  }
  if (o.has("scheduler")) {
    Obj s(o.get("scheduler"), o.at("scheduler"));
    auto& c = w.scheduler;
    c.gamma = s.ms("gamma_ms", c.gamma);
    c.k = s.count("k", c.k);
    c.barrier_overhead = s.ms("barrier_overhead_ms", c.barrier_overhead);
    c.merge_enabled = s.boolean("merge_enabled", c.merge_enabled);
    c.high_criticality = s.num("high_criticality", c.high_criticality);
    if (s.has("horizon_ms")) c.horizon = s.ms("horizon_ms");
    if (s.has("burst")) {
      Obj b(s.get("burst"), s.at("burst"));
      c.burst.theta_u = b.num("theta_u", c.burst.theta_u);
      c.burst.q_max = b.count("q_max", c.burst.q_max);
      c.burst.w = b.count("w", c.burst.w);
      c.burst.tick = b.ms("tick_ms", c.burst.tick);
      c.burst.enabled = b.boolean("enabled", c.burst.enabled);
      b.finish();
    }
    s.finish();
  }
  const auto& dags = o.array("dags");
  for (std::size_t i = 0; i < dags.size(); ++i) w.dags.push_back(read_dag(dags[i], idx(o.at("dags"), i)));
  if (o.has("mutations")) {
    const auto& a = o.array("mutations");
    for (std::size_t i = 0; i < a.size(); ++i) w.mutations.push_back(read_mutation(a[i], idx(o.at("mutations"), i)));
  }
  if (o.has("interference")) {
    const auto& a = o.array("interference");
    for (std::size_t i = 0; i < a.size(); ++i) {
      Obj x(a[i], idx(o.at("interference"), i));
      InterferenceWindow win;
      win.start = x.ms("start_ms");
      win.end = x.ms("end_ms");
      win.slowdown = x.num("slowdown");
      x.finish();
      w.interference.push_back(win);
    }
  }
  if (o.has("contention")) {
    const auto& a = o.array("contention");
    for (std::size_t i = 0; i < a.size(); ++i) {
      Obj x(a[i], idx(o.at("contention"), i));
      auto key = std::make_pair(x.str("node"), x.str("platform", w.platform.name));
      auto delay = x.ms("delay_ms");
      x.finish();
      if (!w.contention.emplace(key, delay).second) invalid(x.where(), "duplicate entry for " + key.first);
    }
  }
  if (o.has("cross")) {
    const auto& a = o.array("cross");
    for (std::size_t i = 0; i < a.size(); ++i) {
      Obj x(a[i], idx(o.at("cross"), i));
      CrossDependency c{x.str("from_dag"), x.str("from_node"), x.str("to_dag"), x.str("to_node")};
      x.finish();
      w.cross.push_back(std::move(c));
    }
  }
  o.finish();

  try {
    validate(w);
  } catch (const Error& e) {
    throw Error(ErrorCode::ValidationError, e.what());
  }
  return w;
}

json ms_value(Duration d) {
  if (d.count() % 1'000'000 == 0) return d.count() / 1'000'000;
  return to_ms(d);
}

json attrs_json(const NodeAttrs& a) {
  json j = json::object();
  j["wcet_ms"] = ms_value(a.wcet);
  j["mem_mb"] = a.mem_mb;
  j["kind"] = kind_name(a.kind);
  j["role"] = role_name(a.role);
  if (a.next_release != Duration::zero()) j["next_release_ms"] = ms_value(a.next_release);
  if (a.encoder_ref) j["encoder_ref"] = *a.encoder_ref;
  if (a.enc_cost) j["enc_cost_ms"] = ms_value(*a.enc_cost);
  if (!a.dec_costs.empty()) {
    json d = json::array();
    for (auto c : a.dec_costs) d.push_back(ms_value(c));
    j["dec_costs_ms"] = d;
  }
  return j;
}

json to_json(const Workload& w) {
  json root = json::object();
  root["version"] = w.version;
  root["platform"] = {{"name", w.platform.name},
                      {"rho", w.platform.rho},
                      {"tick_ms", ms_value(w.platform.tick)},
                      {"mem_capacity_mb", w.platform.mem_capacity_mb},
                      {"contention_per_gb", w.platform.contention_per_gb}};
  root["exec"] = {{"distribution", w.exec.distribution == ExecDistribution::Uniform ? "uniform" : "deterministic"},
                  {"alpha", w.exec.alpha},
                  {"io_probability", w.exec.io_probability},
                  {"io_dwell_ms", ms_value(w.exec.io_dwell)},
                  {"oom_probability", w.exec.oom_probability},
                  {"oom_dwell_ms", ms_value(w.exec.oom_dwell)}};
  const auto& c = w.scheduler;
  json sched = {{"gamma_ms", ms_value(c.gamma)},
                {"k", c.k},
                {"barrier_overhead_ms", ms_value(c.barrier_overhead)},
                {"merge_enabled", c.merge_enabled},
                {"high_criticality", c.high_criticality}};
  if (c.horizon) sched["horizon_ms"] = ms_value(*c.horizon);
  sched["burst"] = {{"theta_u", c.burst.theta_u},
                    {"q_max", c.burst.q_max},
                    {"w", c.burst.w},
                    {"tick_ms", ms_value(c.burst.tick)},
                    {"enabled", c.burst.enabled}};
  root["scheduler"] = sched;

  json dags = json::array();
  for (const auto& t : w.dags) {
    json d = json::object();
    d["id"] = t.dag.id;
    d["deadline_ms"] = ms_value(t.dag.deadline);
    d["arrival_ms"] = ms_value(t.dag.arrival);
    if (t.period) d["period_ms"] = ms_value(*t.period);
    d["count"] = t.count;
    if (!t.arrivals.empty()) {
      json a = json::array();
      for (auto x : t.arrivals) a.push_back(ms_value(x));
      d["arrivals_ms"] = a;
    }
    json nodes = json::array();
    for (const auto& [id, attrs] : t.dag.nodes) {
      json n = {{"id", id}};
      n.update(attrs_json(attrs));
      nodes.push_back(n);
    }
    d["nodes"] = nodes;
    json edges = json::array();
    for (const auto& e : t.dag.edges) edges.push_back({e.from, e.to});
    d["edges"] = edges;
    dags.push_back(d);
  }
  root["dags"] = dags;

  json muts = json::array();
  for (const auto& m : w.mutations) {
    json j = {{"at_ms", ms_value(m.at)}, {"dag", m.target_dag}};
    std::visit(
        [&](const auto& op) {
          using T = std::decay_t<decltype(op)>;
          if constexpr (std::is_same_v<T, AddNode>) {
            j["op"] = "add_node";
            j["node"] = op.node;
            j["attrs"] = attrs_json(op.attrs);
            j["preds"] = op.preds;
            j["succs"] = op.succs;
          } else if constexpr (std::is_same_v<T, RemoveNode>) {
            j["op"] = "remove_node";
            j["node"] = op.node;
          } else if constexpr (std::is_same_v<T, AddEdge>) {
            j["op"] = "add_edge";
            j["from"] = op.from;
            j["to"] = op.to;
          } else {
            j["op"] = "remove_edge";
            j["from"] = op.from;
            j["to"] = op.to;
          }
        },
        m.op);
    muts.push_back(j);
  }
  root["mutations"] = muts;

  json inter = json::array();
  for (const auto& x : w.interference) {
    inter.push_back({{"start_ms", ms_value(x.start)}, {"end_ms", ms_value(x.end)}, {"slowdown", x.slowdown}});
  }
  root["interference"] = inter;

  json cont = json::array();
  for (const auto& [key, delay] : w.contention) {
    cont.push_back({{"node", key.first}, {"platform", key.second}, {"delay_ms", ms_value(delay)}});
  }
  root["contention"] = cont;

  json cross = json::array();
  for (const auto& x : w.cross) {
    cross.push_back({{"from_dag", x.from_dag}, {"from_node", x.from_node}, {"to_dag", x.to_dag}, {"to_node", x.to_node}});
  }
  root["cross"] = cross;
  return root;
}

}  // namespace

Workload parse_workload_text(std::string_view text, std::string_view origin) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string(origin) + ": byte " + std::to_string(e.byte) + ": " + e.what());
  }
  try {
    return from_json(root);
  } catch (const Error& e) {
    throw Error(e.code(), std::string(origin) + ": " + e.what());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string(origin) + ": " + e.what());
  }
}

Workload parse_workload(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_workload_text(ss.str(), path.string());
}

std::string serialize_workload(const Workload& w) { return to_json(w).dump(2) + "\n"; }

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot rename to " + path.string());
  }
}

void write_workload(const std::filesystem::path& path, const Workload& w) {
  write_file_atomic(path, serialize_workload(w));
}

}  // namespace red
