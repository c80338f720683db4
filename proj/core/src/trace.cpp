#include "red/trace.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace red {

namespace {

constexpr std::string_view kKinds[] = {"Release", "Dispatch",         "Finish",   "Barrier", "Drop",
                                       "Mutation", "OverloadDetected", "Reassign", "Requeue"};

}  // namespace

std::string_view to_string(TraceKind kind) { return kKinds[static_cast<int>(kind)]; }

TraceKind parse_trace_kind(std::string_view s) {
  for (std::size_t i = 0; i < std::size(kKinds); ++i) {
    if (kKinds[i] == s) return static_cast<TraceKind>(i);
  }
  throw Error(ErrorCode::ParseError, "unknown trace kind '" + std::string(s) + "'");
}

std::string format_event(const TraceEvent& e) {
  auto field = [](const std::string& s) -> const std::string& {
    static const std::string dash = "-";
    return s.empty() ? dash : s;
  };
  std::string out = std::to_string(e.time.count());
  out += '\t';
  out += to_string(e.kind);
  out += '\t';
  out += field(e.dag);
  out += '\t';
  out += field(e.node);
  out += '\t';
  out += field(e.extra);
  return out;
}

void write_trace(std::ostream& out, const SimTrace& trace) {
  for (const auto& e : trace.events) out << format_event(e) << '\n';
}

SimTrace read_trace(std::istream& in) {
  SimTrace trace;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ss(line);
    std::string part;
    while (std::getline(ss, part, '\t')) f.push_back(part);
    if (f.size() != 5) throw Error(ErrorCode::ParseError, "trace line " + std::to_string(lineno) + ": expected 5 fields");
    auto undash = [](std::string s) { return s == "-" ? std::string{} : s; };
    TraceEvent e;
    try {
      e.time = TimePoint{std::stoll(f[0])};
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "trace line " + std::to_string(lineno) + ": bad time");
    }
    e.kind = parse_trace_kind(f[1]);
    e.dag = undash(f[2]);
    e.node = undash(f[3]);
    e.extra = undash(f[4]);
    trace.events.push_back(std::move(e));
  }
  return trace;
}

std::optional<std::string> extra_field(std::string_view extra, std::string_view key) {
  std::size_t pos = 0;
  while (pos <= extra.size()) {
    std::size_t end = extra.find(';', pos);
    if (end == std::string_view::npos) end = extra.size();
    auto item = extra.substr(pos, end - pos);
    auto eq = item.find('=');
    if (eq != std::string_view::npos && item.substr(0, eq) == key) return std::string(item.substr(eq + 1));
    pos = end + 1;
  }
  return std::nullopt;
}

std::map<std::string, std::string> parse_extra(std::string_view extra) {
  std::map<std::string, std::string> out;
  std::size_t pos = 0;
  while (pos < extra.size()) {
    std::size_t end = extra.find(';', pos);
    if (end == std::string_view::npos) end = extra.size();
    auto item = extra.substr(pos, end - pos);
    auto eq = item.find('=');
    if (eq != std::string_view::npos) out.emplace(item.substr(0, eq), item.substr(eq + 1));
    pos = end + 1;
  }
  return out;
}

std::string_view template_of(std::string_view instance) { return instance.substr(0, instance.find('#')); }

}  // namespace red
