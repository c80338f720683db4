#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "red/common.hpp"

namespace red {

enum class TraceKind { Release, Dispatch, Finish, Barrier, Drop, Mutation, OverloadDetected, Reassign, Requeue };

std::string_view to_string(TraceKind kind);
TraceKind parse_trace_kind(std::string_view s);

/// One trace line. dag holds the instance id ("<dag>#<k>") for per-instance
/// events and the template id otherwise; extra is a ';'-separated list of
/// key=value pairs.
struct TraceEvent {
  TimePoint time{};
  TraceKind kind = TraceKind::Release;
  std::string dag;
  std::string node;
  std::string extra;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void on_event(TraceEvent event) = 0;
};

struct SimTrace final : TraceSink {
  std::vector<TraceEvent> events;

  void on_event(TraceEvent event) override { events.push_back(std::move(event)); }
  friend bool operator==(const SimTrace& a, const SimTrace& b) { return a.events == b.events; }
};

/// time_ns \t kind \t dag \t node \t extra, with "-" for empty fields.
std::string format_event(const TraceEvent& e);
void write_trace(std::ostream& out, const SimTrace& trace);
SimTrace read_trace(std::istream& in);

std::optional<std::string> extra_field(std::string_view extra, std::string_view key);
std::map<std::string, std::string> parse_extra(std::string_view extra);

/// "<dag>#<k>" -> "<dag>".
std::string_view template_of(std::string_view instance);

}  // namespace red
