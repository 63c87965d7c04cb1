#pragma once

#include <deque>
#include <string>
#include <vector>

#include "scb/fetch.hpp"
#include "scb/program.hpp"
#include "scb/value.hpp"

namespace scb {

// One scheduled hat firing. Empty key means the green flag.
struct EventInjection {
    long long tick = 0;
    std::string key;
};

struct RunOptions {
    std::string viewer;
    std::vector<EventInjection> events = {{0, ""}};  // flag at tick 0 by default
    std::deque<std::string> answers;
    long long max_ticks = 10000;
};

enum class EventKind { Say, Think, Ask, Diag };
const char* event_kind_name(EventKind kind);

struct TranscriptEvent {
    long long tick = 0;
    std::string sprite;
    EventKind kind = EventKind::Say;
    std::string payload;  // unescaped
    bool operator==(const TranscriptEvent&) const = default;
};

struct VarDump {
    std::string sprite;
    std::string name;
    Value value;
    bool operator==(const VarDump&) const = default;
};

// Headless run output: SAY/THINK/ASK/DIAG events in tick order, then the
// end-of-run variable monitor dump, then the termination line.
struct Transcript {
    std::vector<TranscriptEvent> events;
    std::vector<VarDump> vars;
    long long end_tick = 0;
    bool max_ticks_hit = false;

    std::string to_text() const;
};

// Executes the program as options.viewer against the session's service.
// Deterministic: identical (program, options, store snapshot, session cache)
// produce identical transcript bytes. Throws NotFoundError for an unknown
// viewer and TransportError when the service is unreachable.
Transcript run_program(const Program& program, const RunOptions& options, Session& session);

}  // namespace scb
