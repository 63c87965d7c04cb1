#pragma once

#include <string>
#include <vector>

#include "scb/program.hpp"

namespace scb {

enum class Severity { Error, Warning };

struct Diagnostic {
    std::string rule;     // "L0", "L1", "L2"
    BlockPath path;
    std::string message;
    Severity severity = Severity::Warning;

    std::string line() const;  // "<severity> <rule> <path> <message>"
    bool operator==(const Diagnostic&) const = default;
};

// Static checks over a parsed (L0-clean) program:
//   L1 (error):   project accessors outside a shared/favorited loop, and the
//                 user accessor outside a followers/following loop.
//   L2 (warning): comm_total anywhere inside a loop body; the value is
//                 fetched once per run, so looping over it never updates.
// Diagnostics come back in document order.
std::vector<Diagnostic> lint(const Program& program);

}  // namespace scb
