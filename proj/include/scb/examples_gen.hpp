#pragma once

#include <string>
#include <utility>
#include <vector>

#include "scb/program.hpp"

namespace scb {

// The shipped example programs, keyed by file stem (e.g. "project_titles"). Built
// programmatically so the CLI installer and the tests always agree.
const std::vector<std::pair<std::string, Program>>& example_programs();

// Intentionally-broken lint demonstration programs (not emitted by the
// examples installer; shipped under fixtures/).
const std::vector<std::pair<std::string, Program>>& lint_fixture_programs();

// Lookup across both sets; throws NotFoundError for unknown names.
const Program& example_program(const std::string& name);

}  // namespace scb
