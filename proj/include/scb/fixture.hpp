#pragma once

#include "scb/model.hpp"

namespace scb {

// Canonical three-user store used throughout the docs and tests: alice, bob
// and carol, three projects, a handful of follow/favorite edges. Small
// enough to audit every expected value by hand.
CommunityStore make_s0();

}  // namespace scb
