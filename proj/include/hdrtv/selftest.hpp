#pragma once

#include <iosfwd>

namespace hdrtv {

// Runs the built-in oracle-equivalence and invariant checks, printing one
// line per check. Returns the number of failures (0 = all passed).
int run_selftest(std::ostream& out);

} // namespace hdrtv
