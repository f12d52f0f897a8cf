// Closed-form oracle suite: quick checks of the exactly-known quantities,
// printed one PASS/FAIL line per check.
#pragma once

#include <iosfwd>

namespace bqp {

// Returns true when every check passes.
bool run_selftest(std::ostream& out);

}  // namespace bqp
