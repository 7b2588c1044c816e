#pragma once

#include <ostream>

namespace istn::tools {

/// Quick oracle and property checks on small synthetic instances. Prints one
/// line per check; returns false if any fails.
bool run_validation(std::ostream& out, unsigned instances);

} // namespace istn::tools
