#pragma once

#include <optional>

namespace geomsub {

// Validation tolerances default to per-check constants. A single global
// override replaces all of them; it can be set programmatically or through
// the GEOMSUB_TOL environment variable (read once, lazily).
std::optional<double> tolerance_override();
void set_tolerance_override(std::optional<double> value);

// Tolerance used by a check whose default is `fallback`.
double check_tol(double fallback);

}  // namespace geomsub
