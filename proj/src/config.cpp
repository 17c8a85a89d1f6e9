#include "geomsub/config.hpp"

#include <cstdlib>
#include <mutex>

namespace geomsub {
namespace {

std::optional<double>& override_slot() {
    static std::optional<double> slot;
    static std::once_flag env_read;
    std::call_once(env_read, [] {
        if (const char* env = std::getenv("GEOMSUB_TOL")) {
            char* end = nullptr;
            double v = std::strtod(env, &end);
            if (end != env && v > 0.0) slot = v;
        }
    });
    return slot;
}

}  // namespace

std::optional<double> tolerance_override() { return override_slot(); }

void set_tolerance_override(std::optional<double> value) { override_slot() = value; }

double check_tol(double fallback) { return override_slot().value_or(fallback); }

}  // namespace geomsub
