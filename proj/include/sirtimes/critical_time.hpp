#pragma once

#include <string_view>

#include "sirtimes/analytic.hpp"
#include "sirtimes/ode.hpp"

namespace sirtimes {

enum class TimeKind { U, V };
enum class Route { Ode, Integral };

std::string_view to_string(TimeKind k);
std::string_view to_string(Route r);

// u or v at (x, y) by the requested route, including the boundary and
// x = 0 short-circuits that the individual methods leave to the caller.
CriticalTimeResult critical_time(const ModelParams& p, TimeKind kind, Route route, double x,
                                 double y, const IntegratorConfig& cfg = {},
                                 const QuadratureOptions& quad = {});

}  // namespace sirtimes
