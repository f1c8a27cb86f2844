#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "sirtimes/critical_time.hpp"

namespace sirtimes {

enum class Spacing { Linear, Log };

// Inclusive range min:max:count.
struct AxisRange {
    double min = 0.0;
    double max = 0.0;
    int count = 2;

    // Parses "min:max:count". Throws DomainError on malformed text.
    static AxisRange parse(std::string_view text);
    std::vector<double> nodes(Spacing spacing) const;
};

struct GridSpec {
    AxisRange x;
    AxisRange y;
    Spacing spacing = Spacing::Linear;

    // x.min < x.max, y.min < y.max, counts >= 2, and positive ranges for Log.
    void validate() const;
};

struct GridRow {
    double x = 0.0;
    double y = 0.0;
    std::optional<double> value;
    std::optional<Method> method;
    std::optional<double> err_estimate;
    std::optional<double> lower;
    std::optional<double> upper;
    std::optional<double> asymptotic;
    std::string status = "ok";

    bool ok() const { return status == "ok"; }
};

// How the value column of a row is produced. Both evaluates the two routes,
// reports the integral value and uses their discrepancy as the error estimate.
enum class MethodChoice { Ode, Integral, Both };

struct EvalSettings {
    TimeKind kind = TimeKind::U;
    MethodChoice method = MethodChoice::Integral;
    IntegratorConfig integrator{};
    QuadratureOptions quadrature{};
};

// Fills lower/upper/asymptotic for the row's (x, y) where they are defined.
// upper is the tightest applicable upper bound.
void add_reference_columns(const ModelParams& p, TimeKind kind, GridRow& row);

// One row: value, bound columns and asymptotic column. Numerical failures
// are captured in status instead of thrown.
GridRow evaluate_point(const ModelParams& p, double x, double y, const EvalSettings& settings);

// Rows in y-outer, x-inner order. Nodes are evaluated on `threads` workers;
// each row depends only on its node, so output does not depend on threads.
std::vector<GridRow> run_grid(const ModelParams& p, const GridSpec& grid,
                              const EvalSettings& settings, unsigned threads);

// %.17g: round-trips every double.
std::string format_double(double v);

inline constexpr std::string_view kCsvHeader =
    "x,y,value,method,err_estimate,lower,upper,asymptotic,status";

void write_csv(std::ostream& out, const std::vector<GridRow>& rows);
void write_json(std::ostream& out, const std::vector<GridRow>& rows);

}  // namespace sirtimes
