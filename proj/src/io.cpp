#include "sirtimes/io.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <thread>

#include <json.hpp>

#include "sirtimes/errors.hpp"

namespace sirtimes {

namespace {

double parse_number(std::string_view text) {
    const std::string s(text);
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(s, &used);
    } catch (const std::exception&) {
        throw DomainError("not a number: '" + s + "'");
    }
    if (used != s.size()) throw DomainError("not a number: '" + s + "'");
    return value;
}

}  // namespace

AxisRange AxisRange::parse(std::string_view text) {
    const auto first = text.find(':');
    const auto second = first == std::string_view::npos ? first : text.find(':', first + 1);
    if (second == std::string_view::npos || text.find(':', second + 1) != std::string_view::npos) {
        throw DomainError("range must look like min:max:count, got '" + std::string(text) + "'");
    }
    AxisRange r;
    r.min = parse_number(text.substr(0, first));
    r.max = parse_number(text.substr(first + 1, second - first - 1));
    const auto count_text = text.substr(second + 1);
    const auto [ptr, ec] =
        std::from_chars(count_text.data(), count_text.data() + count_text.size(), r.count);
    if (ec != std::errc{} || ptr != count_text.data() + count_text.size()) {
        throw DomainError("range count must be an integer, got '" + std::string(count_text) + "'");
    }
    return r;
}

std::vector<double> AxisRange::nodes(Spacing spacing) const {
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        const double f = static_cast<double>(k) / (count - 1);
        if (spacing == Spacing::Log) {
            out[k] = std::pow(10.0, std::log10(min) + f * (std::log10(max) - std::log10(min)));
        } else {
            out[k] = min + f * (max - min);
        }
    }
    // Endpoints exactly as given.
    out.front() = min;
    out.back() = max;
    return out;
}

void GridSpec::validate() const {
    for (const AxisRange* r : {&x, &y}) {
        if (!(r->min <= r->max)) throw DomainError("grid range requires min <= max");
        if (r->count < 2) throw DomainError("grid range requires count >= 2");
        if (spacing == Spacing::Log && !(r->min > 0.0)) {
            throw DomainError("log spacing requires a positive range");
        }
    }
    if (!(x.min >= 0.0) || !(y.min >= 0.0)) throw DomainError("grid populations must be >= 0");
}

void add_reference_columns(const ModelParams& p, TimeKind kind, GridRow& row) {
    const double x = row.x, y = row.y;
    if (kind == TimeKind::U) {
        if (y >= p.mu()) {
            const BoundsU b = bounds_u(p, x, y);
            row.lower = b.lower;
            row.upper = b.tightest_upper();
            row.asymptotic = asymptotic_u(p, x, y);
        }
    } else if (x > p.rho() && y > 0.0) {
        try {
            const BoundsV b = bounds_v(p, x, y);
            row.lower = b.lower;
            row.upper = b.tightest_upper();
        } catch (const DomainError&) {
            // Degenerate closed forms leave the bound columns empty.
        }
        row.asymptotic = asymptotic_v(p, x, y);
    }
}

GridRow evaluate_point(const ModelParams& p, double x, double y, const EvalSettings& settings) {
    GridRow row;
    row.x = x;
    row.y = y;
    try {
        CriticalTimeResult result{};
        if (settings.method == MethodChoice::Both) {
            const auto ode = critical_time(p, settings.kind, Route::Ode, x, y, settings.integrator,
                                           settings.quadrature);
            result = critical_time(p, settings.kind, Route::Integral, x, y, settings.integrator,
                                   settings.quadrature);
            result.err_estimate = std::max(result.err_estimate, std::abs(ode.value - result.value));
        } else {
            const Route route = settings.method == MethodChoice::Ode ? Route::Ode : Route::Integral;
            result = critical_time(p, settings.kind, route, x, y, settings.integrator,
                                   settings.quadrature);
        }
        row.value = result.value;
        row.method = result.method;
        row.err_estimate = result.err_estimate;
    } catch (const NeverReached&) {
        row.status = "never_reached";
    } catch (const IntegrationStall&) {
        row.status = "integration_stall";
    } catch (const TimeCapExceeded&) {
        row.status = "time_cap_exceeded";
    } catch (const QuadratureFailure&) {
        row.status = "quadrature_failure";
    } catch (const DomainError&) {
        row.status = "domain_error";
    }

    add_reference_columns(p, settings.kind, row);
    return row;
}

std::vector<GridRow> run_grid(const ModelParams& p, const GridSpec& grid,
                              const EvalSettings& settings, unsigned threads) {
    grid.validate();
    settings.integrator.validate();
    const auto xs = grid.x.nodes(grid.spacing);
    const auto ys = grid.y.nodes(grid.spacing);
    const std::size_t total = xs.size() * ys.size();
    std::vector<GridRow> rows(total);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < total; k = next++) {
            rows[k] = evaluate_point(p, xs[k % xs.size()], ys[k / xs.size()], settings);
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(total)));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return rows;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

void write_csv(std::ostream& out, const std::vector<GridRow>& rows) {
    out << kCsvHeader << '\n';
    for (const auto& r : rows) {
        out << format_double(r.x) << ',' << format_double(r.y) << ',' << cell(r.value) << ','
            << (r.method ? std::string(to_string(*r.method)) : std::string()) << ','
            << cell(r.err_estimate) << ',' << cell(r.lower) << ',' << cell(r.upper) << ','
            << cell(r.asymptotic) << ',' << r.status << '\n';
    }
}

void write_json(std::ostream& out, const std::vector<GridRow>& rows) {
    auto opt = [](const std::optional<double>& v) {
        return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
    };
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        arr.push_back({{"x", r.x},
                       {"y", r.y},
                       {"value", opt(r.value)},
                       {"method", r.method ? nlohmann::ordered_json(std::string(to_string(*r.method)))
                                           : nlohmann::ordered_json(nullptr)},
                       {"err_estimate", opt(r.err_estimate)},
                       {"lower", opt(r.lower)},
                       {"upper", opt(r.upper)},
                       {"asymptotic", opt(r.asymptotic)},
                       {"status", r.status}});
    }
    out << arr.dump(2) << '\n';
}

}  // namespace sirtimes
