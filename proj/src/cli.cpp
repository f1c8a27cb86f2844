#include "sirtimes/cli.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sirtimes/analytic.hpp"
#include "sirtimes/critical_time.hpp"
#include "sirtimes/errors.hpp"
#include "sirtimes/io.hpp"
#include "sirtimes/verify.hpp"

namespace sirtimes {

namespace {

using Json = nlohmann::ordered_json;

// --config accepts JSON (an object whose nested objects name subcommands)
// or the INI-style key=value format CLI11 reads natively.
class JsonOrIniConfig : public CLI::ConfigINI {
public:
    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        std::stringstream buffer;
        buffer << input.rdbuf();
        const std::string text = buffer.str();
        const auto first = text.find_first_not_of(" \t\r\n");
        if (first == std::string::npos || text[first] != '{') {
            std::istringstream ini(text);
            return CLI::ConfigINI::from_config(ini);
        }
        Json j;
        try {
            j = Json::parse(text);
        } catch (const Json::parse_error& e) {
            throw CLI::ConversionError(std::string("invalid JSON config: ") + e.what());
        }
        std::vector<CLI::ConfigItem> items;
        flatten(j, {}, items);
        return items;
    }

private:
    static void flatten(const Json& j, const std::vector<std::string>& parents,
                        std::vector<CLI::ConfigItem>& items) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (it->is_object()) {
                auto nested = parents;
                nested.push_back(it.key());
                flatten(*it, nested, items);
                continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = it.key();
            if (it->is_string()) {
                item.inputs = {it->get<std::string>()};
            } else if (it->is_boolean()) {
                item.inputs = {it->get<bool>() ? "true" : "false"};
            } else if (it->is_number()) {
                item.inputs = {it->dump()};
            } else {
                throw CLI::ConversionError("unsupported JSON config value for '" + it.key() + "'");
            }
            items.push_back(std::move(item));
        }
    }
};

enum class Format { Csv, Json };

struct Globals {
    std::optional<double> beta;
    std::optional<double> gamma;
    double mu = 1.0;
    double rel_tol = IntegratorConfig{}.rel_tol;
    double abs_tol = IntegratorConfig{}.abs_tol;
    unsigned threads = 0;
    std::string out_path;
    Format format = Format::Csv;

    ModelParams params() const {
        if (!beta || !gamma) throw DomainError("--beta and --gamma are required");
        return ModelParams(*beta, *gamma, mu);
    }
    IntegratorConfig integrator() const {
        IntegratorConfig cfg;
        cfg.rel_tol = rel_tol;
        cfg.abs_tol = abs_tol;
        cfg.validate();
        return cfg;
    }
    unsigned worker_count() const {
        return threads > 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
    }
};

enum class TimeChoice { U, V, Both };

std::vector<TimeKind> kinds_of(TimeChoice t) {
    if (t == TimeChoice::U) return {TimeKind::U};
    if (t == TimeChoice::V) return {TimeKind::V};
    return {TimeKind::U, TimeKind::V};
}

Json opt_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::string opt_cell(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

// Writes to --out when given, otherwise to the caller's stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw DomainError("cannot open output file '" + path + "'");
            stream_ = &file_;
        }
    }
    std::ostream& operator*() { return *stream_; }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

int cmd_compute(const Globals& g, double x, double y, TimeChoice time, MethodChoice method,
                std::ostream& out) {
    const ModelParams p = g.params();
    std::vector<MethodChoice> routes;
    if (method == MethodChoice::Both) {
        routes = {MethodChoice::Ode, MethodChoice::Integral};
    } else {
        routes = {method};
    }

    struct Line {
        TimeKind kind;
        std::string route;
        GridRow row;
        std::optional<double> discrepancy;
    };
    std::vector<Line> lines;
    for (TimeKind kind : kinds_of(time)) {
        EvalSettings settings;
        settings.kind = kind;
        settings.integrator = g.integrator();
        std::vector<Line> group;
        for (MethodChoice r : routes) {
            const Route route = r == MethodChoice::Ode ? Route::Ode : Route::Integral;
            const auto result =
                critical_time(p, kind, route, x, y, settings.integrator, settings.quadrature);
            GridRow row;
            row.x = x;
            row.y = y;
            row.value = result.value;
            row.method = result.method;
            row.err_estimate = result.err_estimate;
            add_reference_columns(p, kind, row);
            group.push_back({kind, std::string(to_string(route)), row, {}});
        }
        if (group.size() == 2) {
            const double a = *group[0].row.value, b = *group[1].row.value;
            const double rel = std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
            for (auto& l : group) l.discrepancy = a == b ? 0.0 : rel;
        }
        lines.insert(lines.end(), group.begin(), group.end());
    }

    Sink sink(g.out_path, out);
    if (g.format == Format::Json) {
        Json arr = Json::array();
        for (const auto& l : lines) {
            arr.push_back({{"time", std::string(to_string(l.kind))},
                           {"route", l.route},
                           {"x", x},
                           {"y", y},
                           {"value", opt_json(l.row.value)},
                           {"method", std::string(to_string(*l.row.method))},
                           {"err_estimate", opt_json(l.row.err_estimate)},
                           {"lower", opt_json(l.row.lower)},
                           {"upper", opt_json(l.row.upper)},
                           {"asymptotic", opt_json(l.row.asymptotic)},
                           {"rel_discrepancy", opt_json(l.discrepancy)}});
        }
        *sink << arr.dump(2) << '\n';
    } else {
        *sink << "time,route,x,y,value,method,err_estimate,lower,upper,asymptotic,rel_discrepancy\n";
        for (const auto& l : lines) {
            *sink << to_string(l.kind) << ',' << l.route << ',' << format_double(x) << ','
                  << format_double(y) << ',' << opt_cell(l.row.value) << ','
                  << to_string(*l.row.method) << ',' << opt_cell(l.row.err_estimate) << ','
                  << opt_cell(l.row.lower) << ',' << opt_cell(l.row.upper) << ','
                  << opt_cell(l.row.asymptotic) << ',' << opt_cell(l.discrepancy) << '\n';
        }
    }
    return kExitOk;
}

int cmd_grid(const Globals& g, const GridSpec& grid, TimeKind kind, MethodChoice method,
             std::ostream& out) {
    const ModelParams p = g.params();
    EvalSettings settings;
    settings.kind = kind;
    settings.method = method;
    settings.integrator = g.integrator();
    const auto rows = run_grid(p, grid, settings, g.worker_count());

    Sink sink(g.out_path, out);
    if (g.format == Format::Json) {
        write_json(*sink, rows);
    } else {
        write_csv(*sink, rows);
    }
    for (const auto& r : rows) {
        if (!r.ok()) return kExitRowFailures;
    }
    return kExitOk;
}

int cmd_bounds(const Globals& g, double x, double y, TimeChoice time, std::ostream& out) {
    const ModelParams p = g.params();
    struct Entry {
        std::string time;
        std::string name;
        double value;
    };
    std::vector<Entry> entries;
    for (TimeKind kind : kinds_of(time)) {
        const std::string t(to_string(kind));
        if (kind == TimeKind::U) {
            const BoundsU b = bounds_u(p, x, y);
            entries.push_back({t, "lower", b.lower});
            entries.push_back({t, "crude_upper", b.crude_upper});
            if (b.subcritical_upper) entries.push_back({t, "subcritical_upper", *b.subcritical_upper});
            entries.push_back({t, "asymptotic", asymptotic_u(p, x, y)});
        } else {
            const BoundsV b = bounds_v(p, x, y);
            entries.push_back({t, "lower", b.lower});
            entries.push_back({t, "upper", b.upper});
            entries.push_back({t, "crude_upper", b.crude_upper});
            entries.push_back({t, "asymptotic", asymptotic_v(p, x, y)});
        }
    }
    Sink sink(g.out_path, out);
    if (g.format == Format::Json) {
        Json arr = Json::array();
        for (const auto& e : entries) {
            arr.push_back({{"time", e.time}, {"x", x}, {"y", y}, {"bound", e.name}, {"value", e.value}});
        }
        *sink << arr.dump(2) << '\n';
    } else {
        *sink << "time,x,y,bound,value\n";
        for (const auto& e : entries) {
            *sink << e.time << ',' << format_double(x) << ',' << format_double(y) << ',' << e.name
                  << ',' << format_double(e.value) << '\n';
        }
    }
    return kExitOk;
}

struct Ray {
    double origin_x = 0.0;
    double origin_y = 0.0;
    double dir_x = 0.5;
    double dir_y = 0.5;
    AxisRange r{1e2, 1e6, 5};
};

int cmd_asymptotics(const Globals& g, const Ray& ray, TimeKind kind, std::ostream& out) {
    const ModelParams p = g.params();
    if (!(ray.r.min > 0.0) || !(ray.r.min < ray.r.max) || ray.r.count < 2) {
        throw DomainError("--r must be a positive increasing range with count >= 2");
    }
    if (ray.dir_x < 0.0 || ray.dir_y < 0.0 || ray.dir_x + ray.dir_y <= 0.0) {
        throw DomainError("--direction must be nonnegative and point into increasing x + y");
    }
    Json arr = Json::array();
    std::ostringstream csv;
    csv << "x,y,x_plus_y,exact,asymptotic,ratio\n";
    for (double r : ray.r.nodes(Spacing::Log)) {
        const double x = ray.origin_x + ray.dir_x * r;
        const double y = ray.origin_y + ray.dir_y * r;
        const double exact = critical_time(p, kind, Route::Integral, x, y).value;
        const double approx = kind == TimeKind::U ? asymptotic_u(p, x, y) : asymptotic_v(p, x, y);
        const double ratio = exact / approx;
        arr.push_back({{"x", x}, {"y", y}, {"x_plus_y", x + y}, {"exact", exact},
                       {"asymptotic", approx}, {"ratio", ratio}});
        csv << format_double(x) << ',' << format_double(y) << ',' << format_double(x + y) << ','
            << format_double(exact) << ',' << format_double(approx) << ',' << format_double(ratio)
            << '\n';
    }
    Sink sink(g.out_path, out);
    if (g.format == Format::Json) {
        *sink << arr.dump(2) << '\n';
    } else {
        *sink << csv.str();
    }
    return kExitOk;
}

int cmd_verify(const Globals& g, bool quick, double perturb_u, std::ostream& out) {
    VerifyOptions opt;
    opt.quick = quick;
    opt.integrator = g.integrator();
    opt.threads = g.worker_count();
    opt.perturb_u = perturb_u;
    const auto results = run_verification(opt);

    Sink sink(g.out_path, out);
    std::vector<std::string> failed;
    for (const auto& r : results) {
        *sink << (r.passed ? "PASS  " : "FAIL  ") << r.name << "  " << r.detail << '\n';
        if (!r.passed) failed.push_back(r.name);
    }
    if (failed.empty()) {
        *sink << "all " << results.size() << " checks passed\n";
        return kExitOk;
    }
    *sink << "failed checks:";
    for (const auto& name : failed) *sink << ' ' << name;
    *sink << '\n';
    return kExitChecksFailed;
}

std::pair<double, double> parse_pair(const std::string& text, const char* flag) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) {
        throw DomainError(std::string(flag) + " expects two comma-separated numbers");
    }
    try {
        std::size_t a = 0, b = 0;
        const double first = std::stod(text.substr(0, comma), &a);
        const std::string rest = text.substr(comma + 1);
        const double second = std::stod(rest, &b);
        if (a != comma || b != rest.size()) throw std::invalid_argument(text);
        return {first, second};
    } catch (const std::logic_error&) {
        throw DomainError(std::string(flag) + " expects two comma-separated numbers");
    }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Critical times of the SIR epidemic model"};
    app.require_subcommand(1);
    app.fallthrough();
    app.config_formatter(std::make_shared<JsonOrIniConfig>());
    app.set_config("--config", "", "Read options from a JSON or key=value file");

    Globals g;
    std::string format_text = "csv";
    app.add_option("--beta", g.beta, "Transmission rate (> 0)");
    app.add_option("--gamma", g.gamma, "Recovery rate (> 0)");
    app.add_option("--mu", g.mu, "Infected threshold (> 0)")->capture_default_str();
    app.add_option("--rel-tol", g.rel_tol, "Integrator relative tolerance")->capture_default_str();
    app.add_option("--abs-tol", g.abs_tol, "Integrator absolute tolerance")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads for sweeps (0 = all cores)");
    app.add_option("--out", g.out_path, "Output file (default stdout)");
    app.add_option("--format", format_text, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->option_text("csv|json [csv]");

    const std::map<std::string, TimeChoice> time_map{
        {"u", TimeChoice::U}, {"v", TimeChoice::V}, {"both", TimeChoice::Both}};
    const std::map<std::string, MethodChoice> method_map{
        {"ode", MethodChoice::Ode}, {"integral", MethodChoice::Integral}, {"both", MethodChoice::Both}};

    double x = 0.0, y = 0.0;
    TimeChoice time = TimeChoice::U;
    MethodChoice method = MethodChoice::Both;
    auto* compute = app.add_subcommand("compute", "Evaluate u and/or v at one initial state");
    compute->add_option("--x", x, "Initial susceptible population")->required();
    compute->add_option("--y", y, "Initial infected population")->required();
    compute->add_option("--time", time, "Which time")
        ->transform(CLI::CheckedTransformer(time_map))
        ->option_text("u|v|both [both]");
    compute->add_option("--method", method, "Evaluation route")
        ->transform(CLI::CheckedTransformer(method_map))
        ->option_text("ode|integral|both [both]");

    std::string x_range, y_range, spacing_text = "linear";
    TimeChoice grid_time = TimeChoice::U;
    MethodChoice grid_method = MethodChoice::Integral;
    auto* grid = app.add_subcommand("grid", "Sweep a rectangular grid of initial states");
    grid->add_option("--x", x_range, "x range min:max:count")->required();
    grid->add_option("--y", y_range, "y range min:max:count")->required();
    grid->add_option("--time", grid_time, "Which time")
        ->transform(CLI::CheckedTransformer(std::map<std::string, TimeChoice>{
            {"u", TimeChoice::U}, {"v", TimeChoice::V}}))
        ->option_text("u|v [u]");
    grid->add_option("--method", grid_method, "Evaluation route")
        ->transform(CLI::CheckedTransformer(method_map))
        ->option_text("ode|integral|both [integral]");
    grid->add_option("--spacing", spacing_text, "Node spacing")
        ->check(CLI::IsMember({"linear", "log"}))
        ->option_text("linear|log [linear]");

    double bx = 0.0, by = 0.0;
    TimeChoice bounds_time = TimeChoice::Both;
    auto* bounds = app.add_subcommand("bounds", "Closed-form bounds and asymptotic values");
    bounds->add_option("--x", bx, "Initial susceptible population")->required();
    bounds->add_option("--y", by, "Initial infected population")->required();
    bounds->add_option("--time", bounds_time, "Which time")
        ->transform(CLI::CheckedTransformer(time_map))
        ->option_text("u|v|both [both]");

    Ray ray;
    std::string origin_text, direction_text, r_text;
    TimeChoice ray_time = TimeChoice::U;
    auto* asym = app.add_subcommand("asymptotics", "Exact vs asymptotic times along a ray");
    asym->add_option("--time", ray_time, "Which time")
        ->transform(CLI::CheckedTransformer(std::map<std::string, TimeChoice>{
            {"u", TimeChoice::U}, {"v", TimeChoice::V}}))
        ->option_text("u|v [u]");
    asym->add_option("--origin", origin_text, "Ray origin x0,y0 (default 0,0)");
    asym->add_option("--direction", direction_text, "Ray direction dx,dy (default 0.5,0.5)");
    asym->add_option("--r", r_text, "Ray parameter range min:max:count, log-spaced (default 1e2:1e6:5)");

    bool quick = false;
    double perturb_u = 0.0;
    auto* verify = app.add_subcommand("verify", "Run the invariant and cross-method checks");
    verify->add_flag("--quick", quick, "Coarse grids and fewer random points");
    verify->add_option("--perturb-u", perturb_u, "Add a constant to the u field (sanity check)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitInvalidConfig;
    }

    try {
        g.format = format_text == "json" ? Format::Json : Format::Csv;
        if (*compute) return cmd_compute(g, x, y, time, method, out);
        if (*grid) {
            GridSpec spec{AxisRange::parse(x_range), AxisRange::parse(y_range),
                          spacing_text == "log" ? Spacing::Log : Spacing::Linear};
            spec.validate();
            if (grid_time == TimeChoice::U && spec.y.min < g.params().mu()) {
                err << "note: y values below mu yield u = 0\n";
            }
            return cmd_grid(g, spec, grid_time == TimeChoice::V ? TimeKind::V : TimeKind::U,
                            grid_method, out);
        }
        if (*bounds) return cmd_bounds(g, bx, by, bounds_time, out);
        if (*asym) {
            if (!origin_text.empty()) {
                std::tie(ray.origin_x, ray.origin_y) = parse_pair(origin_text, "--origin");
            }
            if (!direction_text.empty()) {
                std::tie(ray.dir_x, ray.dir_y) = parse_pair(direction_text, "--direction");
            }
            if (!r_text.empty()) ray.r = AxisRange::parse(r_text);
            return cmd_asymptotics(g, ray, ray_time == TimeChoice::V ? TimeKind::V : TimeKind::U,
                                   out);
        }
        if (*verify) return cmd_verify(g, quick, perturb_u, out);
    } catch (const NeverReached& e) {
        err << "never reached: " << e.what() << '\n';
        return kExitNeverReached;
    } catch (const DomainError& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitInvalidConfig;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kExitNumericFailure;
    }
    return kExitInvalidConfig;
}

}  // namespace sirtimes
