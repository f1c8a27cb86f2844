#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "sirtimes/analytic.hpp"
#include "sirtimes/cli.hpp"
#include "sirtimes/critical_time.hpp"
#include "sirtimes/errors.hpp"
#include "sirtimes/io.hpp"
#include "sirtimes/model.hpp"
#include "sirtimes/ode.hpp"
#include "sirtimes/pde_verify.hpp"
#include "sirtimes/verify.hpp"

namespace py = pybind11;
using namespace sirtimes;

namespace {

TimeKind parse_kind(const std::string& s) {
    if (s == "u") return TimeKind::U;
    if (s == "v") return TimeKind::V;
    throw DomainError("time must be 'u' or 'v'");
}

Route parse_route(const std::string& s) {
    if (s == "ode") return Route::Ode;
    if (s == "integral") return Route::Integral;
    throw DomainError("route must be 'ode' or 'integral'");
}

MethodChoice parse_method(const std::string& s) {
    if (s == "ode") return MethodChoice::Ode;
    if (s == "integral") return MethodChoice::Integral;
    if (s == "both") return MethodChoice::Both;
    throw DomainError("method must be 'ode', 'integral' or 'both'");
}

AxisRange to_range(const std::tuple<double, double, int>& t) {
    return {std::get<0>(t), std::get<1>(t), std::get<2>(t)};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Critical times of the SIR epidemic model";

    // Later registrations are tried first, so bases go before subclasses.
    auto domain_error = py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<StencilOutOfDomain>(m, "StencilOutOfDomain", domain_error.ptr());
    auto numeric_error = py::register_exception<NumericError>(m, "NumericError", PyExc_RuntimeError);
    py::register_exception<IntegrationStall>(m, "IntegrationStall", numeric_error.ptr());
    py::register_exception<TimeCapExceeded>(m, "TimeCapExceeded", numeric_error.ptr());
    py::register_exception<QuadratureFailure>(m, "QuadratureFailure", numeric_error.ptr());
    py::register_exception<NeverReached>(m, "NeverReached", PyExc_RuntimeError);

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init<double, double, double>(), py::arg("beta"), py::arg("gamma"),
             py::arg("mu") = 1.0)
        .def_property_readonly("beta", &ModelParams::beta)
        .def_property_readonly("gamma", &ModelParams::gamma)
        .def_property_readonly("mu", &ModelParams::mu)
        .def_property_readonly("rho", &ModelParams::rho)
        .def("__repr__", [](const ModelParams& p) {
            std::ostringstream os;
            os << "ModelParams(beta=" << p.beta() << ", gamma=" << p.gamma() << ", mu=" << p.mu()
               << ")";
            return os.str();
        });

    py::class_<SirState>(m, "SirState")
        .def_readonly("s", &SirState::s)
        .def_readonly("i", &SirState::i)
        .def_readonly("t", &SirState::t)
        .def("__repr__", [](const SirState& s) {
            std::ostringstream os;
            os.precision(17);
            os << "SirState(s=" << s.s << ", i=" << s.i << ", t=" << s.t << ")";
            return os.str();
        });

    py::class_<IntegratorConfig>(m, "IntegratorConfig")
        .def(py::init<>())
        .def_readwrite("rel_tol", &IntegratorConfig::rel_tol)
        .def_readwrite("abs_tol", &IntegratorConfig::abs_tol)
        .def_readwrite("max_step", &IntegratorConfig::max_step)
        .def_readwrite("event_time_tol", &IntegratorConfig::event_time_tol);

    py::class_<QuadratureOptions>(m, "QuadratureOptions")
        .def(py::init<>())
        .def_readwrite("abs_tol", &QuadratureOptions::abs_tol)
        .def_readwrite("rel_tol", &QuadratureOptions::rel_tol)
        .def_readwrite("max_intervals", &QuadratureOptions::max_intervals);

    py::enum_<Method>(m, "Method")
        .value("OdeEvent", Method::OdeEvent)
        .value("Integral", Method::Integral)
        .value("AsymptoticU", Method::AsymptoticU)
        .value("AsymptoticV", Method::AsymptoticV)
        .value("ExactX0", Method::ExactX0)
        .value("BoundaryZero", Method::BoundaryZero);

    py::enum_<EventKind>(m, "EventKind")
        .value("InfectedBelowMu", EventKind::InfectedBelowMu)
        .value("SusceptibleBelowRho", EventKind::SusceptibleBelowRho);

    py::class_<CriticalTimeResult>(m, "CriticalTimeResult")
        .def_readonly("value", &CriticalTimeResult::value)
        .def_readonly("method", &CriticalTimeResult::method)
        .def_readonly("err_estimate", &CriticalTimeResult::err_estimate)
        .def("__float__", [](const CriticalTimeResult& r) { return r.value; })
        .def("__repr__", [](const CriticalTimeResult& r) {
            std::ostringstream os;
            os.precision(17);
            os << "CriticalTimeResult(value=" << r.value << ", method=" << to_string(r.method)
               << ", err_estimate=" << r.err_estimate << ")";
            return os.str();
        });

    py::class_<EventRecord>(m, "EventRecord")
        .def_readonly("kind", &EventRecord::kind)
        .def_readonly("t", &EventRecord::t)
        .def_readonly("state", &EventRecord::state);

    py::class_<Trajectory>(m, "Trajectory")
        .def_property_readonly("t_end", &Trajectory::t_end)
        .def_property_readonly("events", &Trajectory::events)
        .def_property_readonly("samples",
                               [](const Trajectory& t) {
                                   return std::vector<SirState>(t.samples().begin(), t.samples().end());
                               })
        .def("state_at", &Trajectory::state_at, py::arg("t"));

    m.def("psi", [](const ModelParams& p, double x, double y) { return psi(p, x, y).value; },
          py::arg("p"), py::arg("x"), py::arg("y"));
    m.def(
        "vector_field",
        [](const ModelParams& p, double s, double i) {
            const Derivative d = vector_field(p, SirState{s, i, 0.0});
            return std::pair{d.ds_dt, d.di_dt};
        },
        py::arg("p"), py::arg("s"), py::arg("i"));
    m.def("exact_u_at_x0", &exact_u_at_x0, py::arg("p"), py::arg("y"));

    m.def("integrate", &integrate, py::arg("p"), py::arg("x"), py::arg("y"), py::arg("t_end"),
          py::arg("cfg") = IntegratorConfig{});
    m.def("hitting_time_u", &hitting_time_u, py::arg("p"), py::arg("x"), py::arg("y"),
          py::arg("cfg") = IntegratorConfig{});
    m.def("hitting_time_v", &hitting_time_v, py::arg("p"), py::arg("x"), py::arg("y"),
          py::arg("cfg") = IntegratorConfig{});

    py::class_<AnchorResult>(m, "AnchorResult")
        .def_readonly("a", &AnchorResult::a)
        .def_readonly("log_a", &AnchorResult::log_a)
        .def_readonly("residual", &AnchorResult::residual);
    m.def("solve_anchor", &solve_anchor, py::arg("p"), py::arg("x"), py::arg("y"));
    m.def("u_integral", &u_integral, py::arg("p"), py::arg("x"), py::arg("y"),
          py::arg("opt") = QuadratureOptions{});
    m.def("v_integral", &v_integral, py::arg("p"), py::arg("x"), py::arg("y"),
          py::arg("opt") = QuadratureOptions{});

    py::class_<BoundsU>(m, "BoundsU")
        .def_readonly("lower", &BoundsU::lower)
        .def_readonly("crude_upper", &BoundsU::crude_upper)
        .def_readonly("subcritical_upper", &BoundsU::subcritical_upper)
        .def("tightest_upper", &BoundsU::tightest_upper);
    py::class_<BoundsV>(m, "BoundsV")
        .def_readonly("lower", &BoundsV::lower)
        .def_readonly("upper", &BoundsV::upper)
        .def_readonly("crude_upper", &BoundsV::crude_upper)
        .def("tightest_upper", &BoundsV::tightest_upper);
    m.def("bounds_u", &bounds_u, py::arg("p"), py::arg("x"), py::arg("y"));
    m.def("bounds_v", &bounds_v, py::arg("p"), py::arg("x"), py::arg("y"));
    m.def("asymptotic_u", &asymptotic_u, py::arg("p"), py::arg("x"), py::arg("y"));
    m.def("asymptotic_v", &asymptotic_v, py::arg("p"), py::arg("x"), py::arg("y"));

    m.def(
        "critical_time",
        [](const ModelParams& p, const std::string& time, const std::string& route, double x,
           double y, const IntegratorConfig& cfg, const QuadratureOptions& quad) {
            return critical_time(p, parse_kind(time), parse_route(route), x, y, cfg, quad);
        },
        py::arg("p"), py::arg("time"), py::arg("route"), py::arg("x"), py::arg("y"),
        py::arg("cfg") = IntegratorConfig{}, py::arg("quad") = QuadratureOptions{});

    py::class_<ResidualReport>(m, "ResidualReport")
        .def_readonly("x", &ResidualReport::x)
        .def_readonly("y", &ResidualReport::y)
        .def_readonly("h", &ResidualReport::h)
        .def_readonly("residual", &ResidualReport::residual)
        .def_readonly("residual_half", &ResidualReport::residual_half)
        .def_readonly("residual_quarter", &ResidualReport::residual_quarter)
        .def_readonly("order_estimate", &ResidualReport::order_estimate);

    // The field argument is a Python callable f(x, y) or the name "u" / "v"
    // of a built-in integral field; domain selects the open set for the stencil.
    m.def(
        "pde_residual",
        [](py::object field, const ModelParams& p, double x, double y, std::optional<double> h,
           const std::string& domain) {
            Field f;
            if (py::isinstance<py::str>(field)) {
                f = parse_kind(field.cast<std::string>()) == TimeKind::U ? u_field(p) : v_field(p);
            } else {
                f.eval = field.cast<std::function<double(double, double)>>();
                f.domain = parse_kind(domain) == TimeKind::U ? FieldDomain::U : FieldDomain::V;
            }
            return pde_residual(f, p, x, y, h.value_or(default_fd_step(x, y)));
        },
        py::arg("field"), py::arg("p"), py::arg("x"), py::arg("y"), py::arg("h") = py::none(),
        py::arg("domain") = "u");
    m.def("check_boundary_u", &check_boundary_u, py::arg("p"), py::arg("n_points"),
          py::arg("cfg") = IntegratorConfig{});
    m.def(
        "check_boundary_v",
        [](const ModelParams& p, const std::vector<double>& ys, const IntegratorConfig& cfg) {
            return check_boundary_v(p, ys, cfg);
        },
        py::arg("p"), py::arg("y_values"), py::arg("cfg") = IntegratorConfig{});
    m.def(
        "check_characteristic_identity",
        [](const ModelParams& p, const std::string& time, double x, double y,
           const std::vector<double>& fractions) {
            return check_characteristic_identity(p, parse_kind(time), x, y, fractions);
        },
        py::arg("p"), py::arg("time"), py::arg("x"), py::arg("y"),
        py::arg("fractions") = std::vector<double>{0.25, 0.5, 0.75});

    py::class_<GridRow>(m, "GridRow")
        .def_readonly("x", &GridRow::x)
        .def_readonly("y", &GridRow::y)
        .def_readonly("value", &GridRow::value)
        .def_readonly("method", &GridRow::method)
        .def_readonly("err_estimate", &GridRow::err_estimate)
        .def_readonly("lower", &GridRow::lower)
        .def_readonly("upper", &GridRow::upper)
        .def_readonly("asymptotic", &GridRow::asymptotic)
        .def_readonly("status", &GridRow::status);

    m.def(
        "run_grid",
        [](const ModelParams& p, std::tuple<double, double, int> x, std::tuple<double, double, int> y,
           const std::string& time, const std::string& method, bool log_spacing, unsigned threads) {
            const GridSpec grid{to_range(x), to_range(y), log_spacing ? Spacing::Log : Spacing::Linear};
            EvalSettings s;
            s.kind = parse_kind(time);
            s.method = parse_method(method);
            py::gil_scoped_release release;
            return run_grid(p, grid, s, threads);
        },
        py::arg("p"), py::arg("x"), py::arg("y"), py::arg("time") = "u",
        py::arg("method") = "integral", py::arg("log_spacing") = false, py::arg("threads") = 1u);
    m.def(
        "to_csv",
        [](const std::vector<GridRow>& rows) {
            std::ostringstream os;
            write_csv(os, rows);
            return os.str();
        },
        py::arg("rows"));

    py::class_<CheckResult>(m, "CheckResult")
        .def_readonly("name", &CheckResult::name)
        .def_readonly("passed", &CheckResult::passed)
        .def_readonly("detail", &CheckResult::detail);
    m.def(
        "run_verification",
        [](bool quick, unsigned threads, double perturb_u) {
            VerifyOptions opt;
            opt.quick = quick;
            opt.threads = threads;
            opt.perturb_u = perturb_u;
            py::gil_scoped_release release;
            return run_verification(opt);
        },
        py::arg("quick") = true, py::arg("threads") = 1u, py::arg("perturb_u") = 0.0);

    // Runs the command-line interface in-process; returns (exit_code, stdout, stderr).
    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::vector<const char*> argv{"sirtimes"};
            for (const auto& a : args) argv.push_back(a.c_str());
            std::ostringstream out, err;
            int code;
            {
                py::gil_scoped_release release;
                code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
            }
            return std::tuple{code, out.str(), err.str()};
        },
        py::arg("args"));
}
