#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dualport/cli.hpp"
#include "dualport/config.hpp"
#include "dualport/dual_field.hpp"
#include "dualport/example_oracle.hpp"
#include "dualport/portfolio.hpp"
#include "dualport/validation.hpp"

namespace py = pybind11;
using namespace dualport;

namespace {

Segment make_segment(const std::string& kind, double a, double b, double c, double p,
                     double x_lo, double x_hi) {
    Segment s;
    s.kind = segment_kind_from_string(kind);
    s.a = a;
    s.b = b;
    s.c = c;
    s.p = p;
    s.x_lo = x_lo;
    s.x_hi = x_hi;
    return s;
}

py::dict report_to_dict(const ValidationReport& r) {
    py::list checks;
    for (const CheckEntry& e : r.entries) {
        py::dict d;
        d["name"] = e.name;
        d["level"] = to_string(e.level);
        d["message"] = e.message;
        checks.append(d);
    }
    py::dict out;
    out["checks"] = checks;
    out["worst"] = to_string(r.worst());
    if (r.has_growth_estimate) {
        out["C0_hat"] = r.C0_hat;
        out["M_hat"] = r.M_hat;
    }
    return out;
}

py::dict verify_to_dict(const VerifyReport& r) {
    py::dict out;
    out["max_err_multiplier"] = r.max_err_multiplier;
    out["max_err_value_slope"] = r.max_err_value_slope;
    out["max_err_fenchel"] = r.max_err_fenchel;
    out["max_err_v_slope"] = r.max_err_v_slope;
    out["all_ok"] = r.all_ok();
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Concave envelopes, dual multipliers and optimal portfolios for "
              "piecewise (possibly non-concave) utilities in a Black-Scholes market";

    py::class_<Segment>(m, "Segment")
        .def(py::init(&make_segment), py::arg("kind"), py::arg("a") = 0.0,
             py::arg("b") = 1.0, py::arg("c") = 0.0, py::arg("p") = 0.0,
             py::arg("x_lo") = 0.0, py::arg("x_hi") = kInf)
        .def_readonly("x_lo", &Segment::x_lo)
        .def_readonly("x_hi", &Segment::x_hi)
        .def("value", &Segment::value)
        .def("derivative", &Segment::derivative);

    py::class_<PiecewiseUtility>(m, "PiecewiseUtility")
        .def(py::init<double, bool, std::vector<Segment>, std::vector<double>>(),
             py::arg("L"), py::arg("domain_open"), py::arg("segments"),
             py::arg("breakpoint_values"))
        .def_property_readonly("L", &PiecewiseUtility::L)
        .def_property_readonly("domain_open", &PiecewiseUtility::domain_open)
        .def("value", &PiecewiseUtility::value)
        .def("breakpoints", &PiecewiseUtility::breakpoints);

    m.def("log_utility", &make_log_utility);
    m.def("flat_then_log_utility", &make_flat_then_log_utility);
    m.def("two_piece_reward_utility", &make_two_piece_reward_utility);

    py::class_<JumpPoint>(m, "JumpPoint")
        .def_readonly("y", &JumpPoint::y)
        .def_readonly("I_left", &JumpPoint::I_left)
        .def_readonly("I_right", &JumpPoint::I_right);

    py::class_<ChordInterval>(m, "ChordInterval")
        .def_readonly("lo", &ChordInterval::lo)
        .def_readonly("hi", &ChordInterval::hi)
        .def_readonly("slope", &ChordInterval::slope);

    py::class_<EnvelopeBundle>(m, "EnvelopeBundle")
        .def(py::init<PiecewiseUtility>(), py::arg("utility"))
        .def("conjugate_V", &EnvelopeBundle::conjugate_V)
        .def("point_I", &EnvelopeBundle::point_I)
        .def("lambda_T", &EnvelopeBundle::lambda_T)
        .def("envelope_value", &EnvelopeBundle::envelope_value)
        .def("ictn_prime", &EnvelopeBundle::Ictn_prime)
        .def("jump_set", &EnvelopeBundle::jump_set)
        .def("chord_intervals", &EnvelopeBundle::chord_intervals)
        .def("envelope_as_utility", &EnvelopeBundle::envelope_as_utility);

    m.def("validate_assumptions", [](const PiecewiseUtility& u, const EnvelopeBundle& b) {
        return report_to_dict(validate_assumptions(u, b));
    });

    py::class_<MarketModel>(m, "MarketModel")
        .def(py::init<double, std::vector<double>, std::vector<std::vector<double>>,
                      double>(),
             py::arg("r"), py::arg("mu"), py::arg("sigma"), py::arg("T"))
        .def_property_readonly("r", &MarketModel::r)
        .def_property_readonly("T", &MarketModel::T)
        .def_property_readonly("theta", &MarketModel::theta)
        .def_property_readonly("theta_norm", &MarketModel::theta_norm)
        .def("z_cdf", &MarketModel::z_cdf)
        .def("z_pdf", &MarketModel::z_pdf)
        .def("kernel_mean", &MarketModel::kernel_mean);

    py::class_<KernelPath>(m, "KernelPath")
        .def_readonly("times", &KernelPath::times)
        .def_readonly("xi", &KernelPath::xi);

    m.def("sample_kernel_paths", &sample_kernel_paths, py::arg("market"),
          py::arg("times"), py::arg("n_paths"), py::arg("seed"), py::arg("workers") = 0);

    py::class_<DualField>(m, "DualField")
        .def(py::init([](const MarketModel& market, const EnvelopeBundle& bundle,
                         double rel_tol) {
                 QuadratureConfig qc;
                 qc.rel_tol = rel_tol;
                 return DualField(market, bundle, qc);
             }),
             py::arg("market"), py::arg("bundle"), py::arg("rel_tol") = 1e-11)
        .def("g", &DualField::g)
        .def("g_prime", &DualField::g_prime)
        .def("multiplier", &DualField::multiplier_Y)
        .def("value_u", &DualField::value_u)
        .def("conjugate_v", &DualField::conjugate_v)
        .def("lam", &DualField::lambda)
        .def("lambda_via_conjugate", &DualField::lambda_via_conjugate)
        .def("L_hat", [](const DualField& f) { return f.domain().L_hat; })
        .def("verify_identities",
             [](const DualField& f, const std::vector<double>& ts,
                const std::vector<double>& xs, unsigned workers) {
                 return verify_to_dict(f.verify_identities(ts, xs, workers));
             },
             py::arg("t_grid"), py::arg("x_grid"), py::arg("workers") = 0);

    py::class_<PathGrid>(m, "PathGrid")
        .def_readonly("times", &PathGrid::times)
        .def_readonly("xi", &PathGrid::xi)
        .def_readonly("wealth", &PathGrid::wealth)
        .def_readonly("lambda_path", &PathGrid::lambda_path)
        .def_readonly("lambda_check", &PathGrid::lambda_check)
        .def_readonly("portfolio", &PathGrid::portfolio)
        .def_readonly("aborted", &PathGrid::aborted);

    py::class_<SimulationResult>(m, "SimulationResult")
        .def_readonly("lambda0", &SimulationResult::lambda0)
        .def_readonly("paths", &SimulationResult::paths)
        .def_readonly("homogeneity_max_rel_err",
                      &SimulationResult::homogeneity_max_rel_err);

    m.def("terminal_wealth", &terminal_wealth);
    m.def("optimal_wealth", &optimal_wealth);
    m.def("feedback_policy", &feedback_policy);
    m.def(
        "simulate",
        [](const DualField& f, double x0, int n_paths, int n_steps, std::uint64_t seed,
           unsigned workers, bool check_multiplier, bool fill_portfolio) {
            SimulateOptions opt;
            opt.check_multiplier = check_multiplier;
            opt.fill_portfolio = fill_portfolio;
            return simulate(f, x0, n_paths, n_steps, seed, workers, opt);
        },
        py::arg("field"), py::arg("x0"), py::arg("n_paths"), py::arg("n_steps"),
        py::arg("seed"), py::arg("workers") = 0, py::arg("check_multiplier") = true,
        py::arg("fill_portfolio") = true);
    m.def("euler_replication_check", [](const DualField& f, const PathGrid& p) {
        const EulerReport r = euler_replication_check(f, p);
        py::dict out;
        out["step_counts"] = r.step_counts;
        out["max_rel_err"] = r.max_rel_err;
        return out;
    });

    auto oracle = m.def_submodule("oracle", "closed forms of the worked example");
    using example_oracle::ExampleParams;
    py::class_<ExampleParams>(oracle, "ExampleParams")
        .def(py::init<>())
        .def_readonly("r", &ExampleParams::r)
        .def_readonly("mu", &ExampleParams::mu)
        .def_readonly("sigma", &ExampleParams::sigma)
        .def_readonly("T", &ExampleParams::T)
        .def("theta", &ExampleParams::theta);
    oracle.def("d", [](double t, double y) {
        return example_oracle::oracle_d(ExampleParams{}, t, y);
    });
    oracle.def("g", [](double t, double y) {
        return example_oracle::oracle_g(ExampleParams{}, t, y);
    });
    oracle.def("g_prime", [](double t, double y) {
        return example_oracle::oracle_g_prime(ExampleParams{}, t, y);
    });
    oracle.def("u", [](double t, double x) {
        return example_oracle::oracle_u(ExampleParams{}, t, x);
    });
    oracle.def("v", [](double t, double y) {
        return example_oracle::oracle_v(ExampleParams{}, t, y);
    });
    oracle.def("v_prime", [](double t, double y) {
        return example_oracle::oracle_v_prime(ExampleParams{}, t, y);
    });
    oracle.def("multiplier", [](double t, double x) {
        return example_oracle::oracle_multiplier(ExampleParams{}, t, x);
    });

    m.def("field_from_config_json", [](const std::string& text) {
        const RunConfig cfg = parse_config(text);
        return DualField(cfg.make_market(), EnvelopeBundle(cfg.make_utility()),
                         cfg.quadrature);
    });
}
