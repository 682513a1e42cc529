#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "ncl/solver.hpp"
#include "ncl/sphere.hpp"
#include "ncl/suq2.hpp"
#include "ncl/torus.hpp"

namespace ncl::cli {

using json = nlohmann::ordered_json;

namespace {

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path);
    f << text;
}

// finite numbers only; JSON has no inf/nan
json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json chop(double x) { return num(std::abs(x) < 1e-12 ? 0.0 : x); }

json cjson(cplx z) { return json::array({num(z.real()), num(z.imag())}); }

json matrix_json(const Eigen::MatrixXd& m) {
    json a = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(num(m(i, j)));
        a.push_back(row);
    }
    return a;
}

json check_json(const AxiomCheck& c) {
    return json{{"name", c.name},         {"violation", num(c.violation)}, {"threshold", num(c.threshold)},
                {"asserted", c.asserted}, {"pass", c.pass},                {"note", c.note}};
}

json report_json(const AxiomReport& r) {
    json a = json::array();
    for (auto& c : r.checks) a.push_back(check_json(c));
    return a;
}

json ladder_json(const LadderReport& l) {
    json rows = json::array();
    for (auto& r : l.rows) {
        json norms = json::array();
        for (double x : r.norms) norms.push_back(num(x));
        rows.push_back({{"generator", r.generator}, {"norms", norms}, {"max_growth", num(r.max_growth)}});
    }
    return {{"quantity", l.quantity}, {"sizes", l.sizes}, {"growth_limit", l.growth_limit}, {"pass", l.pass},
            {"rows", rows}};
}

json counting_json(const CountingTable& t) {
    return {{"sizes", t.sizes}, {"lambdas", t.lambdas}, {"counts", t.counts}, {"verdict", t.verdict}};
}

TorusParams torus_params(const RunConfig& c) {
    TorusParams p;
    p.theta = c.theta;
    p.tau = c.tau;
    p.spin = c.spin;
    p.N = c.N;
    return p;
}

SphereParams sphere_params(const RunConfig& c) {
    SphereParams p;
    p.theta = c.theta;
    p.R = c.R;
    p.S = c.S;
    p.L2 = c.L2;
    return p;
}

SuqParams suq_params(const RunConfig& c) {
    if (c.S.imag() != 0.0) throw ConfigError("suq2: S must be real");
    return SuqParams::reduced(c.r, c.q, c.S.real(), c.J2);
}

json parameters_json(const RunConfig& c) {
    json p;
    if (c.geometry == "torus") {
        p = {{"theta", c.theta}, {"tau", c.tau}, {"N", c.N}, {"spin", {half_str(c.spin[0]), half_str(c.spin[1])}}};
    } else if (c.geometry == "sphere") {
        p = {{"theta", c.theta}, {"R", c.R}, {"S", cjson(c.S)}, {"L", half_str(c.L2)}};
    } else {
        p = {{"q", c.q}, {"r", c.r}, {"S", c.S.real()}, {"Jcut", half_str(c.J2)}};
    }
    p["tol"] = rel_tol;
    return p;
}

json header(const std::string& command, const RunConfig& c) {
    return {{"schema_version", kSchemaVersion},
            {"command", command},
            {"geometry", c.geometry},
            {"parameters", parameters_json(c)}};
}

AxiomCheck manual_check(const std::string& name, bool ok, double violation, bool asserted, const std::string& note) {
    AxiomCheck a;
    a.name = name;
    a.violation = violation;
    a.threshold = 0.0;
    a.asserted = asserted;
    a.pass = ok;
    a.note = note;
    return a;
}

std::vector<int> ladder_sizes(int s) { return {std::max(1, s / 2), s}; }

std::string fmt(double x, double scale) {
    if (std::abs(x) <= 1e-12 * std::max(1.0, scale)) x = 0.0;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

std::string spectrum_csv(const SpectralReport& r) {
    std::ostringstream os;
    os << "block,re,im,multiplicity,residual\n";
    for (auto& l : r.lines) {
        const double s = std::abs(l.value);
        char res[40];
        std::snprintf(res, sizeof res, "%.3e", l.residual);
        os << '"' << l.label << "\"," << fmt(l.value.real(), s) << ',' << fmt(l.value.imag(), s) << ','
           << l.multiplicity << ',' << res << '\n';
    }
    return os.str();
}

}  // namespace

int cmd_verify(const RunConfig& c) {
    json out = header("verify", c);
    AxiomReport rep;
    json extra;
    if (c.geometry == "torus") {
        TorusParams p = torus_params(c);
        TripleBundle b = build_torus(p);
        rep = run_suite(b, torus_suite_options(p));
        Ellipticity e = torus_ellipticity(p);
        rep.add(manual_check("ellipticity", e.elliptic, e.elliptic ? 0.0 : 1.0, true,
                             "tau1+ tau2- - tau2+ tau1- = " + fmt(p.delta(), 1.0)));
        if (e.elliptic) rep.add(torus_orientation_two_form(p));
        BundleFactory f = [p](int n) {
            TorusParams q = p;
            q.N = n;
            return build_torus(q);
        };
        CountingTable ct = compact_resolvent_probe(f, {p.N, 2 * p.N}, {1.0, 2.0, 4.0});
        rep.add(manual_check("compactness.counting", ct.verdict == "compact-consistent", 0.0, false, ct.verdict));
        LadderReport ld = boundedness_ladder(f, {p.N, 2 * p.N, 4 * p.N}, "dirac");
        LadderReport lr = boundedness_ladder(f, {p.N, 2 * p.N, 4 * p.N}, "regularity");
        rep.add(ladder_check(ld));
        rep.add(ladder_check(lr));
        extra["counting"] = counting_json(ct);
        extra["ladders"] = json::array({ladder_json(ld), ladder_json(lr)});
    } else if (c.geometry == "sphere") {
        SphereParams p = sphere_params(c);
        TripleBundle b = build_sphere(p);
        rep = run_suite(b, sphere_suite_options(p));
        const long leak = sphere_block_leakage(b);
        rep.add(manual_check("sphere.block_invariance", leak == 0, static_cast<double>(leak), true,
                             std::to_string(leak) + " entries between (l,n) blocks"));
        SphereSpectrumReport sp = sphere_spectrum(p);
        const bool generic = p.R != 0.0 && p.S != 0.0;
        rep.add(make_check("sphere.spectrum_reflection", sp.reflection_deviation, 1e-9 / rel_tol, generic,
                           generic ? "edge states i R l excluded" : "reported only (R = 0 or S = 0)"));
        rep.add(make_check("sphere.spectrum_reflection_with_edges", sp.reflection_deviation_full, 1e-9 / rel_tol,
                           false, "reported only"));
        rep.add(make_check("sphere.spectrum_map_minus_iR_minus_conj", sp.reflection_deviation_printed, 1e-9 / rel_tol,
                           false, "reported only"));
        if (p.R != 0.0) {
            SphereTimeReport t = sphere_time_orientation(p);
            rep.add(make_check("time_orientation.coefficient_i_over_R", t.printed_violation, 1.0, false,
                               "reported only"));
            json lsq = json::object();
            for (auto& [k, v] : t.lsq) lsq[k] = cjson(v);
            extra["time_orientation"] = {{"coefficient", cjson(t.coefficient)},
                                         {"lsq_residual", num(t.lsq_residual)},
                                         {"lsq_coefficients", lsq}};
        }
        BundleFactory f = [p](int l2) {
            SphereParams q = p;
            q.L2 = l2;
            return build_sphere(q);
        };
        LadderReport ld = boundedness_ladder(f, ladder_sizes(p.L2), "dirac");
        LadderReport lr = boundedness_ladder(f, ladder_sizes(p.L2), "regularity");
        // convergence from below still shows as growth at these cutoffs
        for (const LadderReport* l : {&ld, &lr}) {
            AxiomCheck c = ladder_check(*l);
            c.asserted = false;
            c.note = "reported only";
            rep.add(c);
        }
        CountingTable ct = compact_resolvent_probe(f, {p.L2, 2 * p.L2}, {1.0, 2.0, 4.0});
        rep.add(manual_check("compactness.counting", ct.verdict == "compact-consistent", 0.0, false, ct.verdict));
        extra["counting"] = counting_json(ct);
        extra["ladders"] = json::array({ladder_json(ld), ladder_json(lr)});
    } else {
        SuqParams p = suq_params(c);
        TripleBundle b = build_suq2(p);
        rep = run_suite(b, suq2_suite_options());
        rep.append(suq2_relations(b, p.q));
        const long leak = suq2_sector_leakage(b);
        rep.add(manual_check("suq2.sector_invariance", leak == 0, static_cast<double>(leak), true,
                             std::to_string(leak) + " entries between (j,mu) sectors"));
        SuqBoundedness bp = suq2_boundedness_probe(p, ladder_sizes(p.J2), p.J2 + 2, std::max(1, p.J2 / 3), std::max(2, p.J2 - 2));
        rep.add(ladder_check(bp.dirac));
        AxiomCheck reg = ladder_check(bp.regularity);
        reg.asserted = false;
        reg.note = "reported only";
        rep.add(reg);
        rep.add(manual_check("suq2.beta_tail_decay", bp.decay_ok, std::abs(bp.fitted_slope - bp.expected_slope), false,
                             "fitted " + fmt(bp.fitted_slope, 1.0) + " per unit j, expected " +
                                 fmt(bp.expected_slope, 1.0)));
        rep.add(manual_check("suq2.order_one_nonvanishing", bp.order_one_nonzero, bp.order_one_violation, true,
                             "the order-one condition must fail here"));
        extra["ladders"] = json::array({ladder_json(bp.dirac), ladder_json(bp.regularity)});
        json tails = json::array();
        for (size_t k = 0; k < bp.tail_j2.size(); ++k)
            tails.push_back({{"j", half_str(bp.tail_j2[k])}, {"norm", num(bp.tail_norms[k])}});
        extra["beta_tail"] = {{"fitted_slope", num(bp.fitted_slope)},
                              {"expected_slope", num(bp.expected_slope)},
                              {"tails", tails}};
        extra["order_one_violation"] = num(bp.order_one_violation);
    }
    out["checks"] = report_json(rep);
    out["passed"] = rep.all_asserted_pass();
    for (auto& [k, v] : extra.items()) out[k] = v;
    emit(c.out, out.dump(2) + "\n");
    return rep.all_asserted_pass() ? 0 : 1;
}

int cmd_spectrum(const RunConfig& c) {
    SpectralReport r;
    if (c.geometry == "torus") {
        TorusParams p = torus_params(c);
        if (c.op == "D") {
            r = torus_spectrum(p);
        } else {
            TripleBundle b = build_torus(p);
            LinOp m = add(compose(b.dirac, adjoint(b.dirac)), compose(adjoint(b.dirac), b.dirac), 0.5, 0.5);
            r = block_spectrum_hermitian(
                m, b.truncation.basis, [](const Label& l) { return Label{l.a, l.b, 0, 0}; },
                [](const Label& k) { return "n=" + std::to_string(k.a) + ",m=" + std::to_string(k.b); });
            double dev = 0.0;
            for (auto& l : r.lines) {
                double dp = p.d_plus(l.block.a, l.block.b), dm = p.d_minus(l.block.a, l.block.b);
                double want = 0.5 * (dp * dp + dm * dm);
                dev = std::max(dev, std::abs(l.value.real() - want) / std::max(1.0, want));
            }
            r.max_formula_deviation = dev;
            r.convention = "(d+^2 + d-^2) / 2";
        }
    } else if (c.geometry == "sphere") {
        SphereParams p = sphere_params(c);
        r = c.op == "D" ? sphere_spectrum(p).spectrum : sphere_abs_spectrum(p).spectrum;
    } else {
        SuqParams p = suq_params(c);
        r = c.op == "D" ? suq2_dirac_spectrum(p).spectrum : suq2_abs_spectrum(p).spectrum;
    }
    emit(c.out, spectrum_csv(r));
    if (!c.report.empty()) {
        json j = header("spectrum", c);
        j["operator"] = c.op;
        j["lines"] = r.lines.size();
        j["max_residual"] = num(r.max_residual);
        j["flagged"] = r.flagged;
        j["max_formula_deviation"] = num(r.max_formula_deviation);
        j["convention"] = r.convention;
        json cts = json::array();
        for (auto& t : r.counting) cts.push_back(counting_json(t));
        j["counting"] = cts;
        emit(c.report, j.dump(2) + "\n");
    }
    return r.flagged ? 1 : 0;
}

int cmd_solve(const RunConfig& c) {
    if (c.geometry == "suq2") throw ConfigError("solve: unsupported geometry suq2 (no order-one family exists)");
    json out = header("solve", c);
    TripleBundle b;
    DiracAnsatz a;
    SuiteOptions so;
    std::vector<Eigen::VectorXd> oracle;
    if (c.geometry == "torus") {
        TorusParams p = torus_params(c);
        b = build_torus(p);
        a = torus_ansatz(b);
        oracle = torus_oracle_directions(a, p.spin, !c.reality);
    } else {
        SphereParams p = sphere_params(c);
        b = build_sphere(p);
        a = sphere_ansatz(b);
        oracle = sphere_oracle_directions(a);
    }
    so.reality_asserted = c.reality;
    ConstraintOptions co;
    co.reality = c.reality;
    ConstraintSystem sys = assemble_constraints(a, b, co);
    SolutionFamily fam = solve_family(sys, a);
    ConstraintOptions only;
    only.reality = false;
    only.beta_selfadjoint = false;
    SolutionFamily oo = solve_family(assemble_constraints(a, b, only), a);

    out["unknowns"] = a.size();
    out["rows"] = {{"order_one", sys.order_one_rows}, {"reality", sys.reality_rows}, {"beta_selfadjoint", sys.beta_rows}};
    out["raw_kernel_dim"] = fam.raw_kernel_dim;
    out["kernel_dim"] = fam.kernel_dim;
    out["oracle_dim"] = oracle.size();
    out["oracle_span_deviation"] = num(span_deviation(fam, a, oracle));
    if (c.geometry == "sphere") out["imaginary_constant_span_deviation"] = num(span_deviation(fam, a, {sphere_imaginary_constant(a)}));

    json basis = json::array();
    for (int i = 0; i < fam.kernel_dim; ++i) {
        json fits = json::array();
        for (auto& f : fam.fits[i]) {
            json coeff = json::object();
            for (size_t k = 0; k < a.feature_names.size(); ++k) coeff[a.feature_names[k]] = chop(f.coefficients[k]);
            coeff["const"] = chop(f.coefficients.back());
            fits.push_back({{"group", f.group}, {"affine", f.affine}, {"residual", num(f.residual)}, {"coefficients", coeff}});
        }
        json values = json::object();
        for (int k = 0; k < a.size(); ++k)
            if (a.unknowns[k].core && std::abs(fam.basis(k, i)) > 1e-12) values[a.unknowns[k].label] = num(fam.basis(k, i));
        NegativeControl nc = negative_control(a, b, oo, fam.basis.col(i));
        basis.push_back({{"fits", fits},
                         {"core_values", values},
                         {"negative_control", {{"magnitude", nc.magnitude},
                                               {"base_violation", num(nc.base_violation)},
                                               {"perturbed_violation", num(nc.perturbed_violation)}}}});
    }
    out["basis"] = basis;
    if (c.geometry == "torus") {
        double worst = 0.0;
        const int n0 = 0, m0 = 0;
        for (char ch : {'+', '-'})
            for (auto& r : torus_recursions(a, n0, m0, ch)) worst = std::max(worst, row_space_residual(oo, r));
        out["recursion_row_space_residual"] = num(worst);
    }
    AxiomReport ver = verify_family(fam, a, b, so);
    long failed = 0;
    for (auto& ch : ver.checks)
        if (ch.asserted && !ch.pass) ++failed;
    out["verification"] = {{"checks", ver.checks.size()}, {"failed", failed}, {"passed", ver.all_asserted_pass()}};
    out["passed"] = ver.all_asserted_pass();
    emit(c.out, out.dump(2) + "\n");
    return ver.all_asserted_pass() ? 0 : 1;
}

int cmd_metric(const RunConfig& c) {
    json out = header("metric", c);
    bool ok = true;
    if (c.geometry == "torus") {
        TorusMetric m = torus_metric(torus_params(c));
        out["g"] = matrix_json(m.g);
        out["det"] = num(m.det);
        out["det_closed_form"] = num(m.det_closed_form);
        out["anticommutator_violation"] = num(m.anticommutator_violation);
        out["formula_deviation"] = num(m.formula_deviation);
        out["signature"] = {m.positive, m.negative};
        out["formal"] = m.formal;
        ok = m.anticommutator_violation <= 1e-9;
    } else if (c.geometry == "sphere") {
        SphereParams p = sphere_params(c);
        if (p.theta != 0.0 && !c.formal) throw ConfigError("metric: sphere needs theta = 0 (or --formal)");
        SphereMetric m = sphere_metric(p, c.formal);
        out["g"] = matrix_json(m.g);
        out["expected"] = matrix_json(m.expected);
        out["det"] = num(m.g.determinant());
        out["scalar_violation"] = num(m.scalar_violation);
        out["deviation"] = num(m.deviation);
        out["printed_forms_scalar_violation"] = num(m.printed_forms_scalar_violation);
        out["signature"] = {m.positive, m.negative};
        out["formal"] = m.formal;
        ok = m.scalar_violation <= 1e-9;
    } else {
        throw ConfigError("metric: unsupported geometry suq2");
    }
    out["passed"] = ok;
    emit(c.out, out.dump(2) + "\n");
    return ok ? 0 : 1;
}

}  // namespace ncl::cli
