#include "qcflow/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qcflow/calculus.hpp"
#include "qcflow/catalog.hpp"
#include "qcflow/chart.hpp"
#include "qcflow/flow.hpp"
#include "qcflow/seminorms.hpp"

namespace qcflow::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json to_json(const Vec& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Vec parse_vec(const std::string& s) {
    std::vector<double> vals;
    std::istringstream in(s);
    std::string part;
    while (std::getline(in, part, ',')) vals.push_back(std::stod(part));
    Vec v(static_cast<int>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i) v[static_cast<int>(i)] = vals[i];
    return v;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> vals;
    std::istringstream in(s);
    std::string part;
    while (std::getline(in, part, ',')) vals.push_back(std::stod(part));
    return vals;
}

json witness_json(const Witness& w) {
    json j;
    if (w.x.size()) j["x"] = to_json(w.x);
    if (w.a.size()) j["a"] = to_json(w.a);
    if (w.b.size()) j["b"] = to_json(w.b);
    return j;
}

json estimate_json(const SeminormEstimate& e) {
    return json{{"value", e.value}, {"p99", e.p99}, {"witness", witness_json(e.witness)}};
}

DomainBox domain_from_json(const json& j) {
    Vec lo = parse_vec("0"), hi = lo;
    std::vector<double> l = j.at("lo").get<std::vector<double>>();
    std::vector<double> h = j.at("hi").get<std::vector<double>>();
    lo = Vec::Map(l.data(), static_cast<int>(l.size()));
    hi = Vec::Map(h.data(), static_cast<int>(h.size()));
    return DomainBox(lo, hi);
}

/// A vector field or plane field from --catalog NAME or --spec FILE.
struct FieldSource {
    std::string catalog;
    std::string spec_path;

    json provenance() const {
        if (!catalog.empty()) return json{{"catalog", catalog}};
        return json{{"spec", spec_path}};
    }

    json load_spec() const {
        std::ifstream in(spec_path);
        if (!in) throw ParseError("cannot open spec file " + spec_path, 0);
        try {
            return json::parse(in);
        } catch (const json::parse_error& e) {
            throw ParseError(std::string("spec file: ") + e.what(), 0);
        }
    }

    VectorField field() const {
        if (!catalog.empty()) return load_catalog_field(catalog);
        const json j = load_spec();
        const int n = j.at("n").get<int>();
        DomainBox d = j.contains("domain") ? domain_from_json(j.at("domain"))
                                           : DomainBox::cube(n, 10.0);
        return VectorField::parsed(j.at("field").get<std::string>(), n, d);
    }

    PlaneFieldDef plane() const {
        if (!catalog.empty()) return load_catalog_plane(catalog);
        const json j = load_spec();
        const int n = j.at("n").get<int>();
        const int k = j.at("k").get<int>();
        DomainBox d = j.contains("domain") ? domain_from_json(j.at("domain"))
                                           : DomainBox::cube(n, 1.0);
        std::vector<VectorField> frame;
        for (const auto& s : j.at("frame"))
            frame.push_back(VectorField::parsed(s.get<std::string>(), n, d));
        return PlaneFieldDef(n, k, std::move(frame), d);
    }

    void attach(CLI::App* cmd) {
        cmd->add_option("--catalog", catalog, "built-in catalog entry");
        cmd->add_option("--spec", spec_path, "JSON field spec file");
    }
};

struct Common {
    std::uint64_t seed = 1;
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double fd_step = 1e-5;
    int grid = 5;
    std::string out_dir = ".";
    int threads = 1;

    void attach(CLI::App* cmd) {
        cmd->add_option("--seed", seed, "RNG seed");
        cmd->add_option("--rel-tol", rel_tol, "flow relative tolerance");
        cmd->add_option("--abs-tol", abs_tol, "flow absolute tolerance");
        cmd->add_option("--fd-step", fd_step, "finite-difference step");
        cmd->add_option("--grid", grid, "grid points per axis");
        cmd->add_option("--out-dir", out_dir, "output directory");
        cmd->add_option("--threads", threads,
                        "worker threads (results are thread-count independent)");
    }

    FlowMap flow_map(VectorField f) const {
        return FlowMap{std::move(f), rel_tol, abs_tol, 0.1};
    }
};

void emit(const json& report, const Common& common, const std::string& name) {
    fs::create_directories(common.out_dir);
    const fs::path path = fs::path(common.out_dir) / (name + "_report.json");
    std::ofstream out(path);
    out << report.dump(2) << "\n";
    std::cout << report.dump(2) << std::endl;
}

int involutivity_exit(const InvolutivityReport& rep) {
    return rep.involutive ? 0 : 4;
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
    CLI::App app{"numerical toolkit for rough vector fields, their flows, "
                 "and plane-field integrability"};
    app.require_subcommand(1);

    Common common;
    FieldSource src;

    // ---- seminorm
    auto* cmd_semi = app.add_subcommand("seminorm", "Q/Zygmund/Lipschitz/Sf estimates");
    src.attach(cmd_semi);
    common.attach(cmd_semi);
    int base_points = 200, pairs = 400, refine_steps = 20;
    std::string radii_arg;
    cmd_semi->add_option("--base-points", base_points);
    cmd_semi->add_option("--pairs", pairs);
    cmd_semi->add_option("--refine", refine_steps);
    cmd_semi->add_option("--radii", radii_arg, "comma-separated |a| radii");

    // ---- bracket
    auto* cmd_bracket = app.add_subcommand("bracket", "pointwise Lie bracket table");
    src.attach(cmd_bracket);
    std::string catalog_y, spec_y;
    cmd_bracket->add_option("--catalog-y", catalog_y, "second field (catalog)");
    cmd_bracket->add_option("--spec-y", spec_y, "second field (spec file)");
    common.attach(cmd_bracket);

    // ---- involutivity
    auto* cmd_inv = app.add_subcommand("involutivity", "plane-field involutivity residuals");
    src.attach(cmd_inv);
    common.attach(cmd_inv);
    int inv_grid = 10;
    cmd_inv->add_option("--residual-grid", inv_grid, "grid points per axis");

    // ---- flow
    auto* cmd_flow = app.add_subcommand("flow", "integrate a trajectory, CSV output");
    src.attach(cmd_flow);
    common.attach(cmd_flow);
    std::string x0_arg;
    double t_arg = 1.0;
    int samples = 100;
    cmd_flow->add_option("--x0", x0_arg, "start point, comma separated")->required();
    cmd_flow->add_option("--t", t_arg, "integration time");
    cmd_flow->add_option("--samples", samples, "CSV sample count");

    // ---- distortion
    auto* cmd_dist = app.add_subcommand("distortion", "K / det / Liouville report");
    src.attach(cmd_dist);
    common.attach(cmd_dist);
    std::string times_arg = "0.5,1";
    double div_bound = -1.0;
    cmd_dist->add_option("--times", times_arg, "comma-separated times");
    cmd_dist->add_option("--div-bound", div_bound,
                         "divergence bound (default: sampled max |div|)");

    // ---- commute
    auto* cmd_comm = app.add_subcommand("commute", "flow commutation defect");
    src.attach(cmd_comm);
    cmd_comm->add_option("--catalog-y", catalog_y, "second field (catalog)");
    cmd_comm->add_option("--spec-y", spec_y, "second field (spec file)");
    common.attach(cmd_comm);
    double s_arg = 0.5, t2_arg = 0.5;
    cmd_comm->add_option("--s", s_arg);
    cmd_comm->add_option("--t", t2_arg);

    // ---- mollify
    auto* cmd_moll = app.add_subcommand("mollify", "mollification flow-stability sequence");
    src.attach(cmd_moll);
    common.attach(cmd_moll);
    std::string eps_arg = "0.2,0.1,0.05,0.025";
    double moll_t = 0.5;
    double moll_margin = -1.0;
    cmd_moll->add_option("--eps", eps_arg, "comma-separated mollification scales");
    cmd_moll->add_option("--t", moll_t);
    cmd_moll->add_option("--margin", moll_margin,
                         "grid margin from the boundary (default: auto)");

    // ---- chart
    auto* cmd_chart = app.add_subcommand("chart", "build a straightening chart");
    src.attach(cmd_chart);
    common.attach(cmd_chart);
    std::string point_arg;
    int slices = 3, resolution = 33;
    cmd_chart->add_option("--point", point_arg, "base point (default: domain center)");
    cmd_chart->add_option("--slices", slices, "number of slice meshes");
    cmd_chart->add_option("--resolution", resolution, "mesh vertices per axis");

    // ---- catalog
    auto* cmd_cat = app.add_subcommand("catalog", "list built-in examples");
    common.attach(cmd_cat);

    std::vector<char*> argv;
    std::vector<std::string> storage = args;
    std::string prog = "qcflow";
    argv.push_back(prog.data());
    for (auto& a : storage) argv.push_back(a.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    const auto start = std::chrono::steady_clock::now();
    json report;
    report["command"] = args;
    std::string report_name;
    int exit_code = 0;

    try {
        if (*cmd_semi) {
            report_name = "seminorm";
            VectorField f = src.field();
            SamplingConfig cfg;
            cfg.base_points = base_points;
            cfg.direction_pairs = pairs;
            cfg.refine_steps = refine_steps;
            cfg.rng_seed = common.seed;
            if (!radii_arg.empty()) cfg.radii = parse_list(radii_arg);
            ChainVerdict chain = chain_check(f, cfg);
            SeminormEstimate q = estimate_q(f, cfg);
            SeminormEstimate z = estimate_zygmund(f, cfg);
            SeminormEstimate l = estimate_lipschitz(f, cfg);
            SeminormEstimate sf = estimate_sf_esssup(f, cfg, common.fd_step);
            report["config"] = {{"base_points", cfg.base_points},
                                {"direction_pairs", cfg.direction_pairs},
                                {"radii", cfg.radii},
                                {"seed", cfg.rng_seed},
                                {"refine_steps", cfg.refine_steps},
                                {"fd_step", common.fd_step}};
            report["results"] = {{"Q", estimate_json(q)},
                                 {"Zygmund", estimate_json(z)},
                                 {"Lipschitz", estimate_json(l)},
                                 {"Sf_esssup", estimate_json(sf)},
                                 {"chain", {{"q", chain.q},
                                            {"z", chain.z},
                                            {"l", chain.l},
                                            {"slack", chain.slack},
                                            {"verdict", chain.pass ? "PASS" : "FAIL"}}}};
        } else if (*cmd_bracket) {
            report_name = "bracket";
            VectorField X = src.field();
            FieldSource ysrc{catalog_y, spec_y};
            VectorField Y = ysrc.field();
            json table = json::array();
            const double width = (X.domain().hi - X.domain().lo).minCoeff();
            for (const Vec& x : make_grid(X.domain(), common.grid, 0.05 * width))
                table.push_back({{"point", to_json(x)},
                                 {"bracket", to_json(lie_bracket(X, Y, x, common.fd_step))}});
            report["config"] = {{"grid", common.grid}, {"fd_step", common.fd_step}};
            report["results"] = {{"table", table}};
        } else if (*cmd_inv) {
            report_name = "involutivity";
            PlaneFieldDef E = src.plane();
            const double width = (E.domain.hi - E.domain.lo).minCoeff();
            const auto grid = make_grid(E.domain, inv_grid, 0.05 * width);
            InvolutivityReport rep = involutivity_residual(E, grid, common.fd_step);
            report["config"] = {{"residual_grid", inv_grid}, {"fd_step", common.fd_step}};
            report["results"] = {{"max_residual", rep.max_residual},
                                 {"p99", rep.p99},
                                 {"worst_point", to_json(rep.worst_point)},
                                 {"gate", rep.gate},
                                 {"involutive", rep.involutive}};
            exit_code = involutivity_exit(rep);
        } else if (*cmd_flow) {
            report_name = "flow";
            VectorField f = src.field();
            FlowMap F = common.flow_map(f);
            const Vec x0 = parse_vec(x0_arg);
            fs::create_directories(common.out_dir);
            const fs::path csv_path = fs::path(common.out_dir) / "flow_trajectory.csv";
            std::ofstream csv(csv_path);
            csv.precision(17);
            csv << "t";
            for (int i = 1; i <= f.dim(); ++i) csv << ",x" << i;
            csv << "\n";
            Vec x = x0;
            double t_prev = 0.0;
            for (int sidx = 0; sidx <= samples; ++sidx) {
                const double ti = t_arg * sidx / samples;
                x = flow(F, x, ti - t_prev);
                t_prev = ti;
                csv << ti;
                for (int i = 0; i < f.dim(); ++i) csv << "," << x[i];
                csv << "\n";
            }
            report["config"] = {{"x0", to_json(x0)}, {"t", t_arg},
                                {"rel_tol", common.rel_tol}, {"abs_tol", common.abs_tol}};
            report["results"] = {{"endpoint", to_json(x)},
                                 {"trajectory_csv", csv_path.string()}};
        } else if (*cmd_dist) {
            report_name = "distortion";
            VectorField f = src.field();
            FlowMap F = common.flow_map(f);
            const double width = (f.domain().hi - f.domain().lo).minCoeff();
            const auto grid = make_grid(f.domain(), common.grid, 0.2 * width);
            const auto times = parse_list(times_arg);
            if (div_bound < 0) {
                div_bound = 0.0;
                for (const Vec& x : grid)
                    div_bound = std::max(div_bound,
                                         std::abs(divergence(f, x, common.fd_step)));
            }
            json per_time = json::array();
            const QcGrowthProfile profile = qc_growth_profile(F, grid, times, common.fd_step);
            for (const auto& [t, K] : profile.profile) per_time.push_back({{"t", t}, {"max_K", K}});
            LiouvilleReport liou = liouville_check(F, grid, times, div_bound, common.fd_step);
            report["config"] = {{"times", times}, {"grid", common.grid},
                                {"div_bound", div_bound}, {"fd_step", common.fd_step}};
            report["results"] = {{"profile", per_time},
                                 {"c_fit", profile.c_fit},
                                 {"fit_residual", profile.fit_residual},
                                 {"liouville_pass", liou.pass},
                                 {"liouville_violations", liou.violations.size()}};
            if (!liou.pass) exit_code = 4;
        } else if (*cmd_comm) {
            report_name = "commute";
            VectorField X = src.field();
            FieldSource ysrc{catalog_y, spec_y};
            VectorField Y = ysrc.field();
            const double width = (X.domain().hi - X.domain().lo).minCoeff();
            const auto grid = make_grid(X.domain(), common.grid, 0.3 * width);
            const double defect =
                commutation_defect(common.flow_map(X), common.flow_map(Y), grid, s_arg, t2_arg);
            report["config"] = {{"s", s_arg}, {"t", t2_arg}, {"grid", common.grid}};
            report["results"] = {{"defect", defect}};
        } else if (*cmd_moll) {
            report_name = "mollify";
            VectorField f = src.field();
            const auto eps_list = parse_list(eps_arg);
            double max_eps = 0.0;
            for (double e : eps_list) max_eps = std::max(max_eps, e);
            const double width = (f.domain().hi - f.domain().lo).minCoeff();
            const double margin = moll_margin > 0
                                      ? moll_margin
                                      : std::min(0.45 * width, 2.0 * max_eps + 0.3 * width);
            const auto grid = make_grid(f.domain(), common.grid, margin);
            const auto seq = mollification_stability(f, eps_list, grid, moll_t,
                                                     common.rel_tol, common.abs_tol);
            json jseq = json::array();
            bool decreasing = true;
            for (std::size_t i = 0; i < seq.size(); ++i) {
                jseq.push_back({{"eps", seq[i].first}, {"l1_error", seq[i].second}});
                if (i > 0 && !(seq[i].second < seq[i - 1].second)) decreasing = false;
            }
            report["config"] = {{"eps", eps_list}, {"t", moll_t}, {"grid", common.grid}};
            report["results"] = {{"sequence", jseq}, {"strictly_decreasing", decreasing}};
        } else if (*cmd_chart) {
            report_name = "chart";
            PlaneFieldDef E = src.plane();
            const Vec p = point_arg.empty() ? E.domain.center() : parse_vec(point_arg);
            ChartConfig cfg;
            cfg.rel_tol = common.rel_tol;
            cfg.abs_tol = common.abs_tol;
            cfg.fd_step = common.fd_step;
            Chart C = build_chart(E, p, cfg);

            // Q estimates of the lifted frame fields, sampled inside the chart.
            SamplingConfig scfg;
            scfg.base_points = 40;
            scfg.direction_pairs = 60;
            scfg.refine_steps = 10;
            scfg.rng_seed = common.seed;
            scfg.radii = {C.eps / 4, C.eps / 8, C.eps / 16};
            json lifted_q = json::array();
            DomainBox local(Vec(C.p.array() - 1.5 * C.eps), Vec(C.p.array() + 1.5 * C.eps));
            for (const VectorField& X : C.lifted)
                lifted_q.push_back(estimate_q(X.with_domain(local), scfg).value);

            fs::create_directories(common.out_dir);
            json jslices = json::array();
            for (int si = 0; si < slices; ++si) {
                const double cval =
                    slices == 1 ? 0.0
                                : -0.5 * C.eps + C.eps * si / (slices - 1.0);
                Vec c = Vec::Constant(E.n - E.k, cval);
                SliceMesh mesh = trace_slice(C, c, resolution);
                const fs::path csv_path =
                    fs::path(common.out_dir) / ("slice_" + std::to_string(si) + ".csv");
                std::ofstream csv(csv_path);
                csv << slice_mesh_csv(mesh);
                jslices.push_back({{"c", to_json(c)},
                                   {"csv", csv_path.string()},
                                   {"max_residual", mesh.max_residual}});
            }
            report["config"] = {{"point", to_json(p)},
                                {"slices", slices},
                                {"resolution", resolution},
                                {"rel_tol", common.rel_tol}};
            report["results"] = {{"p", to_json(C.p)},
                                 {"eps", C.eps},
                                 {"eps0", C.eps0},
                                 {"split", {{"tangent", C.split.tangent},
                                            {"normal", C.split.normal},
                                            {"margin", C.split.margin}}},
                                 {"lifted_q_estimates", lifted_q},
                                 {"slices", jslices}};
        } else if (*cmd_cat) {
            report_name = "catalog";
            json entries = json::array();
            for (const auto& e : list_catalog())
                entries.push_back({{"name", e.name},
                                   {"description", e.description},
                                   {"kind", e.plane_field ? "plane-field" : "vector-field"}});
            report["results"] = {{"entries", entries}};
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const UnknownCatalogEntry& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InvolutivityGateError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }

    const auto elapsed = std::chrono::steady_clock::now() - start;
    report["timing_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
    if (!src.catalog.empty() || !src.spec_path.empty())
        report["provenance"] = src.provenance();
    emit(report, common, report_name);
    return exit_code;
}

}  // namespace qcflow::cli
