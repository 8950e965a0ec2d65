// conicflow: sojourn relations, WKB parametrix, and Schrodinger experiments on
// asymptotically conic metrics.
#include <json.hpp>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <future>
#include <random>
#include <atomic>
#include <iostream>
#include <sstream>

#include "conicflow/config.hpp"
#include "conicflow/geodesic.hpp"
#include "conicflow/output.hpp"
#include "conicflow/parametrix.hpp"
#include "conicflow/schrodinger.hpp"
#include "conicflow/sojourn.hpp"
#include "conicflow/wfsc.hpp"

using json = nlohmann::ordered_json;
using namespace conicflow;

namespace {

//----------------- shared helpers -----------------//

std::string artifact_path(const RunConfig& cfg, const std::string& name) {
    return (std::filesystem::path(cfg.output_dir()) / name).string();
}

json provenance_json(const std::string& command, const RunConfig& cfg) {
    json p;
    p["tool"] = "conicflow";
    p["version"] = kVersion;
    p["command"] = command;
    p["config"] = cfg.raw_lines();
    return p;
}

void write_json(const RunConfig& cfg, const std::string& name, const json& body) {
    write_file_atomic(artifact_path(cfg, name), body.dump(2) + "\n");
}

struct DetRng {  // deterministic uniforms independent of the standard library
    std::mt19937_64 gen;
    explicit DetRng(uint64_t seed) : gen(seed) {}
    double uniform(double a, double b) {
        return a + (b - a) * (double(gen() >> 11) * 0x1.0p-53);
    }
    Vec direction2() {
        double th = uniform(-M_PI, M_PI);
        return (Vec(2) << std::cos(th), std::sin(th)).finished();
    }
};

FlowOptions flow_options(const RunConfig& cfg, const char* section) {
    FlowOptions opt;
    opt.tol = cfg.get_real_or(section, "tol", 1e-9);
    opt.x_switch = cfg.get_real_or(section, "x_switch", 0.0);
    opt.x_stop = cfg.get_real_or(section, "x_stop", 1e-5);
    opt.s_max = cfg.get_real_or(section, "s_max", 0.0);
    return opt;
}

double angle_of(const Vec& v) { return std::atan2(v(1), v(0)); }

//----------------- commands -----------------//

void cmd_flow(const RunConfig& cfg) {
    ScatteringMetric m = cfg.build_metric();
    Vec w = cfg.get_vec("flow", "w");
    Vec dir = cfg.get_vec("flow", "direction");
    double s_max = cfg.get_real("flow", "s_max");
    double tol = cfg.get_real_or("flow", "tol", 1e-9);
    long samples = cfg.get_int_or("flow", "samples", 200);
    cfg.check_unknown_keys();

    Vec eta = m.unit_covector(w, dir);
    InteriorTrajectory traj = integrate_interior(m, w, eta, s_max, tol);
    std::ostringstream os;
    os << provenance_comment("flow", cfg);
    os << "s,z1,z2,zeta1,zeta2,onshell_residual\n";
    for (long k = 0; k <= samples; ++k) {
        double s = traj.s_end() * double(k) / double(samples);
        InteriorCotangentState st = traj.at(s);
        double resid = 0;
        if (st.z.norm() > 1.0 / m.x0()) {
            BCoordState b = to_B_coords(m, st);
            Mat hinv = m.boundary_metric(b.x, b.y).h.ldlt().solve(Mat::Identity(1, 1));
            resid = b.kappa - 0.5 * (b.lambda * b.lambda + b.mu.dot(hinv * b.mu));
        }
        os << fmt17(s) << "," << fmt17(st.z(0)) << "," << fmt17(st.z(1)) << ","
           << fmt17(st.zeta(0)) << "," << fmt17(st.zeta(1)) << "," << fmt17(resid) << "\n";
    }
    write_file_atomic(artifact_path(cfg, "flow.csv"), os.str());
}

void cmd_classify(const RunConfig& cfg) {
    ScatteringMetric m = cfg.build_metric();
    Vec w = cfg.get_vec("classify", "w");
    Vec dir = cfg.get_vec("classify", "direction");
    double s_max = cfg.get_real_or("classify", "s_max", 0.0);
    FlowOptions opt = flow_options(cfg, "classify");
    cfg.check_unknown_keys();

    RayClassification rc = classify_ray(m, w, m.unit_covector(w, dir), s_max, opt);
    json out;
    out["provenance"] = provenance_json("classify", cfg);
    out["tag"] = rc.tag == RayTag::nontrapped ? "nontrapped" : "undecided";
    out["escape_s"] = rc.escape_s;
    out["s_max_used"] = rc.s_max_used;
    write_json(cfg, "classify.json", out);
}

std::string sojourn_row(const ScatteringMetric& m, const Vec& w, const Vec& eta, double tol,
                        const FlowOptions& opt, bool backward) {
    std::ostringstream os;
    os << fmt17(w(0)) << "," << fmt17(w(1)) << "," << fmt17(eta(0)) << "," << fmt17(eta(1))
       << ",";
    try {
        SojournData sd = backward ? sojourn_backward(m, {w, eta}, tol, opt)
                                  : sojourn_forward(m, {w, eta}, tol, opt);
        os << fmt17(sd.y0(0)) << "," << fmt17(sd.nu) << "," << fmt17(sd.mu(0)) << ","
           << fmt17(sd.error_estimate) << ",nontrapped";
    } catch (const DomainError&) {
        os << ",,,,undecided";
    }
    return os.str();
}

void cmd_sojourn(const RunConfig& cfg) {
    ScatteringMetric m = cfg.build_metric();
    Vec w = cfg.get_vec("sojourn", "w");
    Vec dir = cfg.get_vec("sojourn", "direction");
    std::string which = cfg.get_string_or("sojourn", "which", "forward");
    double tol = cfg.get_real_or("sojourn", "tol", 1e-8);
    FlowOptions opt = flow_options(cfg, "sojourn");
    cfg.check_unknown_keys();
    if (which != "forward" && which != "backward")
        throw DomainError("sojourn.which must be forward or backward");

    Vec eta = m.unit_covector(w, dir);
    // single-seed command: an undecided (possibly trapped) ray is a domain error
    SojournData sd = which == "backward" ? sojourn_backward(m, {w, eta}, tol, opt)
                                         : sojourn_forward(m, {w, eta}, tol, opt);
    std::ostringstream os;
    os << provenance_comment("sojourn", cfg);
    os << "w1,w2,eta1,eta2,y0,nu,mu,error_estimate,classification\n";
    os << fmt17(w(0)) << "," << fmt17(w(1)) << "," << fmt17(eta(0)) << "," << fmt17(eta(1))
       << "," << fmt17(sd.y0(0)) << "," << fmt17(sd.nu) << "," << fmt17(sd.mu(0)) << ","
       << fmt17(sd.error_estimate) << ",nontrapped\n";
    write_file_atomic(artifact_path(cfg, "sojourn.csv"), os.str());
}

void cmd_sojourn_table(const RunConfig& cfg) {
    ScatteringMetric m = cfg.build_metric();
    long n = cfg.get_int_or("sojourn_table", "n_seeds", 50);
    double w_max = cfg.get_real_or("sojourn_table", "w_max", 5.0);
    double tol = cfg.get_real_or("sojourn_table", "tol", 1e-8);
    std::string which = cfg.get_string_or("sojourn_table", "which", "forward");
    FlowOptions opt = flow_options(cfg, "sojourn_table");
    uint64_t seed = cfg.seed();
    cfg.check_unknown_keys();
    bool backward = which == "backward";

    DetRng rng(seed);
    std::vector<std::pair<Vec, Vec>> seeds;
    for (long k = 0; k < n; ++k) {
        Vec w = rng.uniform(0, w_max) * rng.direction2();
        Vec eta = m.unit_covector(w, rng.direction2());
        seeds.emplace_back(w, eta);
    }
    std::vector<std::string> rows(seeds.size());
    int threads = thread_count();
    std::vector<std::future<void>> futs;
    std::atomic<size_t> next{0};
    for (int t = 0; t < threads; ++t)
        futs.push_back(std::async(std::launch::async, [&] {
            for (size_t k = next.fetch_add(1); k < seeds.size(); k = next.fetch_add(1))
                rows[k] = sojourn_row(m, seeds[k].first, seeds[k].second, tol, opt, backward);
        }));
    for (auto& f : futs) f.get();

    std::ostringstream os;
    os << provenance_comment("sojourn-table", cfg);
    os << "w1,w2,eta1,eta2,y0,nu,mu,error_estimate,classification\n";
    for (auto& r : rows) os << r << "\n";
    write_file_atomic(artifact_path(cfg, "sojourn_table.csv"), os.str());
}

void cmd_contact_check(const RunConfig& cfg) {
    ScatteringMetric m = cfg.build_metric();
    long n = cfg.get_int_or("contact_check", "n_seeds", 20);
    double fd_step = cfg.get_real_or("contact_check", "fd_step", 1e-5);
    double w_lo = cfg.get_real_or("contact_check", "w_min", 0.2);
    double w_hi = cfg.get_real_or("contact_check", "w_max", 4.0);
    uint64_t seed = cfg.seed();
    cfg.check_unknown_keys();

    DetRng rng(seed);
    std::ostringstream os;
    os << provenance_comment("contact-check", cfg);
    os << "w1,w2,eta1,eta2,defect\n";
    double worst = 0;
    for (long k = 0; k < n; ++k) {
        Vec w = rng.uniform(w_lo, w_hi) * rng.direction2();
        Vec eta = m.unit_covector(w, rng.direction2());
        double d = contact_defect(m, {w, eta}, fd_step);
        worst = std::max(worst, d);
        os << fmt17(w(0)) << "," << fmt17(w(1)) << "," << fmt17(eta(0)) << "," << fmt17(eta(1))
           << "," << fmt17(d) << "\n";
    }
    write_file_atomic(artifact_path(cfg, "contact_check.csv"), os.str());
    json out;
    out["provenance"] = provenance_json("contact-check", cfg);
    out["n_seeds"] = n;
    out["fd_step"] = fd_step;
    out["max_defect"] = worst;
    write_json(cfg, "contact_check.json", out);
}

void cmd_invert(const RunConfig& cfg) {
    ScatteringMetric m = cfg.build_metric();
    SojournData target;
    target.y0 = Vec::Constant(1, cfg.get_real("invert", "y0"));
    target.nu = cfg.get_real("invert", "nu");
    target.mu = Vec::Constant(1, cfg.get_real("invert", "mu"));
    std::string which = cfg.get_string_or("invert", "which", "forward");
    double tol = cfg.get_real_or("invert", "tol", 1e-7);
    cfg.check_unknown_keys();
    if (which != "forward" && which != "backward")
        throw DomainError("invert.which must be forward or backward");

    SourcePoint src = invert_sojourn(
        m, target, which == "backward" ? SojournKind::backward : SojournKind::forward, tol);
    json out;
    out["provenance"] = provenance_json("invert", cfg);
    out["w"] = {src.w(0), src.w(1)};
    out["eta_hat"] = {src.eta_hat(0), src.eta_hat(1)};
    out["tol"] = tol;
    write_json(cfg, "invert.json", out);
}

void cmd_predict(const RunConfig& cfg) {
    ScatteringMetric m = cfg.build_metric();
    SojournData q;
    q.y0 = Vec::Constant(1, cfg.get_real("predict", "y0"));
    q.nu = cfg.get_real("predict", "nu");
    q.mu = Vec::Constant(1, cfg.get_real("predict", "mu"));
    double t = cfg.get_real("predict", "t");
    double tol = cfg.get_real_or("predict", "tol", 1e-7);
    cfg.check_unknown_keys();

    SourcePoint src = predict_interior_wf(m, q, t, tol);
    json out;
    out["provenance"] = provenance_json("predict", cfg);
    out["w"] = {src.w(0), src.w(1)};
    out["eta_hat"] = {src.eta_hat(0), src.eta_hat(1)};
    out["t"] = t;
    write_json(cfg, "predict.json", out);
}

void cmd_phase(const RunConfig& cfg) {
    ScatteringMetric m = cfg.build_metric();
    Vec w = cfg.get_vec("phase", "w");
    Vec z = cfg.get_vec("phase", "z");
    double fd = cfg.get_real_or("phase", "fd_step", 1e-6);
    cfg.check_unknown_keys();

    GeodesicSegment seg = geodesic_bvp(m, w, z);
    json out;
    out["provenance"] = provenance_json("phase", cfg);
    out["distance"] = seg.length;
    out["phi"] = 0.5 * seg.length * seg.length;
    out["eikonal_residual"] = eikonal_residual(m, w, z, fd);
    out["endpoint_miss"] = seg.endpoint_miss;
    write_json(cfg, "phase.json", out);
}

void cmd_amplitude(const RunConfig& cfg) {
    ScatteringMetric m = cfg.build_metric();
    Vec w = cfg.get_vec("amplitude", "w");
    Vec z = cfg.get_vec("amplitude", "z");
    long order = cfg.get_int_or("amplitude", "order", 0);
    cfg.check_unknown_keys();

    TransportOptions topt;
    GeodesicSegment seg = geodesic_bvp(m, w, z);
    json out;
    out["provenance"] = provenance_json("amplitude", cfg);
    out["distance"] = seg.length;
    out["a0"] = transport_a0(m, seg, topt);
    if (order >= 1) {
        Cplx a1 = transport_a1(m, seg, topt);
        out["a1_re"] = a1.real();
        out["a1_im"] = a1.imag();
    }
    out["metadata"] = {{"hess_step", topt.hess_step},
                       {"tube_step", topt.tube_step},
                       {"quad_nodes", topt.quad_nodes}};
    write_json(cfg, "amplitude.json", out);
}

void cmd_parametrix_eval(const RunConfig& cfg) {
    ScatteringMetric m = cfg.build_metric();
    Vec w = cfg.get_vec("parametrix", "w");
    double t = cfg.get_real("parametrix", "t");
    long order = cfg.get_int_or("parametrix", "order", 0);
    double iota = cfg.get_real("parametrix", "iota");
    long n = cfg.get_int_or("parametrix", "n", 41);
    cfg.check_unknown_keys();

    ParametrixKernel ker(m, int(order), iota);
    double half = 0.55 * iota;
    std::ostringstream os;
    os << provenance_comment("parametrix-eval", cfg);
    os << "z1,z2,re,im\n";
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) {
            Vec z = w;
            z(0) += -half + 2 * half * double(i) / double(n - 1);
            z(1) += -half + 2 * half * double(j) / double(n - 1);
            Cplx v = ker.eval(z, w, t);
            os << fmt17(z(0)) << "," << fmt17(z(1)) << "," << fmt17(v.real()) << ","
               << fmt17(v.imag()) << "\n";
        }
    write_file_atomic(artifact_path(cfg, "parametrix_eval.csv"), os.str());
}

void cmd_parametrix_residual(const RunConfig& cfg) {
    ScatteringMetric m = cfg.build_metric();
    Vec w = cfg.get_vec("parametrix", "w");
    long order = cfg.get_int_or("parametrix", "order", 0);
    double iota = cfg.get_real("parametrix", "iota");
    double t_lo = cfg.get_real_or("parametrix", "t_lo", 1e-3);
    double t_hi = cfg.get_real_or("parametrix", "t_hi", 1e-1);
    long n_t = cfg.get_int_or("parametrix", "n_t", 9);
    long n_radii = cfg.get_int_or("parametrix", "n_radii", 3);
    long n_angles = cfg.get_int_or("parametrix", "n_angles", 6);
    cfg.check_unknown_keys();

    std::vector<double> ts;
    for (long k = 0; k < n_t; ++k)
        ts.push_back(t_lo * std::pow(t_hi / t_lo, double(k) / double(n_t - 1)));
    ParametrixKernel ker(m, int(order), iota);
    ResidualOrderResult res = residual_order(ker, w, int(n_radii), int(n_angles), ts);

    std::ostringstream os;
    os << provenance_comment("parametrix-residual", cfg);
    os << "t,residual_norm\n";
    for (auto& [t, nrm] : res.norms) os << fmt17(t) << "," << fmt17(nrm) << "\n";
    write_file_atomic(artifact_path(cfg, "parametrix_residual.csv"), os.str());

    json out;
    out["provenance"] = provenance_json("parametrix-residual", cfg);
    out["slope"] = res.slope;
    out["order"] = order;
    out["t_used"] = {res.used_t_range.first, res.used_t_range.second};
    out["n_grid"] = res.n_grid;
    out["max_outside_cutoff"] = res.max_outside_cutoff;
    write_json(cfg, "parametrix_residual.json", out);
}

SolverConfig solver_config(const RunConfig& cfg) {
    SolverConfig sc;
    std::string scheme = cfg.get_string_or("solver", "scheme", "splitstep");
    if (scheme == "splitstep")
        sc.scheme = Scheme::splitstep;
    else if (scheme == "cranknicolson")
        sc.scheme = Scheme::cranknicolson;
    else
        throw DomainError("solver.scheme must be splitstep or cranknicolson");
    sc.dt = cfg.get_real_or("solver", "dt", 1e-3);
    sc.sponge_width = cfg.get_real_or("solver", "sponge_width", 0.0);
    sc.sponge_strength = cfg.get_real_or("solver", "sponge_strength", 2.0);
    sc.krylov_tol = cfg.get_real_or("solver", "krylov_tol", 1e-10);
    sc.krylov_maxit = int(cfg.get_int_or("solver", "krylov_maxit", 500));
    return sc;
}

void cmd_evolve(const RunConfig& cfg) {
    ScatteringMetric m = cfg.build_metric();
    int N = int(cfg.get_int("grid", "N"));
    double box = cfg.get_real("grid", "box");
    SolverConfig sc = solver_config(cfg);
    double t_final = cfg.get_real("evolve", "t_final");
    std::string snap = cfg.get_string_or("evolve", "snapshot", "field.cflw");

    std::string kind = cfg.get_string("data", "kind");
    WavefieldGrid g = WavefieldGrid::zeros(2, N, box);
    if (kind == "gaussian") {
        Vec c = cfg.get_vec("data", "center");
        Vec k = cfg.get_vec_or("data", "momentum", Vec::Zero(2));
        double sigma = cfg.get_real("data", "sigma");
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                Vec z = (Vec(2) << g.axis_coord(i), g.axis_coord(j)).finished();
                double r2 = (z - c).squaredNorm();
                g.at(i, j) = std::exp(std::complex<double>(-r2 / (2 * sigma * sigma), k.dot(z)));
            }
    } else if (kind == "quadratic") {
        Vec w0 = cfg.get_vec("data", "w0");
        double T = cfg.get_real("data", "T");
        double R1 = cfg.get_real("data", "R1");
        double R2 = cfg.get_real("data", "R2");
        g = make_quadratic_data(2, N, box, w0, T, R1, R2, sc.sponge_width);
    } else {
        throw DomainError("data.kind must be gaussian or quadratic");
    }
    cfg.check_unknown_keys();

    EvolveReport rep = evolve(m, g, sc, t_final);
    save_snapshot(g, artifact_path(cfg, snap));
    json out;
    out["provenance"] = provenance_json("evolve", cfg);
    out["t_final"] = t_final;
    out["steps"] = rep.steps;
    out["mass_initial"] = rep.mass_initial;
    out["mass_final"] = rep.mass_final;
    out["mass_drift"] = rep.mass_drift;
    out["absorbed"] = rep.absorbed;
    out["energy_initial"] = rep.energy_initial;
    out["energy_final"] = rep.energy_final;
    out["snapshot"] = snap;
    write_json(cfg, "evolve.json", out);
}

void cmd_focus(const RunConfig& cfg) {
    ScatteringMetric m = cfg.build_metric();
    Vec w0 = cfg.get_vec("focus", "w0");
    double T = cfg.get_real("focus", "T");
    FocusParams fp;
    fp.N = int(cfg.get_int_or("focus", "N", 512));
    fp.box = cfg.get_real_or("focus", "box", 20.0);
    fp.R1 = cfg.get_real_or("focus", "R1", 0.0);
    fp.R2 = cfg.get_real_or("focus", "R2", 0.0);
    double t_eval = cfg.get_real_or("focus", "t_eval", 0.0);
    bool run_control = cfg.get_int_or("focus", "run_control", 1) != 0;
    SolverConfig sc = solver_config(cfg);
    cfg.check_unknown_keys();

    FocusReport rep = focusing_experiment(m, w0, T, fp, sc, t_eval);
    json out;
    out["provenance"] = provenance_json("focus", cfg);
    out["w0"] = {w0(0), w0(1)};
    out["T"] = T;
    out["peak_location"] = {rep.peak_location(0), rep.peak_location(1)};
    out["peak_offset_cells"] = (rep.peak_location - w0).norm() / (2 * fp.box / fp.N);
    out["peak_value"] = rep.peak_value;
    out["background"] = rep.background;
    out["ratio"] = rep.ratio;
    out["diffraction_width"] = rep.diffraction_width;
    out["conclusive"] = rep.conclusive;
    out["mass_drift"] = rep.evolution.mass_drift;
    if (run_control) {
        FocusReport ctrl = focusing_experiment(m, w0, T, fp, sc, T / 2);
        out["control_ratio_at_half_T"] = ctrl.ratio;
        out["defocus_factor"] = rep.ratio / ctrl.ratio;
    }
    write_json(cfg, "focus.json", out);
}

void cmd_wfsc(const RunConfig& cfg) {
    std::string snap = cfg.get_string("wfsc", "snapshot");
    double box = cfg.get_real("wfsc", "box");
    double t = cfg.get_real("wfsc", "t");
    WfscParams p;
    p.y0 = cfg.get_real("wfsc", "y0");
    p.cone_half_angle = cfg.get_real_or("wfsc", "cone_half_angle", 0.3);
    p.n_rays = int(cfg.get_int_or("wfsc", "n_rays", 9));
    p.R1 = cfg.get_real_or("wfsc", "R1", 0.0);
    p.R2 = cfg.get_real_or("wfsc", "R2", 0.0);
    p.strength_threshold = cfg.get_real_or("wfsc", "strength_threshold", 1e-3);
    cfg.check_unknown_keys();

    WavefieldGrid g = load_snapshot(snap);
    g.box = box;
    auto dets = estimate_wfsc(g, t, p);
    std::ostringstream os;
    os << provenance_comment("wfsc", cfg);
    os << "y,nu,mu,strength\n";
    for (auto& d : dets)
        os << fmt17(d.y(0)) << "," << fmt17(d.nu) << "," << fmt17(d.mu(0)) << ","
           << fmt17(d.strength) << "\n";
    write_file_atomic(artifact_path(cfg, "wfsc.csv"), os.str());
}

//----------------- dispatch -----------------//

const char* kHelp = R"(usage: conicflow <command> <config-file>

Commands and their config keys (flat sectioned key = value files; arrays are
bracketed: w = [2, 1]).  Every command reads [metric] (family = euclidean |
conformal_bump | surface_revolution with dim, x0, eps, bump_radius,
bump_center, amp, r1, r2, x_interior), optional [potential] (amplitude,
center, inner_radius, outer_radius), and [run] (seed, output_dir).

  flow                 [flow] w, direction, s_max, tol, samples
                       -> flow.csv (s, base, fiber, on-shell residual)
  classify             [classify] w, direction, s_max, tol -> classify.json
  sojourn              [sojourn] w, direction, which, tol -> sojourn.csv
  sojourn-table        [sojourn_table] n_seeds, w_max, which, tol
                       -> sojourn_table.csv
  contact-check        [contact_check] n_seeds, fd_step, w_min, w_max
                       -> contact_check.csv, contact_check.json
  invert               [invert] y0, nu, mu, which, tol -> invert.json
  predict              [predict] y0, nu, mu, t, tol -> predict.json
  phase                [phase] w, z, fd_step -> phase.json
  amplitude            [amplitude] w, z, order -> amplitude.json
  parametrix-eval      [parametrix] w, t, order, iota, n -> parametrix_eval.csv
  parametrix-residual  [parametrix] w, order, iota, t_lo, t_hi, n_t, n_radii,
                       n_angles -> parametrix_residual.{csv,json}
  evolve               [grid] N, box; [data] kind (gaussian: center, momentum,
                       sigma | quadratic: w0, T, R1, R2); [solver] scheme, dt,
                       sponge_width, sponge_strength, krylov_tol, krylov_maxit;
                       [evolve] t_final, snapshot -> snapshot, evolve.json
  focus                [focus] w0, T, N, box, R1, R2, t_eval, run_control;
                       [solver] ... -> focus.json
  wfsc                 [wfsc] snapshot, box, t, y0, cone_half_angle, n_rays,
                       R1, R2, strength_threshold -> wfsc.csv

Environment: CONICFLOW_OUTDIR overrides [run] output_dir; CONICFLOW_THREADS
sets the worker count for batch seed sweeps.

Exit codes: 0 success, 2 domain/config error, 3 numerical non-convergence.
Errors are reported as a JSON object on standard error.
)";

int error_exit(int code, const char* kind, const std::string& msg) {
    json err;
    err["error"] = {{"exit_code", code}, {"kind", kind}, {"message", msg}};
    std::cerr << err.dump() << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc >= 2 && (!std::strcmp(argv[1], "--help") || !std::strcmp(argv[1], "-h"))) {
        std::fputs(kHelp, stdout);
        return 0;
    }
    if (argc != 3) {
        std::fputs(kHelp, stderr);
        return 2;
    }
    std::string command = argv[1];
    using Handler = std::function<void(const RunConfig&)>;
    static const std::map<std::string, Handler> handlers = {
        {"flow", cmd_flow},
        {"classify", cmd_classify},
        {"sojourn", cmd_sojourn},
        {"sojourn-table", cmd_sojourn_table},
        {"contact-check", cmd_contact_check},
        {"invert", cmd_invert},
        {"predict", cmd_predict},
        {"phase", cmd_phase},
        {"amplitude", cmd_amplitude},
        {"parametrix-eval", cmd_parametrix_eval},
        {"parametrix-residual", cmd_parametrix_residual},
        {"evolve", cmd_evolve},
        {"focus", cmd_focus},
        {"wfsc", cmd_wfsc},
    };
    auto h = handlers.find(command);
    if (h == handlers.end())
        return error_exit(2, "domain", "unknown command '" + command + "'");
    try {
        RunConfig cfg = RunConfig::parse_file(argv[2]);
        h->second(cfg);
    } catch (const DomainError& e) {
        return error_exit(2, "domain", e.what());
    } catch (const NonConvergence& e) {
        return error_exit(3, "nonconvergence", e.what());
    } catch (const NumericalError& e) {
        return error_exit(3, "numerical", e.what());
    } catch (const std::exception& e) {
        return error_exit(3, "internal", e.what());
    }
    return 0;
}
