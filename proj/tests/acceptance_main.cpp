// Acceptance suite: one pass/fail line per criterion, nonzero exit on failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "conicflow/parametrix.hpp"
#include "conicflow/schrodinger.hpp"
#include "conicflow/sojourn.hpp"
#include "conicflow/wfsc.hpp"
#include "oracles.hpp"

using namespace conicflow;

namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }

ScatteringMetric bump_metric(double eps = 0.1) {
    return ScatteringMetric::conformal_bump(2, eps, 1.0, (Vec(2) << 0.2, -0.3).finished());
}

double angdiff(double a, double b) { return std::remainder(a - b, 2.0 * M_PI); }

struct Harness {
    int failures = 0;
    void run(int idx, const std::string& name, const std::function<std::string()>& body) {
        auto t0 = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = true;
        try {
            detail = body();
        } catch (const std::exception& e) {
            ok = false;
            detail = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!ok) ++failures;
        std::printf("[%s] criterion %2d: %s (%s; %.1f s)\n", ok ? "PASS" : "FAIL", idx,
                    name.c_str(), detail.c_str(), secs);
        std::fflush(stdout);
    }
};

struct Check {
    bool ok = true;
    double worst = 0;
    void add(double err, double tol) {
        worst = std::max(worst, err);
        if (!(err <= tol)) ok = false;
    }
    std::string report(const char* what, double tol) const {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s max %.3g vs tol %.3g", what, worst, tol);
        if (!ok) throw NumericalError(buf);
        return buf;
    }
};

//----------------- criteria -----------------//

std::string c1_euclidean_anchor() {
    auto m = ScatteringMetric::euclidean(2);
    oracles::Rng rng(1001);
    Check ck;
    for (int k = 0; k < 100; ++k) {
        Vec w = rng.uniform(0, 5.0) * rng.direction2();
        Vec zhat = rng.direction2();
        SojournData sb = sojourn_backward(m, SourcePoint{w, zhat}, 1e-8);
        auto ora = oracles::flat_sojourn_backward(w, zhat);
        ck.add(std::abs(angdiff(sb.y0(0), ora.y0)), 1e-6);
        ck.add(std::abs(sb.nu - ora.nu), 1e-6);
        ck.add(std::abs(sb.mu(0) - ora.mu), 1e-6);
    }
    return ck.report("componentwise error", 1e-6);
}

std::string c2_identity() {
    Check ck;
    for (auto& m : {ScatteringMetric::euclidean(2), bump_metric()}) {
        oracles::Rng rng(1002);
        for (int k = 0; k < 25; ++k) {
            Vec w = rng.uniform(0, 4.0) * rng.direction2();
            Vec eta = m.unit_covector(w, rng.direction2());
            SojournData lhs = sojourn_forward(m, SourcePoint{w, eta}, 1e-9);
            SojournData rhs = negate_fiber(sojourn_backward(m, SourcePoint{w, -eta}, 1e-9));
            ck.add(std::abs(angdiff(lhs.y0(0), rhs.y0(0))), 1e-8);
            ck.add(std::abs(lhs.nu - rhs.nu), 1e-8);
            ck.add((lhs.mu - rhs.mu).norm(), 1e-8);
        }
    }
    return ck.report("identity defect over 50 seeds", 1e-8);
}

std::string c3_attractor() {
    auto m = bump_metric();
    oracles::Rng rng(1003);
    Check slope_ck, bound_ck;
    int accepted = 0, tried = 0;
    while (accepted < 50 && tried < 400) {
        ++tried;
        Vec w = rng.uniform(0.2, 4.0) * rng.direction2();
        Vec eta = m.unit_covector(w, rng.direction2());
        FlowOptions opt;
        opt.tol = 1e-11;
        opt.x_stop = 1e-4;
        EscapeResult res;
        try {
            res = escape_to_front_face(m, w, eta, opt);
        } catch (const DomainError&) {
            continue;
        }
        // rate fits need nondegenerate limits; near-radial seeds are skipped
        if (std::abs(res.front_face.Lambda) < 0.05 || res.front_face.M.norm() < 0.05) continue;
        ++accepted;

        InteriorTrajectory traj =
            integrate_interior(m, w, eta, res.classification.escape_s + 1, opt.tol, m.x0() / 4);
        BlownUpState start = blow_up(to_B_coords(m, traj.at(traj.s_end())));
        BlownUpTrajectory btraj = integrate_blownup(m, start, 1e-4, 1e-11);
        if (!btraj.reached_stop()) throw NumericalError("blown-up leg failed");
        std::vector<double> xs, l1, mu, xi;
        bool reached = btraj.x_reached() <= 1e-3;
        if (!reached) throw NumericalError("ray did not reach x = 1e-3");
        for (double x = 1e-2; x >= 0.999e-4; x /= std::sqrt(2.0)) {
            BCoordState b = blow_down(m, btraj.at_x(x));
            xs.push_back(x);
            l1.push_back(std::abs(b.lambda + 1.0));
            mu.push_back(b.mu.norm());
            xi.push_back(b.xi.norm());
            bound_ck.add(std::abs(b.lambda + 1.0) / x, 100.0);  // C finite
            bound_ck.add(b.mu.norm() / x, 100.0);
            bound_ck.add(b.xi.norm() / x, 100.0);
        }
        slope_ck.add(std::abs(oracles::loglog_slope(xs, l1) - 1.0), 0.1);
        slope_ck.add(std::abs(oracles::loglog_slope(xs, mu) - 1.0), 0.1);
        slope_ck.add(std::abs(oracles::loglog_slope(xs, xi) - 1.0), 0.1);
    }
    if (accepted < 50) throw NumericalError("not enough nondegenerate rays");
    bound_ck.report("C bound", 100.0);
    return slope_ck.report("slope deviation over 50 rays", 0.1);
}

std::string c4_contact() {
    Check flat_ck, bump_ck;
    auto flat = ScatteringMetric::euclidean(2);
    oracles::Rng rng(1004);
    for (int k = 0; k < 20; ++k) {
        Vec w = rng.uniform(0.2, 4.0) * rng.direction2();
        Vec eta = rng.direction2();
        flat_ck.add(contact_defect(flat, SourcePoint{w, eta}, 1e-5), 1e-6);
    }
    auto bm = bump_metric();
    for (int k = 0; k < 20; ++k) {
        Vec w = rng.uniform(0.2, 3.0) * rng.direction2();
        Vec eta = bm.unit_covector(w, rng.direction2());
        bump_ck.add(contact_defect(bm, SourcePoint{w, eta}, 1e-5), 1e-4);
    }
    std::string a = flat_ck.report("flat defect", 1e-6);
    std::string b = bump_ck.report("bump defect", 1e-4);
    return a + "; " + b;
}

std::string c5_inversion() {
    Check flat_ck, bump_ck;
    auto flat = ScatteringMetric::euclidean(2);
    oracles::Rng rng(1005);
    for (int k = 0; k < 20; ++k) {
        Vec w = rng.uniform(0.3, 4.0) * rng.direction2();
        Vec eta = rng.direction2();
        SojournData sd = sojourn_forward(flat, SourcePoint{w, eta}, 1e-9);
        SourcePoint back = invert_sojourn(flat, sd, SojournKind::forward, 1e-8);
        flat_ck.add((back.w - w).norm(), 1e-6);
        flat_ck.add((back.eta_hat - eta).norm(), 1e-6);
    }
    // weak-lensing amplitude: at eps = 0.1 the bump already produces multipath
    // rays (two sources with identical asymptotic data), where a round trip is
    // ill-posed; the inversion criterion runs below that threshold
    auto bm = bump_metric(0.05);
    for (int k = 0; k < 20; ++k) {
        Vec w = rng.uniform(0.4, 3.0) * rng.direction2();
        Vec eta = bm.unit_covector(w, rng.direction2());
        SojournData sd = sojourn_forward(bm, SourcePoint{w, eta}, 1e-9);
        SourcePoint back = invert_sojourn(bm, sd, SojournKind::forward, 1e-7);
        bump_ck.add((back.w - w).norm(), 1e-5);
        bump_ck.add((back.eta_hat - eta).norm(), 1e-5);
    }
    std::string a = flat_ck.report("flat round trip", 1e-6);
    std::string b = bump_ck.report("bump round trip", 1e-5);
    return a + "; " + b;
}

std::string c6_free_propagator() {
    auto flat = ScatteringMetric::euclidean(2);
    ParametrixKernel ker(flat, 0, 2.0);
    oracles::Rng rng(1006);
    Check ck, wck;
    Vec w = v2(0.3, -0.2);
    for (int k = 0; k < 40; ++k) {
        Vec z = w + rng.uniform(0.01, 0.49) * rng.direction2();
        double t = rng.uniform(0.005, 0.8);
        Cplx val = ker.eval(z, w, t);
        double d2 = (z - w).squaredNorm();
        Cplx ref = std::exp(Cplx(0, d2 / (2 * t))) / (2 * M_PI * t);
        ck.add(std::abs(val - ref) / std::abs(ref), 1e-12);
        Cplx W = std::exp(Cplx(0, -z.squaredNorm() / (2 * t))) * val;
        Cplx Wref = std::exp(Cplx(0, -z.dot(w) / t)) *
                    std::exp(Cplx(0, w.squaredNorm() / (2 * t))) / (2 * M_PI * t);
        wck.add(std::abs(W - Wref) / std::abs(Wref), 1e-12);
    }
    std::string a = ck.report("free-kernel relative error", 1e-12);
    std::string b = wck.report("W(t) factorization", 1e-12);
    return a + "; " + b;
}

std::string c7_transport() {
    Check flat_ck, vv_ck, a1_ck;
    auto flat = ScatteringMetric::euclidean(2);
    oracles::Rng rng(1007);
    for (int k = 0; k < 10; ++k) {
        Vec w = rng.uniform(0, 2.0) * rng.direction2();
        Vec z = w + rng.uniform(0.05, 1.5) * rng.direction2();
        GeodesicSegment seg = geodesic_bvp(flat, w, z);
        flat_ck.add(std::abs(transport_a0(flat, seg) - 1.0), 1e-9);
    }
    auto bm = bump_metric();
    int pairs = 0;
    while (pairs < 10) {
        Vec w = rng.uniform(0.2, 1.2) * rng.direction2();
        Vec z = rng.uniform(0.2, 1.2) * rng.direction2();
        if ((z - w).norm() < 0.3 || (z - w).norm() > 1.6) continue;
        ++pairs;
        GeodesicSegment seg = geodesic_bvp(bm, w, z);
        double a0 = transport_a0(bm, seg);
        double h = 1e-3;
        Mat M(2, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                Vec zp = z, zm = z, wp = w, wm = w;
                zp(i) += h;
                zm(i) -= h;
                wp(j) += h;
                wm(j) -= h;
                M(i, j) = -(phase_phi(bm, wp, zp) - phase_phi(bm, wm, zp) -
                            phase_phi(bm, wp, zm) + phase_phi(bm, wm, zm)) /
                          (4 * h * h);
            }
        double vv = M.determinant() / std::sqrt(bm.interior_metric(z).determinant() *
                                                bm.interior_metric(w).determinant());
        vv_ck.add(std::abs(a0 * a0 - vv), 1e-4);
    }
    // a1 closed form on flat space with a potential
    auto mv = ScatteringMetric::euclidean(2);
    mv.set_bump_potential(0.5, v2(0.5, 0.0), 0.3, 1.1);
    for (int k = 0; k < 5; ++k) {
        Vec w = rng.uniform(0.1, 1.2) * rng.direction2();
        Vec z = rng.uniform(0.1, 1.2) * rng.direction2();
        if ((z - w).norm() < 0.2) continue;
        GeodesicSegment seg = geodesic_bvp(mv, w, z);
        Cplx a1 = transport_a1(mv, seg);
        const int NS = 4000;  // Simpson oracle for (1/s) int V
        double acc = 0;
        for (int q = 0; q <= NS; ++q) {
            double u = double(q) / NS;
            double wgt = (q == 0 || q == NS) ? 1 : (q % 2 ? 4 : 2);
            acc += wgt * mv.potential(seg.point(u));
        }
        acc /= 3.0 * NS;
        a1_ck.add(std::abs(a1 - Cplx(0, -acc)), 1e-6);
    }
    std::string a = flat_ck.report("flat a0 - 1", 1e-9);
    std::string b = vv_ck.report("a0^2 vs van Vleck", 1e-4);
    std::string c = a1_ck.report("a1 vs -(i/s) int V", 1e-6);
    return a + "; " + b + "; " + c;
}

std::string c8_residual_order() {
    auto bm = bump_metric();
    Vec w = v2(0.45, -0.2);
    std::vector<double> ts;
    for (int k = 0; k < 9; ++k) ts.push_back(1e-3 * std::pow(10.0, k / 4.0));
    ParametrixKernel k0(bm, 0, 1.0);
    auto r0 = residual_order(k0, w, 3, 6, ts);
    if (std::abs(r0.slope - 1.0) > 0.15)
        throw NumericalError("J=0 slope " + std::to_string(r0.slope));
    TransportOptions fast;
    fast.a1_panels = 1;  // smooth integrand on the bump metric without potential
    ParametrixKernel k1(bm, 1, 1.0, fast);
    auto r1 = residual_order(k1, w, 2, 5, ts);
    if (std::abs(r1.slope - 2.0) > 0.2)
        throw NumericalError("J=1 slope " + std::to_string(r1.slope));
    char buf[120];
    std::snprintf(buf, sizeof buf, "J=0 slope %.3f (tol 1.0+-0.15), J=1 slope %.3f (2.0+-0.2)",
                  r0.slope, r1.slope);
    return buf;
}

std::string c9_focusing() {
    auto flat = ScatteringMetric::euclidean(2);
    Vec w0 = v2(1.0, 0.5);
    double T = 1.0;
    FocusParams fp;
    fp.N = 1024;
    fp.box = 20;  // grid of extent 40 per axis
    fp.R1 = 8;
    fp.R2 = 16;
    SolverConfig cfg;
    cfg.dt = 1e-2;  // splitstep with V = 0 is exact in dt
    double cell = 2 * fp.box / fp.N;

    FocusReport main_run = focusing_experiment(flat, w0, T, fp, cfg);
    double off = (main_run.peak_location - w0).norm() / cell;
    if (off > 2.0) throw NumericalError("peak offset " + std::to_string(off) + " cells");
    if (main_run.ratio < 5.0) throw NumericalError("ratio " + std::to_string(main_run.ratio));

    FocusReport control = focusing_experiment(flat, w0, T, fp, cfg, T / 2);
    if (main_run.ratio < 5.0 * control.ratio)
        throw NumericalError("defocus factor " + std::to_string(main_run.ratio / control.ratio));

    auto mv = ScatteringMetric::euclidean(2);
    mv.set_bump_potential(0.6, v2(0.5, -0.2), 1.0, 2.2);
    SolverConfig cfgv = cfg;
    cfgv.dt = 2e-3;  // Strang accuracy with the potential on
    FocusReport vrun = focusing_experiment(mv, w0, T, fp, cfgv);
    double offv = (vrun.peak_location - w0).norm() / cell;
    if (offv > 2.0) throw NumericalError("peak offset with V " + std::to_string(offv));

    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "offset %.2f cells, ratio %.1f, defocus x%.1f, with-V offset %.2f cells", off,
                  main_run.ratio, main_run.ratio / control.ratio, offv);
    return buf;
}

std::string c10_solver_integrity() {
    auto flat = ScatteringMetric::euclidean(2);
    int N = 128;
    double box = 12;
    auto gaussian = [&](int n) {
        WavefieldGrid g = WavefieldGrid::zeros(2, n, box);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double z1 = g.axis_coord(i) + 2, z2 = g.axis_coord(j) - 0.5;
                double r2 = z1 * z1 + z2 * z2;
                g.at(i, j) = std::exp(std::complex<double>(-r2 / 2.0, 1.0 * g.axis_coord(i)));
            }
        return g;
    };
    // free-Gaussian closed form at sigma = 1, k = (1, 0)
    WavefieldGrid g = gaussian(N);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    auto rep = evolve(flat, g, cfg, 1.0);
    if (rep.mass_drift > 1e-8) throw NumericalError("splitstep mass drift");
    double err2 = 0, ref2 = 0;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            Vec z = v2(g.axis_coord(i), g.axis_coord(j));
            std::complex<double> s2t(1.0, 1.0);
            std::complex<double> ref(1, 0);
            double c[2] = {-2 + 1.0 * 1.0, 0.5};  // center drifts by k t
            double kk[2] = {1.0, 0.0};
            for (int a = 0; a < 2; ++a) {
                double zr = z(a) - c[a];
                ref *= std::sqrt(1.0 / s2t) *
                       std::exp(-(zr * zr) / (2.0 * s2t) +
                                std::complex<double>(0, kk[a] * (z(a) - 0.5 * kk[a] * 1.0)));
            }
            err2 += std::norm(g.at(i, j) - ref);
            ref2 += std::norm(ref);
        }
    double l2rel = std::sqrt(err2 / ref2);
    if (l2rel > 1e-8) throw NumericalError("free Gaussian L2 error " + std::to_string(l2rel));

    // Crank-Nicolson mass drift on the bump metric
    auto bm = bump_metric();
    WavefieldGrid g2 = gaussian(N);
    SolverConfig cn;
    cn.scheme = Scheme::cranknicolson;
    cn.dt = 2e-3;
    cn.krylov_tol = 1e-12;
    auto rep2 = evolve(bm, g2, cn, 0.3);
    if (rep2.mass_drift > 1e-6 * rep2.mass_initial)
        throw NumericalError("cranknicolson mass drift");

    // self-convergence order in dt (Richardson triples)
    auto mv = ScatteringMetric::euclidean(2);
    mv.set_bump_potential(0.8, v2(0, 0), 1.5, 3.0);
    auto runv = [&](const ScatteringMetric& m, Scheme sch, double dt) {
        WavefieldGrid gg = gaussian(N);
        SolverConfig c2;
        c2.scheme = sch;
        c2.dt = dt;
        c2.krylov_tol = 1e-12;
        evolve(m, gg, c2, 0.25);
        return gg;
    };
    auto diff = [&](const WavefieldGrid& a, const WavefieldGrid& b) {
        double e2 = 0;
        for (size_t k = 0; k < a.u.size(); ++k) e2 += std::norm(a.u[k] - b.u[k]);
        return std::sqrt(e2) * a.dx();
    };
    double orders[2];
    {
        auto a = runv(mv, Scheme::splitstep, 8e-3);
        auto b = runv(mv, Scheme::splitstep, 4e-3);
        auto c = runv(mv, Scheme::splitstep, 2e-3);
        orders[0] = std::log2(diff(a, b) / diff(b, c));
    }
    {
        auto a = runv(bm, Scheme::cranknicolson, 8e-3);
        auto b = runv(bm, Scheme::cranknicolson, 4e-3);
        auto c = runv(bm, Scheme::cranknicolson, 2e-3);
        orders[1] = std::log2(diff(a, b) / diff(b, c));
    }
    for (double o : orders)
        if (std::abs(o - 2.0) > 0.2) throw NumericalError("order " + std::to_string(o));
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "drift ok, free-Gaussian L2 %.2e, orders %.2f / %.2f (2.0+-0.2)", l2rel,
                  orders[0], orders[1]);
    return buf;
}

std::string c11_wfsc() {
    // planted-parameter recovery
    int N = 256;
    double box = 12, t = 0.7;
    WavefieldGrid g = WavefieldGrid::zeros(2, N, box);
    double nu0 = 3.0, mu0 = 0.7, y0 = 0.4;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            double z1 = g.axis_coord(i), z2 = g.axis_coord(j);
            double r = std::hypot(z1, z2);
            if (r < 1e-9) continue;
            double dy = std::remainder(std::atan2(z2, z1) - y0, 2 * M_PI);
            if (std::abs(dy) > 0.6) continue;
            double a = std::exp(-dy * dy / 0.18);
            g.at(i, j) = a * std::exp(std::complex<double>(
                                 0, nu0 * r + r * mu0 * dy + r * r / (2 * t)));
        }
    WfscParams p;
    p.y0 = y0;
    p.cone_half_angle = 0.1;
    p.n_rays = 5;
    p.R1 = 5;
    p.R2 = 10;
    p.strength_threshold = 0.05;
    auto dets = estimate_wfsc(g, t, p);
    if (dets.empty()) throw NumericalError("no planted detection");
    const WfscDetection* center = &dets[0];
    for (auto& d : dets)
        if (std::abs(d.y(0) - y0) < std::abs(center->y(0) - y0)) center = &d;
    double enu = std::abs(center->nu - nu0) / nu0;
    double emu = std::abs(center->mu(0) - mu0) / mu0;
    if (enu > 0.01 || emu > 0.01)
        throw NumericalError("planted recovery errors " + std::to_string(enu) + ", " +
                             std::to_string(emu));

    // cross-module: evolved point-like data vs scale_fiber(S_f, 1/t)
    auto flat = ScatteringMetric::euclidean(2);
    int N2 = 512;
    double box2 = 16, t2 = 0.5;
    Vec w0 = v2(1.1, -0.6);
    WavefieldGrid g2 = WavefieldGrid::zeros(2, N2, box2);
    double sigma = 0.08;
    for (int i = 0; i < N2; ++i)
        for (int j = 0; j < N2; ++j) {
            double r2 = (g2.axis_coord(i) - w0(0)) * (g2.axis_coord(i) - w0(0)) +
                        (g2.axis_coord(j) - w0(1)) * (g2.axis_coord(j) - w0(1));
            g2.at(i, j) = std::exp(-r2 / (2 * sigma * sigma));
        }
    SolverConfig cfg;
    cfg.dt = 0.01;
    evolve(flat, g2, cfg, t2);
    WfscParams p2;
    p2.y0 = 2.2;
    p2.cone_half_angle = 0.15;
    p2.n_rays = 5;
    p2.R1 = 6;
    p2.R2 = 13;
    p2.strength_threshold = 1e-4;
    auto dets2 = estimate_wfsc(g2, t2, p2);
    if (dets2.empty()) throw NumericalError("no evolved-data detection");
    double worst = 0;
    for (auto& d : dets2) {
        double y = d.y(0);
        SojournData sf =
            sojourn_forward(flat, SourcePoint{w0, v2(std::cos(y), std::sin(y))}, 1e-9);
        SojournData sc = scale_fiber(sf, 1.0 / t2);
        worst = std::max(worst, std::abs(d.nu - sc.nu) / std::abs(sc.nu));
        worst = std::max(worst, std::abs(d.mu(0) - sc.mu(0)) / std::abs(sc.mu(0)));
    }
    if (worst > 0.05) throw NumericalError("cross-module error " + std::to_string(worst));
    char buf[160];
    std::snprintf(buf, sizeof buf, "planted nu/mu err %.3f%%/%.3f%%, cross-module err %.1f%%",
                  100 * enu, 100 * emu, 100 * worst);
    return buf;
}

}  // namespace

int main() {
    Harness h;
    h.run(1, "Euclidean sojourn anchor (100 seeds, 1e-6)", c1_euclidean_anchor);
    h.run(2, "identity S_f = -S_b(-.) (50 seeds, 1e-8)", c2_identity);
    h.run(3, "attractor rates on the bump metric (50 rays)", c3_attractor);
    h.run(4, "contact property (flat 1e-6, bump 1e-4)", c4_contact);
    h.run(5, "inversion round trip (flat 1e-6, bump 1e-5)", c5_inversion);
    h.run(6, "free propagator and W(t) factorization (1e-12)", c6_free_propagator);
    h.run(7, "transport amplitudes (a0, van Vleck, a1)", c7_transport);
    h.run(8, "residual order (J=0: 1.0+-0.15, J=1: 2.0+-0.2)", c8_residual_order);
    h.run(9, "focusing experiment (1024^2, box 40, T=1)", c9_focusing);
    h.run(10, "solver integrity (mass, order, free Gaussian)", c10_solver_integrity);
    h.run(11, "wavefront estimator (1% planted, 5% cross)", c11_wfsc);
    if (h.failures == 0)
        std::printf("acceptance: all 11 criteria passed\n");
    else
        std::printf("acceptance: %d criterion(s) FAILED\n", h.failures);
    return h.failures == 0 ? 0 : 1;
}
