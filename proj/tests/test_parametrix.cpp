#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <queue>

#include "conicflow/parametrix.hpp"
#include "oracles.hpp"

using namespace conicflow;

namespace {
Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }

ScatteringMetric bump_metric(double eps = 0.1) {
    return ScatteringMetric::conformal_bump(2, eps, 1.0, (Vec(2) << 0.2, -0.3).finished());
}

// Grid shortest-path oracle: Dijkstra with a 16-neighbor stencil on a fine grid,
// then local relaxation of the polyline to machine-level length accuracy.
double grid_geodesic_length(const ScatteringMetric& m, const Vec& a, const Vec& b) {
    double lo0 = std::min(a(0), b(0)) - 0.8, hi0 = std::max(a(0), b(0)) + 0.8;
    double lo1 = std::min(a(1), b(1)) - 0.8, hi1 = std::max(a(1), b(1)) + 0.8;
    const int N = 161;
    double h0 = (hi0 - lo0) / (N - 1), h1 = (hi1 - lo1) / (N - 1);
    auto node = [&](int i, int j) { return i * N + j; };
    auto pos = [&](int id) { return v2(lo0 + (id / N) * h0, lo1 + (id % N) * h1); };
    auto edge_len = [&](const Vec& p, const Vec& q) {
        // two-point trapezoid in the length functional
        Vec d = q - p;
        double lp = std::sqrt(d.dot(m.interior_metric(p) * d));
        double lq = std::sqrt(d.dot(m.interior_metric(q) * d));
        return 0.5 * (lp + lq);
    };
    const int moves[16][2] = {{1, 0},  {0, 1},  {-1, 0}, {0, -1}, {1, 1},  {1, -1},
                              {-1, 1}, {-1, -1}, {2, 1},  {1, 2},  {-2, 1}, {-1, 2},
                              {2, -1}, {1, -2},  {-2, -1}, {-1, -2}};
    int ia = int(std::round((a(0) - lo0) / h0)), ja = int(std::round((a(1) - lo1) / h1));
    int ib = int(std::round((b(0) - lo0) / h0)), jb = int(std::round((b(1) - lo1) / h1));
    std::vector<double> dist(N * N, 1e100);
    std::vector<int> prev(N * N, -1);
    using QE = std::pair<double, int>;
    std::priority_queue<QE, std::vector<QE>, std::greater<QE>> pq;
    dist[node(ia, ja)] = 0;
    pq.push({0.0, node(ia, ja)});
    while (!pq.empty()) {
        auto [dcur, id] = pq.top();
        pq.pop();
        if (dcur > dist[id]) continue;
        if (id == node(ib, jb)) break;
        int i = id / N, j = id % N;
        for (auto& mv : moves) {
            int i2 = i + mv[0], j2 = j + mv[1];
            if (i2 < 0 || j2 < 0 || i2 >= N || j2 >= N) continue;
            double nd = dcur + edge_len(pos(id), pos(node(i2, j2)));
            if (nd < dist[node(i2, j2)]) {
                dist[node(i2, j2)] = nd;
                prev[node(i2, j2)] = id;
                pq.push({nd, node(i2, j2)});
            }
        }
    }
    // collect path and relax it as a polyline (independent variational route)
    std::vector<Vec> path;
    for (int id = node(ib, jb); id != -1; id = prev[id]) path.push_back(pos(id));
    std::reverse(path.begin(), path.end());
    path.front() = a;
    path.back() = b;
    // resample to uniform count (coarse first; refined below)
    auto resample = [](const std::vector<Vec>& src, int M) {
        std::vector<Vec> out;
        for (int k = 0; k <= M; ++k) {
            double frac = double(k) / M * (src.size() - 1);
            int seg = std::min<int>(int(frac), int(src.size()) - 2);
            double u = frac - seg;
            out.push_back((1 - u) * src[seg] + u * src[seg + 1]);
        }
        return out;
    };
    std::vector<Vec> pts = resample(path, 12);
    auto total_len = [&](const std::vector<Vec>& ps) {
        double L = 0;
        for (size_t k = 0; k + 1 < ps.size(); ++k) L += edge_len(ps[k], ps[k + 1]);
        return L;
    };
    // Gauss-Seidel energy relaxation: each vertex takes a damped Newton step on
    // the two-edge energy (strictly convex transversally and longitudinally)
    auto edge_energy = [&](const Vec& p, const Vec& q) {
        Vec d = q - p;
        return 0.5 * d.dot(m.interior_metric(0.5 * (p + q)) * d);
    };
    // coarse-to-fine so that low-frequency path modes equilibrate quickly
    for (int level = 0; level < 5; ++level) {
    if (level > 0) pts = resample(pts, 2 * (int(pts.size()) - 1));
    int sweeps = 600 / (1 << level) + 40;
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        double moved = 0;
        for (size_t k = 1; k + 1 < pts.size(); ++k) {
            auto eloc = [&](const Vec& p) {
                return edge_energy(pts[k - 1], p) + edge_energy(p, pts[k + 1]);
            };
            double fh = 1e-6;
            Vec g(2);
            Mat H(2, 2);
            Vec p0 = pts[k];
            double e0 = eloc(p0);
            for (int i = 0; i < 2; ++i) {
                Vec pp = p0, pm = p0;
                pp(i) += fh;
                pm(i) -= fh;
                double ep = eloc(pp), em = eloc(pm);
                g(i) = (ep - em) / (2 * fh);
                H(i, i) = (ep - 2 * e0 + em) / (fh * fh);
            }
            Vec ppp = p0, ppm = p0, pmp = p0, pmm = p0;
            ppp(0) += fh; ppp(1) += fh;
            ppm(0) += fh; ppm(1) -= fh;
            pmp(0) -= fh; pmp(1) += fh;
            pmm(0) -= fh; pmm(1) -= fh;
            H(0, 1) = H(1, 0) =
                (eloc(ppp) - eloc(ppm) - eloc(pmp) + eloc(pmm)) / (4 * fh * fh);
            Vec step = H.ldlt().solve(-g);
            for (int ls = 0; ls < 5; ++ls) {
                if (eloc(p0 + step) < e0) {
                    pts[k] = p0 + step;
                    moved = std::max(moved, step.norm());
                    break;
                }
                step *= 0.5;
            }
        }
        if (moved < 1e-10) break;
    }
    }
    return total_len(pts);
}
}  // namespace

TEST_CASE("flat two-point geodesic is the straight segment") {
    auto m = ScatteringMetric::euclidean(2);
    GeodesicSegment seg = geodesic_bvp(m, v2(0, 0), v2(3, 4));
    CHECK(seg.length == doctest::Approx(5.0).epsilon(1e-12));
    Vec mid = seg.point(0.5);
    CHECK((mid - v2(1.5, 2)).norm() < 1e-10);
}

TEST_CASE("geodesic distance is symmetric") {
    auto m = bump_metric();
    oracles::Rng rng(71);
    for (int k = 0; k < 20; ++k) {
        Vec a = rng.uniform(0.1, 1.8) * rng.direction2();
        Vec b = rng.uniform(0.1, 1.8) * rng.direction2();
        if ((a - b).norm() < 0.05) continue;
        double dab = geodesic_bvp(m, a, b).length;
        double dba = geodesic_bvp(m, b, a).length;
        CHECK(std::abs(dab - dba) < 2e-11);
    }
}

TEST_CASE("bump-metric distance matches the grid shortest-path oracle") {
    auto m = bump_metric();
    oracles::Rng rng(73);
    for (int k = 0; k < 4; ++k) {
        Vec a = rng.uniform(0.2, 1.4) * rng.direction2();
        Vec b = rng.uniform(0.2, 1.4) * rng.direction2();
        if ((a - b).norm() < 0.4) continue;
        double d_impl = geodesic_bvp(m, a, b).length;
        double d_grid = grid_geodesic_length(m, a, b);
        CHECK(std::abs(d_impl - d_grid) / d_impl < 1e-3);
    }
}

TEST_CASE("out-of-injectivity report") {
    auto m = ScatteringMetric::euclidean(2);
    BvpOptions opt;
    opt.iota_bound = 1.0;
    CHECK_THROWS_AS(geodesic_bvp(m, v2(0, 0), v2(3, 4), opt), DomainError);
}

TEST_CASE("phase values and eikonal residual") {
    auto m = ScatteringMetric::euclidean(2);
    CHECK(phase_phi(m, v2(0, 0), v2(3, 4)) == doctest::Approx(12.5).epsilon(1e-12));
    CHECK(phase_phi(m, v2(1.3, -2), v2(1.3, -2)) == 0.0);

    auto bm = bump_metric();
    oracles::Rng rng(79);
    for (int k = 0; k < 20; ++k) {
        Vec a = rng.uniform(0.2, 1.5) * rng.direction2();
        Vec b = rng.uniform(0.2, 1.5) * rng.direction2();
        if ((a - b).norm() < 0.1) continue;
        CHECK(eikonal_residual(bm, a, b) < 1e-6);
    }
}

TEST_CASE("transport a0: flat unity, diagonal unity, van Vleck oracle") {
    auto flat = ScatteringMetric::euclidean(2);
    GeodesicSegment seg = geodesic_bvp(flat, v2(0.3, -0.2), v2(1.4, 0.9));
    CHECK(transport_a0(flat, seg) == doctest::Approx(1.0).epsilon(1e-10));

    auto bm = bump_metric();
    // near-diagonal value
    GeodesicSegment tiny = geodesic_bvp(bm, v2(0.4, 0.1), v2(0.4 + 1e-6, 0.1));
    CHECK(std::abs(transport_a0(bm, tiny) - 1.0) < 1e-5);

    // van Vleck determinant oracle: a0^2 = det(-d^2 Phi / dz dw) / sqrt(det g(z) det g(w))
    oracles::Rng rng(83);
    int checked = 0;
    for (int k = 0; k < 12 && checked < 6; ++k) {
        Vec w = rng.uniform(0.2, 1.2) * rng.direction2();
        Vec z = rng.uniform(0.2, 1.2) * rng.direction2();
        if ((z - w).norm() < 0.3 || (z - w).norm() > 1.6) continue;
        ++checked;
        GeodesicSegment s = geodesic_bvp(bm, w, z);
        double a0 = transport_a0(bm, s);
        double h = 1e-3;
        Mat M(2, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                Vec zp = z, zm = z, wp = w, wm = w;
                zp(i) += h;
                zm(i) -= h;
                wp(j) += h;
                wm(j) -= h;
                double pp = phase_phi(bm, wp, zp), pm = phase_phi(bm, wm, zp);
                double mp = phase_phi(bm, wp, zm), mm = phase_phi(bm, wm, zm);
                M(i, j) = -(pp - pm - mp + mm) / (4 * h * h);
            }
        double vv = M.determinant() /
                    std::sqrt(bm.interior_metric(z).determinant() *
                              bm.interior_metric(w).determinant());
        CHECK(a0 * a0 == doctest::Approx(vv).epsilon(1e-4));
    }
    CHECK(checked >= 4);
}

TEST_CASE("transport a1: flat closed forms") {
    auto flat = ScatteringMetric::euclidean(2);
    // V = 0 gives a1 = 0
    GeodesicSegment seg0 = geodesic_bvp(flat, v2(0, 0), v2(1, 0.5));
    CHECK(std::abs(transport_a1(flat, seg0)) < 1e-6);

    // constant V = c on the tube: a1 = -ic
    auto mv = ScatteringMetric::euclidean(2);
    mv.set_bump_potential(0.37, v2(0.6, 0.25), 1.4, 2.6);
    GeodesicSegment seg = geodesic_bvp(mv, v2(0.2, 0.1), v2(1.0, 0.4));
    Cplx a1 = transport_a1(mv, seg);
    CHECK(std::abs(a1 - Cplx(0, -0.37)) < 5e-7);

    // diagonal value -i V(w)
    Cplx diag = transport_a1_diagonal(mv, v2(0.6, 0.25));
    CHECK(std::abs(diag - Cplx(0, -0.37)) < 1e-12);

    // general flat V: a1 = -(i/s) integral of V along the segment (quadrature oracle)
    auto mg = ScatteringMetric::euclidean(2);
    mg.set_bump_potential(0.5, v2(0.5, 0.0), 0.3, 1.1);
    GeodesicSegment sg = geodesic_bvp(mg, v2(-0.4, -0.1), v2(1.3, 0.35));
    Cplx a1g = transport_a1(mg, sg);
    // composite Simpson oracle along the straight segment
    const int NS = 4000;
    double acc = 0;
    for (int k = 0; k <= NS; ++k) {
        double u = double(k) / NS;
        double wgt = (k == 0 || k == NS) ? 1 : (k % 2 ? 4 : 2);
        acc += wgt * mg.potential((1 - u) * sg.w + u * sg.z);
    }
    acc *= 1.0 / (3.0 * NS);
    CHECK(std::abs(a1g - Cplx(0, -acc)) < 1e-6);
}

TEST_CASE("kernel: free propagator exactness, cutoff support, modulus") {
    auto flat = ScatteringMetric::euclidean(2);
    ParametrixKernel ker(flat, 0, 2.0);
    Vec w = v2(0.2, -0.1);
    oracles::Rng rng(89);
    for (int k = 0; k < 10; ++k) {
        Vec z = w + rng.uniform(0.02, 0.49) * rng.direction2();
        double t = rng.uniform(0.01, 0.5);
        Cplx val = ker.eval(z, w, t);
        double d2 = (z - w).squaredNorm();
        Cplx ref = std::exp(Cplx(0, d2 / (2 * t))) / (2 * M_PI * t);
        CHECK(std::abs(val - ref) < 1e-12 * std::abs(ref));
        // W(t) factorization: e^{-i|z|^2/2t} U = (2 pi t)^{-1} e^{-i z.w/t} e^{i|w|^2/2t}
        Cplx W = std::exp(Cplx(0, -z.squaredNorm() / (2 * t))) * val;
        Cplx Wref = std::exp(Cplx(0, -z.dot(w) / t)) * std::exp(Cplx(0, w.squaredNorm() / (2 * t))) /
                    (2 * M_PI * t);
        CHECK(std::abs(W - Wref) < 1e-12 * std::abs(Wref));
        // modulus discards the phase
        CHECK(std::abs(val) == doctest::Approx(ker.cutoff((z - w).norm()) / (2 * M_PI * t))
                                   .epsilon(1e-12));
    }
    // support: exact zero beyond iota/2
    CHECK(ker.eval(w + v2(1.01, 0), w, 0.1) == Cplx(0, 0));
    CHECK(ker.eval(w + v2(5.0, 0), w, 0.1) == Cplx(0, 0));
}

TEST_CASE("residual order: flat exactness floor and bump slopes") {
    std::vector<double> ts;
    for (int k = 0; k < 9; ++k) ts.push_back(1e-3 * std::pow(10.0, k / 4.0));

    auto flat = ScatteringMetric::euclidean(2);
    ParametrixKernel fker(flat, 0, 1.0);
    auto fres = residual_order(fker, v2(0.1, 0.05), 3, 4, ts);
    // exact parametrix: weighted residual at the FD noise floor
    for (auto& [t, nrm] : fres.norms) CHECK(nrm < 1e-7);
    CHECK(fres.max_outside_cutoff == 0.0);

    auto bm = bump_metric();
    ParametrixKernel k0(bm, 0, 1.0);
    auto r0 = residual_order(k0, v2(0.45, -0.2), 3, 6, ts);
    CHECK(r0.slope == doctest::Approx(1.0).epsilon(0.15));

    ParametrixKernel k1(bm, 1, 1.0);
    auto r1 = residual_order(k1, v2(0.45, -0.2), 2, 5, ts);
    CHECK(r1.slope == doctest::Approx(2.0).epsilon(0.1));
}
