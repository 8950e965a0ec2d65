#include "conicflow/geodesic.hpp"

#include <cmath>
#include <sstream>

namespace conicflow {

namespace {

OdeRhs shot_rhs(const ScatteringMetric& m) {
    const int n = m.dim();
    if (n == 2) {
        return [&m](double, const Vec& yv, Vec& dy) {
            Eigen::Vector2d z = yv.head<2>(), p = yv.tail<2>();
            Eigen::Matrix2d g, dg0, dg1;
            m.interior2(z, g, dg0, dg1);
            Eigen::Vector2d v = g.inverse() * p;
            dy.resize(4);
            dy.head<2>() = v;
            dy(2) = 0.5 * v.dot(dg0 * v);
            dy(3) = 0.5 * v.dot(dg1 * v);
        };
    }
    return [&m, n](double, const Vec& yv, Vec& dy) {
        Vec z = yv.head(n), p = yv.tail(n);
        MetricEval ev = m.interior(z);
        Vec v = ev.g.ldlt().solve(p);
        dy.resize(2 * n);
        dy.head(n) = v;
        for (int i = 0; i < n; ++i) dy(n + i) = 0.5 * v.dot(ev.dg[i] * v);
    };
}

}  // namespace

GeodesicSegment geodesic_bvp(const ScatteringMetric& m, const Vec& w, const Vec& z,
                             const BvpOptions& opt, const Vec* guess) {
    const int n = m.dim();
    if (w.size() != n || z.size() != n) throw DomainError("geodesic_bvp: wrong dimensions");
    OdeRhs rhs = shot_rhs(m);

    OdeOptions oopt;
    oopt.rtol = opt.ode_tol;
    oopt.atol = opt.ode_tol * 1e-2;
    oopt.store_dense = false;

    auto shoot = [&](const Vec& p) -> Vec {  // endpoint of exp_w(p)
        Vec y0(2 * n);
        y0.head(n) = w;
        y0.tail(n) = p;
        OdeSolution sol = integrate_ode(rhs, 0.0, y0, 1.0, oopt);
        if (sol.status != OdeStatus::ok)
            throw NonConvergence("geodesic_bvp: shot integration failed");
        return sol.y_end.head(n);
    };

    Vec p = guess ? *guess : Vec(m.interior_metric(w) * (z - w));
    double scale = std::max(1.0, (z - w).norm());
    Vec F = shoot(p) - z;
    double miss = F.norm();
    double floor_eps = 1e-14 * scale;

    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        if (miss < floor_eps) break;
        // forward-difference Jacobian of the exponential map
        Mat J(n, n);
        double h = 1e-7 * std::max(1.0, p.norm());
        for (int k = 0; k < n; ++k) {
            Vec pk = p;
            pk(k) += h;
            J.col(k) = (shoot(pk) - z - F) / h;
        }
        Vec step = J.fullPivLu().solve(-F);
        double alpha = 1.0;
        bool improved = false;
        for (int ls = 0; ls < 6; ++ls) {
            Vec ptry = p + alpha * step;
            Vec Ftry = shoot(ptry) - z;
            if (Ftry.norm() < miss) {
                p = ptry;
                F = Ftry;
                miss = Ftry.norm();
                improved = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!improved) break;
    }

    if (miss > opt.tol * scale && miss > opt.tol) {
        std::ostringstream os;
        os << "geodesic_bvp: shooting did not converge (miss " << miss << " after " << it
           << " iterations)";
        throw NonConvergence(os.str());
    }

    GeodesicSegment seg;
    seg.w = w;
    seg.z = z;
    seg.p0 = p;
    seg.length = m.covector_norm(w, p);
    seg.endpoint_miss = miss;
    if (opt.iota_bound > 0 && seg.length >= opt.iota_bound) {
        std::ostringstream os;
        os << "geodesic_bvp: length " << seg.length << " outside injectivity bound "
           << opt.iota_bound;
        throw DomainError(os.str());
    }

    Vec y0(2 * n);
    y0.head(n) = w;
    y0.tail(n) = p;
    OdeOptions dense = oopt;
    dense.store_dense = true;
    seg.path = integrate_ode(rhs, 0.0, y0, 1.0, dense);
    seg.grad_phi_z = seg.path.y_end.tail(n);
    return seg;
}

double phase_phi(const ScatteringMetric& m, const Vec& w, const Vec& z,
                 const BvpOptions& opt) {
    if ((z - w).norm() == 0) return 0.0;
    GeodesicSegment seg = geodesic_bvp(m, w, z, opt);
    return 0.5 * seg.length * seg.length;
}

double eikonal_residual(const ScatteringMetric& m, const Vec& w, const Vec& z,
                        double fd_step, const BvpOptions& opt) {
    const int n = m.dim();
    double phi = phase_phi(m, w, z, opt);
    Vec grad(n);
    for (int k = 0; k < n; ++k) {
        Vec zp = z, zm = z;
        zp(k) += fd_step;
        zm(k) -= fd_step;
        grad(k) = (phase_phi(m, w, zp, opt) - phase_phi(m, w, zm, opt)) / (2 * fd_step);
    }
    double lhs = 0.5 * grad.dot(m.interior_cometric(z) * grad);
    return std::abs(lhs - phi) / std::max(phi, 1e-12);
}

}  // namespace conicflow
