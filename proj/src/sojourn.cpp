#include "conicflow/sojourn.hpp"

#include <cmath>
#include <sstream>

namespace conicflow {

namespace {

double unwrap_near(double angle, double ref) {
    return angle - 2.0 * M_PI * std::round((angle - ref) / (2.0 * M_PI));
}

// Outward integration of the blown-up field (x increasing), used to build the
// inversion initial guess from front-face data.
OdeRhs blownup_outward_rhs(const ScatteringMetric& m, double x_start) {
    const int n = m.dim(), nb = n - 1;
    return [&m, x_start, n, nb](double ell, const Vec& Y, Vec& dY) {
        double x = x_start * std::exp(ell);
        Vec y = Y.segment(0, nb);
        double Lambda = Y(nb);
        Vec M = Y.segment(nb + 1, nb);

        BoundaryMetricEval h = m.boundary_metric(x, y);
        Mat hinv = h.h.ldlt().solve(Mat::Identity(nb, nb));
        Mat dhinv_dx = -hinv * h.dh_dx * hinv;

        double denom = 1.0 - x * Lambda;
        if (std::abs(denom) < 0.05)
            throw NonConvergence("outward blown-up flow lost transversality");
        double fac = -x / denom;

        Vec hM = hinv * M;
        double hMM = M.dot(hM);
        double dxhMM = M.dot(dhinv_dx * M);

        dY.resize(Y.size());
        dY.segment(0, nb) = fac * hM;
        dY(nb) = fac * (-hMM - 0.5 * x * dxhMM);
        for (int i = 0; i < nb; ++i) {
            Mat dhinv_dyi = -hinv * h.dh_dy[i] * hinv;
            dY(nb + 1 + i) = fac * (Lambda * M(i) - 0.5 * M.dot(dhinv_dyi * M));
        }
        dY.segment(2 * nb + 1, n).setZero();  // Xi unused in the guess
    };
}

}  // namespace

SourcePoint make_source(const ScatteringMetric& m, const Vec& w, const Vec& direction) {
    return SourcePoint{w, m.unit_covector(w, direction)};
}

Vec source_to_coords(const SourcePoint& src) {
    if (src.w.size() != 2) throw DomainError("source coordinates implemented for n = 2");
    Vec c(3);
    c << src.w(0), src.w(1), std::atan2(src.eta_hat(1), src.eta_hat(0));
    return c;
}

SourcePoint coords_to_source(const ScatteringMetric& m, const Vec& c) {
    Vec w = c.head(2);
    Vec dir(2);
    dir << std::cos(c(2)), std::sin(c(2));
    return SourcePoint{w, m.unit_covector(w, dir)};
}

SojournData sojourn_forward(const ScatteringMetric& m, const SourcePoint& src, double tol,
                            const FlowOptions& fopt) {
    FlowOptions opt = fopt;
    opt.tol = std::min(opt.tol, std::max(tol * 1e-2, 1e-13));
    opt.ff_tol = tol;
    EscapeResult res = escape_to_front_face(m, src.w, src.eta_hat, opt);
    if (!res.front_face.converged) {
        std::ostringstream os;
        os << "sojourn_forward: front-face extrapolation error "
           << res.front_face.error_estimate << " exceeds tol " << tol;
        throw NonConvergence(os.str());
    }
    SojournData sd;
    sd.y0 = res.front_face.y0;
    sd.nu = -res.front_face.Lambda;
    sd.mu = res.front_face.M;
    sd.error_estimate = res.front_face.error_estimate;
    return sd;
}

SojournData sojourn_backward(const ScatteringMetric& m, const SourcePoint& src, double tol,
                             const FlowOptions& fopt) {
    SourcePoint rev{src.w, -src.eta_hat};
    return negate_fiber(sojourn_forward(m, rev, tol, fopt));
}

SojournData scale_fiber(const SojournData& sd, double c) {
    if (c <= 0) throw DomainError("scale_fiber: scale must be > 0");
    SojournData out = sd;
    out.nu *= c;
    out.mu *= c;
    return out;
}

SojournData negate_fiber(const SojournData& sd) {
    SojournData out = sd;
    out.nu = -out.nu;
    out.mu = -out.mu;
    return out;
}

double contact_defect(const ScatteringMetric& m, const SourcePoint& src, double fd_step,
                      const FlowOptions& fopt) {
    if (m.dim() != 2) throw DomainError("contact_defect implemented for n = 2");
    if (fd_step <= 0) throw DomainError("contact_defect: fd_step must be > 0");
    FlowOptions opt = fopt;
    opt.tol = std::min(opt.tol, 1e-12);
    opt.ff_tol = 1e-10;
    opt.x_stop = std::min(opt.x_stop, 1e-5);
    opt.extrap_nodes = std::max(opt.extrap_nodes, 6);

    Vec c0 = source_to_coords(src);
    SojournData base = sojourn_forward(m, src, 1e-9, opt);

    // FD Jacobian of (y0, nu, mu) over (w1, w2, phi); classification failures on
    // stencil points propagate as errors per the trapped-stencil contract.
    Mat J(3, 3);
    for (int k = 0; k < 3; ++k) {
        Vec cp = c0, cm = c0;
        cp(k) += fd_step;
        cm(k) -= fd_step;
        SojournData fp = sojourn_forward(m, coords_to_source(m, cp), 1e-9, opt);
        SojournData fm = sojourn_forward(m, coords_to_source(m, cm), 1e-9, opt);
        double yp = unwrap_near(fp.y0(0), base.y0(0));
        double ym = unwrap_near(fm.y0(0), base.y0(0));
        J(0, k) = (yp - ym) / (2 * fd_step);
        J(1, k) = (fp.nu - fm.nu) / (2 * fd_step);
        J(2, k) = (fp.mu(0) - fm.mu(0)) / (2 * fd_step);
    }

    // pullback of chi = mu dy - dnu
    Vec p(3);
    for (int k = 0; k < 3; ++k) p(k) = base.mu(0) * J(0, k) - J(1, k);
    // canonical 1-form eta.dw restricted to S*X: components (eta1, eta2, 0)
    Vec q(3);
    q << src.eta_hat(0), src.eta_hat(1), 0.0;

    double cosang = p.dot(q) / (p.norm() * q.norm());
    double s2 = 1.0 - cosang * cosang;
    return std::sqrt(std::max(s2, 0.0));
}

//----------------- inversion -----------------//

namespace {

SojournData eval_forward_for_newton(const ScatteringMetric& m, const Vec& c, double tol,
                                    const FlowOptions& fopt) {
    return sojourn_forward(m, coords_to_source(m, c), tol, fopt);
}

Vec residual_vec(const SojournData& val, const SojournData& target) {
    Vec r(3);
    r << unwrap_near(val.y0(0), target.y0(0)) - target.y0(0), val.nu - target.nu,
        val.mu(0) - target.mu(0);
    return r;
}

}  // namespace

SourcePoint invert_sojourn(const ScatteringMetric& m, const SojournData& target,
                           SojournKind which, double tol, const InvertOptions& opt) {
    if (m.dim() != 2) throw DomainError("invert_sojourn implemented for n = 2");
    // backward reduces to forward: S_b(w, eta) = -S_f(w, -eta)
    if (which == SojournKind::backward) {
        SourcePoint src = invert_sojourn(m, negate_fiber(target), SojournKind::forward, tol, opt);
        return SourcePoint{src.w, -src.eta_hat};
    }

    FlowOptions fopt = opt.flow;
    fopt.tol = std::min(fopt.tol, 1e-12);
    fopt.ff_tol = 1e-9;

    // Initial guess: start on the front face at small x with (y0, Lambda = -nu,
    // M = mu), integrate the blown-up field outward to the collar, reconstruct the
    // interior covector there, and run the geodesic backwards to the source.
    double x_init = 1e-4;
    double x_out = m.x0() / 4;
    const int nb = 1, n = 2;
    Vec Y(2 * nb + 1 + n);
    Y.segment(0, nb) = target.y0;
    Y(nb) = -target.nu;
    Y.segment(nb + 1, nb) = target.mu;
    Y.segment(2 * nb + 1, n).setZero();  // Xi does not feed back into (y, Lambda, M)

    OdeOptions oopt;
    oopt.rtol = 1e-10;
    oopt.atol = 1e-13;
    OdeSolution out = integrate_ode(blownup_outward_rhs(m, x_init), 0.0, Y,
                                    std::log(x_out / x_init), oopt);
    if (out.status != OdeStatus::ok)
        throw NonConvergence("invert_sojourn: outward guess integration failed");

    double x = x_out;
    Vec yb = out.y_end.segment(0, nb);
    double Lambda = out.y_end(nb);
    Vec M = out.y_end.segment(nb + 1, nb);
    double lambda = -1.0 + x * Lambda;
    Vec mu_b = x * M;

    // chart coframe gradients at (x, y): grad x = -x^2 zhat, grad theta = x e_theta
    double th = yb(0);
    Vec zhat(2), eth(2);
    zhat << std::cos(th), std::sin(th);
    eth << -std::sin(th), std::cos(th);
    Vec zeta = -(lambda / x) * zhat + (mu_b(0) / x) * eth;
    Vec z = m.from_boundary_chart(x, yb);
    double s_est = m.covector_norm(z, zeta);
    Vec back_dir = m.unit_covector(z, -zeta);

    InteriorTrajectory back = integrate_interior(m, z, back_dir, s_est, 1e-10);
    if (back.status() != OdeStatus::ok)
        throw NonConvergence("invert_sojourn: backward guess integration failed");
    auto end = back.at(s_est);
    Vec c(3);
    Vec eta_guess = -end.zeta;  // forward direction at the recovered source
    c << end.z(0), end.z(1), std::atan2(eta_guess(1), eta_guess(0));

    // damped Newton on S_f(c) = target
    double eval_tol = std::max(tol * 1e-2, 1e-10);
    SojournData val = eval_forward_for_newton(m, c, eval_tol, fopt);
    Vec r = residual_vec(val, target);
    double best = r.cwiseAbs().maxCoeff();
    Vec best_c = c;

    for (int it = 0; it < opt.max_iterations; ++it) {
        if (best <= tol) break;
        Mat J(3, 3);
        for (int k = 0; k < 3; ++k) {
            Vec cp = c;
            cp(k) += opt.fd_step;
            SojournData fp = eval_forward_for_newton(m, cp, eval_tol, fopt);
            J.col(k) = (residual_vec(fp, target) - r) / opt.fd_step;
        }
        Vec step = J.fullPivLu().solve(-r);
        double alpha = 1.0;
        bool improved = false;
        for (int ls = 0; ls < 8; ++ls) {
            Vec ctry = c + alpha * step;
            try {
                SojournData vtry = eval_forward_for_newton(m, ctry, eval_tol, fopt);
                Vec rtry = residual_vec(vtry, target);
                double mtry = rtry.cwiseAbs().maxCoeff();
                if (mtry < best) {
                    c = ctry;
                    val = vtry;
                    r = rtry;
                    best = mtry;
                    best_c = c;
                    improved = true;
                    break;
                }
            } catch (const DomainError&) {
                // stencil fell onto an undecided ray; shorten the step
            }
            alpha *= 0.5;
        }
        if (!improved) break;
    }

    if (best > tol) {
        std::ostringstream os;
        os << "invert_sojourn: no solution found; best residual " << best << " (tol " << tol
           << ")";
        throw NonConvergence(os.str());
    }
    return coords_to_source(m, best_c);
}

SourcePoint predict_interior_wf(const ScatteringMetric& m, const SojournData& q, double t,
                                double tol, const InvertOptions& opt) {
    if (t == 0) throw DomainError("predict_interior_wf: t must be nonzero");
    SojournData scaled = scale_fiber(q, std::abs(t));
    return invert_sojourn(m, scaled, t > 0 ? SojournKind::backward : SojournKind::forward, tol,
                          opt);
}

}  // namespace conicflow
