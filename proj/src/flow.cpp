#include "conicflow/flow.hpp"

#include <cmath>
#include <sstream>

namespace conicflow {

namespace {

// Chart coframe pushforwards dz/dx and dz/dy_i at a collar point.
struct ChartFrame {
    Vec dz_dx;
    std::vector<Vec> dz_dy;
};

ChartFrame chart_frame(const ScatteringMetric& m, double x, const Vec& y) {
    ChartFrame f;
    double r = 1.0 / x;
    if (m.dim() == 2) {
        double c = std::cos(y(0)), s = std::sin(y(0));
        f.dz_dx = (Vec(2) << -c / (x * x), -s / (x * x)).finished();
        f.dz_dy.push_back((Vec(2) << -r * s, r * c).finished());
    } else if (m.dim() == 3) {
        double st = std::sin(y(0)), ct = std::cos(y(0));
        double cp = std::cos(y(1)), sp = std::sin(y(1));
        Vec zh(3);
        zh << st * cp, st * sp, ct;
        f.dz_dx = -zh / (x * x);
        f.dz_dy.push_back((Vec(3) << r * ct * cp, r * ct * sp, -r * st).finished());
        f.dz_dy.push_back((Vec(3) << -r * st * sp, r * st * cp, 0.0).finished());
    } else {
        throw DomainError("chart frame implemented for n = 2 and n = 3 only");
    }
    return f;
}

OdeRhs cogeodesic_rhs(const ScatteringMetric& m) {
    const int n = m.dim();
    if (n == 2) {
        return [&m](double, const Vec& yv, Vec& dy) {
            Eigen::Vector2d z = yv.head<2>(), zeta = yv.tail<2>();
            Eigen::Matrix2d g, dg0, dg1;
            m.interior2(z, g, dg0, dg1);
            Eigen::Vector2d v = g.inverse() * zeta;
            dy.resize(4);
            dy.head<2>() = v;
            dy(2) = 0.5 * v.dot(dg0 * v);
            dy(3) = 0.5 * v.dot(dg1 * v);
        };
    }
    return [&m, n](double, const Vec& yv, Vec& dy) {
        Vec z = yv.head(n), zeta = yv.tail(n);
        MetricEval ev = m.interior(z);
        Eigen::LDLT<Mat> ldlt(ev.g);
        Vec v = ldlt.solve(zeta);  // raised index
        dy.resize(2 * n);
        dy.head(n) = v;
        for (int i = 0; i < n; ++i) dy(n + i) = 0.5 * v.dot(ev.dg[i] * v);
    };
}

}  // namespace

double default_s_max(const Vec& w, double x_switch) {
    return 10.0 * (w.norm() + 1.0) + 3.0 / x_switch;
}

//----------------- interior leg -----------------//

InteriorTrajectory::InteriorTrajectory(const ScatteringMetric& m, Vec w, Vec eta_hat,
                                       OdeSolution sol)
    : metric_(&m), w_(std::move(w)), eta_hat_(std::move(eta_hat)), ode_(std::move(sol)) {}

InteriorCotangentState InteriorTrajectory::at(double s) const {
    const int n = metric_->dim();
    Vec yv = ode_.eval(s);
    InteriorCotangentState st;
    st.z = yv.head(n);
    st.zeta = s * yv.tail(n);
    st.eta = eta_hat_;
    st.tau = 0.5 * s * s;
    st.s = s;
    return st;
}

double InteriorTrajectory::energy_drift(int n_check) const {
    double worst = 0;
    const int n = metric_->dim();
    for (int i = 0; i <= n_check; ++i) {
        double s = ode_.t_start() + (ode_.t_end - ode_.t_start()) * i / n_check;
        Vec yv = ode_.eval(s);
        double H = metric_->hamiltonian(yv.head(n), yv.tail(n));
        worst = std::max(worst, std::abs(H - 0.5));
    }
    return worst;
}

InteriorTrajectory integrate_interior(const ScatteringMetric& m, const Vec& w,
                                      const Vec& eta_hat, double s_max, double tol,
                                      std::optional<double> x_event) {
    if (tol <= 0) throw DomainError("integrate_interior: tol must be > 0");
    double nrm = m.covector_norm(w, eta_hat);
    if (std::abs(nrm - 1.0) > 1e-10) {
        std::ostringstream os;
        os << "integrate_interior: |eta_hat|_g = " << nrm << " is not unit";
        throw DomainError(os.str());
    }
    const int n = m.dim();
    Vec y0(2 * n);
    y0.head(n) = w;
    y0.tail(n) = eta_hat;

    OdeOptions opt;
    opt.rtol = tol;
    opt.atol = tol * 1e-3;

    OdeEvent ev = nullptr;
    if (x_event) {
        double r_cross = 1.0 / *x_event;
        ev = [n, r_cross](double, const Vec& yv) { return r_cross - yv.head(n).norm(); };
        opt.event_direction_down = true;  // |z| increasing through r_cross
    }
    OdeSolution sol = integrate_ode(cogeodesic_rhs(m), 0.0, y0, s_max, opt, ev);
    return InteriorTrajectory(m, w, eta_hat, std::move(sol));
}

//----------------- coordinate switches -----------------//

BCoordState to_B_coords(const ScatteringMetric& m, const InteriorCotangentState& st) {
    BoundaryChartPoint bp = m.to_boundary_chart(st.z);  // throws if x >= x0
    ChartFrame fr = chart_frame(m, bp.x, bp.y);
    const double x = bp.x;
    BCoordState b;
    b.x = x;
    b.y = bp.y;
    double zeta_x = st.zeta.dot(fr.dz_dx);
    b.lambda = x * x * x * zeta_x;
    b.mu = Vec(m.dim() - 1);
    for (int i = 0; i < m.dim() - 1; ++i) b.mu(i) = x * x * st.zeta.dot(fr.dz_dy[i]);
    b.xi = x * x * (-st.s * st.eta);  // flowed w-covector is -s * eta_hat
    b.kappa = x * x * st.tau;
    return b;
}

BlownUpState blow_up(const BCoordState& b) {
    if (b.x <= 0) throw DomainError("blow_up: requires x > 0");
    BlownUpState s;
    s.x = b.x;
    s.y = b.y;
    s.Lambda = (b.lambda + 1.0) / b.x;
    s.M = b.mu / b.x;
    s.Xi = b.xi / b.x;
    return s;
}

BCoordState blow_down(const ScatteringMetric& m, const BlownUpState& s) {
    if (s.x <= 0) throw DomainError("blow_down: requires x > 0");
    BCoordState b;
    b.x = s.x;
    b.y = s.y;
    b.lambda = -1.0 + s.x * s.Lambda;
    b.mu = s.x * s.M;
    b.xi = s.x * s.Xi;
    Mat h = m.boundary_metric(s.x, s.y).h;
    // kappa from the characteristic variety
    Mat hinv = h.ldlt().solve(Mat::Identity(h.rows(), h.cols()));
    b.kappa = 0.5 * (b.lambda * b.lambda + b.mu.dot(hinv * b.mu));
    return b;
}

//----------------- blown-up leg -----------------//

namespace {

// State packing for the blown-up field, parametrized by ell = log(x_start/x):
// Y = (y, Lambda, M, Xi).  x = x_start * exp(-ell).
OdeRhs blownup_rhs(const ScatteringMetric& m, double x_start) {
    const int n = m.dim(), nb = n - 1;
    return [&m, x_start, n, nb](double ell, const Vec& Y, Vec& dY) {
        double x = x_start * std::exp(-ell);
        Vec y = Y.segment(0, nb);
        double Lambda = Y(nb);
        Vec M = Y.segment(nb + 1, nb);
        Vec Xi = Y.segment(2 * nb + 1, n);

        BoundaryMetricEval h = m.boundary_metric(x, y);
        Mat hinv = h.h.ldlt().solve(Mat::Identity(nb, nb));
        // d h^{ij} = -h^{ik} (d h_{kl}) h^{lj}
        Mat dhinv_dx = -hinv * h.dh_dx * hinv;

        double denom = 1.0 - x * Lambda;
        if (std::abs(denom) < 0.05)
            throw NonConvergence("blown-up flow lost transversality (1 - x*Lambda ~ 0)");
        double fac = x / denom;

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
        dY.segment(2 * nb + 1, n) = fac * Lambda * Xi;
    };
}

Vec pack_blownup(const BlownUpState& s, int n) {
    int nb = n - 1;
    Vec Y(2 * nb + 1 + n);
    Y.segment(0, nb) = s.y;
    Y(nb) = s.Lambda;
    Y.segment(nb + 1, nb) = s.M;
    Y.segment(2 * nb + 1, n) = s.Xi;
    return Y;
}

BlownUpState unpack_blownup(const Vec& Y, double x, int n) {
    int nb = n - 1;
    BlownUpState s;
    s.x = x;
    s.y = Y.segment(0, nb);
    s.Lambda = Y(nb);
    s.M = Y.segment(nb + 1, nb);
    s.Xi = Y.segment(2 * nb + 1, n);
    return s;
}

}  // namespace

BlownUpTrajectory::BlownUpTrajectory(const ScatteringMetric& m, BlownUpState start,
                                     OdeSolution sol)
    : metric_(&m), start_(std::move(start)), ode_(std::move(sol)) {}

double BlownUpTrajectory::x_reached() const { return start_.x * std::exp(-ode_.t_end); }

BlownUpState BlownUpTrajectory::at_x(double x) const {
    if (x > start_.x * (1 + 1e-12) || x < x_reached() * (1 - 1e-12))
        throw DomainError("BlownUpTrajectory::at_x: x outside covered range");
    double ell = std::log(start_.x / x);
    return unpack_blownup(ode_.eval(ell), x, metric_->dim());
}

BlownUpTrajectory integrate_blownup(const ScatteringMetric& m, const BlownUpState& start,
                                    double x_stop, double tol) {
    if (tol <= 0) throw DomainError("integrate_blownup: tol must be > 0");
    if (!(0 < x_stop && x_stop < start.x))
        throw DomainError("integrate_blownup: need 0 < x_stop < start.x");
    if (start.x >= m.x0())
        throw DomainError("integrate_blownup: start outside collar (x >= x0)");
    double denom0 = 1.0 - start.x * start.Lambda;
    if (denom0 < 0.05)
        throw NonConvergence("integrate_blownup: start not transverse (1 - x*Lambda too small)");

    double ell_end = std::log(start.x / x_stop);
    OdeOptions opt;
    opt.rtol = tol;
    opt.atol = tol * 1e-3;
    OdeSolution sol =
        integrate_ode(blownup_rhs(m, start.x), 0.0, pack_blownup(start, m.dim()), ell_end, opt);
    return BlownUpTrajectory(m, start, std::move(sol));
}

//----------------- front-face limit -----------------//

FrontFaceData front_face_limit(const BlownUpTrajectory& traj, double tol, int nodes) {
    if (nodes < 2) throw DomainError("front_face_limit: need at least 2 nodes");
    double x_lo = traj.x_reached();
    double x_hi = traj.x_start();
    // geometric ladder x_lo * 2^j, clipped to the covered range
    std::vector<double> xs;
    for (int j = 0; j < nodes; ++j) {
        double x = x_lo * std::pow(2.0, j);
        if (x > x_hi) break;
        xs.push_back(x);
    }
    if (xs.size() < 2) throw DomainError("front_face_limit: trajectory range too short");

    const int m = int(xs.size());
    std::vector<BlownUpState> states;
    for (double x : xs) states.push_back(traj.at_x(x));

    int nb = int(states[0].y.size()), n = int(states[0].Xi.size());
    int ncomp = nb + 1 + nb + n;
    auto comp = [&](const BlownUpState& s, int k) -> double {
        if (k < nb) return s.y(k);
        if (k == nb) return s.Lambda;
        if (k < 2 * nb + 1) return s.M(k - nb - 1);
        return s.Xi(k - 2 * nb - 1);
    };

    Vec limit(ncomp);
    double est = 0;
    for (int k = 0; k < ncomp; ++k) {
        // Neville tableau evaluated at x = 0
        std::vector<double> T(m);
        for (int i = 0; i < m; ++i) T[i] = comp(states[i], k);
        double prev_diag = T[0];
        for (int j = 1; j < m; ++j) {
            for (int i = 0; i < m - j; ++i)
                T[i] = T[i + 1] + (T[i] - T[i + 1]) * xs[i + j] / (xs[i + j] - xs[i]);
            if (j == m - 1) est = std::max(est, std::abs(T[0] - prev_diag));
            prev_diag = T[0];
        }
        limit(k) = T[0];
    }

    FrontFaceData out;
    out.y0 = limit.segment(0, nb);
    if (nb == 1) {
        double a = std::remainder(out.y0(0), 2.0 * M_PI);
        out.y0(0) = (a <= -M_PI) ? a + 2.0 * M_PI : a;
    }
    out.Lambda = limit(nb);
    out.M = limit.segment(nb + 1, nb);
    out.Xi = limit.segment(2 * nb + 1, n);
    out.error_estimate = est;
    out.converged = est <= tol;
    return out;
}

//----------------- classification and pipeline -----------------//

namespace {

// Crossing radius for the collar handoff.  Seeds already beyond 1/x_switch get a
// proportionally larger crossing radius so the event is always an outward crossing
// with the radial momentum bounded away from zero.
double handoff_x(const Vec& w, double x_switch) {
    double r_cross = std::max(1.000001 / x_switch, 1.5 * w.norm());
    return 1.0 / r_cross;
}

}  // namespace

RayClassification classify_ray(const ScatteringMetric& m, const Vec& w, const Vec& eta_hat,
                               double s_max, const FlowOptions& opt) {
    double x_switch = opt.x_switch > 0 ? opt.x_switch : m.x0() / 4;
    if (s_max <= 0) s_max = opt.s_max > 0 ? opt.s_max : default_s_max(w, x_switch);
    RayClassification rc;
    rc.s_max_used = s_max;
    InteriorTrajectory traj =
        integrate_interior(m, w, eta_hat, s_max, opt.tol, handoff_x(w, x_switch));
    if (traj.status() == OdeStatus::event) {
        rc.tag = RayTag::nontrapped;
        rc.escape_s = traj.s_end();
    } else if (traj.status() == OdeStatus::ok) {
        rc.tag = RayTag::undecided;
    } else {
        std::ostringstream os;
        os << "classify_ray: integration failed at s = " << traj.s_end();
        throw NonConvergence(os.str());
    }
    return rc;
}

EscapeResult escape_to_front_face(const ScatteringMetric& m, const Vec& w,
                                  const Vec& eta_hat, const FlowOptions& opt) {
    double x_switch = opt.x_switch > 0 ? opt.x_switch : m.x0() / 4;
    double s_max = opt.s_max > 0 ? opt.s_max : default_s_max(w, x_switch);

    InteriorTrajectory traj =
        integrate_interior(m, w, eta_hat, s_max, opt.tol, handoff_x(w, x_switch));
    if (traj.status() == OdeStatus::ok)
        throw DomainError("escape_to_front_face: ray undecided within s_max (possibly trapped)");
    if (traj.status() != OdeStatus::event) {
        std::ostringstream os;
        os << "escape_to_front_face: interior integration failed at s = " << traj.s_end();
        throw NonConvergence(os.str());
    }

    EscapeResult res;
    res.classification.tag = RayTag::nontrapped;
    res.classification.escape_s = traj.s_end();
    res.classification.s_max_used = s_max;
    res.handoff = traj.at(traj.s_end());

    BCoordState b = to_B_coords(m, res.handoff);
    BlownUpState bu = blow_up(b);
    double x_stop = opt.x_stop;
    BlownUpTrajectory btraj = integrate_blownup(m, bu, x_stop, opt.tol);
    if (!btraj.reached_stop())
        throw NonConvergence("escape_to_front_face: blown-up leg did not reach x_stop");
    res.front_face = front_face_limit(btraj, opt.ff_tol, opt.extrap_nodes);
    // deepen until the extrapolation error estimate meets the tolerance
    while (!res.front_face.converged && x_stop > 1e-8) {
        x_stop /= 16.0;
        BlownUpState deeper = btraj.at_x(btraj.x_reached());
        BlownUpTrajectory ext = integrate_blownup(m, deeper, x_stop, opt.tol);
        if (!ext.reached_stop()) break;
        btraj = std::move(ext);
        res.front_face = front_face_limit(btraj, opt.ff_tol, opt.extrap_nodes);
    }
    return res;
}

}  // namespace conicflow
