#include "conicflow/ode.hpp"

#include <algorithm>
#include <cmath>

#include "conicflow/errors.hpp"

namespace conicflow {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
// 5th-order minus embedded 4th-order weights
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// continuous extension
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

Vec eval_step(const OdeStep& s, double t) {
    double th = (t - s.t0) / s.h;
    double th1 = 1.0 - th;
    return s.c1 + th * (s.c2 + th1 * (s.c3 + th * (s.c4 + th1 * s.c5)));
}

}  // namespace

Vec OdeSolution::eval(double t) const {
    if (steps.empty()) return y_end;
    if (t <= steps.front().t0) return eval_step(steps.front(), steps.front().t0);
    if (t >= t_end) return y_end;
    // binary search for the covering step
    size_t lo = 0, hi = steps.size() - 1;
    while (lo < hi) {
        size_t mid = (lo + hi + 1) / 2;
        if (steps[mid].t0 <= t)
            lo = mid;
        else
            hi = mid - 1;
    }
    return eval_step(steps[lo], t);
}

OdeSolution integrate_ode(const OdeRhs& rhs, double t0, const Vec& y0, double t1,
                          const OdeOptions& opt, const OdeEvent& event) {
    const int n = int(y0.size());
    OdeSolution sol;
    sol.y_end = y0;
    sol.t_end = t0;
    if (t1 <= t0) return sol;

    double hmax = opt.h_max > 0 ? opt.h_max : (t1 - t0);
    Vec y = y0, k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), yerr(n);
    rhs(t0, y, k1);
    sol.n_rhs++;

    double h = opt.h_initial;
    if (h <= 0) {
        double d0 = y.norm(), d1n = k1.norm();
        h = (d1n > 1e-10) ? 0.01 * std::max(d0, 1.0) / d1n : 1e-6 * (t1 - t0);
        h = std::min(h, hmax);
    }

    double t = t0;
    double ev_prev = event ? event(t, y) : 0.0;

    while (t < t1) {
        if (sol.n_steps + sol.n_rejected > opt.max_steps) {
            sol.status = OdeStatus::max_steps;
            return sol;
        }
        h = std::min(h, t1 - t);
        if (h < 1e-14 * std::max(1.0, std::abs(t)) || t + h == t) {
            sol.status = OdeStatus::step_underflow;
            return sol;
        }

        ytmp = y + h * (a21 * k1);
        rhs(t + c2 * h, ytmp, k2);
        ytmp = y + h * (a31 * k1 + a32 * k2);
        rhs(t + c3 * h, ytmp, k3);
        ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        rhs(t + c4 * h, ytmp, k4);
        ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        rhs(t + c5 * h, ytmp, k5);
        ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        rhs(t + h, ytmp, k6);
        ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        rhs(t + h, ynew, k7);
        sol.n_rhs += 6;

        yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        double err = 0;
        for (int i = 0; i < n; ++i) {
            double sc = opt.atol + opt.rtol * std::max(std::abs(y(i)), std::abs(ynew(i)));
            double q = yerr(i) / sc;
            err += q * q;
        }
        err = std::sqrt(err / n);

        if (err <= 1.0) {
            OdeStep st;
            st.t0 = t;
            st.h = h;
            Vec ydiff = ynew - y;
            Vec bspl = h * k1 - ydiff;
            st.c1 = y;
            st.c2 = ydiff;
            st.c3 = bspl;
            st.c4 = ydiff - h * k7 - bspl;
            st.c5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
            if (opt.store_dense) sol.steps.push_back(st);
            sol.n_steps++;

            double t_new = t + h;
            if (event) {
                double ev_new = event(t_new, ynew);
                bool crossed = opt.event_direction_down ? (ev_prev > 0 && ev_new <= 0)
                                                        : (ev_prev <= 0 && ev_new > 0);
                if (crossed) {
                    // bisect on the continuous extension
                    const OdeStep& st2 = st;
                    double lo = t, hi = t_new;
                    for (int it = 0; it < 100 && (hi - lo) > 1e-15 * std::max(1.0, std::abs(hi));
                         ++it) {
                        double mid = 0.5 * (lo + hi);
                        double em = event(mid, eval_step(st2, mid));
                        bool below = opt.event_direction_down ? (em <= 0) : (em > 0);
                        if (below)
                            hi = mid;
                        else
                            lo = mid;
                    }
                    sol.t_end = hi;
                    sol.y_end = eval_step(st2, hi);
                    sol.status = OdeStatus::event;
                    return sol;
                }
                ev_prev = ev_new;
            }

            t = t_new;
            y = ynew;
            k1 = k7;  // FSAL
            sol.t_end = t;
            sol.y_end = y;
            double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
            h = std::min(hmax, h * std::clamp(fac, 0.2, 5.0));
        } else {
            sol.n_rejected++;
            double fac = 0.9 * std::pow(err, -0.2);
            h *= std::clamp(fac, 0.1, 0.9);
        }
    }
    sol.status = OdeStatus::ok;
    return sol;
}

Vec rk4_integrate(const OdeRhs& rhs, double t0, const Vec& y0, double t1, long n_steps) {
    if (n_steps <= 0) throw DomainError("rk4_integrate: n_steps must be positive");
    double h = (t1 - t0) / double(n_steps);
    Vec y = y0, k1(y0.size()), k2(y0.size()), k3(y0.size()), k4(y0.size());
    double t = t0;
    for (long i = 0; i < n_steps; ++i) {
        rhs(t, y, k1);
        rhs(t + 0.5 * h, y + 0.5 * h * k1, k2);
        rhs(t + 0.5 * h, y + 0.5 * h * k2, k3);
        rhs(t + h, y + h * k3, k4);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t = t0 + (i + 1) * h;
    }
    return y;
}

}  // namespace conicflow
