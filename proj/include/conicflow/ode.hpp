#ifndef CONICFLOW_ODE_HPP
#define CONICFLOW_ODE_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace conicflow {

using Vec = Eigen::VectorXd;

using OdeRhs = std::function<void(double t, const Vec& y, Vec& dydt)>;
// Event functions report a sign change; the integrator locates the root.
using OdeEvent = std::function<double(double t, const Vec& y)>;

struct OdeOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    double h_initial = 0.0;   // 0: choose automatically
    double h_max = 0.0;       // 0: |t1 - t0|
    long max_steps = 1000000;
    bool event_direction_down = true;  // only trigger on decreasing crossings
    bool store_dense = true;  // false: keep endpoint only (events still located)
};

enum class OdeStatus { ok, event, step_underflow, max_steps };

// One accepted step with the coefficients of the continuous extension.
struct OdeStep {
    double t0, h;
    Vec c1, c2, c3, c4, c5;  // quartic interpolant in theta = (t - t0)/h
};

struct OdeSolution {
    OdeStatus status = OdeStatus::ok;
    double t_end = 0;       // last time reached (event time if status == event)
    Vec y_end;
    std::vector<OdeStep> steps;
    long n_steps = 0, n_rejected = 0, n_rhs = 0;

    // Dense evaluation; t clamped to the covered interval.
    Vec eval(double t) const;
    double t_start() const { return steps.empty() ? t_end : steps.front().t0; }
};

// Adaptive Dormand-Prince 5(4) with the standard quartic continuous extension.
// Integrates from t0 to t1 (t1 > t0); stops early when the event crosses zero.
OdeSolution integrate_ode(const OdeRhs& rhs, double t0, const Vec& y0, double t1,
                          const OdeOptions& opt = {}, const OdeEvent& event = nullptr);

// Fixed-step classical RK4 (used by oracle-style comparisons).
Vec rk4_integrate(const OdeRhs& rhs, double t0, const Vec& y0, double t1, long n_steps);

}  // namespace conicflow

#endif
