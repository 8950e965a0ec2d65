#ifndef CONICFLOW_FLOW_HPP
#define CONICFLOW_FLOW_HPP

#include <optional>

#include "conicflow/metric.hpp"
#include "conicflow/ode.hpp"

namespace conicflow {

// Phase-space point over the interior, on the unit-speed ray from (w, eta_hat).
// zeta is the grown covector s * zetahat(s); eta is the frozen initial unit
// covector slot; the flowed w-covector is -s * eta.  tau = s^2/2.
struct InteriorCotangentState {
    Vec z;
    Vec zeta;
    Vec eta;
    double tau = 0;
    double s = 0;
};

// Rescaled boundary coordinates: lambda = x^3 zeta_x, mu = x^2 zeta_y,
// xi = x^2 eta_flowed, kappa = x^2 tau.
struct BCoordState {
    double x = 0;
    Vec y;
    double lambda = 0;
    Vec mu;
    Vec xi;
    double kappa = 0;
};

// Blown-up coordinates Lambda = (lambda+1)/x, M = mu/x, Xi = xi/x.
struct BlownUpState {
    double x = 0;
    Vec y;
    double Lambda = 0;
    Vec M;
    Vec Xi;
};

BCoordState to_B_coords(const ScatteringMetric& m, const InteriorCotangentState& st);
BlownUpState blow_up(const BCoordState& b);
BCoordState blow_down(const ScatteringMetric& m, const BlownUpState& s);

struct FlowOptions {
    double tol = 1e-9;      // interior integrator relative tolerance
    double x_switch = 0;    // 0: x0/4
    double x_stop = 1e-5;   // blown-up leg integrates down to this x
    double s_max = 0;       // 0: 10(|w|+1) + 3/x_switch
    int extrap_nodes = 5;   // geometric ladder x_stop * 2^j
    double ff_tol = 1e-8;   // required front-face extrapolation error estimate
};

//----------------- interior leg -----------------//

class InteriorTrajectory {
public:
    InteriorTrajectory(const ScatteringMetric& m, Vec w, Vec eta_hat, OdeSolution sol);

    InteriorCotangentState at(double s) const;
    double s_end() const { return ode_.t_end; }
    OdeStatus status() const { return ode_.status; }
    const OdeSolution& ode() const { return ode_; }
    const Vec& start_point() const { return w_; }
    const Vec& start_covector() const { return eta_hat_; }

    // max |H(z, s*zetahat) - s^2/2| over n_check dense samples
    double energy_drift(int n_check = 64) const;

private:
    const ScatteringMetric* metric_;
    Vec w_, eta_hat_;
    OdeSolution ode_;
};

// Unit cogeodesic flow of (1/2)|zeta|_g^2 from (w, eta_hat); |eta_hat|_g = 1
// required within 1e-10.  With an event, stops at the first downward crossing of
// x through x_event with outward radial motion.
InteriorTrajectory integrate_interior(const ScatteringMetric& m, const Vec& w,
                                      const Vec& eta_hat, double s_max, double tol,
                                      std::optional<double> x_event = std::nullopt);

//----------------- blown-up leg -----------------//

class BlownUpTrajectory {
public:
    BlownUpTrajectory(const ScatteringMetric& m, BlownUpState start, OdeSolution sol);

    // dense state at given x in [x_reached, x_start]
    BlownUpState at_x(double x) const;
    double x_start() const { return start_.x; }
    double x_reached() const;
    bool reached_stop() const { return ode_.status == OdeStatus::ok; }
    OdeStatus status() const { return ode_.status; }
    const BlownUpState& start() const { return start_; }

private:
    const ScatteringMetric* metric_;
    BlownUpState start_;
    OdeSolution ode_;  // parametrized by ell = log(x_start/x)
};

// Integrates the rescaled blown-up field W = V/x from start down to x = x_stop.
// Fails (NonConvergence) if transversality 1 - x*Lambda degrades toward 0.
BlownUpTrajectory integrate_blownup(const ScatteringMetric& m, const BlownUpState& start,
                                    double x_stop, double tol);

//----------------- front-face limit -----------------//

struct FrontFaceData {
    Vec y0;          // boundary point (angle normalized to (-pi, pi] for n = 2)
    double Lambda = 0;
    Vec M;
    Vec Xi;
    double error_estimate = 0;
    bool converged = false;
};

FrontFaceData front_face_limit(const BlownUpTrajectory& traj, double tol = 1e-8,
                               int nodes = 5);

//----------------- trapping classification -----------------//

enum class RayTag { nontrapped, undecided };

struct RayClassification {
    RayTag tag = RayTag::undecided;
    double escape_s = 0;  // valid when nontrapped
    double s_max_used = 0;
};

// Nontrapped iff the ray reaches x < x_switch with outward radial motion before
// s_max.  Finite horizon: never claims "trapped".
RayClassification classify_ray(const ScatteringMetric& m, const Vec& w, const Vec& eta_hat,
                               double s_max = 0, const FlowOptions& opt = {});

//----------------- combined escape pipeline -----------------//

struct EscapeResult {
    RayClassification classification;
    InteriorCotangentState handoff;  // state at the x_switch crossing
    FrontFaceData front_face;
};

// Interior leg to the collar, coordinate switch, blown-up leg, extrapolation.
// Throws DomainError for undecided rays.
EscapeResult escape_to_front_face(const ScatteringMetric& m, const Vec& w,
                                  const Vec& eta_hat, const FlowOptions& opt = {});

double default_s_max(const Vec& w, double x_switch);

}  // namespace conicflow

#endif
