#ifndef CONICFLOW_GEODESIC_HPP
#define CONICFLOW_GEODESIC_HPP

#include <optional>

#include "conicflow/metric.hpp"
#include "conicflow/ode.hpp"

namespace conicflow {

// Two-point geodesic in affine parametrization over [0,1] (constant speed d).
struct GeodesicSegment {
    Vec w, z;
    Vec p0;           // initial covector; |p0|_g(w) = d
    double length = 0;
    Vec grad_phi_z;   // terminal covector = gradient of d^2/2 at z
    double endpoint_miss = 0;
    OdeSolution path;  // state (position, covector) over t in [0,1]

    Vec point(double t) const { return path.eval(t).head(w.size()); }
    Vec covector(double t) const { return path.eval(t).tail(w.size()); }
};

struct BvpOptions {
    double tol = 1e-11;        // endpoint miss target; Newton polishes to the floor
    double iota_bound = 0;     // 0: unbounded
    int max_iterations = 50;
    double ode_tol = 1e-12;
};

// Shooting/Newton solution of the two-point problem.  guess, when given, is the
// starting covector (warm start for nearby targets).
GeodesicSegment geodesic_bvp(const ScatteringMetric& m, const Vec& w, const Vec& z,
                             const BvpOptions& opt = {}, const Vec* guess = nullptr);

// Phi = d(w,z)^2 / 2.
double phase_phi(const ScatteringMetric& m, const Vec& w, const Vec& z,
                 const BvpOptions& opt = {});

// Relative defect of (1/2)|grad_z Phi|_g^2 = Phi with the gradient by central FD.
double eikonal_residual(const ScatteringMetric& m, const Vec& w, const Vec& z,
                        double fd_step = 1e-6, const BvpOptions& opt = {});

}  // namespace conicflow

#endif
