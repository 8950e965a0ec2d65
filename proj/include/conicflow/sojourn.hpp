#ifndef CONICFLOW_SOJOURN_HPP
#define CONICFLOW_SOJOURN_HPP

#include "conicflow/flow.hpp"

namespace conicflow {

// Point of the boundary scattering cotangent space: (y0, nu, mu) with nu the
// sojourn time and mu the approach-angle covector in the boundary chart.
struct SojournData {
    Vec y0;
    double nu = 0;
    Vec mu;
    double error_estimate = 0;
};

struct SourcePoint {
    Vec w;
    Vec eta_hat;  // unit covector, |eta_hat|_g(w) = 1
};

enum class SojournKind { forward, backward };

SourcePoint make_source(const ScatteringMetric& m, const Vec& w, const Vec& direction);

// S_f(w, eta) = (y0, -Lambda*, M*) read off the front face of the blown-up flow.
SojournData sojourn_forward(const ScatteringMetric& m, const SourcePoint& src, double tol,
                            const FlowOptions& fopt = {});

// S_b(w, eta) = -S_f(w, -eta); negation acts on the fiber (nu, mu).
SojournData sojourn_backward(const ScatteringMetric& m, const SourcePoint& src, double tol,
                             const FlowOptions& fopt = {});

SojournData scale_fiber(const SojournData& sd, double c);   // c > 0
SojournData negate_fiber(const SojournData& sd);

// Sine of the angle between the pullback of the contact form mu.dy - dnu under
// S_f and the canonical 1-form eta.dw on S*X (0 means exactly proportional).
// Finite-difference Jacobian over the coordinates (w, fiber angle); n = 2.
double contact_defect(const ScatteringMetric& m, const SourcePoint& src, double fd_step,
                      const FlowOptions& fopt = {});

struct InvertOptions {
    double fd_step = 1e-6;   // Newton Jacobian step
    int max_iterations = 50;
    FlowOptions flow;
};

// Multidimensional shooting: finds src with S_f(src) = target (or S_b for
// backward).  Initial guess by integrating outward from near the front face.
SourcePoint invert_sojourn(const ScatteringMetric& m, const SojournData& target,
                           SojournKind which, double tol, const InvertOptions& opt = {});

// Theorem 1.2 predictor: the interior phase-space point whose propagated
// singularity at time t produces scattering data q.
SourcePoint predict_interior_wf(const ScatteringMetric& m, const SojournData& q, double t,
                                double tol, const InvertOptions& opt = {});

//----------------- coordinates on S*X (n = 2) -----------------//

Vec source_to_coords(const SourcePoint& src);                        // (w1, w2, phi)
SourcePoint coords_to_source(const ScatteringMetric& m, const Vec& c);

}  // namespace conicflow

#endif
