#ifndef CONICFLOW_WFSC_HPP
#define CONICFLOW_WFSC_HPP

#include "conicflow/wavefield.hpp"

namespace conicflow {

struct WfscDetection {
    Vec y;       // boundary direction (angle for n = 2)
    double nu = 0;
    Vec mu;
    double strength = 0;
};

struct WfscParams {
    double y0 = 0;                // cone center angle
    double cone_half_angle = 0.3;
    int n_rays = 9;
    double R1 = 0, R2 = 0;        // sampling annulus; R2 = 0: 0.85 * box
    double strength_threshold = 1e-3;
};

// Scattering-wavefront estimator: multiplies the field by e^{-i r^2 / 2t},
// fits the dominant radial frequency (-> nu) along rays in the cone by a
// windowed spectral peak, and reads the transverse phase gradient scaled by
// r (-> mu).  Returns one detection per ray above the strength threshold.
std::vector<WfscDetection> estimate_wfsc(const WavefieldGrid& grid, double t,
                                         const WfscParams& p);

}  // namespace conicflow

#endif
