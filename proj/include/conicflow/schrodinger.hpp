#ifndef CONICFLOW_SCHRODINGER_HPP
#define CONICFLOW_SCHRODINGER_HPP

#include "conicflow/wavefield.hpp"

namespace conicflow {

enum class Scheme { splitstep, cranknicolson };

struct SolverConfig {
    Scheme scheme = Scheme::splitstep;
    double dt = 1e-3;
    double sponge_width = 0;     // absorbing layer width at the box edge; 0 = off
    double sponge_strength = 2;  // damping scale inside the layer
    double krylov_tol = 1e-10;
    int krylov_maxit = 500;
};

struct EvolveReport {
    double mass_initial = 0;   // Riemannian L2 norm
    double mass_final = 0;
    double absorbed = 0;       // norm removed by the sponge (quadrature sum)
    double mass_drift = 0;     // | sqrt(final^2 + absorbed^2) - initial |
    double energy_initial = 0, energy_final = 0;
    long steps = 0;
};

// Integrates D_t u + H u = 0, H = (1/2) Delta_g + V, from grid.time to t_final.
// splitstep (Strang) requires an exactly flat metric; cranknicolson handles
// variable g within the compact region (4th-order divergence-form stencils,
// CG on the normal equations).
EvolveReport evolve(const ScatteringMetric& m, WavefieldGrid& grid, const SolverConfig& cfg,
                    double t_final);

// Quadratic-phase data (2 pi T)^{-n/2} e^{-i|z-w0|^2/2T} times a radial C^2
// cutoff supported in the annulus R1 <= |z| <= R2.
WavefieldGrid make_quadratic_data(int dims, int N, double box, const Vec& w0, double T,
                                  double R1, double R2, double sponge_width = 0);

struct FocusParams {
    int N = 512;
    double box = 20;
    double R1 = 0;  // 0: 0.4 * box
    double R2 = 0;  // 0: 0.8 * box (minus sponge)
};

struct FocusReport {
    Vec peak_location;
    double peak_value = 0;
    double background = 0;
    double ratio = 0;
    double diffraction_width = 0;  // T * pi / R2
    bool conclusive = false;
    EvolveReport evolution;
};

// Evolves the quadratic data to t_eval (default T) and finds the |u| peak in the
// interior region |z| < R1.
FocusReport focusing_experiment(const ScatteringMetric& m, const Vec& w0, double T,
                                const FocusParams& fp, SolverConfig cfg,
                                double t_eval = 0);

// <u, H u> / <u, u> with the Riemannian measure (FD form of H).
double energy_expectation(const ScatteringMetric& m, const WavefieldGrid& grid);

}  // namespace conicflow

#endif
