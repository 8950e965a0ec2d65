#ifndef CONICFLOW_PARAMETRIX_HPP
#define CONICFLOW_PARAMETRIX_HPP

#include <complex>
#include <vector>

#include "conicflow/geodesic.hpp"

namespace conicflow {

using Cplx = std::complex<double>;

struct TransportOptions {
    int quad_nodes = 20;       // Gauss-Legendre nodes for the a0 log-integral
    double hess_step = 5e-4;   // FD step for the Hessian of Phi (applied to grad)
    double tube_step = 3e-3;   // transverse offset of the a1 tube geodesics
    int a1_quad_nodes = 10;    // nodes per panel for the a1 source integral
    int a1_panels = 4;
    int a0_inner_nodes = 10;   // a0 quadrature inside tube evaluations
    BvpOptions bvp;
};

struct AmplitudeJet {
    double a0 = 1;
    Cplx a1 = 0;
    bool has_a1 = false;
    long bvp_solves = 0;       // evaluation metadata
    double hess_step = 0, tube_step = 0;
};

// Leading transport amplitude along the segment: solves s (log a0)' = f with
// f = (1/2) Delta Phi + n/2 (positive Laplacian) and a0 = 1 on the diagonal.
double transport_a0(const ScatteringMetric& m, const GeodesicSegment& seg,
                    const TransportOptions& opt = {});

// Second amplitude: s a1' + (1 - f) a1 = (i/2) Delta a0 - i V a0, regular at s = 0.
Cplx transport_a1(const ScatteringMetric& m, const GeodesicSegment& seg,
                  const TransportOptions& opt = {});

// Diagonal value a1(w, w) = (i/2) Delta a0|_w - i V(w).
Cplx transport_a1_diagonal(const ScatteringMetric& m, const Vec& w,
                           const TransportOptions& opt = {});

//----------------- short-time kernel -----------------//

// Cached smooth fields of the kernel at one (z, w) pair; t-independent.
struct KernelFields {
    bool inside = false;  // within the cutoff support
    double d = 0, phi = 0, chi = 0;
    Vec grad_phi;
    double a0 = 1;
    Cplx a1 = 0;
};

class ParametrixKernel {
public:
    ParametrixKernel(const ScatteringMetric& m, int order_J, double iota_bound,
                     TransportOptions topt = {});

    const ScatteringMetric& metric() const { return *metric_; }
    int order() const { return J_; }
    double iota() const { return iota_; }
    double cutoff_inner() const { return iota_ / 4; }  // chi = 1 below
    double cutoff_outer() const { return iota_ / 2; }  // chi = 0 above

    // quintic-matched cutoff in the distance variable
    double cutoff(double d) const;

    KernelFields fields(const Vec& z, const Vec& w) const;
    Cplx eval_from_fields(const KernelFields& f, double t) const;

    // (2 pi)^{-n/2} chi(d) t^{-n/2} e^{i Phi / t} (a0 + t a1); exactly zero for
    // d >= iota/2.
    Cplx eval(const Vec& z, const Vec& w, double t) const;

    const TransportOptions& transport_options() const { return topt_; }

private:
    const ScatteringMetric* metric_;
    int J_;
    double iota_;
    TransportOptions topt_;
};

//----------------- residual order measurement -----------------//

struct ResidualOrderResult {
    double slope = 0;
    std::vector<std::pair<double, double>> norms;  // (t, weighted residual norm)
    std::pair<double, double> used_t_range{0, 0};
    int n_grid = 0;
    double max_outside_cutoff = 0;  // |U| sampled beyond the support; must be 0
};

// Applies t (D_t + H) to the kernel by finite differences on a polar grid inside
// the chi = 1 region and fits the log-log slope of the t^{n/2}-weighted norm.
ResidualOrderResult residual_order(const ParametrixKernel& kernel, const Vec& w, int n_radii,
                                   int n_angles, const std::vector<double>& t_list);

//----------------- quadrature helper -----------------//

// Gauss-Legendre nodes/weights on [0, 1].
void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace conicflow

#endif
