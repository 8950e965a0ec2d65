#ifndef CONICFLOW_METRIC_HPP
#define CONICFLOW_METRIC_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "conicflow/errors.hpp"

namespace conicflow {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

//----------------- smooth bump profiles -----------------//

// C^3 profile on [-1,1]: B(0) = 1, B and three derivatives vanish at |u| = 1.
double bump_profile(double u);        // (1 - u^2)^4
double bump_profile_deriv(double u);  // -8 u (1 - u^2)^3

// C^2 monotone step: 0 for u <= 0, 1 for u >= 1 (quintic smoothstep).
double smoothstep(double u);

struct MetricEval {
    Mat g;                 // g_ij(z), n x n symmetric
    std::vector<Mat> dg;   // dg[k](i,j) = d g_ij / d z_k
};

struct BoundaryMetricEval {
    Mat h;                 // h_ij(x,y), (n-1) x (n-1) positive definite
    Mat dh_dx;
    std::vector<Mat> dh_dy;  // one per y component
};

struct BoundaryChartPoint {
    double x = 0;
    Vec y;  // n-1 boundary coordinates
};

// Carries the interior representation and, when the point lies in the collar
// overlap x_interior < x < x0, the boundary chart representation as well.
struct ChartPoint {
    Vec z;
    std::optional<BoundaryChartPoint> boundary;
};

// Compactly supported potential with a constant plateau: V = amplitude for
// |z - center| <= inner_radius, smoothly 0 beyond outer_radius.
struct BumpPotential {
    double amplitude = 0;
    Vec center;
    double inner_radius = 0;
    double outer_radius = 0;
};

enum class MetricFamily { euclidean, conformal_bump, surface_revolution };

const char* family_name(MetricFamily f);

// Asymptotically conic metric in the normal form dx^2/x^4 + h(x,y)/x^2 near the
// boundary, realized on the global Cartesian chart of the interior.  All three
// built-in families are exactly Euclidean outside a compact set, so the collar
// boundary data is the round metric on the sphere at infinity.
//
// Immutable after construction; all evaluators are pure and reentrant.
class ScatteringMetric {
public:
    static ScatteringMetric euclidean(int dim, double x0 = 0.5);
    // g = (1 + eps * phi(z)) * delta with phi a bump of the given radius about center.
    static ScatteringMetric conformal_bump(int dim, double eps, double bump_radius,
                                           const Vec& center, double x0 = 0.0);
    // n = 2 metric dr^2 + f(r)^2 dtheta^2 with f(r) = r + amp * B((r - rc)/w),
    // B supported on [r1, r2].  amp large enough makes f' vanish: trapped equator.
    static ScatteringMetric surface_revolution(double amp, double r1, double r2,
                                               double x0 = 0.0);

    int dim() const { return dim_; }
    MetricFamily family() const { return family_; }
    double x0() const { return x0_; }
    double x_interior() const { return x_interior_; }
    void set_x_interior(double xi);
    std::optional<double> flat_outside_radius() const { return flat_outside_radius_; }
    bool is_exactly_flat() const;  // identically Euclidean with this chart

    void set_bump_potential(double amplitude, const Vec& center, double inner_radius,
                            double outer_radius);
    const std::optional<BumpPotential>& potential_spec() const { return potential_; }

    //----------------- interior chart evaluators -----------------//

    MetricEval interior(const Vec& z) const;    // g_ij and first partials
    Mat interior_metric(const Vec& z) const;    // g_ij(z)
    Mat interior_cometric(const Vec& z) const;  // g^{ij}(z)

    // Allocation-free n = 2 evaluator for integrator inner loops.
    void interior2(const Eigen::Vector2d& z, Eigen::Matrix2d& g, Eigen::Matrix2d& dg0,
                   Eigen::Matrix2d& dg1) const;

    // Principal energy (1/2) g^{ij} zeta_i zeta_j; V excluded (subprincipal).
    double hamiltonian(const Vec& z, const Vec& zeta) const;

    double potential(const Vec& z) const;  // V(z)

    // |v|_g for a covector, and normalization to unit length.
    double covector_norm(const Vec& z, const Vec& zeta) const;
    Vec unit_covector(const Vec& z, const Vec& zeta) const;

    //----------------- boundary chart -----------------//

    BoundaryMetricEval boundary_metric(double x, const Vec& y) const;

    BoundaryChartPoint to_boundary_chart(const Vec& z) const;  // requires x(z) < x0
    Vec from_boundary_chart(double x, const Vec& y) const;
    Vec from_boundary_chart(const BoundaryChartPoint& p) const;
    ChartPoint chart_point(const Vec& z) const;

    double boundary_defining_function(const Vec& z) const;  // x = 1/|z|

    // max over sampled collar points of | |d(scale x)/(scale x)^2|_g - 1 |.
    double check_bdf_normalization(double scale = 1.0, int samples = 1000) const;
    // per-sample values (x, deviation) for rate checks
    std::vector<std::pair<double, double>> bdf_normalization_samples(double scale,
                                                                     int samples) const;

    // For the surface-of-revolution family: radius of the trapped equator,
    // i.e. the root of f'(r) = 0 with f'' < 0, if the profile has one.
    std::optional<double> trapped_equator_radius() const;

    double sor_profile(double r) const;        // f(r)
    double sor_profile_deriv(double r) const;  // f'(r)

    std::string describe() const;

private:
    ScatteringMetric() = default;

    int dim_ = 2;
    MetricFamily family_ = MetricFamily::euclidean;
    double x0_ = 0.5;
    double x_interior_ = 0.25;
    std::optional<double> flat_outside_radius_;
    std::optional<BumpPotential> potential_;

    // conformal bump parameters
    double eps_ = 0;
    double bump_radius_ = 1;
    Vec bump_center_;

    // surface-of-revolution parameters
    double sor_amp_ = 0;
    double sor_r1_ = 1;
    double sor_r2_ = 3;
};

}  // namespace conicflow

#endif
