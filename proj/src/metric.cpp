#include "conicflow/metric.hpp"

#include <cmath>
#include <sstream>

namespace conicflow {

double bump_profile(double u) {
    double v = 1.0 - u * u;
    if (v <= 0.0) return 0.0;
    return v * v * v * v;
}

double bump_profile_deriv(double u) {
    double v = 1.0 - u * u;
    if (v <= 0.0) return 0.0;
    return -8.0 * u * v * v * v;
}

double smoothstep(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

const char* family_name(MetricFamily f) {
    switch (f) {
        case MetricFamily::euclidean: return "euclidean";
        case MetricFamily::conformal_bump: return "conformal_bump";
        case MetricFamily::surface_revolution: return "surface_revolution";
    }
    return "?";
}

//----------------- constructors -----------------//

ScatteringMetric ScatteringMetric::euclidean(int dim, double x0) {
    if (dim < 2) throw DomainError("euclidean metric: dim must be >= 2");
    ScatteringMetric m;
    m.dim_ = dim;
    m.family_ = MetricFamily::euclidean;
    m.x0_ = x0;
    m.x_interior_ = x0 / 2;
    m.flat_outside_radius_ = 0.0;
    return m;
}

ScatteringMetric ScatteringMetric::conformal_bump(int dim, double eps, double bump_radius,
                                                  const Vec& center, double x0) {
    if (dim < 2) throw DomainError("conformal_bump metric: dim must be >= 2");
    if (bump_radius <= 0) throw DomainError("conformal_bump metric: bump_radius must be > 0");
    if (eps <= -1.0) throw DomainError("conformal_bump metric: eps <= -1 is degenerate");
    if (center.size() != dim) throw DomainError("conformal_bump metric: center has wrong dimension");
    ScatteringMetric m;
    m.dim_ = dim;
    m.family_ = MetricFamily::conformal_bump;
    m.eps_ = eps;
    m.bump_radius_ = bump_radius;
    m.bump_center_ = center;
    double support = center.norm() + bump_radius;
    // collar must lie outside the bump support so the normal form is exact there
    if (x0 <= 0) x0 = std::min(0.5, 0.9 / std::max(support, 1.0));
    if (x0 * support >= 1.0)
        throw DomainError("conformal_bump metric: collar x0 overlaps bump support");
    m.x0_ = x0;
    m.x_interior_ = x0 / 2;
    m.flat_outside_radius_ = support;
    return m;
}

ScatteringMetric ScatteringMetric::surface_revolution(double amp, double r1, double r2,
                                                      double x0) {
    if (!(0 < r1 && r1 < r2)) throw DomainError("surface_revolution metric: need 0 < r1 < r2");
    ScatteringMetric m;
    m.dim_ = 2;
    m.family_ = MetricFamily::surface_revolution;
    m.sor_amp_ = amp;
    m.sor_r1_ = r1;
    m.sor_r2_ = r2;
    if (x0 <= 0) x0 = 0.9 / r2;
    if (x0 * r2 >= 1.0)
        throw DomainError("surface_revolution metric: collar x0 overlaps profile support");
    m.x0_ = x0;
    m.x_interior_ = x0 / 2;
    m.flat_outside_radius_ = r2;
    return m;
}

void ScatteringMetric::set_x_interior(double xi) {
    if (!(0 < xi && xi < x0_)) throw DomainError("x_interior must lie in (0, x0)");
    x_interior_ = xi;
}

void ScatteringMetric::set_bump_potential(double amplitude, const Vec& center,
                                          double inner_radius, double outer_radius) {
    if (center.size() != dim_) throw DomainError("potential center has wrong dimension");
    if (!(0 <= inner_radius && inner_radius < outer_radius))
        throw DomainError("potential radii must satisfy 0 <= inner < outer");
    potential_ = BumpPotential{amplitude, center, inner_radius, outer_radius};
}

bool ScatteringMetric::is_exactly_flat() const {
    return family_ == MetricFamily::euclidean ||
           (family_ == MetricFamily::conformal_bump && eps_ == 0.0) ||
           (family_ == MetricFamily::surface_revolution && sor_amp_ == 0.0);
}

//----------------- surface-of-revolution profile -----------------//

double ScatteringMetric::sor_profile(double r) const {
    double rc = 0.5 * (sor_r1_ + sor_r2_), w = 0.5 * (sor_r2_ - sor_r1_);
    return r + sor_amp_ * bump_profile((r - rc) / w);
}

double ScatteringMetric::sor_profile_deriv(double r) const {
    double rc = 0.5 * (sor_r1_ + sor_r2_), w = 0.5 * (sor_r2_ - sor_r1_);
    return 1.0 + (sor_amp_ / w) * bump_profile_deriv((r - rc) / w);
}

std::optional<double> ScatteringMetric::trapped_equator_radius() const {
    if (family_ != MetricFamily::surface_revolution || sor_amp_ <= 0) return std::nullopt;
    // f' = 1 at r1 and dips below zero for amp above threshold; locate the first
    // sign change of f' (local maximum of f) by bisection.
    const int scan = 400;
    double lo = sor_r1_, hi = 0;
    double prev = sor_profile_deriv(lo);
    for (int i = 1; i <= scan; ++i) {
        double r = sor_r1_ + (sor_r2_ - sor_r1_) * i / scan;
        double cur = sor_profile_deriv(r);
        if (prev > 0 && cur <= 0) {
            hi = r;
            lo = sor_r1_ + (sor_r2_ - sor_r1_) * (i - 1) / scan;
            break;
        }
        prev = cur;
    }
    if (hi == 0) return std::nullopt;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (sor_profile_deriv(mid) > 0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

//----------------- interior evaluators -----------------//

MetricEval ScatteringMetric::interior(const Vec& z) const {
    if (z.size() != dim_) throw DomainError("interior(): point has wrong dimension");
    const int n = dim_;
    MetricEval ev;
    ev.g = Mat::Identity(n, n);
    ev.dg.assign(n, Mat::Zero(n, n));

    switch (family_) {
        case MetricFamily::euclidean:
            break;
        case MetricFamily::conformal_bump: {
            Vec d = z - bump_center_;
            double rho = d.norm();
            double u = rho / bump_radius_;
            double phi = bump_profile(u);
            ev.g *= (1.0 + eps_ * phi);
            if (u < 1.0) {
                // d(phi)/dz_k = B'(u) d_k / (R rho); B'(u)/u is smooth through rho = 0
                double v = 1.0 - u * u;
                double dphi_over_rho = -8.0 * v * v * v / (bump_radius_ * bump_radius_);
                for (int k = 0; k < n; ++k)
                    ev.dg[k] = (eps_ * dphi_over_rho * d(k)) * Mat::Identity(n, n);
            }
            break;
        }
        case MetricFamily::surface_revolution: {
            double r = z.norm();
            if (r <= sor_r1_ || r >= sor_r2_) break;  // exactly Euclidean there
            Vec zh = z / r;
            double f = sor_profile(r), fp = sor_profile_deriv(r);
            double q = (f / r) * (f / r);
            double qp = 2.0 * (f / r) * (fp * r - f) / (r * r);
            Mat O = zh * zh.transpose();  // exactly symmetric as stored
            Mat P = Mat::Identity(2, 2) - O;
            ev.g = q * Mat::Identity(2, 2) + (1.0 - q) * O;
            for (int k = 0; k < 2; ++k) {
                // d zh_i / d z_k = (delta_ki - zh_k zh_i)/r
                Mat dzz(2, 2);
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) {
                        double dzi = (double(i == k) - zh(k) * zh(i)) / r;
                        double dzj = (double(j == k) - zh(k) * zh(j)) / r;
                        dzz(i, j) = dzi * zh(j) + zh(i) * dzj;
                    }
                ev.dg[k] = qp * zh(k) * P + (1.0 - q) * dzz;
            }
            break;
        }
    }
    return ev;
}

void ScatteringMetric::interior2(const Eigen::Vector2d& z, Eigen::Matrix2d& g,
                                 Eigen::Matrix2d& dg0, Eigen::Matrix2d& dg1) const {
    g.setIdentity();
    dg0.setZero();
    dg1.setZero();
    switch (family_) {
        case MetricFamily::euclidean:
            break;
        case MetricFamily::conformal_bump: {
            double d0 = z(0) - bump_center_(0), d1v = z(1) - bump_center_(1);
            double rho2 = d0 * d0 + d1v * d1v;
            double R2 = bump_radius_ * bump_radius_;
            if (rho2 >= R2) break;
            double u2 = rho2 / R2;
            double v = 1.0 - u2;
            double phi = v * v * v * v;
            double dphi_over_rho = -8.0 * v * v * v / R2;
            double c = 1.0 + eps_ * phi;
            g(0, 0) = c;
            g(1, 1) = c;
            double s0 = eps_ * dphi_over_rho * d0, s1 = eps_ * dphi_over_rho * d1v;
            dg0(0, 0) = s0;
            dg0(1, 1) = s0;
            dg1(0, 0) = s1;
            dg1(1, 1) = s1;
            break;
        }
        case MetricFamily::surface_revolution: {
            double r = z.norm();
            if (r <= sor_r1_ || r >= sor_r2_) break;
            Eigen::Vector2d zh = z / r;
            double f = sor_profile(r), fp = sor_profile_deriv(r);
            double q = (f / r) * (f / r);
            double qp = 2.0 * (f / r) * (fp * r - f) / (r * r);
            Eigen::Matrix2d O = zh * zh.transpose();
            Eigen::Matrix2d P = Eigen::Matrix2d::Identity() - O;
            g = q * Eigen::Matrix2d::Identity() + (1.0 - q) * O;
            for (int k = 0; k < 2; ++k) {
                Eigen::Matrix2d dzz;
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) {
                        double dzi = (double(i == k) - zh(k) * zh(i)) / r;
                        double dzj = (double(j == k) - zh(k) * zh(j)) / r;
                        dzz(i, j) = dzi * zh(j) + zh(i) * dzj;
                    }
                Eigen::Matrix2d d = qp * zh(k) * P + (1.0 - q) * dzz;
                if (k == 0)
                    dg0 = d;
                else
                    dg1 = d;
            }
            break;
        }
    }
}

Mat ScatteringMetric::interior_metric(const Vec& z) const { return interior(z).g; }

Mat ScatteringMetric::interior_cometric(const Vec& z) const {
    Mat g = interior_metric(z);
    Eigen::LDLT<Mat> ldlt(g);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        std::ostringstream os;
        os << "interior metric not positive definite at z = [" << z.transpose() << "]";
        throw NumericalError(os.str());
    }
    Mat gi = ldlt.solve(Mat::Identity(dim_, dim_));
    double cond = g.norm() * gi.norm();
    if (!std::isfinite(cond) || cond > 1e12) {
        std::ostringstream os;
        os << "interior metric ill-conditioned (cond ~ " << cond << ") at z = ["
           << z.transpose() << "]";
        throw NumericalError(os.str());
    }
    return gi;
}

double ScatteringMetric::hamiltonian(const Vec& z, const Vec& zeta) const {
    if (zeta.size() != dim_) throw DomainError("hamiltonian(): covector has wrong dimension");
    Mat gi = interior_cometric(z);
    return 0.5 * zeta.dot(gi * zeta);
}

double ScatteringMetric::potential(const Vec& z) const {
    if (!potential_) return 0.0;
    const BumpPotential& p = *potential_;
    double rho = (z - p.center).norm();
    if (rho >= p.outer_radius) return 0.0;
    if (rho <= p.inner_radius) return p.amplitude;
    double u = (rho - p.inner_radius) / (p.outer_radius - p.inner_radius);
    return p.amplitude * (1.0 - smoothstep(u));
}

double ScatteringMetric::covector_norm(const Vec& z, const Vec& zeta) const {
    return std::sqrt(2.0 * hamiltonian(z, zeta));
}

Vec ScatteringMetric::unit_covector(const Vec& z, const Vec& zeta) const {
    double nrm = covector_norm(z, zeta);
    if (nrm == 0) throw DomainError("unit_covector(): zero covector");
    return zeta / nrm;
}

//----------------- boundary chart -----------------//

BoundaryMetricEval ScatteringMetric::boundary_metric(double x, const Vec& y) const {
    if (x < 0 || x >= x0_) throw DomainError("boundary_metric(): x outside collar [0, x0)");
    if (y.size() != dim_ - 1) throw DomainError("boundary_metric(): wrong y dimension");
    const int m = dim_ - 1;
    BoundaryMetricEval ev;
    // All built-in families are exactly conic in the collar, so h is the round
    // metric on the sphere at infinity, independent of x and (for n = 2) of y.
    if (dim_ == 2) {
        ev.h = Mat::Identity(1, 1);
    } else {
        // spherical chart y = (theta_1..theta_{n-2}, phi) away from the poles
        ev.h = Mat::Identity(m, m);
        double s2 = 1.0;
        for (int i = 0; i + 1 < m; ++i) {
            double si = std::sin(y(i));
            s2 *= si * si;
            ev.h(i + 1, i + 1) = s2;
        }
    }
    ev.dh_dx = Mat::Zero(m, m);
    ev.dh_dy.assign(m, Mat::Zero(m, m));
    if (dim_ > 2) {
        // derivatives of the round metric in spherical coordinates
        for (int k = 0; k + 1 < m; ++k) {
            Mat d = Mat::Zero(m, m);
            for (int j = k + 1; j < m; ++j) {
                double prod = 1.0;
                for (int i = 0; i < j; ++i) {
                    double si = std::sin(y(i));
                    prod *= si * si;
                }
                d(j, j) = prod * 2.0 / std::tan(y(k));
            }
            ev.dh_dy[k] = d;
        }
    }
    return ev;
}

double ScatteringMetric::boundary_defining_function(const Vec& z) const {
    double r = z.norm();
    if (r <= 0) throw DomainError("boundary defining function undefined at the origin");
    return 1.0 / r;
}

BoundaryChartPoint ScatteringMetric::to_boundary_chart(const Vec& z) const {
    if (z.size() != dim_) throw DomainError("to_boundary_chart(): wrong dimension");
    double x = boundary_defining_function(z);
    if (x >= x0_) throw DomainError("to_boundary_chart(): point not in collar (x >= x0)");
    BoundaryChartPoint p;
    p.x = x;
    if (dim_ == 2) {
        p.y = Vec::Constant(1, std::atan2(z(1), z(0)));
    } else if (dim_ == 3) {
        double r = z.norm();
        p.y = Vec::Zero(2);
        p.y(0) = std::acos(z(2) / r);           // polar angle
        p.y(1) = std::atan2(z(1), z(0));        // azimuth
    } else {
        throw DomainError("boundary chart implemented for n = 2 and n = 3 only");
    }
    return p;
}

Vec ScatteringMetric::from_boundary_chart(double x, const Vec& y) const {
    if (x <= 0) throw DomainError("from_boundary_chart(): x must be > 0");
    double r = 1.0 / x;
    if (dim_ == 2) {
        if (y.size() != 1) throw DomainError("from_boundary_chart(): wrong y dimension");
        Vec z(2);
        z << r * std::cos(y(0)), r * std::sin(y(0));
        return z;
    }
    if (dim_ == 3) {
        if (y.size() != 2) throw DomainError("from_boundary_chart(): wrong y dimension");
        Vec z(3);
        z << r * std::sin(y(0)) * std::cos(y(1)), r * std::sin(y(0)) * std::sin(y(1)),
            r * std::cos(y(0));
        return z;
    }
    throw DomainError("boundary chart implemented for n = 2 and n = 3 only");
}

Vec ScatteringMetric::from_boundary_chart(const BoundaryChartPoint& p) const {
    return from_boundary_chart(p.x, p.y);
}

ChartPoint ScatteringMetric::chart_point(const Vec& z) const {
    ChartPoint cp;
    cp.z = z;
    double r = z.norm();
    if (r > 0 && 1.0 / r < x0_) cp.boundary = to_boundary_chart(z);
    return cp;
}

//----------------- boundary defining function normalization -----------------//

std::vector<std::pair<double, double>> ScatteringMetric::bdf_normalization_samples(
    double scale, int samples) const {
    if (scale <= 0) throw DomainError("bdf normalization: scale must be > 0");
    std::vector<std::pair<double, double>> out;
    out.reserve(samples);
    double xlo = 1e-4, xhi = x0_ * (1 - 1e-9);
    for (int i = 0; i < samples; ++i) {
        double t = samples == 1 ? 0.0 : double(i) / (samples - 1);
        double x = xlo * std::pow(xhi / xlo, t);
        double theta = 2.0 * M_PI * ((i * 0.61803398874989484820) - std::floor(i * 0.61803398874989484820));
        Vec y = (dim_ == 2) ? Vec::Constant(1, theta - M_PI)
                            : (Vec(2) << 0.5 * M_PI, theta - M_PI).finished();
        Vec z = from_boundary_chart(x, y);
        // |d(scale x)/(scale x)^2|_g = (1/scale) |dx/x^2|_g with dx = -x^2 dr,
        // so |dx/x^2|_g^2 = g^{ij} zhat_i zhat_j.
        Mat gi = interior_cometric(z);
        Vec zh = z / z.norm();
        double val = std::sqrt(zh.dot(gi * zh)) / scale;
        out.emplace_back(x, std::abs(val - 1.0));
    }
    return out;
}

double ScatteringMetric::check_bdf_normalization(double scale, int samples) const {
    double worst = 0;
    for (auto& [x, dev] : bdf_normalization_samples(scale, samples)) worst = std::max(worst, dev);
    return worst;
}

std::string ScatteringMetric::describe() const {
    std::ostringstream os;
    os << family_name(family_) << " (n=" << dim_ << ", x0=" << x0_;
    switch (family_) {
        case MetricFamily::euclidean: break;
        case MetricFamily::conformal_bump:
            os << ", eps=" << eps_ << ", R=" << bump_radius_;
            break;
        case MetricFamily::surface_revolution:
            os << ", amp=" << sor_amp_ << ", r1=" << sor_r1_ << ", r2=" << sor_r2_;
            break;
    }
    if (potential_) os << ", V bump amp=" << potential_->amplitude;
    os << ")";
    return os.str();
}

}  // namespace conicflow
