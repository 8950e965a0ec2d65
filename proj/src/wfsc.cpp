#include "conicflow/wfsc.hpp"

#include <cmath>

namespace conicflow {

namespace {

// bilinear interpolation on the periodic grid
std::complex<double> interp(const WavefieldGrid& g, double z1, double z2) {
    double fi = (z1 + g.box) / g.dx(), fj = (z2 + g.box) / g.dx();
    int i0 = int(std::floor(fi)), j0 = int(std::floor(fj));
    double a = fi - i0, b = fj - j0;
    auto wrap = [&](int k) { return ((k % g.N) + g.N) % g.N; };
    int i1 = wrap(i0 + 1), j1 = wrap(j0 + 1);
    i0 = wrap(i0);
    j0 = wrap(j0);
    return (1 - a) * (1 - b) * g.at(i0, j0) + a * (1 - b) * g.at(i1, j0) +
           (1 - a) * b * g.at(i0, j1) + a * b * g.at(i1, j1);
}

struct RaySamples {
    std::vector<std::complex<double>> v;  // windowed W-field samples
    std::vector<std::complex<double>> raw;
    std::vector<double> r;
};

RaySamples sample_ray(const WavefieldGrid& g, double t, double angle, double R1, double R2,
                      int K) {
    RaySamples out;
    out.v.resize(K);
    out.raw.resize(K);
    out.r.resize(K);
    double c = std::cos(angle), s = std::sin(angle);
    for (int k = 0; k < K; ++k) {
        double r = R1 + (R2 - R1) * k / (K - 1.0);
        std::complex<double> u = interp(g, r * c, r * s);
        std::complex<double> w = u * std::exp(std::complex<double>(0, -r * r / (2 * t)));
        double hann = 0.5 - 0.5 * std::cos(2 * M_PI * k / (K - 1.0));
        out.r[k] = r;
        out.raw[k] = w;
        out.v[k] = w * hann;
    }
    return out;
}

double spectral_amp(const RaySamples& rs, double nu) {
    std::complex<double> acc(0, 0);
    for (size_t k = 0; k < rs.v.size(); ++k)
        acc += rs.v[k] * std::exp(std::complex<double>(0, -nu * rs.r[k]));
    return std::abs(acc);
}

}  // namespace

std::vector<WfscDetection> estimate_wfsc(const WavefieldGrid& grid, double t,
                                         const WfscParams& p) {
    if (grid.dims != 2) throw DomainError("estimate_wfsc implemented for dims = 2");
    if (t == 0) throw DomainError("estimate_wfsc: t must be nonzero");
    double R2 = p.R2 > 0 ? p.R2 : 0.85 * grid.box;
    double R1 = p.R1 > 0 ? p.R1 : 0.4 * grid.box;
    if (!(0 < R1 && R1 < R2 && R2 < grid.box))
        throw DomainError("estimate_wfsc: bad annulus");
    const int K = std::max(64, int(2 * (R2 - R1) / grid.dx()));
    const double dr = (R2 - R1) / (K - 1);
    const double nu_max = 0.9 * M_PI / dr;
    double dalpha = p.n_rays > 1 ? 2.0 * p.cone_half_angle / (p.n_rays - 1) : 0.0;

    // sample all rays (plus edge rays for the transverse derivative)
    std::vector<RaySamples> rays(p.n_rays + 2);
    std::vector<double> angles(p.n_rays + 2);
    double d_ang = dalpha > 0 ? dalpha : 0.02;
    double base = dalpha > 0 ? p.y0 - p.cone_half_angle : p.y0;
    for (int j = 0; j < p.n_rays + 2; ++j) {
        angles[j] = base + d_ang * (j - 1);
        rays[j] = sample_ray(grid, t, angles[j], R1, R2, K);
    }

    std::vector<WfscDetection> dets;
    for (int j = 1; j <= p.n_rays; ++j) {
        const RaySamples& rs = rays[j];
        // coarse scan then golden-section refinement of the spectral peak
        const int NS = 512;
        double best_nu = 0, best_amp = -1;
        for (int q = 0; q <= NS; ++q) {
            double nu = -nu_max + 2 * nu_max * q / NS;
            double a = spectral_amp(rs, nu);
            if (a > best_amp) {
                best_amp = a;
                best_nu = nu;
            }
        }
        double lo = best_nu - 2 * nu_max / NS, hi = best_nu + 2 * nu_max / NS;
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
        double f1 = spectral_amp(rs, x1), f2 = spectral_amp(rs, x2);
        for (int it = 0; it < 60; ++it) {
            if (f1 < f2) {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + gr * (hi - lo);
                f2 = spectral_amp(rs, x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - gr * (hi - lo);
                f1 = spectral_amp(rs, x1);
            }
        }
        double nu_hat = 0.5 * (lo + hi);
        double wsum = 0;
        for (int k = 0; k < K; ++k) wsum += 0.5 - 0.5 * std::cos(2 * M_PI * k / (K - 1.0));
        double strength = spectral_amp(rs, nu_hat) / wsum;
        if (strength < p.strength_threshold) continue;

        // transverse phase gradient scaled by r, weighted by |w|^2
        const RaySamples& rm = rays[j - 1];
        const RaySamples& rp = rays[j + 1];
        double da = angles[j + 1] - angles[j - 1];
        double mu_acc = 0, wgt_acc = 0;
        for (int k = 0; k < K; ++k) {
            std::complex<double> prod = rp.raw[k] * std::conj(rm.raw[k]);
            if (std::abs(prod) == 0) continue;
            double dphi = std::arg(prod);
            double wgt = std::abs(prod);
            mu_acc += wgt * dphi / (da * rs.r[k]);
            wgt_acc += wgt;
        }
        WfscDetection d;
        d.y = Vec::Constant(1, angles[j]);
        d.nu = nu_hat;
        d.mu = Vec::Constant(1, wgt_acc > 0 ? mu_acc / wgt_acc : 0.0);
        d.strength = strength;
        dets.push_back(std::move(d));
    }
    return dets;
}

}  // namespace conicflow
