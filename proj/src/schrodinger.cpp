#include "conicflow/schrodinger.hpp"

#include <fftw3.h>

#include <cmath>
#include <sstream>

namespace conicflow {

namespace {

using CVec = std::vector<std::complex<double>>;

struct Fft2 {
    int N;
    fftw_plan fwd, bwd;
    explicit Fft2(int n, std::complex<double>* data) : N(n) {
        auto* p = reinterpret_cast<fftw_complex*>(data);
        fwd = fftw_plan_dft_2d(n, n, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_2d(n, n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~Fft2() {
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }
};

double fft_freq(int idx, int N, double box) {
    int k = idx <= N / 2 - 1 ? idx : idx - N;
    return M_PI * k / box;  // 2 pi k / (2 box)
}

std::vector<double> sponge_field(const WavefieldGrid& g, const SolverConfig& cfg) {
    std::vector<double> s(g.size(), 0.0);
    if (cfg.sponge_width <= 0) return s;
    double edge = g.box - cfg.sponge_width;
    auto ramp = [&](double z) {
        double a = (std::abs(z) - edge) / cfg.sponge_width;
        if (a <= 0) return 0.0;
        double sm = smoothstep(a);
        return cfg.sponge_strength * sm * sm;
    };
    for (int i = 0; i < g.N; ++i)
        for (int j = 0; j < g.N; ++j)
            s[size_t(i) * g.N + j] = ramp(g.axis_coord(i)) + ramp(g.axis_coord(j));
    return s;
}

//----------------- finite-difference Hamiltonian (variable metric) -----------------//

struct FdHamiltonian {
    int N;
    double h;
    std::vector<double> rho;               // sqrt(det g)
    std::vector<double> c00, c01, c11;     // rho * g^{ij}
    std::vector<double> V;
    bool has_cross = false;

    FdHamiltonian(const ScatteringMetric& m, const WavefieldGrid& g) : N(g.N), h(g.dx()) {
        size_t M = g.size();
        rho.resize(M);
        c00.resize(M);
        c01.resize(M);
        c11.resize(M);
        V.resize(M);
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                Vec z = (Vec(2) << g.axis_coord(i), g.axis_coord(j)).finished();
                Mat gm = m.interior_metric(z);
                double det = gm(0, 0) * gm(1, 1) - gm(0, 1) * gm(1, 0);
                double r = std::sqrt(det);
                Mat gi(2, 2);
                gi << gm(1, 1) / det, -gm(0, 1) / det, -gm(1, 0) / det, gm(0, 0) / det;
                size_t k = size_t(i) * N + j;
                rho[k] = r;
                c00[k] = r * gi(0, 0);
                c01[k] = r * gi(0, 1);
                c11[k] = r * gi(1, 1);
                V[k] = m.potential(z);
                if (std::abs(c01[k]) > 1e-14) has_cross = true;
            }
    }

    // 4th-order centered first derivative, periodic
    void d0(const CVec& f, CVec& out) const {
        double inv = 1.0 / (12 * h);
        for (int i = 0; i < N; ++i) {
            int im2 = (i + N - 2) % N, im1 = (i + N - 1) % N, ip1 = (i + 1) % N,
                ip2 = (i + 2) % N;
            for (int j = 0; j < N; ++j)
                out[size_t(i) * N + j] =
                    (f[size_t(im2) * N + j] - 8.0 * f[size_t(im1) * N + j] +
                     8.0 * f[size_t(ip1) * N + j] - f[size_t(ip2) * N + j]) *
                    inv;
        }
    }
    void d1(const CVec& f, CVec& out) const {
        double inv = 1.0 / (12 * h);
        for (int i = 0; i < N; ++i) {
            size_t row = size_t(i) * N;
            for (int j = 0; j < N; ++j) {
                int jm2 = (j + N - 2) % N, jm1 = (j + N - 1) % N, jp1 = (j + 1) % N,
                    jp2 = (j + 2) % N;
                out[row + j] =
                    (f[row + jm2] - 8.0 * f[row + jm1] + 8.0 * f[row + jp1] - f[row + jp2]) *
                    inv;
            }
        }
    }

    // H u = -(1/2 rho) sum_ij D_i (rho g^{ij} D_j u) + V u
    void apply(const CVec& u, CVec& out, CVec& t0, CVec& t1, CVec& s0, CVec& s1) const {
        d0(u, t0);
        d1(u, t1);
        size_t M = u.size();
        for (size_t k = 0; k < M; ++k) {
            s0[k] = c00[k] * t0[k] + c01[k] * t1[k];
            s1[k] = c01[k] * t0[k] + c11[k] * t1[k];
        }
        d0(s0, t0);
        d1(s1, s0);
        for (size_t k = 0; k < M; ++k)
            out[k] = -0.5 * (t0[k] + s0[k]) / rho[k] + V[k] * u[k];
    }

    std::complex<double> wdot(const CVec& a, const CVec& b) const {
        std::complex<double> s(0, 0);
        for (size_t k = 0; k < a.size(); ++k) s += rho[k] * std::conj(a[k]) * b[k];
        return s;
    }
    double wnorm(const CVec& a) const { return std::sqrt(std::abs(wdot(a, a))); }
};

}  // namespace

WavefieldGrid make_quadratic_data(int dims, int N, double box, const Vec& w0, double T,
                                  double R1, double R2, double sponge_width) {
    if (T <= 0) throw DomainError("make_quadratic_data: T must be > 0");
    if (!(0 < R1 && R1 < R2)) throw DomainError("make_quadratic_data: need 0 < R1 < R2");
    if (R2 >= box - sponge_width)
        throw DomainError("make_quadratic_data: annulus exceeds the box minus sponge");
    WavefieldGrid g = WavefieldGrid::zeros(dims, N, box);
    if (dims != 2) throw DomainError("make_quadratic_data implemented for dims = 2");
    double ramp = (R2 - R1) / 4;
    double amp = 1.0 / (2.0 * M_PI * T);  // (2 pi T)^{-n/2}, n = 2
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            double z1 = g.axis_coord(i), z2 = g.axis_coord(j);
            double r = std::hypot(z1, z2);
            if (r <= R1 || r >= R2) continue;
            double cut = 1.0;
            if (r < R1 + ramp) cut = smoothstep((r - R1) / ramp);
            if (r > R2 - ramp) cut = std::min(cut, smoothstep((R2 - r) / ramp));
            double d2 = (z1 - w0(0)) * (z1 - w0(0)) + (z2 - w0(1)) * (z2 - w0(1));
            g.at(i, j) = amp * cut * std::exp(std::complex<double>(0, -d2 / (2 * T)));
        }
    return g;
}

EvolveReport evolve(const ScatteringMetric& m, WavefieldGrid& grid, const SolverConfig& cfg,
                    double t_final) {
    if (grid.dims != 2) throw DomainError("evolve implemented for dims = 2");
    if (!m.flat_outside_radius())
        throw DomainError("evolve: metric must be flat outside a compact set");
    if (cfg.dt <= 0) throw DomainError("evolve: dt must be > 0");
    double span = t_final - grid.time;
    if (span <= 0) throw DomainError("evolve: t_final must exceed the grid time");
    long n_steps = std::max(1L, std::lround(span / cfg.dt));
    double dt = span / double(n_steps);
    const int N = grid.N;
    const size_t M = grid.size();

    EvolveReport rep;
    rep.steps = n_steps;
    rep.energy_initial = energy_expectation(m, grid);

    std::vector<double> sponge = sponge_field(grid, cfg);
    bool any_sponge = cfg.sponge_width > 0;
    double absorbed2 = 0;

    if (cfg.scheme == Scheme::splitstep) {
        if (!m.is_exactly_flat())
            throw DomainError("evolve: splitstep requires an exactly flat metric");
        rep.mass_initial = grid.l2_norm();
        // potential and kinetic phase factors
        std::vector<std::complex<double>> vhalf(M), kin(M);
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                Vec z = (Vec(2) << grid.axis_coord(i), grid.axis_coord(j)).finished();
                vhalf[size_t(i) * N + j] =
                    std::exp(std::complex<double>(0, -0.5 * dt * m.potential(z)));
                double k1 = fft_freq(i, N, grid.box), k2 = fft_freq(j, N, grid.box);
                kin[size_t(i) * N + j] =
                    std::exp(std::complex<double>(0, -0.5 * dt * (k1 * k1 + k2 * k2)));
            }
        Fft2 fft(N, grid.u.data());
        double inv = 1.0 / (double(N) * N);
        for (long s = 0; s < n_steps; ++s) {
            for (size_t k = 0; k < M; ++k) grid.u[k] *= vhalf[k];
            fftw_execute(fft.fwd);
            for (size_t k = 0; k < M; ++k) grid.u[k] *= kin[k] * inv;
            fftw_execute(fft.bwd);
            for (size_t k = 0; k < M; ++k) grid.u[k] *= vhalf[k];
            if (any_sponge) {
                double meas = grid.dx() * grid.dx();
                for (size_t k = 0; k < M; ++k) {
                    if (sponge[k] == 0) continue;
                    double damp = std::exp(-sponge[k] * dt);
                    absorbed2 += std::norm(grid.u[k]) * (1 - damp * damp) * meas;
                    grid.u[k] *= damp;
                }
            }
        }
        rep.mass_final = grid.l2_norm();
    } else {
        FdHamiltonian H(m, grid);
        double meas = grid.dx() * grid.dx();
        auto wmass = [&](const CVec& u) {
            double s = 0;
            for (size_t k = 0; k < M; ++k) s += H.rho[k] * std::norm(u[k]);
            return std::sqrt(s * meas);
        };
        rep.mass_initial = wmass(grid.u);
        double alpha = 0.5 * dt;
        CVec b(M), Hb(M), x(M), r(M), p(M), Ap(M), t0(M), t1(M), s0(M), s1(M), tmp(M);
        auto apply_normal = [&](const CVec& in, CVec& out) {
            H.apply(in, tmp, t0, t1, s0, s1);
            H.apply(tmp, out, t0, t1, s0, s1);
            for (size_t k = 0; k < M; ++k) out[k] = in[k] + alpha * alpha * out[k];
        };
        for (long s = 0; s < n_steps; ++s) {
            H.apply(grid.u, Hb, t0, t1, s0, s1);
            for (size_t k = 0; k < M; ++k) b[k] = grid.u[k] - std::complex<double>(0, alpha) * Hb[k];
            H.apply(b, Hb, t0, t1, s0, s1);
            CVec rhs(M);
            for (size_t k = 0; k < M; ++k) rhs[k] = b[k] - std::complex<double>(0, alpha) * Hb[k];
            // CG on (I + alpha^2 H^2) x = rhs in the rho-weighted inner product
            x = b;
            apply_normal(x, Ap);
            for (size_t k = 0; k < M; ++k) r[k] = rhs[k] - Ap[k];
            p = r;
            double rhs_n = H.wnorm(rhs);
            int it = 0;
            double rr = std::real(H.wdot(r, r));
            for (; it < cfg.krylov_maxit; ++it) {
                if (std::sqrt(rr) <= cfg.krylov_tol * rhs_n) break;
                apply_normal(p, Ap);
                double pAp = std::real(H.wdot(p, Ap));
                double gamma = rr / pAp;
                for (size_t k = 0; k < M; ++k) {
                    x[k] += gamma * p[k];
                    r[k] -= gamma * Ap[k];
                }
                double rr_new = std::real(H.wdot(r, r));
                double beta = rr_new / rr;
                rr = rr_new;
                for (size_t k = 0; k < M; ++k) p[k] = r[k] + beta * p[k];
            }
            if (it >= cfg.krylov_maxit) {
                std::ostringstream os;
                os << "evolve: Krylov stalled at step " << s << "; try dt <= " << dt / 2;
                throw NonConvergence(os.str());
            }
            grid.u = x;
            if (any_sponge) {
                for (size_t k = 0; k < M; ++k) {
                    if (sponge[k] == 0) continue;
                    double damp = std::exp(-sponge[k] * dt);
                    absorbed2 += H.rho[k] * std::norm(grid.u[k]) * (1 - damp * damp) * meas;
                    grid.u[k] *= damp;
                }
            }
        }
        rep.mass_final = wmass(grid.u);
    }

    grid.time = t_final;
    rep.absorbed = std::sqrt(absorbed2);
    rep.mass_drift =
        std::abs(std::sqrt(rep.mass_final * rep.mass_final + absorbed2) - rep.mass_initial);
    rep.energy_final = energy_expectation(m, grid);
    return rep;
}

double energy_expectation(const ScatteringMetric& m, const WavefieldGrid& grid) {
    const int N = grid.N;
    const size_t M = grid.size();
    if (m.is_exactly_flat()) {
        // spectral kinetic part plus potential expectation
        CVec hat = grid.u;
        Fft2 fft(N, hat.data());
        fftw_execute(fft.fwd);
        double kin = 0, nrm2 = 0, pot = 0;
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                double k1 = fft_freq(i, N, grid.box), k2 = fft_freq(j, N, grid.box);
                kin += 0.5 * (k1 * k1 + k2 * k2) * std::norm(hat[size_t(i) * N + j]);
            }
        double hatsum = 0;
        for (auto& v : hat) hatsum += std::norm(v);
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                Vec z = (Vec(2) << grid.axis_coord(i), grid.axis_coord(j)).finished();
                pot += m.potential(z) * std::norm(grid.at(i, j));
                nrm2 += std::norm(grid.at(i, j));
            }
        if (nrm2 == 0) return 0;
        return kin / hatsum + pot / nrm2;
    }
    FdHamiltonian H(m, grid);
    CVec out(M), t0(M), t1(M), s0(M), s1(M);
    H.apply(grid.u, out, t0, t1, s0, s1);
    double num = std::real(H.wdot(grid.u, out));
    double den = std::real(H.wdot(grid.u, grid.u));
    return den > 0 ? num / den : 0.0;
}

FocusReport focusing_experiment(const ScatteringMetric& m, const Vec& w0, double T,
                                const FocusParams& fp, SolverConfig cfg, double t_eval) {
    if (t_eval <= 0) t_eval = T;
    double R1 = fp.R1 > 0 ? fp.R1 : 0.4 * fp.box;
    double R2 = fp.R2 > 0 ? fp.R2 : 0.8 * (fp.box - cfg.sponge_width);
    if (w0.norm() >= R1)
        throw DomainError("focusing_experiment: w0 must lie inside the annulus hole");
    WavefieldGrid g = make_quadratic_data(2, fp.N, fp.box, w0, T, R1, R2, cfg.sponge_width);
    FocusReport rep;
    rep.evolution = evolve(m, g, cfg, t_eval);
    PeakResult pk = detect_peak(g, 0.9 * R1);
    rep.peak_location = pk.location;
    rep.peak_value = pk.value;
    rep.background = pk.background;
    rep.ratio = pk.ratio;
    rep.diffraction_width = T * M_PI / R2;
    rep.conclusive = pk.ratio >= 2.0;
    return rep;
}

}  // namespace conicflow
