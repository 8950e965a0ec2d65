#include "conicflow/wavefield.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <limits>
#include <memory>

namespace conicflow {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

WavefieldGrid WavefieldGrid::zeros(int dims, int N, double box) {
    if (dims != 1 && dims != 2) throw DomainError("WavefieldGrid: dims must be 1 or 2");
    if (!is_power_of_two(N)) throw DomainError("WavefieldGrid: N must be a power of two");
    if (box <= 0) throw DomainError("WavefieldGrid: box must be > 0");
    WavefieldGrid g;
    g.dims = dims;
    g.N = N;
    g.box = box;
    g.u.assign(dims == 1 ? size_t(N) : size_t(N) * N, {0.0, 0.0});
    return g;
}

double WavefieldGrid::l2_norm() const {
    double s = 0;
    for (auto& v : u) s += std::norm(v);
    double meas = dims == 1 ? dx() : dx() * dx();
    return std::sqrt(s * meas);
}

namespace {
struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;
}  // namespace

void save_snapshot(const WavefieldGrid& g, const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw NumericalError("save_snapshot: cannot open " + path);
    std::fwrite("CFLW", 1, 4, f.get());
    uint16_t version = 1, dims = uint16_t(g.dims);
    std::fwrite(&version, 2, 1, f.get());
    std::fwrite(&dims, 2, 1, f.get());
    for (int a = 0; a < g.dims; ++a) {
        uint32_t n = uint32_t(g.N);
        std::fwrite(&n, 4, 1, f.get());
    }
    if (std::fwrite(g.u.data(), sizeof(std::complex<double>), g.u.size(), f.get()) !=
        g.u.size())
        throw NumericalError("save_snapshot: short write to " + path);
}

WavefieldGrid load_snapshot(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw DomainError("load_snapshot: cannot open " + path);
    char magic[4];
    if (std::fread(magic, 1, 4, f.get()) != 4 || std::memcmp(magic, "CFLW", 4) != 0)
        throw DomainError("load_snapshot: bad magic");
    uint16_t version = 0, dims = 0;
    if (std::fread(&version, 2, 1, f.get()) != 1 || std::fread(&dims, 2, 1, f.get()) != 1)
        throw DomainError("load_snapshot: truncated header");
    if (version != 1) throw DomainError("load_snapshot: unsupported version");
    if (dims != 1 && dims != 2) throw DomainError("load_snapshot: bad dims");
    uint32_t n = 0;
    for (int a = 0; a < dims; ++a)
        if (std::fread(&n, 4, 1, f.get()) != 1) throw DomainError("load_snapshot: truncated");
    WavefieldGrid g = WavefieldGrid::zeros(dims, int(n), 1.0);  // box unknown to the format
    if (std::fread(g.u.data(), sizeof(std::complex<double>), g.u.size(), f.get()) !=
        g.u.size())
        throw DomainError("load_snapshot: truncated field data");
    return g;
}

PeakResult detect_peak(const WavefieldGrid& grid, double r_max) {
    if (grid.dims != 2) throw DomainError("detect_peak implemented for dims = 2");
    const int N = grid.N;
    PeakResult out;
    int bi = -1, bj = -1;
    double best = -1;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            if (r_max > 0) {
                double z1 = grid.axis_coord(i), z2 = grid.axis_coord(j);
                if (z1 * z1 + z2 * z2 >= r_max * r_max) continue;
            }
            double a = std::abs(grid.at(i, j));
            if (a > best) {  // strict: first maximum in row-major order wins
                best = a;
                bi = i;
                bj = j;
            }
        }
    if (bi < 0) throw DomainError("detect_peak: empty search region");

    auto refine = [&](int ci, int cj, int axis) {
        int im = axis == 0 ? (ci + N - 1) % N : ci, ip = axis == 0 ? (ci + 1) % N : ci;
        int jm = axis == 1 ? (cj + N - 1) % N : cj, jp = axis == 1 ? (cj + 1) % N : cj;
        double am = std::abs(grid.at(im, jm)), a0 = std::abs(grid.at(ci, cj)),
               ap = std::abs(grid.at(ip, jp));
        double den = am - 2 * a0 + ap;
        if (den >= 0) return 0.0;  // not a local max profile
        double delta = 0.5 * (am - ap) / den;
        return std::clamp(delta, -0.5, 0.5);
    };
    double di = refine(bi, bj, 0), dj = refine(bi, bj, 1);
    out.location = (Vec(2) << grid.axis_coord(bi) + di * grid.dx(),
                    grid.axis_coord(bj) + dj * grid.dx())
                       .finished();
    out.value = best;

    std::vector<double> mags(grid.u.size());
    for (size_t k = 0; k < grid.u.size(); ++k) mags[k] = std::abs(grid.u[k]);
    std::nth_element(mags.begin(), mags.begin() + mags.size() / 2, mags.end());
    out.background = mags[mags.size() / 2];
    out.ratio = out.background > 0 ? out.value / out.background
                                   : std::numeric_limits<double>::infinity();
    out.flagged = out.ratio < 2.0;
    return out;
}

}  // namespace conicflow
