#ifndef CONICFLOW_WAVEFIELD_HPP
#define CONICFLOW_WAVEFIELD_HPP

#include <complex>
#include <string>
#include <vector>

#include "conicflow/metric.hpp"

namespace conicflow {

// Complex field on a periodic Cartesian grid over [-box, box)^dims.
struct WavefieldGrid {
    int dims = 2;
    int N = 0;         // per axis, power of two
    double box = 0;    // half-width
    std::vector<std::complex<double>> u;  // row-major
    double time = 0;

    double dx() const { return 2.0 * box / N; }
    size_t size() const { return u.size(); }

    std::complex<double>& at(int i, int j) { return u[size_t(i) * N + j]; }
    const std::complex<double>& at(int i, int j) const { return u[size_t(i) * N + j]; }

    double axis_coord(int idx) const { return -box + idx * dx(); }

    // L2 norm with the flat grid measure
    double l2_norm() const;

    static WavefieldGrid zeros(int dims, int N, double box);
};

bool is_power_of_two(int n);

// Snapshot format: magic "CFLW", version u16, dims u16, N u32 per axis, then
// row-major little-endian complex pairs of 64-bit floats.
void save_snapshot(const WavefieldGrid& g, const std::string& path);
WavefieldGrid load_snapshot(const std::string& path);

struct PeakResult {
    Vec location;       // sub-grid refined
    double value = 0;   // |u| at the peak
    double background = 0;  // median |u|
    double ratio = 0;
    bool flagged = false;   // ratio too small to be meaningful
};

// argmax of |u| with per-axis quadratic refinement; ties resolved to the
// lexicographically first index (row-major scan).  r_max restricts the search
// to |z| < r_max when positive.
PeakResult detect_peak(const WavefieldGrid& grid, double r_max = 0);

}  // namespace conicflow

#endif
