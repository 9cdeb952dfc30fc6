#pragma once

#include <vector>

#include "beamlab/common.hpp"

namespace beamlab {

/// Uniform periodic grid on [-L, L): nodes x_i = -L + i*h, h = 2L/n.
/// Wavenumbers are stored in transform order (0, 1, .., n/2-1, -n/2, .., -1)
/// scaled by pi/L, matching the discrete Fourier convention of the spectral
/// operators.
struct Grid {
    double L = 0.0;
    int n = 0;
    double h = 0.0;
    std::vector<double> x;
    std::vector<double> k;

    double node(int i) const { return x[static_cast<std::size_t>(i)]; }
    /// Index of the node nearest to position p.
    int nearest(double p) const;
};

Grid build_grid(double L, int n);

bool is_power_of_two(int n);

}  // namespace beamlab
