#include "beamlab/grid.hpp"

#include <cmath>

namespace beamlab {

bool is_power_of_two(int n)
{
    return n > 0 && (n & (n - 1)) == 0;
}

Grid build_grid(double L, int n)
{
    if (!(L > 0.0)) throw ValidationError("grid.L must be positive");
    if (!is_power_of_two(n) || n < 64)
        throw ValidationError("grid.n must be a power of two >= 64");

    Grid g;
    g.L = L;
    g.n = n;
    g.h = 2.0 * L / n;
    g.x.resize(n);
    g.k.resize(n);
    for (int i = 0; i < n; ++i) g.x[i] = -L + i * g.h;
    for (int j = 0; j < n; ++j) {
        int js = (j < n / 2) ? j : j - n;
        g.k[j] = M_PI * js / L;
    }
    return g;
}

int Grid::nearest(double p) const
{
    double t = (p + L) / h;
    int i = static_cast<int>(std::lround(t));
    if (i < 0) i = 0;
    if (i >= n) i = n - 1;
    return i;
}

}  // namespace beamlab
