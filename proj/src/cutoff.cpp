#include "beamlab/cutoff.hpp"

#include <cmath>

namespace beamlab {

double smoothstep3(double u)
{
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    double u2 = u * u;
    double u4 = u2 * u2;
    return u4 * (35.0 + u * (-84.0 + u * (70.0 - 20.0 * u)));
}

double CutoffSpec::chi1(double u) const
{
    double a = std::fabs(u);
    if (a <= lambda0) return 1.0;
    if (a >= 2.0 * lambda0) return 0.0;
    return 1.0 - smoothstep3((a - lambda0) / lambda0);
}

double CutoffSpec::lambda_edge() const
{
    return std::pow(2.0 * lambda0, 0.25);
}

namespace {
// step(s): 1 for s<=1/2, 0 for s>=1; transition by smoothstep3.
double half_step(double s)
{
    double a = std::fabs(s);
    if (a <= 0.5) return 1.0;
    if (a >= 1.0) return 0.0;
    return 1.0 - smoothstep3(2.0 * a - 1.0);
}
}  // namespace

double phi0(double s)
{
    return half_step(s) - half_step(2.0 * s);
}

double partition_cap(double u)
{
    return half_step(u);
}

}  // namespace beamlab
