#pragma once

#include <array>
#include <string>
#include <vector>

#include "beamlab/grid.hpp"

namespace beamlab {

enum class PotentialFamily { Zero, ScaledSech2, EmbeddedExample, ResonanceExample, Tabulated };

PotentialFamily family_from_string(const std::string& name);
std::string family_to_string(PotentialFamily f);

/// Declarative description of a potential. `coupling` scales the sech^2
/// family, (c, d) parametrize the compactly supported zero-energy examples,
/// `path` points at a two-column table for the tabulated family.
struct PotentialSpec {
    PotentialFamily family = PotentialFamily::Zero;
    double coupling = -1.0;
    double c = 1.0;
    double d = 1.0;
    std::string path;
    double claimed_mu = 100.0;

    void validate() const;
};

/// Sampled potential with its factorization V = U v^2, v = sqrt|V|,
/// U = sgn V in {-1,0,+1}. The recombined product is stored back into V so
/// the identity holds exactly in floating point.
struct PotentialSample {
    Grid grid;
    PotentialSpec spec;
    std::vector<double> V;
    std::vector<double> v;
    std::vector<int> U;
    /// Interval outside which V vanishes identically (box edges when it does
    /// not). Drives the integration domain of the integral-operator builders.
    double hull_lo = 0.0;
    double hull_hi = 0.0;

    double l1_norm() const;  // trapezoid of |V|
    bool is_zero() const;
};

PotentialSample sample_potential(const PotentialSpec& spec, const Grid& grid);

/// Coefficients a0..a4 of the even polynomial p(x) = sum a_k x^{2k} that
/// continues |x| into [-1,1] with C^4 contact at x = +-1:
/// p(1)=1, p'(1)=1, p''(1)=p'''(1)=p''''(1)=0.
std::array<double, 5> resonance_blend_coefficients();

/// The blended profile rho(x): p(x) on [-1,1], |x| outside.
double resonance_blend(double x);
/// Fourth derivative of the blend (zero outside [-1,1]).
double resonance_blend_d4(double x);

/// phi1 profile of the zero-energy examples: c>0 gives d + c*rho(x)
/// (linear growth), c=0 gives d*(1 + (1-x^2)^5/2) (bounded). In both cases
/// (d^4/dx^4) phi1 + V phi1 = 0 with V from sample_potential.
double resonance_profile(double c, double d, double x);

}  // namespace beamlab
