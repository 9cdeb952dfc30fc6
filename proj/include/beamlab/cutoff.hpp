#pragma once

namespace beamlab {

/// C^3 polynomial step: 0 for u<=0, 1 for u>=1, 35u^4-84u^5+70u^6-20u^7 between.
double smoothstep3(double u);

/// Smooth low-pass pair chi1 + chi2 == 1. chi1(u)=1 for |u|<lambda0,
/// chi1(u)=0 for |u|>2*lambda0, polynomial step in the transition band.
struct CutoffSpec {
    double lambda0 = 0.125;

    double chi1(double u) const;
    double chi2(double u) const { return 1.0 - chi1(u); }
    /// Lifted versions acting on the spectral parameter: chi_j(lambda^4).
    double chi1_lifted(double lambda) const { return chi1(lambda * lambda * lambda * lambda); }
    double chi2_lifted(double lambda) const { return 1.0 - chi1_lifted(lambda); }
    /// Upper edge of the low band in the lambda variable: (2*lambda0)^(1/4).
    double lambda_edge() const;
};

/// Unit bump for the dyadic partition: phi0(s) = step(s) - step(2s) where
/// step(s)=1 for s<=1/2, 0 for s>=1. supp phi0 = [1/4, 1] and the dilates
/// phi0(2^-N s) telescope to 1 for every s > 0.
double phi0(double s);

/// The telescoped partial sum sum_{N <= M} phi0(2^-N s) evaluated at the
/// rescaled argument u = 2^-M s: 1 for u <= 1/2, 0 for u >= 1.
double partition_cap(double u);

}  // namespace beamlab
