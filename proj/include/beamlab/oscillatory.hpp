#pragma once

#include <functional>
#include <vector>

#include "beamlab/common.hpp"
#include "beamlab/cutoff.hpp"

namespace beamlab {
namespace oscillatory {

struct DyadicPiece {
    int N;
    double lo() const { return std::ldexp(1.0, N - 2); }
    double hi() const { return std::ldexp(1.0, N); }
};

/// All indices whose support [2^(N-2), 2^N] meets [s_min, s_max].
std::vector<DyadicPiece> dyadic_partition(double s_min, double s_max);

/// One frequency-localized oscillatory integral
///   K_N = int_0^inf e^{-it sqrt(2^{4N} s^4 + m^2)} e^{+-i 2^N s psi}
///         s^h phi0(s) Phi(2^N s) ds,
/// amplitude Phi supplied as a callback of 2^N s with |Phi|, |dPhi/ds|
/// bounded on the bump support.
struct OscIntegrand {
    double t = 0.0;
    double m = 0.0;
    double h_power = 0.0;
    double psi = 0.0;
    std::function<complexd(double)> amplitude;  // of 2^N s; identity 1 when empty
    double amplitude_bound = 1.0;
};

complexd K_N(int sign, int N, const OscIntegrand& integrand, double rel_tol = 1e-8,
             long max_nodes = 1 << 21);

/// Dyadic index of the stationary scale: floor(log2(psi / |t|)); a large
/// negative sentinel when psi == 0.
int N0_of(double psi, double t);

/// Two-branch bound of one dyadic piece:
///   <m>^(1/2) (1 + |t| 2^{2N})^{-1/2}  when |N - N0| <= C_m,
///   <m>       (1 + |t| 2^{2N})^{-1}    otherwise,
/// with C_m = 2 + 0.5 log2(1 + 2^{-4(Npp-2)} m^2).
double theta(int N, int N0, double m, double t, int Npp);

double C_m(double m, int Npp);

enum class SumVariant { WeightedTheta, LinearTheta, LowBranch };

struct SumCheck {
    double sum = 0.0;
    double bound = 0.0;  // stated right-hand side without constants
    double ratio = 0.0;
};

/// Numerically summed dyadic series against its stated envelope:
///   WeightedTheta: sum 2^{(1+2l)N} Theta(0,t)      vs |t|^{-(1+2l)/2}
///   LinearTheta:   sum 2^N Theta(m,t)              vs <m>|t|^{-1/2}
///   LowBranch:     sum 2^N (1+|t|2^{4N})^{-1/2}    vs |t|^{-1/4}
SumCheck dyadic_sum_check(SumVariant variant, double m, double t, double ell, double psi,
                          int Npp = 0);

}  // namespace oscillatory
}  // namespace beamlab
