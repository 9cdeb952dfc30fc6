#include "beamlab/oscillatory.hpp"

#include <cmath>

#include "beamlab/quadrature.hpp"

namespace beamlab {
namespace oscillatory {

std::vector<DyadicPiece> dyadic_partition(double s_min, double s_max)
{
    if (!(s_min > 0.0 && s_min < s_max))
        throw ValidationError("dyadic_partition: need 0 < s_min < s_max");
    int n_lo = static_cast<int>(std::ceil(std::log2(s_min)));
    int n_hi = static_cast<int>(std::floor(std::log2(s_max))) + 2;
    std::vector<DyadicPiece> out;
    for (int N = n_lo; N <= n_hi; ++N) out.push_back({N});
    return out;
}

complexd K_N(int sign, int N, const OscIntegrand& integrand, double rel_tol, long max_nodes)
{
    const double two_n = std::ldexp(1.0, N);
    const double two_2n = std::ldexp(1.0, 2 * N);
    const double sgn = sign >= 0 ? 1.0 : -1.0;

    auto f = [&](double s) -> complexd {
        double bump = phi0(s);
        if (bump == 0.0) return {0.0, 0.0};
        double arg = two_2n * two_2n * s * s * s * s + integrand.m * integrand.m;
        double phase = -integrand.t * std::sqrt(arg) + sgn * two_n * s * integrand.psi;
        complexd amp = integrand.amplitude ? integrand.amplitude(two_n * s) : complexd(1.0, 0.0);
        return std::exp(complexd(0.0, phase)) * std::pow(s, integrand.h_power) * bump * amp;
    };

    double phase_range = std::fabs(integrand.t) * two_2n + two_n * integrand.psi;
    int n0 = std::max<long>(32, 4L * static_cast<long>(std::ceil(phase_range / M_PI)));
    return integrate_adaptive(f, 0.25, 1.0, n0, rel_tol, max_nodes,
                              "K_N piece N=" + std::to_string(N) +
                                  " phase_range=" + std::to_string(phase_range));
}

int N0_of(double psi, double t)
{
    if (t == 0.0) throw ValidationError("N0_of: t must be nonzero");
    if (!(psi > 0.0)) return -1000000;
    return static_cast<int>(std::floor(std::log2(psi / std::fabs(t))));
}

double C_m(double m, int Npp)
{
    return 2.0 + 0.5 * std::log2(1.0 + std::ldexp(1.0, -4 * (Npp - 2)) * m * m);
}

double theta(int N, int N0, double m, double t, int Npp)
{
    if (t == 0.0) throw ValidationError("theta: t must be nonzero");
    double bracket_m = 1.0 + std::fabs(m);
    double u = 1.0 + std::fabs(t) * std::ldexp(1.0, 2 * N);
    if (std::abs(N - N0) <= C_m(m, Npp)) return std::sqrt(bracket_m) / std::sqrt(u);
    return bracket_m / u;
}

SumCheck dyadic_sum_check(SumVariant variant, double m, double t, double ell, double psi, int Npp)
{
    if (t == 0.0) throw ValidationError("dyadic_sum_check: t must be nonzero");
    if (variant == SumVariant::WeightedTheta && !(ell > -0.5 && ell <= 0.0))
        throw ValidationError("dyadic_sum_check: need -1/2 < ell <= 0 for the weighted variant");

    int N0 = N0_of(psi, t);
    auto term = [&](int N) -> double {
        switch (variant) {
            case SumVariant::WeightedTheta:
                return std::pow(2.0, (1.0 + 2.0 * ell) * N) * theta(N, N0, 0.0, t, Npp);
            case SumVariant::LinearTheta:
                return std::ldexp(1.0, N) * theta(N, N0, m, t, Npp);
            case SumVariant::LowBranch:
                return std::ldexp(1.0, N) / std::sqrt(1.0 + std::fabs(t) * std::ldexp(1.0, 4 * N));
        }
        return 0.0;
    };

    // terms decay geometrically in both directions; expand outward until
    // machine-negligible
    double sum = term(0);
    for (int N = 1; N < 4000; ++N) {
        double val = term(N);
        sum += val;
        if (val < 1e-16 * sum && N > std::abs(N0) + 8) break;
    }
    for (int N = -1; N > -4000; --N) {
        double val = term(N);
        sum += val;
        if (val < 1e-16 * sum && -N > std::abs(N0) + 8) break;
    }

    SumCheck out;
    out.sum = sum;
    double at = std::fabs(t);
    switch (variant) {
        case SumVariant::WeightedTheta: out.bound = std::pow(at, -(1.0 + 2.0 * ell) / 2.0); break;
        case SumVariant::LinearTheta: out.bound = (1.0 + std::fabs(m)) / std::sqrt(at); break;
        case SumVariant::LowBranch: out.bound = std::pow(at, -0.25); break;
    }
    out.ratio = out.sum / out.bound;
    return out;
}

}  // namespace oscillatory
}  // namespace beamlab
