#include "beamlab/free_kernel.hpp"

#include <cmath>

#include "beamlab/quadrature.hpp"

namespace beamlab {
namespace freekernel {

namespace {
inline complexd unit_i(int sign)
{
    return complexd(0.0, sign >= 0 ? 1.0 : -1.0);
}
inline int sgn(double x)
{
    return (x > 0.0) - (x < 0.0);
}
}  // namespace

complexd F(int sign, double s)
{
    complexd i = unit_i(sign);
    return i * std::exp(i * s) - std::exp(-s);
}

complexd F_deriv(int sign, int k, double s)
{
    complexd i = unit_i(sign);
    complexd osc = std::exp(i * s);
    double damp = std::exp(-s);
    switch (k) {
        case 0: return i * osc - damp;
        case 1: return -osc + damp;
        case 2: return -i * osc - damp;
        case 3: return osc + damp;
        default: throw ValidationError("F_deriv: order must be 0..3");
    }
}

complexd Ftilde(int sign, double s)
{
    complexd i = unit_i(sign);
    return F(sign, s) + 0.5 * (1.0 + i) * s * s;
}

complexd Ftilde_deriv(int sign, int k, double s)
{
    complexd i = unit_i(sign);
    switch (k) {
        case 0: return Ftilde(sign, s);
        case 1: return F_deriv(sign, 1, s) + (1.0 + i) * s;
        case 2: return F_deriv(sign, 2, s) + (1.0 + i);
        case 3: return F_deriv(sign, 3, s);
        default: throw ValidationError("Ftilde_deriv: order must be 0..3");
    }
}

complexd free_resolvent_kernel(double lambda, double x, double y, int sign)
{
    if (!(lambda > 0.0)) throw ValidationError("free_resolvent_kernel: lambda must be positive");
    double r = std::fabs(x - y);
    return F(sign, lambda * r) / (4.0 * lambda * lambda * lambda);
}

double G0_kernel(double x, double y)
{
    double r = std::fabs(x - y);
    return r * r * r / 12.0;
}

double fresnel_cos_kernel(double t, double x, double y)
{
    if (t == 0.0) throw ValidationError("fresnel_cos_kernel: t must be nonzero");
    double r = x - y;
    double amp = 1.0 / std::sqrt(4.0 * M_PI * std::fabs(t));
    return amp * std::cos(r * r / (4.0 * t) - 0.25 * M_PI * sgn(t));
}

namespace {

// int_a^inf e^{i u^2} du. Asymptotic tail series for a >= 4 (repeated
// integration by parts), direct quadrature against the half-line value below.
complexd fresnel_upper(double a)
{
    if (a <= 0.0) throw ValidationError("fresnel_upper: a must be positive");
    const complexd half_line = 0.5 * std::sqrt(M_PI) * std::polar(1.0, 0.25 * M_PI);
    if (a >= 4.0) {
        // J0 = (i/2) e^{ia^2} sum_k (2k-1)!! / (2i a^2)^k * a^{-1}
        complexd e = std::exp(complexd(0.0, a * a));
        complexd term = complexd(1.0 / a, 0.0);
        complexd sum = term;
        complexd step = complexd(0.0, -0.5) / (a * a);  // 1/(2i a^2)
        for (int k = 0; k < 12; ++k) {
            term *= step * (2.0 * k + 1.0);
            sum += term;
            if (std::abs(term) < 1e-17) break;
        }
        return complexd(0.0, 0.5) * e * sum;
    }
    complexd finite = integrate_gl_c(
        [](double u) { return std::exp(complexd(0.0, u * u)); }, 0.0, a,
        std::max(64, static_cast<int>(16.0 * a * a / M_PI) * 4));
    return half_line - finite;
}

}  // namespace

double fresnel_cos_time_integral(double t, double x, double y)
{
    if (!(t > 0.0)) throw ValidationError("fresnel_cos_time_integral: t must be positive");
    double r = std::fabs(x - y);
    if (r < 1e-12) {
        // int_0^t (4 pi s)^{-1/2} cos(pi/4) ds
        return std::sqrt(t / M_PI) * std::cos(0.25 * M_PI);
    }
    // I = (4 pi i)^{-1/2} r [ e^{ia^2}/a + 2i int_a^inf e^{iu^2} du ], a = r/(2 sqrt t)
    double a = r / (2.0 * std::sqrt(t));
    complexd pref = std::polar(1.0 / std::sqrt(4.0 * M_PI), -0.25 * M_PI);
    complexd inner = std::exp(complexd(0.0, a * a)) / a + 2.0 * complexd(0.0, 1.0) * fresnel_upper(a);
    return (pref * (r * inner)).real();
}

namespace {

complexd theta_integral(const std::function<complexd(double)>& g, double split,
                        double rel_tol, long max_nodes)
{
    // Integrate over [0,1]; split at the interior sign-change point when present.
    auto piece = [&](double a, double b) -> complexd {
        if (b <= a) return {0.0, 0.0};
        return integrate_adaptive(g, a, b, 64, rel_tol, max_nodes, "taylor split");
    };
    if (split > 0.0 && split < 1.0) return piece(0.0, split) + piece(split, 1.0);
    return piece(0.0, 1.0);
}

}  // namespace

double taylor_split_check(int alpha, double lambda, double x, double y,
                          double rel_tol, long max_nodes)
{
    if (!(lambda > 0.0)) throw ValidationError("taylor_split_check: lambda must be positive");
    if (alpha < 1 || alpha > 3) throw ValidationError("taylor_split_check: alpha must be 1..3");
    const int sign = +1;
    double split = (y != 0.0) ? x / y : -1.0;

    auto Fk = [&](int k, double s) {
        return alpha == 3 ? Ftilde_deriv(sign, k, s) : F_deriv(sign, k, s);
    };

    complexd lhs = Fk(0, lambda * std::fabs(x - y));
    complexd rhs;
    if (alpha == 1) {
        complexd integral = theta_integral(
            [&](double th) {
                double z = x - th * y;
                return static_cast<double>(sgn(z)) * Fk(1, lambda * std::fabs(z));
            },
            split, rel_tol, max_nodes);
        rhs = Fk(0, lambda * std::fabs(x)) - lambda * y * integral;
    } else if (alpha == 2) {
        complexd integral = theta_integral(
            [&](double th) {
                double z = x - th * y;
                return (1.0 - th) * Fk(2, lambda * std::fabs(z));
            },
            split, rel_tol, max_nodes);
        rhs = Fk(0, lambda * std::fabs(x)) - lambda * y * static_cast<double>(sgn(x)) * Fk(1, lambda * std::fabs(x)) +
              lambda * lambda * y * y * integral;
    } else {
        complexd integral = theta_integral(
            [&](double th) {
                double z = x - th * y;
                return (1.0 - th) * (1.0 - th) * static_cast<double>(sgn(z)) * Fk(3, lambda * std::fabs(z));
            },
            split, rel_tol, max_nodes);
        rhs = Fk(0, lambda * std::fabs(x)) - lambda * y * static_cast<double>(sgn(x)) * Fk(1, lambda * std::fabs(x)) +
              0.5 * lambda * lambda * y * y * Fk(2, lambda * std::fabs(x)) -
              0.5 * lambda * lambda * lambda * y * y * y * integral;
    }
    return std::abs(lhs - rhs);
}

}  // namespace freekernel
}  // namespace beamlab
