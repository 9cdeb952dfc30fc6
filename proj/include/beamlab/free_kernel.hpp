#pragma once

#include "beamlab/common.hpp"

namespace beamlab {
namespace freekernel {

/// F_pm(s) = +-i e^{+-is} - e^{-s}, the profile of the fourth-order free
/// resolvent boundary values. `sign` is +1 or -1.
complexd F(int sign, double s);
/// k-th analytic derivative of F_pm, k in 0..3.
complexd F_deriv(int sign, int k, double s);

/// Ftilde = F + (1 +- i) s^2 / 2; satisfies Ftilde'(0) = Ftilde''(0) = 0.
complexd Ftilde(int sign, double s);
complexd Ftilde_deriv(int sign, int k, double s);

/// Kernel of (d^4/dx^4 - lambda^4 -+ i0)^{-1} on the line:
/// F_sign(lambda |x-y|) / (4 lambda^3).
complexd free_resolvent_kernel(double lambda, double x, double y, int sign);

/// Zero-energy kernel of (d^4/dx^4)^{-1}: |x-y|^3 / 12.
double G0_kernel(double x, double y);

/// Exact kernel of cos(t d^2/dx^2) on the line (Fresnel form); the sup over
/// (x,y) equals (4 pi |t|)^{-1/2}.
double fresnel_cos_kernel(double t, double x, double y);

/// Closed-form time integral of the Fresnel cosine kernel from 0 to t
/// (the kernel of sin(t d^2/dx^2)/(d^2/dx^2) up to sign conventions);
/// used as an independent reference in tests.
double fresnel_cos_time_integral(double t, double x, double y);

/// Residual |lhs - rhs| of the order-alpha splitting of F(lambda|x-y|)
/// around y = 0, alpha in {1,2,3} (alpha = 3 uses Ftilde). The theta
/// integral is evaluated by Gauss-Legendre split at the sign change.
double taylor_split_check(int alpha, double lambda, double x, double y,
                          double rel_tol = 1e-12, long max_nodes = 1 << 16);

}  // namespace freekernel
}  // namespace beamlab
