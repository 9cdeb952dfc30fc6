#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "beamlab/free_kernel.hpp"
#include "beamlab/grid.hpp"
#include "beamlab/potential.hpp"
#include "beamlab/quadrature.hpp"
#include "beamlab/spectral.hpp"

using namespace beamlab;
using namespace beamlab::freekernel;

TEST_CASE("profile values")
{
    complexd f0 = F(+1, 0.0);
    CHECK(f0.real() == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(f0.imag() == doctest::Approx(1.0).epsilon(1e-15));

    complexd fpi = F(+1, M_PI);
    CHECK(fpi.real() == doctest::Approx(-std::exp(-M_PI)).epsilon(1e-14));
    CHECK(fpi.imag() == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("conjugation and boundedness")
{
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> ds(0.0, 40.0);
    for (int i = 0; i < 10000; ++i) {
        double s = ds(rng);
        complexd plus = F(+1, s), minus = F(-1, s);
        CHECK(std::abs(minus - std::conj(plus)) <= 1e-15 * (1.0 + std::abs(plus)));
        CHECK(std::abs(plus) <= 2.0 + 1e-15);
    }
    // linear departure from F(0) with slope bounded by 2
    for (double s : {1e-3, 1e-4, 1e-5})
        CHECK(std::abs(F(+1, s) - complexd(-1.0, 1.0)) <= 2.0 * s);
}

TEST_CASE("analytic derivatives match finite differences")
{
    double h = 1e-5;
    for (double s : {0.3, 1.7, 4.2}) {
        for (int k = 1; k <= 3; ++k) {
            complexd fd = (F_deriv(+1, k - 1, s + h) - F_deriv(+1, k - 1, s - h)) / (2.0 * h);
            CHECK(std::abs(F_deriv(+1, k, s) - fd) <= 1e-8);
        }
    }
    CHECK(std::abs(F_deriv(+1, 1, 0.0)) <= 1e-15);          // F'(0) = 0
    CHECK(std::abs(Ftilde_deriv(+1, 1, 0.0)) <= 1e-15);     // same for the regularized profile
    CHECK(std::abs(Ftilde_deriv(+1, 2, 0.0)) <= 1e-15);     // Ftilde''(0) = 0
}

TEST_CASE("free resolvent kernel values and symmetry")
{
    complexd at_zero = free_resolvent_kernel(1.0, 0.7, 0.7, +1);
    CHECK(at_zero.real() == doctest::Approx(-0.25).epsilon(1e-15));
    CHECK(at_zero.imag() == doctest::Approx(0.25).epsilon(1e-15));

    complexd l2 = free_resolvent_kernel(2.0, 1.0, 1.0, +1);
    CHECK(l2.real() == doctest::Approx(-1.0 / 32.0).epsilon(1e-15));
    CHECK(l2.imag() == doctest::Approx(1.0 / 32.0).epsilon(1e-15));

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> dx(-5.0, 5.0);
    std::uniform_real_distribution<double> dl(0.05, 3.0);
    for (int i = 0; i < 10000; ++i) {
        double lambda = dl(rng), x = dx(rng), y = dx(rng);
        complexd pl = free_resolvent_kernel(lambda, x, y, +1);
        CHECK(std::abs(free_resolvent_kernel(lambda, y, x, +1) - pl) == 0.0);
        CHECK(std::abs(free_resolvent_kernel(lambda, x, y, -1) - std::conj(pl)) <=
              1e-15 * (1.0 + std::abs(pl)));
    }
    CHECK_THROWS_AS(free_resolvent_kernel(-1.0, 0.0, 1.0, +1), ValidationError);
}

TEST_CASE("zero-energy kernel")
{
    CHECK(G0_kernel(0.3, 0.3) == 0.0);
    CHECK(G0_kernel(0.0, 1.0) == doctest::Approx(1.0 / 12.0).epsilon(1e-15));
    CHECK(G0_kernel(2.0, -1.0) == G0_kernel(-1.0, 2.0));

    // G0 is the lambda -> 0 limit of the regular part of the resolvent kernel
    double r = 1.3;
    for (double lambda : {1e-2, 1e-3}) {
        complexd sing = (complexd(-1.0, 1.0) +
                         complexd(-1.0, -1.0) * 0.5 * lambda * lambda * r * r) /
                        (4.0 * lambda * lambda * lambda);
        complexd reg = free_resolvent_kernel(lambda, r, 0.0, +1) - sing;
        CHECK(reg.real() == doctest::Approx(G0_kernel(r, 0.0)).epsilon(20.0 * lambda));
    }
}

TEST_CASE("fresnel kernel sup and symmetries")
{
    // oracle: dense scan over separations
    double sup = 0.0;
    for (int i = 0; i <= 40000; ++i) {
        double r = 40.0 * i / 40000.0;
        sup = std::max(sup, std::fabs(fresnel_cos_kernel(1.0, r, 0.0)));
    }
    CHECK(sup == doctest::Approx(1.0 / std::sqrt(4.0 * M_PI)).epsilon(1e-3));

    CHECK(fresnel_cos_kernel(2.0, 1.0, 3.0) == fresnel_cos_kernel(2.0, 3.0, 1.0));
    CHECK(fresnel_cos_kernel(-2.0, 1.0, 3.0) ==
          doctest::Approx(fresnel_cos_kernel(2.0, 1.0, 3.0)).epsilon(1e-15));
    CHECK_THROWS_AS(fresnel_cos_kernel(0.0, 0.0, 1.0), ValidationError);
}

TEST_CASE("fresnel time integral against direct quadrature")
{
    // oracle: geometric panels with node counts tracking the local phase
    auto direct = [](double t, double r) {
        double s_min = 1e-4, acc = 0.0;
        // below s_min the r = 0 integrand is a clean power law; for r > 0 the
        // stationary-free oscillation integrates to something negligible
        if (r == 0.0) acc += 2.0 * std::sqrt(s_min / (4.0 * M_PI)) * std::cos(0.25 * M_PI);
        int panels = 600;
        for (int p = 0; p < panels; ++p) {
            double a = s_min * std::pow(t / s_min, static_cast<double>(p) / panels);
            double b = s_min * std::pow(t / s_min, static_cast<double>(p + 1) / panels);
            double dphase = (r > 0.0) ? 0.25 * r * r * (1.0 / a - 1.0 / b) : 0.0;
            int nodes = std::max(16, 4 * static_cast<int>(std::ceil(dphase / M_PI)));
            acc += integrate_gl([&](double s) { return fresnel_cos_kernel(s, r, 0.0); }, a, b,
                                nodes);
        }
        return acc;
    };
    for (double t : {0.5, 2.0}) {
        for (double r : {0.0, 1.0, 4.0}) {
            CHECK(fresnel_cos_time_integral(t, r, 0.0) ==
                  doctest::Approx(direct(t, r)).epsilon(2e-3));
        }
    }
}

TEST_CASE("taylor splittings")
{
    CHECK(taylor_split_check(1, 1.3, 0.8, 0.0) <= 1e-14);  // y = 0 degenerates
    CHECK(taylor_split_check(1, 1.0, 2.0, 1.0) <= 1e-10);
    CHECK(taylor_split_check(2, 0.7, 1.5, 0.4) <= 1e-10);
    CHECK(taylor_split_check(3, 0.5, 1.0, 0.3) <= 1e-10);
    // sign-change point inside the theta interval
    CHECK(taylor_split_check(1, 0.9, 0.4, 1.0) <= 1e-10);
    CHECK(taylor_split_check(3, 0.8, 0.2, 0.9) <= 1e-10);

    // halving rel_tol never degrades the residual by more than 2x
    for (int alpha : {1, 2, 3}) {
        double r1 = taylor_split_check(alpha, 0.8, 1.1, 0.6, 1e-10);
        double r2 = taylor_split_check(alpha, 0.8, 1.1, 0.6, 5e-11);
        CHECK(r2 <= 2.0 * r1 + 1e-14);
    }
}

TEST_CASE("discrete resolvent equation on the grid interior")
{
    // (d4 - lambda^4) applied to the kernel smeared against a narrow Gaussian
    // source reproduces that source on the interior. The smearing keeps the
    // column band-limited, so the pseudospectral operator sees no kink.
    Grid g = build_grid(20.0, 512);
    PotentialSample zero = sample_potential(PotentialSpec{}, g);
    DiscreteOperator op = build_hamiltonian(g, zero);

    double lambda = 1.17;  // lambda^4 sits between grid eigenvalues
    double sigma = 4.0 * g.h;
    auto source = [&](double x) {
        return std::exp(-0.5 * x * x / (sigma * sigma)) / (sigma * std::sqrt(2.0 * M_PI));
    };
    auto bump = [](double q) { return q > 0.0 ? std::exp(-1.0 / q) : 0.0; };
    Eigen::VectorXd col(g.n), eta(g.n);
    for (int i = 0; i < g.n; ++i) {
        double x = g.x[i];
        eta[i] = source(x);
        // smooth window, identically 1 on the interior, 0 near the seam
        double a = (std::fabs(x) / g.L - 0.5) / 0.45;
        double w = bump(1.0 - a) / (bump(1.0 - a) + bump(a));
        // convolve kernel with the source; split panels at the kernel kink
        auto integrand = [&](double y) {
            return free_resolvent_kernel(lambda, x, y, +1).real() * source(y);
        };
        double split = std::clamp(x, -8.0 * sigma, 8.0 * sigma);
        double conv = integrate_gl(integrand, -8.0 * sigma, split, 256) +
                      integrate_gl(integrand, split, 8.0 * sigma, 256);
        col[i] = conv * w;
    }
    Eigen::VectorXd resid = op.H * col - std::pow(lambda, 4) * col - eta;
    double worst = 0.0;
    for (int i = 0; i < g.n; ++i) {
        if (std::fabs(g.x[i]) > 0.45 * g.L) continue;
        worst = std::max(worst, std::fabs(resid[i]));
    }
    CHECK(worst <= 1e-6 * eta.maxCoeff());
}
