#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "beamlab/free_kernel.hpp"
#include "beamlab/resonance.hpp"

using namespace beamlab;

namespace {

PotentialSample make_sample(PotentialFamily family, double L, int n, double coupling = -0.3,
                            double c = 1.0, double d = 1.0)
{
    Grid g = build_grid(L, n);
    PotentialSpec spec;
    spec.family = family;
    spec.coupling = coupling;
    spec.c = c;
    spec.d = d;
    return sample_potential(spec, g);
}

}  // namespace

TEST_CASE("product quadrature integrates polynomials against kernels exactly")
{
    PotentialSample s = make_sample(PotentialFamily::ResonanceExample, 6.0, 256);
    SupportNodes nodes = support_nodes(s);
    ProductQuadrature pq(nodes);

    // node weights integrate polynomials over the hull
    for (int deg : {0, 1, 4, 7, 9}) {
        double got = 0.0;
        for (int l = 0; l < nodes.size(); ++l)
            got += pq.node_weights()[l] * std::pow(nodes.x[l], deg);
        double expect = (std::pow(nodes.a_hi, deg + 1) - std::pow(nodes.a_lo, deg + 1)) / (deg + 1);
        CHECK(got == doctest::Approx(expect).epsilon(1e-12).scale(1.0));
    }

    // G0 rows applied to a polynomial match the closed-form antiderivative
    Eigen::MatrixXd W = pq.build([](double x, double y) { return freekernel::G0_kernel(x, y); });
    auto exact = [&](double x) {
        // int_{-1}^{1} |x-y|^3/12 * y^2 dy, split at y = x
        auto prim = [&](double y, double sgn) {
            // antiderivative of sgn*(x-y)^3 y^2 /12
            double a = x;
            return sgn *
                   (a * a * a * y * y * y / 3.0 - 3.0 * a * a * y * y * y * y / 4.0 +
                    3.0 * a * y * y * y * y * y / 5.0 - y * y * y * y * y * y / 6.0) /
                   12.0;
        };
        double lo = nodes.a_lo, hi = nodes.a_hi;
        double xm = std::clamp(x, lo, hi);
        return (prim(xm, +1.0) - prim(lo, +1.0)) + (prim(hi, -1.0) - prim(xm, -1.0));
    };
    for (int i : {0, 3, nodes.size() / 2, nodes.size() - 1}) {
        double got = 0.0;
        for (int l = 0; l < nodes.size(); ++l) got += W(i, l) * nodes.x[l] * nodes.x[l];
        CHECK(got == doctest::Approx(exact(nodes.x[i])).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("T0 structure")
{
    SUBCASE("zero potential gives the zero matrix")
    {
        PotentialSample s = make_sample(PotentialFamily::Zero, 6.0, 64);
        NystromOperator T0 = build_T0(s);
        CHECK(T0.sym.cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("diagonal entries reduce to U, near-symmetry, grid convergence")
    {
        PotentialSample s = make_sample(PotentialFamily::ScaledSech2, 6.0, 256, -0.3);
        NystromOperator T0 = build_T0(s);
        SupportNodes nodes = support_nodes(s);
        int mid = nodes.size() / 2;
        REQUIRE(s.V[nodes.idx[mid]] < 0.0);
        // the zero-energy kernel vanishes on the diagonal, so the diagonal is
        // U up to the quadrature's interpolation residue
        CHECK(T0.sym(mid, mid) == doctest::Approx(-1.0).epsilon(1e-6));

        double asym = (T0.sym - T0.sym.transpose()).cwiseAbs().maxCoeff();
        CHECK(asym <= 1e-8 * T0.sym.cwiseAbs().maxCoeff());

        // operator norm settles as the grid refines
        PotentialSample s2 = make_sample(PotentialFamily::ScaledSech2, 6.0, 512, -0.3);
        NystromOperator T02 = build_T0(s2);
        double n1 = T0.sym.operatorNorm(), n2 = T02.sym.operatorNorm();
        CHECK(std::fabs(n1 - n2) <= 1e-6 * n2);
    }
}

TEST_CASE("moment projectors annihilate the moments")
{
    PotentialSample s = make_sample(PotentialFamily::ResonanceExample, 6.0, 256);
    NystromOperator T0 = build_T0(s);
    SupportNodes nodes = support_nodes(s);
    MomentProjectors mp = moment_projectors(nodes, T0.w);

    const int sdim = nodes.size();
    for (int k = 0; k < 3; ++k) {
        Eigen::VectorXd mk = mp.moments.col(k);
        if (k < 1) CHECK((mp.Q1 * mk).norm() <= 1e-10 * mk.norm());
        if (k < 2) CHECK((mp.Q2 * mk).norm() <= 1e-10 * mk.norm());
        CHECK((mp.Q3t * mk).norm() <= 1e-10 * mk.norm());
    }
    // idempotence and rank
    CHECK((mp.Q1 * mp.Q1 - mp.Q1).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((mp.Q2 * mp.Q2 - mp.Q2).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(std::lround(mp.P.trace()) == 1);
    // subspace nesting range(Q3t) in range(Q2) in range(Q1)
    CHECK((mp.Q2 * mp.Q1 - mp.Q2).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((mp.Q3t * mp.Q2 - mp.Q3t).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(mp.W2.cols() == sdim - 2);
    CHECK(mp.W3.cols() == sdim - 3);
}

TEST_CASE("classification of the three reference potentials")
{
    struct Case {
        PotentialFamily family;
        double c, d, coupling;
        ResonanceClass expect;
    };
    const Case cases[] = {
        {PotentialFamily::ResonanceExample, 1.0, 1.0, 0.0, ResonanceClass::FirstKind},
        {PotentialFamily::ResonanceExample, 0.0, 1.0, 0.0, ResonanceClass::SecondKind},
        {PotentialFamily::ScaledSech2, 0.0, 0.0, -0.3, ResonanceClass::Regular},
    };
    for (const Case& cs : cases) {
        for (int n : {256, 512}) {
            PotentialSample s = make_sample(cs.family, 6.0, n, cs.coupling, cs.c, cs.d);
            ResonanceReport rep = classify_potential(s, 1e-8);
            INFO("family=", family_to_string(cs.family), " c=", cs.c, " n=", n,
                 " q20=", rep.q20_dim, " q3=", rep.q3_dim, " gap20=", rep.gap_q20,
                 " gap3=", rep.gap_q3);
            CHECK(rep.classification == cs.expect);
            CHECK_FALSE(rep.ambiguous);
            CHECK(rep.q3_dim <= rep.q20_dim);
        }
    }
}

TEST_CASE("M matrix structure")
{
    PotentialSample s = make_sample(PotentialFamily::ResonanceExample, 6.0, 256);
    SupportNodes nodes = support_nodes(s);
    double lambda = 0.05;
    NystromOperatorC Mp = build_M(s, lambda, +1);
    NystromOperatorC Mm = build_M(s, lambda, -1);

    // the two boundary values are entrywise conjugate
    CHECK((Mm.sym - Mp.sym.conjugate()).cwiseAbs().maxCoeff() <=
          1e-12 * Mp.sym.cwiseAbs().maxCoeff());
    // and so are the inverses
    Eigen::MatrixXcd ip = Mp.sym.inverse(), im = Mm.sym.inverse();
    CHECK((im - ip.conjugate()).cwiseAbs().maxCoeff() <= 1e-8 * ip.cwiseAbs().maxCoeff());

    // diagonal entry: U + v^2 w F(0)/(4 lambda^3) up to quadrature residue
    int mid = nodes.size() / 2;
    complexd expect = static_cast<double>(nodes.U[mid]) +
                      nodes.v[mid] * nodes.v[mid] * Mp.w[mid] * complexd(-1.0, 1.0) /
                          (4.0 * lambda * lambda * lambda);
    CHECK(std::abs(Mp.sym(mid, mid) - expect) <= 1e-3 * std::abs(expect));

    PotentialSample z = make_sample(PotentialFamily::Zero, 6.0, 64);
    CHECK_THROWS_AS(build_M(z, 0.1, +1), ValidationError);
    CHECK_THROWS_AS(build_M(s, -0.1, +1), ValidationError);
}

TEST_CASE("inverse blow-up orders across the three classes")
{
    std::vector<double> lambdas = geometric_lambdas(1e-3, 1e-1, 17);
    struct Case {
        PotentialFamily family;
        double c, d, coupling, expect;
    };
    const Case cases[] = {
        {PotentialFamily::ScaledSech2, 0.0, 0.0, -0.3, 0.0},
        {PotentialFamily::ResonanceExample, 1.0, 1.0, 0.0, -1.0},
        {PotentialFamily::ResonanceExample, 0.0, 1.0, 0.0, -3.0},
    };
    for (const Case& cs : cases) {
        PotentialSample s = make_sample(cs.family, 6.0, 256, cs.coupling, cs.c, cs.d);
        ProbeResult pr = minv_blowup_probe(s, lambdas);
        INFO("family=", family_to_string(cs.family), " c=", cs.c, " slope=", pr.fit.slope,
             " used=", pr.used.size());
        CHECK(std::fabs(pr.fit.slope - cs.expect) <= 0.3);
    }
}

TEST_CASE("projection improves the low-energy order of v R0")
{
    PotentialSample s = make_sample(PotentialFamily::ScaledSech2, 6.0, 256, -0.3);
    std::vector<double> lambdas = geometric_lambdas(1e-3, 1e-1, 13);
    for (int alpha : {0, 1, 2, 3}) {
        ProbeResult pr = cancellation_probe(s, alpha, lambdas);
        INFO("alpha=", alpha, " slope=", pr.fit.slope);
        CHECK(std::fabs(pr.fit.slope - (alpha - 3.0)) <= 0.3);
    }
}

TEST_CASE("auto cutoff scale")
{
    PotentialSample z = make_sample(PotentialFamily::Zero, 6.0, 64);
    CHECK(lambda0_auto(z) == 0.125);
    PotentialSample s = make_sample(PotentialFamily::ScaledSech2, 6.0, 256, -0.3);
    double l0 = lambda0_auto(s);
    CHECK(l0 > 0.0);
    CHECK(l0 <= 0.5);
}
