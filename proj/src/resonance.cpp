#include "beamlab/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "beamlab/free_kernel.hpp"

namespace beamlab {

std::string to_string(ResonanceClass c)
{
    switch (c) {
        case ResonanceClass::Regular: return "Regular";
        case ResonanceClass::FirstKind: return "FirstKind";
        case ResonanceClass::SecondKind: return "SecondKind";
    }
    return "?";
}

MomentProjectors moment_projectors(const SupportNodes& nodes, const Eigen::VectorXd& w)
{
    const int s = nodes.size();
    if (nodes.v.cwiseAbs().maxCoeff() == 0.0)
        throw ValidationError("moment_projectors: v vanishes identically");

    Eigen::VectorXd sqw = w.cwiseSqrt();
    MomentProjectors mp;
    mp.moments.resize(s, 3);
    for (int i = 0; i < s; ++i) {
        double base = sqw[i] * nodes.v[i];
        mp.moments(i, 0) = base;
        mp.moments(i, 1) = base * nodes.x[i];
        mp.moments(i, 2) = base * nodes.x[i] * nodes.x[i];
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> cond_check(mp.moments);
    double smin = cond_check.singularValues().minCoeff();
    double smax = cond_check.singularValues().maxCoeff();
    if (!(smin > 0.0) || smax / smin > 1e12)
        throw NumericalError("moment_projectors: {v, xv, x^2 v} numerically dependent");

    auto complement = [&](int k) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(mp.moments.leftCols(k));
        Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(s, s);
        return Q;
    };

    Eigen::MatrixXd Q1full = complement(1);
    Eigen::MatrixXd Q2full = complement(2);
    Eigen::MatrixXd Q3full = complement(3);

    Eigen::VectorXd q0 = Q1full.col(0);
    mp.P = q0 * q0.transpose();
    mp.Q1 = Eigen::MatrixXd::Identity(s, s) - mp.P;
    mp.Q2 = Eigen::MatrixXd::Identity(s, s) - Q2full.leftCols(2) * Q2full.leftCols(2).transpose();
    mp.Q3t = Eigen::MatrixXd::Identity(s, s) - Q3full.leftCols(3) * Q3full.leftCols(3).transpose();
    mp.W2 = Q2full.rightCols(s - 2);
    mp.W3 = Q3full.rightCols(s - 3);
    return mp;
}

NystromOperator build_T0(const PotentialSample& sample)
{
    if (sample.is_zero()) {
        NystromOperator op;
        op.w = Eigen::VectorXd::Constant(sample.grid.n, sample.grid.h);
        op.sym = Eigen::MatrixXd::Zero(sample.grid.n, sample.grid.n);
        return op;
    }
    SupportNodes nodes = support_nodes(sample);
    ProductQuadrature pq(nodes);
    Eigen::MatrixXd W = pq.build([](double x, double y) { return freekernel::G0_kernel(x, y); });

    const Eigen::VectorXd& w = pq.node_weights();
    Eigen::VectorXd sqw = w.cwiseSqrt();
    const int s = nodes.size();
    NystromOperator op;
    op.w = w;
    op.sym.resize(s, s);
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j)
            op.sym(i, j) = sqw[i] * nodes.v[i] * W(i, j) * nodes.v[j] / sqw[j];
    for (int i = 0; i < s; ++i) op.sym(i, i) += nodes.U[i];
    return op;
}

NystromOperatorC build_M(const PotentialSample& sample, double lambda, int sign)
{
    if (!(lambda > 0.0)) throw ValidationError("build_M: lambda must be positive");
    if (sample.is_zero()) throw ValidationError("build_M: zero potential");
    SupportNodes nodes = support_nodes(sample);
    ProductQuadrature pq(nodes);
    Eigen::MatrixXcd W = pq.build_c([lambda, sign](double x, double y) {
        return freekernel::free_resolvent_kernel(lambda, x, y, sign);
    });

    const Eigen::VectorXd& w = pq.node_weights();
    Eigen::VectorXd sqw = w.cwiseSqrt();
    const int s = nodes.size();
    NystromOperatorC op;
    op.w = w;
    op.sym.resize(s, s);
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j)
            op.sym(i, j) = sqw[i] * nodes.v[i] * W(i, j) * nodes.v[j] / sqw[j];
    for (int i = 0; i < s; ++i) op.sym(i, i) += static_cast<double>(nodes.U[i]);
    return op;
}

namespace {

std::vector<double> ascending_singular_values(const Eigen::MatrixXd& A)
{
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    Eigen::VectorXd sv = svd.singularValues();
    std::vector<double> out(sv.data(), sv.data() + sv.size());
    std::sort(out.begin(), out.end());
    return out;
}

// dim = count below rank_tol * sigma_max; gap = ratio across the cut.
std::pair<int, double> rank_call(const std::vector<double>& sigma, double rank_tol)
{
    if (sigma.empty()) return {0, std::numeric_limits<double>::infinity()};
    double smax = sigma.back();
    double thresh = rank_tol * smax;
    int dim = 0;
    while (dim < static_cast<int>(sigma.size()) && sigma[dim] < thresh) ++dim;
    double gap;
    if (dim == 0)
        gap = sigma.front() / thresh;
    else if (dim == static_cast<int>(sigma.size()))
        gap = std::numeric_limits<double>::infinity();
    else
        gap = sigma[dim] / std::max(sigma[dim - 1], 1e-300);
    return {dim, gap};
}

}  // namespace

ResonanceReport compute_resonance_subspaces(const NystromOperator& T0,
                                            const MomentProjectors& proj, double rank_tol)
{
    ResonanceReport rep;
    rep.rank_tol = rank_tol;

    Eigen::MatrixXd B2 = proj.W2.transpose() * T0.sym * proj.W2;
    rep.sigma_q20 = ascending_singular_values(B2);
    std::tie(rep.q20_dim, rep.gap_q20) = rank_call(rep.sigma_q20, rank_tol);

    Eigen::MatrixXd C3 = proj.Q1 * T0.sym * proj.W3;
    rep.sigma_q3 = ascending_singular_values(C3);
    std::tie(rep.q3_dim, rep.gap_q3) = rank_call(rep.sigma_q3, rank_tol);

    rep.ambiguous = rep.gap_q20 < 10.0 || rep.gap_q3 < 10.0 || rep.q3_dim > rep.q20_dim;
    if (rep.q3_dim > 0)
        rep.classification = ResonanceClass::SecondKind;
    else if (rep.q20_dim > 0)
        rep.classification = ResonanceClass::FirstKind;
    else
        rep.classification = ResonanceClass::Regular;
    return rep;
}

ResonanceReport classify_potential(const PotentialSample& sample, double rank_tol, double lambda0)
{
    NystromOperator T0 = build_T0(sample);
    SupportNodes nodes = support_nodes(sample);
    MomentProjectors proj = moment_projectors(nodes, T0.w);
    ResonanceReport rep = compute_resonance_subspaces(T0, proj, rank_tol);
    rep.lambda0 = lambda0 > 0.0 ? lambda0 : lambda0_auto(sample);
    return rep;
}

std::string ResonanceReport::to_json() const
{
    std::ostringstream os;
    os.precision(17);
    auto arr = [&](const std::vector<double>& v) {
        std::ostringstream a;
        a.precision(17);
        a << "[";
        for (std::size_t i = 0; i < v.size(); ++i) a << (i ? "," : "") << v[i];
        a << "]";
        return a.str();
    };
    os << "{\"classification\":\"" << to_string(classification) << "\""
       << ",\"q20_dim\":" << q20_dim << ",\"q3_dim\":" << q3_dim
       << ",\"rank_tol\":" << rank_tol << ",\"gap_q20\":" << gap_q20
       << ",\"gap_q3\":" << gap_q3 << ",\"ambiguous\":" << (ambiguous ? "true" : "false")
       << ",\"lambda0\":" << lambda0 << ",\"sigma_q20\":" << arr(sigma_q20)
       << ",\"sigma_q3\":" << arr(sigma_q3) << "}";
    return os.str();
}

std::vector<double> geometric_lambdas(double lo, double hi, int count)
{
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i)
        out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
    return out;
}

namespace {

struct SvdExtremes {
    double smin;
    double smax;
};

SvdExtremes svd_extremes(const Eigen::MatrixXcd& A)
{
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
    return {svd.singularValues().minCoeff(), svd.singularValues().maxCoeff()};
}

}  // namespace

ProbeResult minv_blowup_probe(const PotentialSample& sample, const std::vector<double>& lambdas)
{
    ProbeResult pr;
    pr.lambdas = lambdas;
    pr.norms.assign(lambdas.size(), 0.0);
    std::vector<double> ceilings(lambdas.size(), 0.0);

    std::vector<SvdExtremes> ext(lambdas.size());
    parallel_for(lambdas.size(), [&](std::size_t i) {
        NystromOperatorC M = build_M(sample, lambdas[i], +1);
        ext[i] = svd_extremes(M.sym);
    });

    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (ext[i].smin <= 0.0) {
            pr.dropped.push_back("lambda=" + std::to_string(lambdas[i]) + ": singular M");
            pr.norms[i] = std::numeric_limits<double>::infinity();
            continue;
        }
        pr.norms[i] = 1.0 / ext[i].smin;
        ceilings[i] = 1.0 / (2.2e-16 * ext[i].smax);
    }

    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (!std::isfinite(pr.norms[i])) continue;
        if (pr.norms[i] * 10.0 >= ceilings[i]) {
            pr.dropped.push_back("lambda=" + std::to_string(lambdas[i]) +
                                 ": at round-off ceiling, excluded from fit");
            continue;
        }
        pr.used.push_back(static_cast<int>(i));
        lx.push_back(std::log(lambdas[i]));
        ly.push_back(std::log(pr.norms[i]));
    }
    if (lx.size() < 3) throw NumericalError("minv_blowup_probe: too few usable points");
    pr.fit = fit_line(lx, ly);
    return pr;
}

ProbeResult cancellation_probe(const PotentialSample& sample, int alpha,
                               const std::vector<double>& lambdas)
{
    if (alpha < 0 || alpha > 3) throw ValidationError("cancellation_probe: alpha must be 0..3");

    SupportNodes nodes = support_nodes(sample);
    ProductQuadrature pq(nodes);
    const Eigen::VectorXd& w = pq.node_weights();
    Eigen::VectorXd sqw = w.cwiseSqrt();
    MomentProjectors proj = moment_projectors(nodes, w);

    const Eigen::MatrixXd* Q = nullptr;
    if (alpha == 1) Q = &proj.Q1;
    if (alpha == 2) Q = &proj.Q2;
    if (alpha == 3) Q = &proj.Q3t;

    // moment annihilation must hold before the probe means anything
    if (alpha >= 1) {
        for (int k = 0; k < alpha; ++k) {
            Eigen::VectorXd mk = proj.moments.col(k);
            double rel = ((*Q) * mk).norm() / mk.norm();
            if (rel > 1e-10)
                throw NumericalError("cancellation_probe: projector fails to annihilate moment " +
                                     std::to_string(k));
        }
    }

    ProbeResult pr;
    pr.lambdas = lambdas;
    pr.norms.assign(lambdas.size(), 0.0);
    const int s = nodes.size();

    parallel_for(lambdas.size(), [&](std::size_t li) {
        double lambda = lambdas[li];
        Eigen::MatrixXcd W = pq.build_c([lambda](double x, double y) {
            return freekernel::free_resolvent_kernel(lambda, x, y, +1);
        });
        Eigen::MatrixXcd A(s, s);
        for (int i = 0; i < s; ++i)
            for (int j = 0; j < s; ++j) A(i, j) = sqw[i] * nodes.v[i] * W(i, j) / sqw[j];
        if (Q) A = (*Q) * A;
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
        pr.norms[li] = svd.singularValues().maxCoeff();
    });

    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        pr.used.push_back(static_cast<int>(i));
        lx.push_back(std::log(lambdas[i]));
        ly.push_back(std::log(pr.norms[i]));
    }
    pr.fit = fit_line(lx, ly);
    return pr;
}

double lambda0_auto(const PotentialSample& sample)
{
    if (sample.is_zero()) return 0.125;
    for (int k = 1; k <= 14; ++k) {
        double lambda0 = std::ldexp(1.0, -k);
        double lo = std::pow(lambda0, 0.25), hi = std::pow(2.0 * lambda0, 0.25);
        bool ok = true;
        for (double lambda : {lo, 0.5 * (lo + hi), hi}) {
            NystromOperatorC M = build_M(sample, lambda, +1);
            SvdExtremes e = svd_extremes(M.sym);
            if (!(e.smin > 0.0) || e.smax / e.smin >= 1e6) {
                ok = false;
                break;
            }
        }
        if (ok) return lambda0;
    }
    return std::ldexp(1.0, -14);
}

}  // namespace beamlab
