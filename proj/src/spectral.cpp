#include "beamlab/spectral.hpp"

#include <cmath>

namespace beamlab {

DiscreteOperator build_hamiltonian(const Grid& grid, const PotentialSample& sample, double mass)
{
    if (sample.grid.n != grid.n || sample.grid.L != grid.L)
        throw ValidationError("build_hamiltonian: sample and grid dimensions differ");

    const int n = grid.n;
    // Free part is circulant: row entries depend on the index offset only.
    std::vector<double> row(n, 0.0);
    for (int d = 0; d < n; ++d) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            double k = grid.k[j];
            acc += k * k * k * k * std::cos(2.0 * M_PI * j * d / n);
        }
        row[d] = acc / n;
    }

    DiscreteOperator op;
    op.grid = grid;
    op.mass = mass;
    op.H.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) op.H(i, j) = row[(j - i + n) % n];
    for (int i = 0; i < n; ++i) op.H(i, i) += sample.V[i];
    // explicit symmetrization kills transform round-off asymmetry
    op.H = 0.5 * (op.H + op.H.transpose()).eval();
    return op;
}

SpectralData eigendecompose(const DiscreteOperator& op, double pr_threshold)
{
    if (!op.H.allFinite()) throw ValidationError("eigendecompose: operator has non-finite entries");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.H);
    if (solver.info() != Eigen::Success) throw NumericalError("eigendecompose: eigensolver failed");

    SpectralData sd;
    sd.grid = op.grid;
    sd.mass = op.mass;
    sd.eigenvalues = solver.eigenvalues();
    sd.eigenvectors = solver.eigenvectors() / std::sqrt(op.grid.h);  // h-weighted orthonormal

    const int n = op.grid.n;
    sd.participation.resize(n);
    for (int j = 0; j < n; ++j) {
        double s2 = 0.0, s4 = 0.0;
        for (int i = 0; i < n; ++i) {
            double a = sd.eigenvectors(i, j);
            s2 += a * a;
            s4 += a * a * a * a;
        }
        sd.participation[j] = (s2 * s2) / (n * s4);
    }
    sd.bound_state_indices = detect_bound_states(sd, pr_threshold);
    return sd;
}

std::set<int> detect_bound_states(const SpectralData& sd, double pr_threshold)
{
    // genuinely negative, not eigensolver round-off of the zero mode
    double neg_tol = 1e-12 * std::max(std::fabs(sd.eigenvalues[0]),
                                      std::fabs(sd.eigenvalues[sd.eigenvalues.size() - 1]));
    std::set<int> out;
    for (int j = 0; j < sd.eigenvalues.size(); ++j) {
        if (sd.eigenvalues[j] < -neg_tol)
            out.insert(j);
        else if (sd.participation[j] < pr_threshold)
            out.insert(j);
    }
    return out;
}

Eigen::MatrixXcd propagate_spectral(const SpectralData& sd, double t, double m,
                                    PropagatorKind kind, int ell,
                                    const std::vector<int>& nodes,
                                    const std::function<double(double)>& chi)
{
    const int n = sd.eigenvalues.size();
    const int ns = static_cast<int>(nodes.size());
    Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(ns, ns);
    Eigen::MatrixXd sub(ns, 1);

    Eigen::MatrixXd vecs(ns, n);
    for (int a = 0; a < ns; ++a)
        for (int j = 0; j < n; ++j) vecs(a, j) = sd.eigenvectors(nodes[a], j);

    double neg_tol = 1e-12 * std::max(std::fabs(sd.eigenvalues[0]),
                                      std::fabs(sd.eigenvalues[n - 1]));
    for (int j = 0; j < n; ++j) {
        if (sd.bound_state_indices.count(j)) continue;
        double shifted = sd.eigenvalues[j] + m * m;
        if (shifted < 0.0 && shifted >= -neg_tol) shifted = 0.0;  // zero-mode round-off
        if (shifted < 0.0)
            throw NumericalError("propagate_spectral: negative shifted mode survived the bound-state filter");
        double w = std::sqrt(shifted);
        complexd g;
        switch (kind) {
            case PropagatorKind::Cos:
                g = std::cos(t * w) * std::pow(shifted, 0.5 * ell);
                break;
            case PropagatorKind::SinOver:
                g = (w == 0.0) ? complexd(t, 0.0) : complexd(std::sin(t * w) / w, 0.0);
                break;
            case PropagatorKind::UnifiedExp:
                g = std::exp(complexd(0.0, -t * w)) * std::pow(shifted, 0.5 * ell);
                break;
        }
        if (chi) g *= chi(sd.eigenvalues[j]);
        if (g == complexd(0.0, 0.0)) continue;
        for (int a = 0; a < ns; ++a)
            for (int b = 0; b < ns; ++b) K(a, b) += g * vecs(a, j) * vecs(b, j);
    }
    return K;
}

double finite_box_T_max(const Grid& grid, double lambda_max)
{
    if (!(lambda_max > 0.0)) return std::numeric_limits<double>::infinity();
    return grid.L / (4.0 * lambda_max);
}

}  // namespace beamlab
