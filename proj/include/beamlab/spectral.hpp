#pragma once

#include <optional>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "beamlab/cutoff.hpp"
#include "beamlab/potential.hpp"

namespace beamlab {

/// Dense matrix realization of H = d^4/dx^4 + V on the periodic grid,
/// assembled through the discrete Fourier diagonalization of the free part.
struct DiscreteOperator {
    Grid grid;
    double mass = 0.0;  // mass parameter m of the evolution, not part of H
    Eigen::MatrixXd H;
};

DiscreteOperator build_hamiltonian(const Grid& grid, const PotentialSample& sample, double mass = 0.0);

struct SpectralData {
    Grid grid;
    double mass = 0.0;
    Eigen::VectorXd eigenvalues;       // ascending
    Eigen::MatrixXd eigenvectors;      // columns, orthonormal in the h-weighted inner product
    std::vector<double> participation; // PR_j per eigenvector
    std::set<int> bound_state_indices;
};

SpectralData eigendecompose(const DiscreteOperator& op, double pr_threshold = 0.05);

/// Indices with mu_j < 0 plus nonnegative-energy indices of low participation
/// ratio (localized embedded candidates).
std::set<int> detect_bound_states(const SpectralData& sd, double pr_threshold);

enum class PropagatorKind { Cos, SinOver, UnifiedExp };

/// Kernel of g(H + m^2) restricted to the non-bound modes, sampled on the
/// given node indices. g = cos(t sqrt(.)) (.)^{l/2} for Cos,
/// sin(t sqrt(.))/sqrt(.) for SinOver, e^{-it sqrt(.)} (.)^{l/2} for
/// UnifiedExp. An optional spectral cutoff weight chi(mu) multiplies g.
Eigen::MatrixXcd propagate_spectral(const SpectralData& sd, double t, double m,
                                    PropagatorKind kind, int ell,
                                    const std::vector<int>& nodes,
                                    const std::function<double(double)>& chi = {});

/// Finite-box validity horizon L / (4 lambda_max) for group velocities capped
/// at 2 lambda_max by the spectral cutoff.
double finite_box_T_max(const Grid& grid, double lambda_max);

}  // namespace beamlab
