#pragma once

#include <string>
#include <vector>

#include "beamlab/nystrom.hpp"
#include "beamlab/quadrature.hpp"

namespace beamlab {

enum class ResonanceClass { Regular, FirstKind, SecondKind };
std::string to_string(ResonanceClass c);

/// Orthogonal projections annihilating the moments x^k v, built by QR in the
/// weighted inner product of the support quadrature. Q1 kills v, Q2 kills
/// {v, xv}, Q3t kills {v, xv, x^2 v}; W2/W3 are orthonormal bases of the
/// ranges of Q2/Q3t.
struct MomentProjectors {
    Eigen::MatrixXd moments;  // sqrt(w)-scaled columns v, xv, x^2 v
    Eigen::MatrixXd P;
    Eigen::MatrixXd Q1, Q2, Q3t;
    Eigen::MatrixXd W2, W3;
};

MomentProjectors moment_projectors(const SupportNodes& nodes, const Eigen::VectorXd& w);

/// T0 = U + v G0 v on the support nodes (sqrt(w)-conjugated representation).
NystromOperator build_T0(const PotentialSample& sample);

/// M_sign(lambda) = U + v R0_sign(lambda^4) v; complex, conj-symmetric
/// between the two signs.
NystromOperatorC build_M(const PotentialSample& sample, double lambda, int sign);

struct ResonanceReport {
    int q20_dim = 0;
    int q3_dim = 0;
    std::vector<double> sigma_q20;  // ascending singular values of the Q2 T0 Q2 restriction
    std::vector<double> sigma_q3;   // ascending singular values of Q1 T0 |range Q3t
    double rank_tol = 0.0;
    double gap_q20 = 0.0;  // ratio of consecutive sigmas around the threshold
    double gap_q3 = 0.0;
    bool ambiguous = false;
    ResonanceClass classification = ResonanceClass::Regular;
    double lambda0 = 0.0;
    std::string to_json() const;
};

ResonanceReport compute_resonance_subspaces(const NystromOperator& T0,
                                            const MomentProjectors& proj, double rank_tol);

/// Full pipeline: support nodes -> T0 -> projections -> rank calls.
ResonanceReport classify_potential(const PotentialSample& sample, double rank_tol,
                                   double lambda0 = 0.0);

struct ProbeResult {
    std::vector<double> lambdas;       // full sweep
    std::vector<double> norms;         // per-lambda operator norms
    std::vector<int> used;             // indices that entered the fit
    LineFit fit;                       // log-log
    std::vector<std::string> dropped;  // reasons for excluded points
};

/// Slope of log ||M+(lambda)^{-1}|| vs log lambda. Points whose norms sit at
/// the round-off ceiling 1/(eps sigma_max) are excluded from the fit.
ProbeResult minv_blowup_probe(const PotentialSample& sample, const std::vector<double>& lambdas);

/// Slope of log ||Q_alpha v R0+(lambda^4)|| vs log lambda, expected alpha - 3.
ProbeResult cancellation_probe(const PotentialSample& sample, int alpha,
                               const std::vector<double>& lambdas);

/// Largest lambda0 in {2^-k} with cond M(lambda) < 1e6 on the transition band
/// lambda^4 in [lambda0, 2 lambda0]; 1/8 for the zero potential.
double lambda0_auto(const PotentialSample& sample);

std::vector<double> geometric_lambdas(double lo, double hi, int count);

}  // namespace beamlab
