#pragma once

#include <memory>
#include <string>
#include <vector>

#include "beamlab/nystrom.hpp"
#include "beamlab/quadrature.hpp"
#include "beamlab/spectral.hpp"

namespace beamlab {

enum class CutoffBand { Low, High, Full };
std::string to_string(CutoffBand b);
std::string to_string(PropagatorKind k);

/// Sample positions; kernels are evaluated on all position pairs.
struct Subgrid {
    std::vector<double> points;

    /// Symmetric uniform ladder including 0 (odd count).
    static Subgrid uniform(double half_extent, int count = 33);
    /// 0 plus a symmetric geometric ladder out to half_extent; resolves both
    /// the diagonal neighborhood and far separations of shift-invariant
    /// kernels.
    static Subgrid geometric(double half_extent, int count = 33);
};

struct KernelSlice {
    double t = 0.0;
    double m = 0.0;
    int ell = 0;
    PropagatorKind kind = PropagatorKind::Cos;
    CutoffBand cutoff = CutoffBand::Full;
    std::string route;  // "stone" or "spectral"
    bool valid = true;  // finite-box window flag (spectral route only)
    std::vector<double> points;
    Eigen::MatrixXcd values;

    double sup_norm() const;
};

struct StoneParams {
    double rel_tol = 1e-4;
    long max_nodes = 1 << 21;
    double lambda0 = 0.125;
    double cond_limit = 1e10;  // correction refused past this
    int cheb_cap = 1280;
    bool with_tail = true;  // analytic continuation of the integral past the dyadic cap
};

/// Assembles propagator kernels from the spectral-parameter integral over the
/// resolvent jump, dyadically partitioned, with the resolvent correction
/// sampled on Chebyshev nodes per piece and shared across the whole t sweep.
class StoneAssembler {
public:
    StoneAssembler(const PotentialSample& sample, double m, int ell, CutoffBand band,
                   Subgrid subgrid, StoneParams params);

    std::vector<KernelSlice> assemble(PropagatorKind kind, const std::vector<double>& t_list);

    const std::vector<std::string>& log() const { return log_; }

private:
    struct PieceData;

    PotentialSample sample_;
    double m_;
    int ell_;
    CutoffBand band_;
    Subgrid sub_;
    StoneParams par_;

    int np_ = 0;
    std::vector<double> rlist_;
    std::vector<std::vector<int>> ridx_;

    bool has_v_ = false;
    std::shared_ptr<SupportNodes> nodes_;
    std::shared_ptr<ProductQuadrature> pq_;
    double minv_ref_ = 0.0;       // ||M^{-1}|| probe at a reference lambda
    double corr_lambda_cut_ = 0.0;

    std::vector<std::string> log_;

    double band_weight(double lambda) const;
    double omega(double lambda) const;
    complexd osc_factor(PropagatorKind kind, double t, double lambda) const;

    /// Im part of the resolvent correction R0 v M^{-1} v R0 on the subgrid.
    bool corr_jump(double lambda, Eigen::MatrixXd& out);

    Eigen::MatrixXcd piece_eval(const PieceData& piece, PropagatorKind kind, double t,
                                long nnodes) const;
    Eigen::MatrixXcd piece_adaptive(const PieceData& piece, PropagatorKind kind, double t,
                                    double scale_hint);

    Eigen::MatrixXcd tail_eval(PropagatorKind kind, double t, int n_tail) const;
};

/// One-shot kernel through the Stone assembler.
KernelSlice stone_kernel(const PotentialSample& sample, double t, double m, int ell,
                         PropagatorKind kind, CutoffBand band, const Subgrid& subgrid,
                         const StoneParams& params);

/// sin(t sqrt(H))/sqrt(H) kernels at m = 0 through the time integral of the
/// cosine kernel; the s-grid is shared across the t list.
std::vector<KernelSlice> sin_over_sqrt_by_time_integral(const PotentialSample& sample,
                                                        const std::vector<double>& t_list,
                                                        CutoffBand band, const Subgrid& subgrid,
                                                        const StoneParams& params);

/// Perturbed resolvent kernel R_V^sign(lambda^4) sampled at arbitrary points.
Eigen::MatrixXcd resolvent_V(const PotentialSample& sample, double lambda, int sign,
                             const std::vector<double>& xs, double cond_limit = 1e10);

struct DecayCurve {
    std::vector<double> t;
    std::vector<double> sup;
    bool all_valid = true;
};

struct DecayFit {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_slope = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
};

DecayCurve decay_curve(const PotentialSample& sample, double m, int ell, PropagatorKind kind,
                       CutoffBand band, const std::vector<double>& t_list, const Subgrid& subgrid,
                       const StoneParams& params);

DecayFit fit_exponent(const DecayCurve& curve, double t_lo, double t_hi);

/// Geometric t ladder; when phase_align is true each point is shifted to the
/// nearest t == pi/8 (mod pi), which pins the carrier of massive cosine
/// kernels away from its zeros while staying within half a period of the
/// geometric ladder.
std::vector<double> decay_t_list(double t_lo, double t_hi, int count, bool phase_align = false);

/// Max relative discrepancy between the Stone route and the spectral route at
/// low energies, over the shared subgrid.
double crossvalidate(const PotentialSample& sample, double t, double m, PropagatorKind kind,
                     const StoneParams& params, double pr_threshold = 0.05);

}  // namespace beamlab
