#pragma once

#include <functional>

#include <Eigen/Dense>

#include "beamlab/potential.hpp"

namespace beamlab {

/// Consecutive grid nodes carrying the potential (all nodes for potentials
/// without compact support). The multiplication operators U and v act only
/// here, so every Birman-Schwinger style matrix is built on these nodes.
struct SupportNodes {
    std::vector<int> idx;
    Eigen::VectorXd x;
    Eigen::VectorXd v;
    Eigen::VectorXd V;
    Eigen::VectorXi U;
    double a_lo = 0.0;  // integration hull
    double a_hi = 0.0;
    double h = 0.0;

    int size() const { return static_cast<int>(idx.size()); }
};

SupportNodes support_nodes(const PotentialSample& sample, double rel_floor = 1e-14);

/// Interpolatory product quadrature on uniform nodes: per node interval the
/// integrand factor f is replaced by its local polynomial interpolant
/// (stencil_points nodes) and integrated against the kernel with a
/// Gauss-Legendre rule per interval. Exact for piecewise polynomials of
/// degree < stencil_points against kernels that are polynomial of modest
/// degree on each interval, which keeps the zero-energy moment structure of
/// the sampled potentials intact at machine precision.
class ProductQuadrature {
public:
    ProductQuadrature(const SupportNodes& nodes, int stencil_points = 10, int gl_points = 8);

    /// Node weights of the kernel == 1 row (the plain integration rule).
    const Eigen::VectorXd& node_weights() const { return weights_; }

    Eigen::MatrixXd build(const std::function<double(double, double)>& kernel) const;
    Eigen::MatrixXcd build_c(const std::function<complexd(double, double)>& kernel) const;

    Eigen::VectorXd row(double x_out, const std::function<double(double, double)>& kernel) const;
    Eigen::VectorXcd row_c(double x_out, const std::function<complexd(double, double)>& kernel) const;

    int size() const { return s_; }

private:
    struct Piece {
        int stencil_start;
        std::vector<double> y;               // evaluation points
        Eigen::MatrixXd weighted_cardinals;  // (gl, stencil) entries: glw * card
    };

    int s_;
    std::vector<double> nodes_;
    std::vector<Piece> pieces_;
    Eigen::VectorXd weights_;

    template <typename Scalar, typename Kernel>
    void accumulate_row(double x_out, const Kernel& kernel,
                        Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& out) const;
};

/// Matrix representation of an integral-plus-multiplication operator in the
/// sqrt(w)-conjugated basis, where plain matrix 2-norms approximate L2
/// operator norms.
struct NystromOperator {
    Eigen::VectorXd w;
    Eigen::MatrixXd sym;
};

struct NystromOperatorC {
    Eigen::VectorXd w;
    Eigen::MatrixXcd sym;
};

}  // namespace beamlab
