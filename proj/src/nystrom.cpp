#include "beamlab/nystrom.hpp"

#include <cmath>

#include "beamlab/quadrature.hpp"

namespace beamlab {

SupportNodes support_nodes(const PotentialSample& sample, double rel_floor)
{
    const Grid& g = sample.grid;
    double vmax = 0.0;
    for (double val : sample.V) vmax = std::max(vmax, std::fabs(val));
    if (vmax == 0.0) throw ValidationError("support_nodes: zero potential");

    int lo = g.n, hi = -1;
    for (int i = 0; i < g.n; ++i) {
        if (std::fabs(sample.V[i]) > rel_floor * vmax) {
            lo = std::min(lo, i);
            hi = std::max(hi, i);
        }
    }

    SupportNodes s;
    s.h = g.h;
    int count = hi - lo + 1;
    s.idx.resize(count);
    s.x.resize(count);
    s.v.resize(count);
    s.V.resize(count);
    s.U.resize(count);
    for (int i = 0; i < count; ++i) {
        int gi = lo + i;
        s.idx[i] = gi;
        s.x[i] = g.x[gi];
        s.v[i] = sample.v[gi];
        s.V[i] = sample.V[gi];
        s.U[i] = sample.U[gi];
    }
    s.a_lo = std::max(sample.hull_lo, g.x[lo] - g.h);
    s.a_hi = std::min(sample.hull_hi, g.x[hi] + g.h);
    return s;
}

ProductQuadrature::ProductQuadrature(const SupportNodes& nodes, int stencil_points, int gl_points)
    : s_(nodes.size())
{
    if (s_ < 2) throw ValidationError("ProductQuadrature: need at least two support nodes");
    int p = std::min(stencil_points, s_);
    nodes_.assign(nodes.x.data(), nodes.x.data() + s_);
    const double h = nodes.h;

    // barycentric weights of a uniform stencil: (-1)^j C(p-1, j)
    std::vector<double> bw(p);
    bw[0] = 1.0;
    for (int j = 1; j < p; ++j) bw[j] = -bw[j - 1] * (p - j) / static_cast<double>(j);

    const auto& [gx, gw] = gauss_legendre(gl_points);

    auto add_piece = [&](double lo, double hi, int stencil_start) {
        if (!(hi - lo > 1e-14 * h)) return;
        Piece piece;
        piece.stencil_start = stencil_start;
        piece.y.resize(gl_points);
        piece.weighted_cardinals.resize(gl_points, p);
        double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
        for (int g = 0; g < gl_points; ++g) {
            double t = mid + half * gx[g];
            piece.y[g] = t;
            double denom = 0.0;
            std::vector<double> num(p);
            for (int j = 0; j < p; ++j) {
                double d = t - nodes_[stencil_start + j];
                num[j] = bw[j] / d;
                denom += num[j];
            }
            for (int j = 0; j < p; ++j)
                piece.weighted_cardinals(g, j) = gw[g] * half * num[j] / denom;
        }
        pieces_.push_back(std::move(piece));
    };

    auto clamp_start = [&](int want) { return std::max(0, std::min(want, s_ - p)); };

    add_piece(nodes.a_lo, nodes_[0], 0);
    for (int j = 0; j + 1 < s_; ++j)
        add_piece(nodes_[j], nodes_[j + 1], clamp_start(j - (p / 2 - 1)));
    add_piece(nodes_[s_ - 1], nodes.a_hi, s_ - p);

    weights_ = row(nodes_[0], [](double, double) { return 1.0; });
}

template <typename Scalar, typename Kernel>
void ProductQuadrature::accumulate_row(double x_out, const Kernel& kernel,
                                       Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& out) const
{
    out.setZero(s_);
    for (const Piece& piece : pieces_) {
        const int gl = static_cast<int>(piece.y.size());
        const int p = static_cast<int>(piece.weighted_cardinals.cols());
        for (int g = 0; g < gl; ++g) {
            Scalar k = kernel(x_out, piece.y[g]);
            for (int j = 0; j < p; ++j)
                out[piece.stencil_start + j] += k * piece.weighted_cardinals(g, j);
        }
    }
}

Eigen::VectorXd ProductQuadrature::row(double x_out,
                                       const std::function<double(double, double)>& kernel) const
{
    Eigen::VectorXd out;
    accumulate_row<double>(x_out, kernel, out);
    return out;
}

Eigen::VectorXcd ProductQuadrature::row_c(double x_out,
                                          const std::function<complexd(double, double)>& kernel) const
{
    Eigen::VectorXcd out;
    accumulate_row<complexd>(x_out, kernel, out);
    return out;
}

Eigen::MatrixXd ProductQuadrature::build(const std::function<double(double, double)>& kernel) const
{
    Eigen::MatrixXd W(s_, s_);
    Eigen::VectorXd r;
    for (int i = 0; i < s_; ++i) {
        accumulate_row<double>(nodes_[i], kernel, r);
        W.row(i) = r.transpose();
    }
    return W;
}

Eigen::MatrixXcd ProductQuadrature::build_c(const std::function<complexd(double, double)>& kernel) const
{
    Eigen::MatrixXcd W(s_, s_);
    Eigen::VectorXcd r;
    for (int i = 0; i < s_; ++i) {
        accumulate_row<complexd>(nodes_[i], kernel, r);
        W.row(i) = r.transpose();
    }
    return W;
}

}  // namespace beamlab
