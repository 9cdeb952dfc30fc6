#include "beamlab/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "beamlab/cutoff.hpp"
#include "beamlab/free_kernel.hpp"

namespace beamlab {

std::string to_string(CutoffBand b)
{
    switch (b) {
        case CutoffBand::Low: return "low";
        case CutoffBand::High: return "high";
        case CutoffBand::Full: return "full";
    }
    return "?";
}

std::string to_string(PropagatorKind k)
{
    switch (k) {
        case PropagatorKind::Cos: return "cos";
        case PropagatorKind::SinOver: return "sinover";
        case PropagatorKind::UnifiedExp: return "exp";
    }
    return "?";
}

Subgrid Subgrid::uniform(double half_extent, int count)
{
    if (count % 2 == 0) ++count;
    Subgrid s;
    s.points.resize(count);
    for (int i = 0; i < count; ++i)
        s.points[i] = -half_extent + 2.0 * half_extent * i / (count - 1);
    s.points[(count - 1) / 2] = 0.0;
    return s;
}

Subgrid Subgrid::geometric(double half_extent, int count)
{
    Subgrid s;
    s.points.push_back(0.0);
    int pairs = (count - 1) / 2;
    double lo = half_extent / std::pow(2.0, pairs - 1 > 0 ? 6.0 : 0.0);
    // ladder from half_extent/64 out to half_extent
    for (int j = 0; j < pairs; ++j) {
        double p = lo * std::pow(half_extent / lo, pairs == 1 ? 0.0 : static_cast<double>(j) / (pairs - 1));
        s.points.push_back(p);
        s.points.push_back(-p);
    }
    std::sort(s.points.begin(), s.points.end());
    return s;
}

double KernelSlice::sup_norm() const
{
    return values.cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------

struct StoneAssembler::PieceData {
    int N = 0;
    double two_n = 0.0;
    bool corr_active = false;
    int q = 0;
    std::vector<double> cheb_s;
    std::vector<double> cheb_bw;
    std::vector<Eigen::MatrixXd> corr_samples;  // Im of the correction at cheb nodes
};

StoneAssembler::StoneAssembler(const PotentialSample& sample, double m, int ell, CutoffBand band,
                               Subgrid subgrid, StoneParams params)
    : sample_(sample), m_(m), ell_(ell), band_(band), sub_(std::move(subgrid)), par_(params)
{
    np_ = static_cast<int>(sub_.points.size());
    if (np_ < 1) throw ValidationError("StoneAssembler: empty subgrid");

    // dedupe separations: free kernels depend on |x - y| only
    std::map<long long, int> seen;
    ridx_.assign(np_, std::vector<int>(np_, 0));
    for (int a = 0; a < np_; ++a)
        for (int b = 0; b < np_; ++b) {
            double r = std::fabs(sub_.points[a] - sub_.points[b]);
            long long key = static_cast<long long>(std::llround(r * 1e12));
            auto it = seen.find(key);
            if (it == seen.end()) {
                it = seen.emplace(key, static_cast<int>(rlist_.size())).first;
                rlist_.push_back(r);
            }
            ridx_[a][b] = it->second;
        }

    has_v_ = !sample_.is_zero();
    if (has_v_) {
        nodes_ = std::make_shared<SupportNodes>(support_nodes(sample_));
        pq_ = std::make_shared<ProductQuadrature>(*nodes_);
        // reference inverse norm fixes the scale below which the correction
        // cannot matter relative to the free part
        double lambda_probe = std::max(2.0, 2.0 * CutoffSpec{par_.lambda0}.lambda_edge());
        Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(nodes_->size(), nodes_->size());
        Eigen::MatrixXcd W = pq_->build_c([lambda_probe](double x, double y) {
            return freekernel::free_resolvent_kernel(lambda_probe, x, y, +1);
        });
        for (int i = 0; i < nodes_->size(); ++i) {
            for (int j = 0; j < nodes_->size(); ++j)
                M(i, j) = nodes_->v[i] * W(i, j) * nodes_->v[j];
            M(i, i) += static_cast<double>(nodes_->U[i]);
        }
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
        minv_ref_ = 1.0 / svd.singularValues().minCoeff();
        double l1 = sample_.l1_norm();
        corr_lambda_cut_ = std::cbrt(std::max(1.0, l1 * minv_ref_) / (4.0 * par_.rel_tol));
        log_.push_back("correction scale: ||M^-1||(" + std::to_string(lambda_probe) +
                       ")=" + std::to_string(minv_ref_) +
                       ", lambda_cut=" + std::to_string(corr_lambda_cut_));
    }
}

double StoneAssembler::band_weight(double lambda) const
{
    CutoffSpec c{par_.lambda0};
    switch (band_) {
        case CutoffBand::Low: return c.chi1_lifted(lambda);
        case CutoffBand::High: return c.chi2_lifted(lambda);
        case CutoffBand::Full: return 1.0;
    }
    return 1.0;
}

double StoneAssembler::omega(double lambda) const
{
    double l2 = lambda * lambda;
    return std::sqrt(l2 * l2 + m_ * m_);
}

complexd StoneAssembler::osc_factor(PropagatorKind kind, double t, double lambda) const
{
    double l2 = lambda * lambda;
    double S = l2 * l2 + m_ * m_;
    double w = std::sqrt(S);
    switch (kind) {
        case PropagatorKind::Cos:
            return std::cos(t * w) * std::pow(S, 0.5 * ell_);
        case PropagatorKind::UnifiedExp:
            return std::exp(complexd(0.0, -t * w)) * std::pow(S, 0.5 * ell_);
        case PropagatorKind::SinOver:
            if (S <= 0.0) throw NumericalError("osc_factor: sinover at zero energy shell");
            return std::sin(t * w) / w;
    }
    return {0.0, 0.0};
}

bool StoneAssembler::corr_jump(double lambda, Eigen::MatrixXd& out)
{
    const int s = nodes_->size();
    Eigen::MatrixXcd W = pq_->build_c([lambda](double x, double y) {
        return freekernel::free_resolvent_kernel(lambda, x, y, +1);
    });
    Eigen::MatrixXcd M(s, s);
    for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) M(i, j) = nodes_->v[i] * W(i, j) * nodes_->v[j];
        M(i, i) += static_cast<double>(nodes_->U[i]);
    }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);

    // crude condition estimate: one inverse power step on a fixed probe
    double mnorm = M.cwiseAbs().rowwise().sum().maxCoeff();
    Eigen::VectorXcd probe(s);
    for (int i = 0; i < s; ++i) probe[i] = (i % 2 == 0) ? 1.0 : -1.0;
    probe /= probe.norm();
    for (int it = 0; it < 3; ++it) {
        probe = lu.solve(probe).eval();
        double nn = probe.norm();
        if (!(nn > 0.0) || !std::isfinite(nn)) return false;
        if (it == 2 && nn * mnorm > par_.cond_limit) return false;
        if (it < 2) probe /= nn;
    }

    Eigen::MatrixXcd rows(np_, s);
    for (int a = 0; a < np_; ++a)
        rows.row(a) = pq_->row_c(sub_.points[a], [lambda](double x, double y) {
            return freekernel::free_resolvent_kernel(lambda, x, y, +1);
        });
    Eigen::MatrixXcd cols(s, np_);
    for (int u = 0; u < s; ++u)
        for (int b = 0; b < np_; ++b)
            cols(u, b) = nodes_->v[u] *
                         freekernel::free_resolvent_kernel(lambda, nodes_->x[u], sub_.points[b], +1);
    Eigen::MatrixXcd A = lu.solve(cols);
    Eigen::MatrixXcd corr = rows * nodes_->v.asDiagonal() * A;
    out = corr.imag();
    return true;
}

Eigen::MatrixXcd StoneAssembler::piece_eval(const PieceData& piece, PropagatorKind kind, double t,
                                            long nnodes) const
{
    const int panel_pts = 32;
    int panels = std::max<long>(1, (nnodes + panel_pts - 1) / panel_pts);
    const auto& [gx, gw] = gauss_legendre(panel_pts);

    Eigen::VectorXcd acc_r = Eigen::VectorXcd::Zero(rlist_.size());
    Eigen::VectorXcd mu = Eigen::VectorXcd::Zero(piece.q);
    std::vector<double> card(piece.q);

    const double span = 0.75, base = 0.25;
    double width = span / panels;
    for (int p = 0; p < panels; ++p) {
        double lo = base + p * width, half = 0.5 * width, mid = lo + half;
        for (int g = 0; g < panel_pts; ++g) {
            double s = mid + half * gx[g];
            double bump = phi0(s);
            if (bump == 0.0) continue;
            double lambda = piece.two_n * s;
            double bw = band_weight(lambda);
            if (bw == 0.0) continue;
            complexd w0 = gw[g] * half * piece.two_n * bump * bw * osc_factor(kind, t, lambda);

            complexd wfree = w0 * (1.0 / M_PI);
            for (std::size_t ri = 0; ri < rlist_.size(); ++ri)
                acc_r[ri] += wfree * std::cos(lambda * rlist_[ri]);

            if (piece.corr_active) {
                // barycentric cardinal values at the chebyshev samples
                double denom = 0.0;
                bool hit = false;
                for (int j = 0; j < piece.q; ++j) {
                    double d = s - piece.cheb_s[j];
                    if (std::fabs(d) < 1e-14) {
                        std::fill(card.begin(), card.end(), 0.0);
                        card[j] = 1.0;
                        hit = true;
                        break;
                    }
                    card[j] = piece.cheb_bw[j] / d;
                    denom += card[j];
                }
                if (!hit)
                    for (int j = 0; j < piece.q; ++j) card[j] /= denom;
                complexd wcorr = w0 * (4.0 / M_PI) * lambda * lambda * lambda;
                for (int j = 0; j < piece.q; ++j) mu[j] += wcorr * card[j];
            }
        }
    }

    Eigen::MatrixXcd out(np_, np_);
    for (int a = 0; a < np_; ++a)
        for (int b = 0; b < np_; ++b) out(a, b) = acc_r[ridx_[a][b]];
    for (int j = 0; j < piece.q; ++j)
        if (mu[j] != complexd(0.0, 0.0)) out -= mu[j] * piece.corr_samples[j];
    return out;
}

Eigen::MatrixXcd StoneAssembler::piece_adaptive(const PieceData& piece, PropagatorKind kind,
                                                double t, double scale_hint)
{
    double phase = std::fabs(t) * piece.two_n * piece.two_n + 1.0;
    long nn = std::max<long>({64, 4 * static_cast<long>(std::ceil(phase / M_PI)),
                              piece.corr_active ? 5L * piece.q : 0L});
    Eigen::MatrixXcd prev = piece_eval(piece, kind, t, nn);
    while (true) {
        nn *= 2;
        if (nn > par_.max_nodes)
            throw NumericalError("stone piece did not converge (N=" + std::to_string(piece.N) +
                                 ", t=" + std::to_string(t) +
                                 ", phase=" + std::to_string(phase) + ")");
        Eigen::MatrixXcd cur = piece_eval(piece, kind, t, nn);
        double diff = (cur - prev).cwiseAbs().maxCoeff();
        double scale = std::max(scale_hint, cur.cwiseAbs().maxCoeff());
        if (diff <= par_.rel_tol * scale + 1e-300) return cur;
        prev = std::move(cur);
    }
}

Eigen::MatrixXcd StoneAssembler::tail_eval(PropagatorKind kind, double t, int n_tail) const
{
    const double lam_lo = std::ldexp(1.0, n_tail - 1);
    const double lam_hi = std::ldexp(1.0, n_tail);
    double pow_s = (kind == PropagatorKind::SinOver) ? -0.5 : 0.5 * ell_;

    struct Combo {
        double s1, s2;
        complexd coef;
    };
    std::vector<Combo> combos;
    switch (kind) {
        case PropagatorKind::Cos:
            for (double s1 : {1.0, -1.0})
                for (double s2 : {1.0, -1.0}) combos.push_back({s1, s2, complexd(0.25, 0.0)});
            break;
        case PropagatorKind::UnifiedExp:
            for (double s2 : {1.0, -1.0}) combos.push_back({-1.0, s2, complexd(0.5, 0.0)});
            break;
        case PropagatorKind::SinOver:
            for (double s1 : {1.0, -1.0})
                for (double s2 : {1.0, -1.0})
                    combos.push_back({s1, s2, s1 * complexd(0.0, -0.25)});  // s1/(4i)
            break;
    }

    auto amp = [&](double lam) {
        double l2 = lam * lam;
        return std::pow(l2 * l2 + m_ * m_, pow_s) / M_PI;
    };

    std::vector<complexd> tail_r(rlist_.size(), complexd(0.0, 0.0));
    const complexd iu(0.0, 1.0);
    for (std::size_t ri = 0; ri < rlist_.size(); ++ri) {
        double r = rlist_[ri];
        complexd total(0.0, 0.0);
        for (const Combo& cb : combos) {
            auto U = [&](double lam) { return cb.s1 * t * omega(lam) + cb.s2 * r * lam; };
            auto Up = [&](double lam) {
                double l2 = lam * lam;
                return cb.s1 * t * 2.0 * lam * l2 / omega(lam) + cb.s2 * r;
            };
            std::function<complexd(double)> F0 = [&](double lam) {
                return amp(lam) / (iu * Up(lam));
            };
            double dl = 1e-3 * lam_lo;
            auto fd = [dl](const std::function<complexd(double)>& f, double lam) {
                return (-f(lam + 2 * dl) + 8.0 * f(lam + dl) - 8.0 * f(lam - dl) +
                        f(lam - 2 * dl)) /
                       (12.0 * dl);
            };
            std::function<complexd(double)> G1 = [&](double lam) {
                return fd(F0, lam) / (iu * Up(lam));
            };
            complexd G2 = fd(G1, lam_lo) / (iu * Up(lam_lo));
            complexd inner = -F0(lam_lo) + G1(lam_lo) - G2;
            total += cb.coef * std::exp(iu * U(lam_lo)) * inner;
        }
        // remove the part of [lam_lo, lam_hi] the dyadic pieces already carry
        double dphase = std::fabs(t) * (omega(lam_hi) - omega(lam_lo)) + r * (lam_hi - lam_lo);
        int nn = std::max(128, 4 * static_cast<int>(std::ceil(dphase / M_PI)));
        complexd compensation = integrate_gl_c(
            [&](double lam) -> complexd {
                double cap = partition_cap(lam / lam_hi);
                if (cap == 0.0) return {0.0, 0.0};
                return cap * osc_factor(kind, t, lam) * std::cos(lam * r) / M_PI;
            },
            lam_lo, lam_hi, nn);
        tail_r[ri] = total - compensation;
    }

    Eigen::MatrixXcd out(np_, np_);
    for (int a = 0; a < np_; ++a)
        for (int b = 0; b < np_; ++b) out(a, b) = tail_r[ridx_[a][b]];
    return out;
}

std::vector<KernelSlice> StoneAssembler::assemble(PropagatorKind kind,
                                                  const std::vector<double>& t_list)
{
    if (t_list.empty()) throw ValidationError("assemble: empty t list");
    for (double t : t_list)
        if (t == 0.0 && kind != PropagatorKind::SinOver)
            throw ValidationError("assemble: t = 0 has no decay content");
    if (kind == PropagatorKind::SinOver && m_ == 0.0)
        throw ValidationError("assemble: sinover at m = 0 goes through the time integral route");

    const CutoffSpec cut{par_.lambda0};
    const double lambda_edge = cut.lambda_edge();
    double t_min = *std::min_element(t_list.begin(), t_list.end(),
                                     [](double a, double b) { return std::fabs(a) < std::fabs(b); });
    t_min = std::fabs(t_min);
    double r_max = 0.0;
    for (double r : rlist_) r_max = std::max(r_max, r);

    int n_hi;
    int n_tail = 0;
    bool tail_on = false;
    if (band_ == CutoffBand::Low) {
        n_hi = static_cast<int>(std::floor(std::log2(lambda_edge))) + 2;
    } else {
        double need = std::max({std::sqrt(3000.0 / std::max(t_min, 1e-6)),
                                2.0 * r_max / std::max(t_min, 1e-6), 2.0 * lambda_edge, 2.0});
        n_tail = static_cast<int>(std::ceil(std::log2(need))) + 1;
        n_hi = n_tail;
        tail_on = par_.with_tail;
        if (!tail_on)
            log_.push_back("tail disabled: truncating the spectral integral at lambda=" +
                           std::to_string(std::ldexp(1.0, n_tail)));
    }

    const std::size_t nt = t_list.size();
    std::vector<Eigen::MatrixXcd> acc(nt, Eigen::MatrixXcd::Zero(np_, np_));
    std::vector<double> acc_sup(nt, 0.0);

    double lambda_low_edge = std::pow(par_.lambda0, 0.25);  // high band vanishes below
    int consecutive_tiny = 0;
    for (int N = n_hi; N > n_hi - 64; --N) {
        double lo = std::ldexp(1.0, N - 2), hi = std::ldexp(1.0, N);
        if (band_ == CutoffBand::Low && lo >= lambda_edge) continue;
        if (band_ == CutoffBand::High && hi <= lambda_low_edge) break;

        PieceData piece;
        piece.N = N;
        piece.two_n = std::ldexp(1.0, N);
        piece.corr_active = has_v_ && lo < corr_lambda_cut_;
        if (piece.corr_active) {
            double xmax = 0.0;
            for (double p : sub_.points) xmax = std::max(xmax, std::fabs(p));
            double amax = std::max(std::fabs(nodes_->a_lo), std::fabs(nodes_->a_hi));
            double dist = 2.0 * (xmax + amax);
            piece.q = std::min(par_.cheb_cap,
                               std::max(17, static_cast<int>(0.45 * hi * dist) + 24));
            piece.cheb_s.resize(piece.q);
            piece.cheb_bw.resize(piece.q);
            for (int j = 0; j < piece.q; ++j) {
                piece.cheb_s[j] = 0.625 + 0.375 * std::cos(M_PI * j / (piece.q - 1));
                piece.cheb_bw[j] = (j % 2 == 0 ? 1.0 : -1.0);
            }
            piece.cheb_bw.front() *= 0.5;
            piece.cheb_bw.back() *= 0.5;

            piece.corr_samples.assign(piece.q, Eigen::MatrixXd());
            bool ok = true;
            std::vector<char> good(piece.q, 0);
            parallel_for(piece.q, [&](std::size_t j) {
                good[j] = corr_jump(piece.two_n * piece.cheb_s[j], piece.corr_samples[j]) ? 1 : 0;
            });
            for (int j = 0; j < piece.q; ++j) ok = ok && good[j];
            if (!ok) {
                piece.corr_active = false;
                piece.q = 0;
                piece.corr_samples.clear();
                log_.push_back("piece N=" + std::to_string(N) +
                               ": resolvent correction ill-conditioned, using free jump only");
            }
        }

        bool all_tiny = true;
        for (std::size_t ti = 0; ti < nt; ++ti) {
            Eigen::MatrixXcd pc = piece_adaptive(piece, kind, t_list[ti], acc_sup[ti]);
            acc[ti] += pc;
            acc_sup[ti] = acc[ti].cwiseAbs().maxCoeff();
            if (pc.cwiseAbs().maxCoeff() > par_.rel_tol * std::max(acc_sup[ti], 1e-300))
                all_tiny = false;
        }
        if (N <= n_hi - 3 && all_tiny) {
            if (++consecutive_tiny >= 2) break;
        } else {
            consecutive_tiny = 0;
        }
    }

    if (tail_on) {
        for (std::size_t ti = 0; ti < nt; ++ti) acc[ti] += tail_eval(kind, t_list[ti], n_tail);
    }

    std::vector<KernelSlice> out(nt);
    for (std::size_t ti = 0; ti < nt; ++ti) {
        KernelSlice& ks = out[ti];
        ks.t = t_list[ti];
        ks.m = m_;
        ks.ell = ell_;
        ks.kind = kind;
        ks.cutoff = band_;
        ks.route = "stone";
        ks.valid = true;  // whole-line construction, no finite-box horizon
        ks.points = sub_.points;
        ks.values = std::move(acc[ti]);
    }
    return out;
}

KernelSlice stone_kernel(const PotentialSample& sample, double t, double m, int ell,
                         PropagatorKind kind, CutoffBand band, const Subgrid& subgrid,
                         const StoneParams& params)
{
    if (kind == PropagatorKind::SinOver && m == 0.0)
        return sin_over_sqrt_by_time_integral(sample, {t}, band, subgrid, params).front();
    StoneAssembler asmb(sample, m, ell, band, subgrid, params);
    return asmb.assemble(kind, {t}).front();
}

std::vector<KernelSlice> sin_over_sqrt_by_time_integral(const PotentialSample& sample,
                                                        const std::vector<double>& t_list,
                                                        CutoffBand band, const Subgrid& subgrid,
                                                        const StoneParams& params)
{
    for (double t : t_list)
        if (!(t > 0.0))
            throw ValidationError("sin_over_sqrt_by_time_integral: t values must be positive");
    std::vector<double> ts = t_list;
    std::sort(ts.begin(), ts.end());

    double s0 = std::min(1e-3, 0.01 * ts.front());
    std::set<double> sgrid(ts.begin(), ts.end());
    int per_decade = 64;
    double decades = std::log10(ts.back() / s0);
    int n_pts = static_cast<int>(std::ceil(decades * per_decade)) + 1;
    for (int i = 0; i < n_pts; ++i)
        sgrid.insert(s0 * std::pow(ts.back() / s0, static_cast<double>(i) / (n_pts - 1)));
    std::vector<double> svec(sgrid.begin(), sgrid.end());

    StoneAssembler asmb(sample, 0.0, 0, band, subgrid, params);
    std::vector<KernelSlice> cos_slices = asmb.assemble(PropagatorKind::Cos, svec);

    const int np = static_cast<int>(subgrid.points.size());
    std::vector<KernelSlice> out;
    out.reserve(t_list.size());
    // sin(t .)/. = (1/2) int_{-t}^{t} cos(s .) ds = int_0^t cos(s .) ds
    Eigen::MatrixXcd running = svec.front() * cos_slices.front().values;  // [0, s0] chunk
    std::size_t next_t = 0;
    std::vector<Eigen::MatrixXcd> at_t(ts.size());
    for (std::size_t k = 0; k + 1 <= svec.size(); ++k) {
        while (next_t < ts.size() && std::fabs(svec[k] - ts[next_t]) < 1e-12 * ts[next_t]) {
            at_t[next_t] = running;
            ++next_t;
        }
        if (k + 1 == svec.size()) break;
        running += 0.5 * (svec[k + 1] - svec[k]) * (cos_slices[k].values + cos_slices[k + 1].values);
    }
    if (next_t != ts.size())
        throw NumericalError("sin_over_sqrt_by_time_integral: t grid alignment failed");

    for (double t : t_list) {
        std::size_t pos = std::lower_bound(ts.begin(), ts.end(), t) - ts.begin();
        KernelSlice ks;
        ks.t = t;
        ks.m = 0.0;
        ks.ell = 0;
        ks.kind = PropagatorKind::SinOver;
        ks.cutoff = band;
        ks.route = "stone";
        ks.valid = true;
        ks.points = subgrid.points;
        ks.values = at_t[pos];
        out.push_back(std::move(ks));
    }
    (void)np;
    return out;
}

Eigen::MatrixXcd resolvent_V(const PotentialSample& sample, double lambda, int sign,
                             const std::vector<double>& xs, double cond_limit)
{
    if (!(lambda > 0.0)) throw ValidationError("resolvent_V: lambda must be positive");
    const int np = static_cast<int>(xs.size());
    Eigen::MatrixXcd R(np, np);
    for (int a = 0; a < np; ++a)
        for (int b = 0; b < np; ++b)
            R(a, b) = freekernel::free_resolvent_kernel(lambda, xs[a], xs[b], sign);
    if (sample.is_zero()) return R;

    SupportNodes nodes = support_nodes(sample);
    ProductQuadrature pq(nodes);
    const int s = nodes.size();
    Eigen::MatrixXcd W = pq.build_c([lambda, sign](double x, double y) {
        return freekernel::free_resolvent_kernel(lambda, x, y, sign);
    });
    Eigen::MatrixXcd M(s, s);
    for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) M(i, j) = nodes.v[i] * W(i, j) * nodes.v[j];
        M(i, i) += static_cast<double>(nodes.U[i]);
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
    double smin = svd.singularValues().minCoeff(), smax = svd.singularValues().maxCoeff();
    if (!(smin > 0.0) || smax / smin > cond_limit)
        throw NumericalError("resolvent_V: M(lambda) ill-conditioned near an exceptional energy");

    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
    Eigen::MatrixXcd rows(np, s);
    for (int a = 0; a < np; ++a)
        rows.row(a) = pq.row_c(xs[a], [lambda, sign](double x, double y) {
            return freekernel::free_resolvent_kernel(lambda, x, y, sign);
        });
    Eigen::MatrixXcd cols(s, np);
    for (int u = 0; u < s; ++u)
        for (int b = 0; b < np; ++b)
            cols(u, b) = nodes.v[u] * freekernel::free_resolvent_kernel(lambda, nodes.x[u], xs[b], sign);
    R -= rows * nodes.v.asDiagonal() * lu.solve(cols);
    return R;
}

DecayCurve decay_curve(const PotentialSample& sample, double m, int ell, PropagatorKind kind,
                       CutoffBand band, const std::vector<double>& t_list, const Subgrid& subgrid,
                       const StoneParams& params)
{
    DecayCurve curve;
    std::vector<KernelSlice> slices;
    if (kind == PropagatorKind::SinOver && m == 0.0)
        slices = sin_over_sqrt_by_time_integral(sample, t_list, band, subgrid, params);
    else {
        StoneAssembler asmb(sample, m, ell, band, subgrid, params);
        slices = asmb.assemble(kind, t_list);
    }
    for (const KernelSlice& ks : slices) {
        curve.t.push_back(ks.t);
        curve.sup.push_back(ks.sup_norm());
        curve.all_valid = curve.all_valid && ks.valid;
    }
    return curve;
}

DecayFit fit_exponent(const DecayCurve& curve, double t_lo, double t_hi)
{
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < curve.t.size(); ++i) {
        if (curve.t[i] < t_lo || curve.t[i] > t_hi) continue;
        if (!(curve.sup[i] > 0.0))
            throw ValidationError("fit_exponent: nonpositive sup-norm in window");
        lx.push_back(std::log(curve.t[i]));
        ly.push_back(std::log(curve.sup[i]));
    }
    if (lx.size() < 8) throw ValidationError("fit_exponent: fewer than 8 points in window");
    double span = (*std::max_element(lx.begin(), lx.end()) -
                   *std::min_element(lx.begin(), lx.end())) / std::log(10.0);
    if (span < 1.5) throw ValidationError("fit_exponent: window spans less than 1.5 decades");
    LineFit lf = fit_line(lx, ly);
    return {lf.slope, lf.intercept, lf.stderr_slope, t_lo, t_hi};
}

std::vector<double> decay_t_list(double t_lo, double t_hi, int count, bool phase_align)
{
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i)
        out[i] = t_lo * std::pow(t_hi / t_lo, static_cast<double>(i) / (count - 1));
    if (phase_align) {
        // pin each point to t == pi/8 (mod pi): keeps the massive carrier
        // cos(t + const) away from its zeros while staying geometric
        for (double& t : out) {
            double k = std::round((t - M_PI / 8.0) / M_PI);
            t = M_PI / 8.0 + std::max(1.0, k) * M_PI;
        }
        out.erase(std::unique(out.begin(), out.end()), out.end());
    }
    return out;
}

double crossvalidate(const PotentialSample& sample, double t, double m, PropagatorKind kind,
                     const StoneParams& params, double pr_threshold)
{
    const Grid& grid = sample.grid;
    CutoffSpec cut{params.lambda0};
    double T_max = finite_box_T_max(grid, cut.lambda_edge());
    if (std::fabs(t) > T_max)
        throw ValidationError("crossvalidate: t outside the finite-box validity window");

    std::vector<int> node_idx;
    Subgrid sub;
    for (int i = 0; i < 33; ++i) {
        double p = -grid.L / 2 + grid.L * i / 32.0;
        int gi = grid.nearest(p);
        if (node_idx.empty() || node_idx.back() != gi) {
            node_idx.push_back(gi);
            sub.points.push_back(grid.node(gi));
        }
    }

    StoneAssembler asmb(sample, m, 0, CutoffBand::Low, sub, params);
    KernelSlice stone = asmb.assemble(kind, {t}).front();

    DiscreteOperator op = build_hamiltonian(grid, sample, m);
    SpectralData sd = eigendecompose(op, pr_threshold);
    Eigen::MatrixXcd spec = propagate_spectral(sd, t, m, kind, 0, node_idx,
                                               [&](double mu) { return cut.chi1(mu); });

    double floor = 1e-12;
    double scale = spec.cwiseAbs().maxCoeff() + floor;
    return (stone.values - spec).cwiseAbs().maxCoeff() / scale;
}

}  // namespace beamlab
