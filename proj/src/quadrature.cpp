#include "beamlab/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace beamlab {

namespace {

std::pair<std::vector<double>, std::vector<double>> make_gl(int n)
{
    // Newton iteration on Legendre polynomials, symmetric pairs.
    std::vector<double> x(n), w(n);
    int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::fabs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    return {x, w};
}

}  // namespace

const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int npts)
{
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(npts);
    if (it == cache.end()) it = cache.emplace(npts, make_gl(npts)).first;
    return it->second;
}

namespace {

template <typename T, typename F>
T composite_gl(const F& f, double a, double b, int n)
{
    const int panel_pts = 32;
    int panels = std::max(1, (n + panel_pts - 1) / panel_pts);
    const auto& [gx, gw] = gauss_legendre(panel_pts);
    T acc{};
    double width = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        double lo = a + p * width;
        double half = 0.5 * width;
        double mid = lo + half;
        for (int g = 0; g < panel_pts; ++g) acc += f(mid + half * gx[g]) * (gw[g] * half);
    }
    return acc;
}

}  // namespace

double integrate_gl(const std::function<double(double)>& f, double a, double b, int n)
{
    return composite_gl<double>(f, a, b, n);
}

complexd integrate_gl_c(const std::function<complexd(double)>& f, double a, double b, int n)
{
    return composite_gl<complexd>(f, a, b, n);
}

complexd integrate_adaptive(const std::function<complexd(double)>& f, double a, double b,
                            int n0, double rel_tol, long max_nodes, const std::string& diag)
{
    long n = std::max(32, n0);
    complexd prev = composite_gl<complexd>(f, a, b, static_cast<int>(n));
    while (true) {
        n *= 2;
        if (n > max_nodes)
            throw NumericalError("quadrature did not converge within max_nodes" +
                                 (diag.empty() ? "" : " (" + diag + ")"));
        complexd cur = composite_gl<complexd>(f, a, b, static_cast<int>(n));
        double scale = std::abs(cur);
        if (std::abs(cur - prev) <= rel_tol * scale + 1e-300) return cur;
        prev = cur;
    }
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw ValidationError("fit_line needs >= 2 matched points");
    std::size_t n = x.size();
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw ValidationError("fit_line: degenerate abscissas");
    LineFit out;
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    if (n > 2) {
        double ss = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double r = y[i] - (out.intercept + out.slope * x[i]);
            ss += r * r;
        }
        out.stderr_slope = std::sqrt(ss / (static_cast<double>(n) - 2.0) / sxx);
    }
    return out;
}

}  // namespace beamlab
