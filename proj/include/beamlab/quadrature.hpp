#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "beamlab/common.hpp"

namespace beamlab {

/// Gauss-Legendre rule on [-1,1]; nodes/weights are cached per size.
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int npts);

/// Composite Gauss-Legendre over [a,b] using ~n total nodes (32-point panels).
double integrate_gl(const std::function<double(double)>& f, double a, double b, int n);
complexd integrate_gl_c(const std::function<complexd(double)>& f, double a, double b, int n);

/// Doubles the node count until successive values agree to rel_tol or
/// max_nodes is exceeded (throws NumericalError then).
complexd integrate_adaptive(const std::function<complexd(double)>& f, double a, double b,
                            int n0, double rel_tol, long max_nodes,
                            const std::string& diag = "");

/// Ordinary least squares on (x, y): slope, intercept, slope standard error.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_slope = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace beamlab
