#include "beamlab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace beamlab {

PotentialFamily family_from_string(const std::string& name)
{
    if (name == "zero") return PotentialFamily::Zero;
    if (name == "scaled_sech2") return PotentialFamily::ScaledSech2;
    if (name == "embedded_example") return PotentialFamily::EmbeddedExample;
    if (name == "resonance_example") return PotentialFamily::ResonanceExample;
    if (name == "tabulated") return PotentialFamily::Tabulated;
    throw ValidationError("potential.family: unknown family \"" + name + "\"");
}

std::string family_to_string(PotentialFamily f)
{
    switch (f) {
        case PotentialFamily::Zero: return "zero";
        case PotentialFamily::ScaledSech2: return "scaled_sech2";
        case PotentialFamily::EmbeddedExample: return "embedded_example";
        case PotentialFamily::ResonanceExample: return "resonance_example";
        case PotentialFamily::Tabulated: return "tabulated";
    }
    return "?";
}

void PotentialSpec::validate() const
{
    if (!(claimed_mu > 0.0)) throw ValidationError("potential.mu must be positive");
    if (family == PotentialFamily::ResonanceExample) {
        if (c < 0.0 || d < 0.0 || (c == 0.0 && d == 0.0))
            throw ValidationError("potential.params: resonance_example requires c >= 0, d >= 0, (c,d) != (0,0)");
    }
    if (family == PotentialFamily::Tabulated && path.empty())
        throw ValidationError("potential.params.path: tabulated family needs a file path");
}

std::array<double, 5> resonance_blend_coefficients()
{
    return {35.0 / 128.0, 35.0 / 32.0, -35.0 / 64.0, 7.0 / 32.0, -5.0 / 128.0};
}

double resonance_blend(double x)
{
    double a = std::fabs(x);
    if (a >= 1.0) return a;
    auto co = resonance_blend_coefficients();
    double u = x * x;
    return co[0] + u * (co[1] + u * (co[2] + u * (co[3] + u * co[4])));
}

double resonance_blend_d4(double x)
{
    if (std::fabs(x) >= 1.0) return 0.0;
    auto co = resonance_blend_coefficients();
    double u = x * x;
    // d^4/dx^4 of a2 x^4 + a3 x^6 + a4 x^8
    return 24.0 * co[2] + u * (360.0 * co[3] + u * 1680.0 * co[4]);
}

namespace {

// Even bump realizing the bounded profile: w(x) = (1-x^2)^5 on [-1,1].
double bounded_bump(double x)
{
    double u = 1.0 - x * x;
    if (u <= 0.0) return 0.0;
    return u * u * u * u * u;
}

double bounded_bump_d4(double x)
{
    if (std::fabs(x) >= 1.0) return 0.0;
    double u = x * x;
    // (1-x^2)^5 = 1 - 5x^2 + 10x^4 - 10x^6 + 5x^8 - x^10
    return 240.0 + u * (-3600.0 + u * (8400.0 - u * 5040.0));
}

double sech(double x)
{
    return 1.0 / std::cosh(x);
}

}  // namespace

double resonance_profile(double c, double d, double x)
{
    if (c > 0.0) return d + c * resonance_blend(x);
    return d * (1.0 + 0.5 * bounded_bump(x));
}

namespace {

double resonance_profile_d4(double c, double d, double x)
{
    if (c > 0.0) return c * resonance_blend_d4(x);
    return 0.5 * d * bounded_bump_d4(x);
}

std::vector<double> read_table(const std::string& path, const Grid& grid)
{
    std::ifstream in(path);
    if (!in) throw ValidationError("potential.params.path: cannot open \"" + path + "\"");
    std::vector<std::pair<double, double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double x, val;
        if (ls >> x >> val) rows.emplace_back(x, val);
    }
    if (rows.size() < 2) throw ValidationError("potential.params.path: table needs at least two rows");
    std::sort(rows.begin(), rows.end());
    if (rows.front().first > grid.x.front() || rows.back().first < grid.x.back())
        throw ValidationError("potential.params.path: table does not cover the grid range");

    std::vector<double> out(grid.n);
    std::size_t j = 0;
    for (int i = 0; i < grid.n; ++i) {
        double xq = grid.x[i];
        while (j + 2 < rows.size() && rows[j + 1].first < xq) ++j;
        auto [x0, y0] = rows[j];
        auto [x1, y1] = rows[j + 1];
        double t = (x1 > x0) ? (xq - x0) / (x1 - x0) : 0.0;
        out[i] = y0 + t * (y1 - y0);
    }
    return out;
}

}  // namespace

PotentialSample sample_potential(const PotentialSpec& spec, const Grid& grid)
{
    spec.validate();

    PotentialSample s;
    s.grid = grid;
    s.spec = spec;
    s.V.assign(grid.n, 0.0);
    s.hull_lo = -grid.L;
    s.hull_hi = grid.L;

    switch (spec.family) {
        case PotentialFamily::Zero:
            break;
        case PotentialFamily::ScaledSech2:
            for (int i = 0; i < grid.n; ++i) {
                double se = sech(grid.x[i]);
                s.V[i] = spec.coupling * se * se;
            }
            break;
        case PotentialFamily::EmbeddedExample:
            for (int i = 0; i < grid.n; ++i) {
                double s2 = sech(grid.x[i]) * sech(grid.x[i]);
                s.V[i] = 20.0 * s2 - 24.0 * s2 * s2;
            }
            break;
        case PotentialFamily::ResonanceExample: {
            if (grid.L <= 1.0)
                throw ValidationError("grid.L must exceed 1 for resonance_example support");
            for (int i = 0; i < grid.n; ++i) {
                double x = grid.x[i];
                if (std::fabs(x) >= 1.0) continue;
                double phi = resonance_profile(spec.c, spec.d, x);
                if (!(phi > 1e-12))
                    throw NumericalError("resonance_example: phi1 vanishes on the grid");
                s.V[i] = -resonance_profile_d4(spec.c, spec.d, x) / phi;
            }
            s.hull_lo = -1.0;
            s.hull_hi = 1.0;
            break;
        }
        case PotentialFamily::Tabulated:
            s.V = read_table(spec.path, grid);
            break;
    }

    s.v.resize(grid.n);
    s.U.resize(grid.n);
    for (int i = 0; i < grid.n; ++i) {
        double raw = s.V[i];
        s.v[i] = std::sqrt(std::fabs(raw));
        s.U[i] = (raw > 0.0) - (raw < 0.0);
        s.V[i] = s.U[i] * s.v[i] * s.v[i];  // exact recombination
    }
    return s;
}

double PotentialSample::l1_norm() const
{
    double acc = 0.0;
    for (int i = 0; i < grid.n; ++i) {
        double w = (i == 0 || i == grid.n - 1) ? 0.5 : 1.0;
        acc += w * std::fabs(V[i]);
    }
    return acc * grid.h;
}

bool PotentialSample::is_zero() const
{
    for (double val : V)
        if (val != 0.0) return false;
    return true;
}

}  // namespace beamlab
