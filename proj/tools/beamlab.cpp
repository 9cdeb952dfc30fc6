// beamlab: numerical laboratory for fourth-order beam propagator decay,
// zero-energy resonance classification, and dyadic oscillatory bounds.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "beamlab/config.hpp"
#include "beamlab/free_kernel.hpp"
#include "beamlab/oscillatory.hpp"
#include "beamlab/output.hpp"
#include "beamlab/propagator.hpp"
#include "beamlab/resonance.hpp"
#include "beamlab/spectral.hpp"

using namespace beamlab;

namespace {

std::string out_path(const ExperimentConfig& cfg, const std::string& name)
{
    std::filesystem::create_directories(cfg.output_dir);
    return (std::filesystem::path(cfg.output_dir) / name).string();
}

ExperimentConfig resolve_config(const std::string& config_path)
{
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    if (cfg.lambda0_auto) {
        PotentialSample sample = cfg.make_sample();
        cfg.lambda0 = lambda0_auto(sample);
    }
    return cfg;
}

StoneParams stone_params(const ExperimentConfig& cfg)
{
    StoneParams p;
    p.rel_tol = cfg.quad_rel_tol;
    p.max_nodes = cfg.quad_max_nodes;
    p.lambda0 = cfg.lambda0;
    return p;
}

int cmd_spectrum(const ExperimentConfig& cfg, double pr_threshold)
{
    PotentialSample sample = cfg.make_sample();
    DiscreteOperator op = build_hamiltonian(sample.grid, sample);
    SpectralData sd = eigendecompose(op, pr_threshold);
    CsvWriter csv(out_path(cfg, "spectrum.csv"), cfg,
                  {"index", "eigenvalue", "participation_ratio", "is_bound"});
    for (int j = 0; j < sd.eigenvalues.size(); ++j)
        csv.row({static_cast<double>(j), sd.eigenvalues[j], sd.participation[j],
                 sd.bound_state_indices.count(j) ? 1.0 : 0.0});
    csv.flush();
    std::cout << "wrote spectrum.csv (" << csv.rows_written() << " rows)\n";
    return 0;
}

int cmd_classify(const ExperimentConfig& cfg)
{
    PotentialSample sample = cfg.make_sample();
    ResonanceReport rep = classify_potential(sample, cfg.rank_tol, cfg.lambda0);
    std::string payload = "{\"config\":" + cfg.metadata_json() + ",\"report\":" + rep.to_json() + "}";
    write_text_file(out_path(cfg, "classify.json"), payload + "\n");
    std::cout << payload << "\n";
    return 0;
}

int cmd_probe(const ExperimentConfig& cfg, const std::string& what, int alpha, double lo, double hi,
              int count)
{
    PotentialSample sample = cfg.make_sample();
    std::vector<double> lambdas = geometric_lambdas(lo, hi, count);
    ProbeResult pr = what == "minv" ? minv_blowup_probe(sample, lambdas)
                                    : cancellation_probe(sample, alpha, lambdas);
    CsvWriter csv(out_path(cfg, "probe_" + what + ".csv"), cfg, {"lambda", "norm"});
    for (std::size_t i = 0; i < pr.lambdas.size(); ++i) csv.row({pr.lambdas[i], pr.norms[i]});
    csv.flush();
    std::string fit = "{\"what\":\"" + what + "\",\"alpha\":" + std::to_string(alpha) +
                      ",\"slope\":" + format_g17(pr.fit.slope) +
                      ",\"stderr\":" + format_g17(pr.fit.stderr_slope) +
                      ",\"points_used\":" + std::to_string(pr.used.size()) + "}";
    write_text_file(out_path(cfg, "probe_" + what + "_fit.json"), fit + "\n");
    std::cout << fit << "\n";
    for (const std::string& msg : pr.dropped) std::cerr << "note: " << msg << "\n";
    return 0;
}

int cmd_vdc(const ExperimentConfig& cfg, const std::vector<double>& t_list, int n_lo, int n_hi,
            double m, double psi, int npp)
{
    CsvWriter csv(out_path(cfg, "vdc.csv"), cfg, {"N", "t", "absK", "theta", "ratio"});
    for (double t : t_list) {
        for (int N = n_lo; N <= n_hi; ++N) {
            oscillatory::OscIntegrand integ;
            integ.t = t;
            integ.m = m;
            integ.psi = psi;
            complexd val = oscillatory::K_N(+1, N, integ, cfg.quad_rel_tol, cfg.quad_max_nodes);
            double th = oscillatory::theta(N, oscillatory::N0_of(psi, t), m, t, npp);
            csv.row({static_cast<double>(N), t, std::abs(val), th, std::abs(val) / th});
        }
    }
    csv.flush();
    std::cout << "wrote vdc.csv (" << csv.rows_written() << " rows)\n";
    return 0;
}

int cmd_free(const ExperimentConfig& cfg, const std::string& check)
{
    if (check == "fresnel") {
        // sup over a dense separation scan matches (4 pi t)^{-1/2}
        for (double t : {1.0, 5.0, 25.0}) {
            double sup = 0.0;
            for (int i = 0; i <= 20000; ++i)
                sup = std::max(sup, std::fabs(freekernel::fresnel_cos_kernel(t, i * 2e-3 * 20, 0.0)));
            double expect = 1.0 / std::sqrt(4.0 * M_PI * t);
            double rel = std::fabs(sup - expect) / expect;
            std::cout << "t=" << t << " sup=" << sup << " expected=" << expect << " rel=" << rel
                      << (rel < 0.02 ? " OK" : " FAIL") << "\n";
            if (rel >= 0.02) return 3;
        }
        return 0;
    }
    if (check == "taylor") {
        struct Case {
            int alpha;
            double lambda, x, y;
        };
        for (const auto& c : {Case{1, 1.0, 2.0, 1.0}, Case{2, 0.7, 1.5, 0.4}, Case{3, 0.5, 1.0, 0.3}}) {
            double res = freekernel::taylor_split_check(c.alpha, c.lambda, c.x, c.y, 1e-12,
                                                        cfg.quad_max_nodes);
            std::cout << "alpha=" << c.alpha << " residual=" << res
                      << (res < 1e-10 ? " OK" : " FAIL") << "\n";
            if (res >= 1e-10) return 3;
        }
        return 0;
    }
    throw ValidationError("free: --check must be fresnel or taylor");
}

int cmd_decay(const ExperimentConfig& cfg, double m, const std::string& kind_s,
              const std::string& band_s, double tmin, double tmax, int points, int ell)
{
    PropagatorKind kind = kind_s == "cos"       ? PropagatorKind::Cos
                          : kind_s == "sinover" ? PropagatorKind::SinOver
                                                : PropagatorKind::UnifiedExp;
    CutoffBand band = band_s == "low" ? CutoffBand::Low
                      : band_s == "high" ? CutoffBand::High
                                         : CutoffBand::Full;
    PotentialSample sample = cfg.make_sample();
    bool align = (m != 0.0 && kind == PropagatorKind::Cos);
    std::vector<double> ts = decay_t_list(tmin, tmax, points, align);
    Subgrid sub = sample.is_zero() ? Subgrid::geometric(cfg.grid_L / 2.0)
                                   : Subgrid::uniform(cfg.grid_L / 2.0);
    DecayCurve curve = decay_curve(sample, m, ell, kind, band, ts, sub, stone_params(cfg));

    CsvWriter csv(out_path(cfg, "decay.csv"), cfg, {"t", "supnorm"});
    for (std::size_t i = 0; i < curve.t.size(); ++i) csv.row({curve.t[i], curve.sup[i]});
    csv.flush();

    DecayFit fit = fit_exponent(curve, tmin, tmax);
    std::string rec = "{\"slope\":" + format_g17(fit.slope) +
                      ",\"stderr\":" + format_g17(fit.stderr_slope) +
                      ",\"window\":[" + format_g17(fit.t_lo) + "," + format_g17(fit.t_hi) + "]" +
                      ",\"settings\":" + cfg.metadata_json() + "}";
    write_text_file(out_path(cfg, "decay_fit.json"), rec + "\n");
    std::cout << rec << "\n";
    return 0;
}

int cmd_crossval(const ExperimentConfig& cfg, double t, double m, const std::string& kind_s)
{
    PropagatorKind kind = kind_s == "cos"       ? PropagatorKind::Cos
                          : kind_s == "sinover" ? PropagatorKind::SinOver
                                                : PropagatorKind::UnifiedExp;
    PotentialSample sample = cfg.make_sample();
    double disc = crossvalidate(sample, t, m, kind, stone_params(cfg));
    std::string rec = "{\"t\":" + format_g17(t) + ",\"m\":" + format_g17(m) +
                      ",\"kind\":\"" + kind_s + "\",\"max_rel_discrepancy\":" + format_g17(disc) + "}";
    write_text_file(out_path(cfg, "crossval.json"), rec + "\n");
    std::cout << rec << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"beamlab: fourth-order beam propagator laboratory"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON experiment configuration");

    auto* spectrum = app.add_subcommand("spectrum", "eigenvalues, participation ratios, bound flags");
    double pr_threshold = 0.05;
    spectrum->add_option("--pr-threshold", pr_threshold, "participation-ratio bound threshold");

    auto* classify = app.add_subcommand("classify", "zero-energy resonance classification");

    auto* probe = app.add_subcommand("probe", "inverse blow-up / cancellation order probes");
    std::string what = "minv";
    int alpha = 0;
    double plo = 1e-3, phi = 1e-1;
    int pcount = 25;
    probe->add_option("--what", what, "minv|cancel")->check(CLI::IsMember({"minv", "cancel"}));
    probe->add_option("--alpha", alpha, "projection order for cancel")->check(CLI::Range(0, 3));
    probe->add_option("--lo", plo, "lambda sweep start");
    probe->add_option("--hi", phi, "lambda sweep end");
    probe->add_option("--points", pcount, "sweep size");

    auto* vdc = app.add_subcommand("vdc", "dyadic oscillatory piece vs its two-branch bound");
    std::vector<double> t_list{10.0, 100.0, 1000.0};
    int n_lo = -12, n_hi = 8, npp = 0;
    double vm = 0.0, psi = 1.0;
    vdc->add_option("--t-list", t_list, "time values");
    vdc->add_option("--N-lo", n_lo, "lowest dyadic index");
    vdc->add_option("--N-hi", n_hi, "highest dyadic index");
    vdc->add_option("--m", vm, "mass parameter");
    vdc->add_option("--psi", psi, "phase offset Psi(z)");
    vdc->add_option("--npp", npp, "reference index N'' in C_m");

    auto* freechk = app.add_subcommand("free", "closed-form kernel self checks");
    std::string check = "fresnel";
    freechk->add_option("--check", check, "fresnel|taylor")
        ->check(CLI::IsMember({"fresnel", "taylor"}));

    auto* decay = app.add_subcommand("decay", "sup-norm decay curve and power-law fit");
    double dm = 0.0, tmin = 10.0, tmax = 1000.0;
    int points = 13, ell = 0;
    std::string kind_s = "cos", band_s = "full";
    decay->add_option("--m", dm, "mass parameter");
    decay->add_option("--kind", kind_s, "cos|sinover|exp")
        ->check(CLI::IsMember({"cos", "sinover", "exp"}));
    decay->add_option("--cutoff", band_s, "low|high|full")
        ->check(CLI::IsMember({"low", "high", "full"}));
    decay->add_option("--tmin", tmin, "window start");
    decay->add_option("--tmax", tmax, "window end");
    decay->add_option("--points", points, "number of t samples");
    decay->add_option("--ell", ell, "power of (H+m^2)^(ell/2)")->check(CLI::Range(-1, 0));

    auto* crossval = app.add_subcommand("crossval", "Stone route vs spectral route discrepancy");
    double ct = 5.0, cm = 0.0;
    std::string ckind = "cos";
    crossval->add_option("--t", ct, "time");
    crossval->add_option("--m", cm, "mass parameter");
    crossval->add_option("--kind", ckind, "cos|sinover|exp")
        ->check(CLI::IsMember({"cos", "sinover", "exp"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        ExperimentConfig cfg = resolve_config(config_path);
        if (spectrum->parsed()) return cmd_spectrum(cfg, pr_threshold);
        if (classify->parsed()) return cmd_classify(cfg);
        if (probe->parsed()) return cmd_probe(cfg, what, alpha, plo, phi, pcount);
        if (vdc->parsed()) return cmd_vdc(cfg, t_list, n_lo, n_hi, vm, psi, npp);
        if (freechk->parsed()) return cmd_free(cfg, check);
        if (decay->parsed()) return cmd_decay(cfg, dm, kind_s, band_s, tmin, tmax, points, ell);
        if (crossval->parsed()) return cmd_crossval(cfg, ct, cm, ckind);
    } catch (const ValidationError& e) {
        std::cerr << "{\"error\":\"validation\",\"reason\":\"" << e.what() << "\"}\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "{\"error\":\"numerical\",\"reason\":\"" << e.what() << "\"}\n";
        return 3;
    }
    return 2;
}
