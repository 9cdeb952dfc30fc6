#include "beamlab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace beamlab {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where)
{
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!known.count(it.key()))
            throw ValidationError("config: unknown key \"" + where + it.key() + "\"");
}

double need_number(const json& obj, const std::string& key, const std::string& where)
{
    if (!obj.at(key).is_number())
        throw ValidationError("config: \"" + where + key + "\" must be a number");
    return obj.at(key).get<double>();
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config: JSON parse error: ") + e.what());
    }
    if (!root.is_object()) throw ValidationError("config: top level must be an object");
    reject_unknown(root, {"grid", "potential", "cutoff", "quadrature", "rank_tol", "output"}, "");

    ExperimentConfig cfg;

    if (root.contains("grid")) {
        const json& g = root["grid"];
        reject_unknown(g, {"L", "n"}, "grid.");
        if (g.contains("L")) cfg.grid_L = need_number(g, "L", "grid.");
        if (g.contains("n")) {
            if (!g.at("n").is_number_integer())
                throw ValidationError("config: \"grid.n\" must be an integer");
            cfg.grid_n = g.at("n").get<int>();
        }
    }
    if (!(cfg.grid_L > 0.0)) throw ValidationError("config: \"grid.L\" must be positive");
    if (!is_power_of_two(cfg.grid_n) || cfg.grid_n < 64)
        throw ValidationError("config: \"grid.n\" must be a power of two >= 64");

    if (root.contains("potential")) {
        const json& p = root["potential"];
        reject_unknown(p, {"family", "params", "mu"}, "potential.");
        if (!p.contains("family") || !p.at("family").is_string())
            throw ValidationError("config: \"potential.family\" must be a string");
        cfg.potential.family = family_from_string(p.at("family").get<std::string>());
        if (p.contains("mu")) cfg.potential.claimed_mu = need_number(p, "mu", "potential.");
        if (p.contains("params")) {
            const json& q = p["params"];
            reject_unknown(q, {"coupling", "c", "d", "path"}, "potential.params.");
            if (q.contains("coupling")) cfg.potential.coupling = need_number(q, "coupling", "potential.params.");
            if (q.contains("c")) cfg.potential.c = need_number(q, "c", "potential.params.");
            if (q.contains("d")) cfg.potential.d = need_number(q, "d", "potential.params.");
            if (q.contains("path")) cfg.potential.path = q.at("path").get<std::string>();
        }
    }
    cfg.potential.validate();

    if (root.contains("cutoff")) {
        const json& c = root["cutoff"];
        reject_unknown(c, {"lambda0"}, "cutoff.");
        if (c.contains("lambda0")) {
            if (c.at("lambda0").is_string()) {
                if (c.at("lambda0").get<std::string>() != "auto")
                    throw ValidationError("config: \"cutoff.lambda0\" must be a number or \"auto\"");
                cfg.lambda0_auto = true;
            } else {
                cfg.lambda0 = need_number(c, "lambda0", "cutoff.");
                cfg.lambda0_auto = false;
                if (!(cfg.lambda0 > 0.0))
                    throw ValidationError("config: \"cutoff.lambda0\" must be positive");
            }
        }
    }

    if (root.contains("quadrature")) {
        const json& q = root["quadrature"];
        reject_unknown(q, {"rel_tol", "max_nodes"}, "quadrature.");
        if (q.contains("rel_tol")) cfg.quad_rel_tol = need_number(q, "rel_tol", "quadrature.");
        if (q.contains("max_nodes")) cfg.quad_max_nodes = q.at("max_nodes").get<long>();
        if (!(cfg.quad_rel_tol > 0.0 && cfg.quad_rel_tol < 1.0))
            throw ValidationError("config: \"quadrature.rel_tol\" out of range (0, 1)");
        if (cfg.quad_max_nodes < 64)
            throw ValidationError("config: \"quadrature.max_nodes\" must be >= 64");
    }

    if (root.contains("rank_tol")) {
        cfg.rank_tol = need_number(root, "rank_tol", "");
        if (!(cfg.rank_tol > 0.0 && cfg.rank_tol < 1.0))
            throw ValidationError("config: \"rank_tol\" out of range (0, 1)");
    }

    if (root.contains("output")) {
        const json& o = root["output"];
        reject_unknown(o, {"dir", "format"}, "output.");
        if (o.contains("dir")) cfg.output_dir = o.at("dir").get<std::string>();
        if (o.contains("format")) {
            cfg.output_format = o.at("format").get<std::string>();
            if (cfg.output_format != "csv" && cfg.output_format != "json")
                throw ValidationError("config: \"output.format\" must be \"csv\" or \"json\"");
        }
    }

    return cfg;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open \"" + path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string ExperimentConfig::metadata_json() const
{
    json j;
    j["grid"] = {{"L", grid_L}, {"n", grid_n}};
    json params;
    params["coupling"] = potential.coupling;
    params["c"] = potential.c;
    params["d"] = potential.d;
    if (!potential.path.empty()) params["path"] = potential.path;
    j["potential"] = {{"family", family_to_string(potential.family)},
                      {"params", params},
                      {"mu", potential.claimed_mu}};
    j["cutoff"] = {{"lambda0", lambda0}, {"auto", lambda0_auto}};
    j["quadrature"] = {{"rel_tol", quad_rel_tol}, {"max_nodes", quad_max_nodes}};
    j["rank_tol"] = rank_tol;
    j["output"] = {{"dir", output_dir}, {"format", output_format}};
    return j.dump();
}

}  // namespace beamlab
