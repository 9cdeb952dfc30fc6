#pragma once

#include <optional>
#include <string>

#include "beamlab/cutoff.hpp"
#include "beamlab/grid.hpp"
#include "beamlab/potential.hpp"

namespace beamlab {

/// Fully resolved experiment configuration. Every field has a value after
/// load/validation; resolved defaults are echoed into output metadata.
struct ExperimentConfig {
    double grid_L = 20.0;
    int grid_n = 256;
    PotentialSpec potential;
    bool lambda0_auto = true;
    double lambda0 = 0.125;  // resolved value when lambda0_auto
    double quad_rel_tol = 1e-5;
    long quad_max_nodes = 1 << 20;
    double rank_tol = 1e-8;
    std::string output_dir = ".";
    std::string output_format = "csv";

    Grid make_grid() const { return build_grid(grid_L, grid_n); }
    PotentialSample make_sample() const { return sample_potential(potential, make_grid()); }

    /// Serialized key=value view of every resolved field, for embedding into
    /// result files.
    std::string metadata_json() const;
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

}  // namespace beamlab
