#pragma once

#include <optional>
#include <string>
#include <vector>

#include "regularity.hpp"

namespace fracperron {

// One self-describing JSON config per experiment. Shape specs and data
// expressions are strings in the grammars of shape.hpp and expr.hpp.
struct ExperimentConfig {
    std::string task;  // solve | obstacle | capacity | wiener | classify | perron |
                       // perturbation | kellogg

    int dim = 1;
    std::array<double, 2> xrange{-1.0, 1.0};
    std::array<double, 2> yrange{0.0, 0.0};
    double h = 0.0;                  // primary spacing
    std::vector<int> cells_family;   // refinement families (kellogg, perturbation)
    std::int64_t max_nodes = Grid::kDefaultMaxNodes;

    double s = 0.5;
    double p = 2.0;
    double lambda = 1.0;
    std::string kernel_expr;  // empty selects the standard kernel

    std::string omega_spec = "all";

    std::string g_expr = "0";
    double g_far = 0.0;
    std::optional<std::string> psi_expr;
    double pert_height = 1.0;
    double observe_margin = 0.0;
    std::vector<std::string> perturbation_sets;

    SolveOpts solver;
    RegOpts regularity;

    std::string capacity_kind = "condenser";
    std::string compact_spec;      // K for the condenser
    std::string exceptional_spec;  // E for the sobolev capacity

    std::vector<Point> points;
    bool all_boundary = false;

    std::string out_dir = "out";
    int jobs = 1;
    bool dump_weights = false;
    bool dump_residual = false;
    bool dump_minimizer = false;

    FracParams params() const;

    bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

// Canonical JSON echo; reparsing it yields an identical ExperimentConfig.
std::string print_config(const ExperimentConfig& cfg);

}  // namespace fracperron
