#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "voltgrid/errors.hpp"

namespace voltgrid {

enum class BusKind { Slack, Load, Inverter, Passive };

/// One bus of the feeder. Exogenous injections w = (p, q_exo) are the
/// uncontrolled part of the operating point (loads, curtailed generation).
struct Bus {
    int id = 0;
    BusKind kind = BusKind::Passive;
    double p_w = 0.0;     ///< nominal exogenous active injection [W]
    double q_exo_var = 0.0; ///< nominal exogenous reactive injection [VAr]
    std::string name;
};

/// Series impedance between two buses [ohm].
struct Line {
    int from = 0;
    int to = 0;
    double r_ohm = 0.0;
    double x_ohm = 0.0;
    std::string name;
};

/// Radial feeder: a tree of lines rooted at the single slack bus.
/// Immutable after build_feeder(); safe to share across threads read-only.
struct FeederModel {
    std::vector<Bus> buses;
    std::vector<Line> lines;
    double v_slack_pu = 1.0;
    double v_min_pu = 0.95;
    double v_max_pu = 1.05;
    double v_base_volts = 400.0;

    // Tree structure, filled in by build_feeder (parent line index per bus,
    // -1 at the slack; buses ordered root-first).
    int slack = 0;
    std::vector<int> parent_bus;
    std::vector<int> parent_line;
    std::vector<int> depth_order;

    std::vector<int> inverter_buses() const;
    int bus_by_name(const std::string& name) const;
    int line_by_name(const std::string& name) const;

    /// p.u. voltage change per (ohm * kVAr) under the mixed unit convention.
    double kvar_scale() const { return 1000.0 / (v_base_volts * v_base_volts); }
};

/// Validates invariants (unique dense ids, one slack, line set forms a tree
/// spanning every bus) and computes the tree structure.
FeederModel build_feeder(std::vector<Bus> buses, std::vector<Line> lines,
                         double v_slack_pu = 1.0, double v_min_pu = 0.95,
                         double v_max_pu = 1.05, double v_base_volts = 400.0);

/// Reduced bus reactance matrix over the inverter buses:
/// X_ij = total reactance of the common portion of the slack->i and slack->j
/// tree paths [ohm]. Symmetric positive definite for distinct inverter buses
/// with positive-reactance paths.
Eigen::MatrixXd compute_x_matrix(const FeederModel& feeder);

/// G = X^-1 [1/ohm]. Throws GridError when X is numerically singular
/// (condition estimate above 1e12).
Eigen::MatrixXd compute_g_matrix(const Eigen::MatrixXd& x);

/// Electrical neighbor graph over inverters (indices into the inverter list,
/// ascending bus-id order): i~j iff the tree path between their buses passes
/// through no other inverter bus. This is exactly the sparsity pattern of G.
std::vector<std::vector<int>> neighbor_graph(const FeederModel& feeder);

/// X, G and the neighbor graph bundled with the inverter ordering.
/// `explicit_matrices` marks pairs supplied verbatim by a scenario file
/// (printed matrices are rounded, so G need not equal X^-1 there).
struct SensitivityPair {
    std::vector<int> inverter_ids; ///< bus ids, ascending
    Eigen::MatrixXd X;
    Eigen::MatrixXd G;
    std::vector<std::vector<int>> neighbors;
    bool explicit_matrices = false;
};

/// Derived mode: X from topology, G = X^-1, neighbors from the path rule.
SensitivityPair make_sensitivity(const FeederModel& feeder);

/// Explicit mode: matrices straight from the scenario file. Validates shape,
/// symmetry and that the sparsity of G matches the feeder's neighbor graph.
SensitivityPair make_sensitivity_explicit(const FeederModel& feeder,
                                          Eigen::MatrixXd x, Eigen::MatrixXd g);

/// Entries below 1e-9 * max|G| count as structural zeros (float inversion
/// never produces exact zeros).
bool g_entry_is_zero(const Eigen::MatrixXd& g, int i, int j);

} // namespace voltgrid
