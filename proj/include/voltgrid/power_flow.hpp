#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "voltgrid/grid_model.hpp"

namespace voltgrid {

/// Per-bus complex power injections [W, VAr] plus the slack voltage. The
/// slack bus entry is ignored (its voltage is fixed instead).
struct InjectionVector {
    std::vector<double> p_w;
    std::vector<double> q_var;
    double v_slack_pu = 1.0;
};

/// Output of one power-flow solve.
struct VoltageSolution {
    std::vector<double> v_pu;      ///< magnitudes
    std::vector<double> angle_rad;
    bool converged = false;
    int iterations = 0;
};

/// Backward/forward sweep on the tree. Iterates until the largest per-bus
/// complex-voltage change is below 1e-8 p.u., giving up after 200 sweeps
/// (converged=false; callers decide whether that is fatal).
VoltageSolution solve_power_flow(const FeederModel& feeder, const InjectionVector& inj);

/// First-order voltage model of Eq.-(6) form: v = v_base + scale * X * q,
/// with q in kVAr and scale = 1000 / v_base_volts^2 converting ohm*kVAr to p.u.
Eigen::VectorXd linearized_voltage(const Eigen::MatrixXd& x,
                                   const Eigen::VectorXd& v_base_pu,
                                   const Eigen::VectorXd& q_kvar,
                                   double v_base_volts = 400.0);

/// Convenience: nominal injections of the feeder with per-inverter reactive
/// set-points [kVAr] overlaid (exogenous w plus controlled q).
InjectionVector make_injections(const FeederModel& feeder, const Eigen::VectorXd& q_kvar);

} // namespace voltgrid
