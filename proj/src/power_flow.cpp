#include "voltgrid/power_flow.hpp"

#include <cmath>

namespace voltgrid {

VoltageSolution solve_power_flow(const FeederModel& feeder, const InjectionVector& inj) {
    const int n = static_cast<int>(feeder.buses.size());
    const double vb = feeder.v_base_volts;
    const std::complex<double> v0(inj.v_slack_pu * vb, 0.0);

    std::vector<std::complex<double>> v(n, v0);
    std::vector<std::complex<double>> s(n);
    for (int b = 0; b < n; ++b) s[b] = {inj.p_w[b], inj.q_var[b]};
    s[feeder.slack] = 0.0;

    std::vector<std::complex<double>> ibranch(n); // current parent->b through b's feeding line

    VoltageSolution sol;
    sol.v_pu.resize(n);
    sol.angle_rad.resize(n);

    constexpr double tol_pu = 1e-8;
    constexpr int max_sweeps = 200;
    for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
        // Backward: branch current = downstream branch currents minus the
        // bus's own injected current conj(S/V).
        for (auto it = feeder.depth_order.rbegin(); it != feeder.depth_order.rend(); ++it) {
            const int b = *it;
            if (b == feeder.slack) continue;
            std::complex<double> tot = -std::conj(s[b] / v[b]);
            for (int c : feeder.depth_order)
                if (feeder.parent_bus[c] == b) tot += ibranch[c];
            ibranch[b] = tot;
        }
        // Forward: voltage drops from the root.
        double dv = 0.0;
        for (int b : feeder.depth_order) {
            if (b == feeder.slack) continue;
            const Line& l = feeder.lines[feeder.parent_line[b]];
            const std::complex<double> z(l.r_ohm, l.x_ohm);
            const std::complex<double> vn = v[feeder.parent_bus[b]] - z * ibranch[b];
            dv = std::max(dv, std::abs(vn - v[b]) / vb);
            v[b] = vn;
        }
        sol.iterations = sweep;
        if (dv < tol_pu) {
            sol.converged = true;
            break;
        }
    }
    for (int b = 0; b < n; ++b) {
        sol.v_pu[b] = std::abs(v[b]) / vb;
        sol.angle_rad[b] = std::arg(v[b]);
    }
    return sol;
}

Eigen::VectorXd linearized_voltage(const Eigen::MatrixXd& x,
                                   const Eigen::VectorXd& v_base_pu,
                                   const Eigen::VectorXd& q_kvar,
                                   double v_base_volts) {
    const double scale = 1000.0 / (v_base_volts * v_base_volts);
    return v_base_pu + scale * (x * q_kvar);
}

InjectionVector make_injections(const FeederModel& feeder, const Eigen::VectorXd& q_kvar) {
    InjectionVector inj;
    const int n = static_cast<int>(feeder.buses.size());
    inj.p_w.assign(n, 0.0);
    inj.q_var.assign(n, 0.0);
    inj.v_slack_pu = feeder.v_slack_pu;
    for (const Bus& b : feeder.buses) {
        inj.p_w[b.id] = b.p_w;
        inj.q_var[b.id] = b.q_exo_var;
    }
    const std::vector<int> inv = feeder.inverter_buses();
    for (size_t i = 0; i < inv.size(); ++i)
        inj.q_var[inv[i]] += 1000.0 * q_kvar(static_cast<Eigen::Index>(i));
    return inj;
}

} // namespace voltgrid
