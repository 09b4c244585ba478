#include "voltgrid/grid_model.hpp"

#include <algorithm>
#include <queue>
#include <set>

namespace voltgrid {

std::vector<int> FeederModel::inverter_buses() const {
    std::vector<int> out;
    for (const Bus& b : buses)
        if (b.kind == BusKind::Inverter) out.push_back(b.id);
    std::sort(out.begin(), out.end());
    return out;
}

int FeederModel::bus_by_name(const std::string& name) const {
    for (const Bus& b : buses)
        if (b.name == name) return b.id;
    throw GridError("no bus named '" + name + "'");
}

int FeederModel::line_by_name(const std::string& name) const {
    for (size_t i = 0; i < lines.size(); ++i)
        if (lines[i].name == name) return static_cast<int>(i);
    throw GridError("no line named '" + name + "'");
}

FeederModel build_feeder(std::vector<Bus> buses, std::vector<Line> lines,
                         double v_slack_pu, double v_min_pu, double v_max_pu,
                         double v_base_volts) {
    FeederModel f;
    f.buses = std::move(buses);
    f.lines = std::move(lines);
    f.v_slack_pu = v_slack_pu;
    f.v_min_pu = v_min_pu;
    f.v_max_pu = v_max_pu;
    f.v_base_volts = v_base_volts;

    const int n = static_cast<int>(f.buses.size());
    if (n == 0) throw GridError("feeder has no buses");
    if (v_min_pu >= v_max_pu) throw GridError("v_min must be below v_max");

    std::vector<int> seen(n, 0);
    int slack = -1;
    for (const Bus& b : f.buses) {
        if (b.id < 0 || b.id >= n) throw GridError("bus ids must be dense from 0");
        if (seen[b.id]++) throw GridError("duplicate bus id " + std::to_string(b.id));
        if (b.kind == BusKind::Slack) {
            if (slack >= 0) throw GridError("more than one slack bus");
            slack = b.id;
        }
    }
    if (slack < 0) throw GridError("no slack bus");
    f.slack = slack;
    std::sort(f.buses.begin(), f.buses.end(),
              [](const Bus& a, const Bus& b) { return a.id < b.id; });

    if (static_cast<int>(f.lines.size()) != n - 1)
        throw GridError("a radial feeder with " + std::to_string(n) +
                        " buses needs exactly " + std::to_string(n - 1) + " lines");

    std::vector<std::vector<std::pair<int, int>>> adj(n); // (other bus, line idx)
    for (size_t li = 0; li < f.lines.size(); ++li) {
        const Line& l = f.lines[li];
        if (l.from < 0 || l.from >= n || l.to < 0 || l.to >= n || l.from == l.to)
            throw GridError("line '" + l.name + "' references invalid buses");
        if (l.r_ohm < 0 || l.x_ohm < 0 || (l.r_ohm == 0 && l.x_ohm == 0))
            throw GridError("line '" + l.name + "' needs R >= 0, X >= 0, not both zero");
        adj[l.from].push_back({l.to, static_cast<int>(li)});
        adj[l.to].push_back({l.from, static_cast<int>(li)});
    }

    // BFS from the slack; with exactly n-1 edges, revisiting a bus means a
    // cycle and an unreached bus means a disconnected component.
    f.parent_bus.assign(n, -1);
    f.parent_line.assign(n, -1);
    std::vector<char> visited(n, 0);
    std::queue<int> bfs;
    bfs.push(slack);
    visited[slack] = 1;
    f.depth_order.clear();
    while (!bfs.empty()) {
        int b = bfs.front();
        bfs.pop();
        f.depth_order.push_back(b);
        for (auto [nb, li] : adj[b]) {
            if (li == f.parent_line[b]) continue;
            if (visited[nb]) throw GridError("cycle detected through bus " + std::to_string(nb));
            visited[nb] = 1;
            f.parent_bus[nb] = b;
            f.parent_line[nb] = li;
            bfs.push(nb);
        }
    }
    for (int b = 0; b < n; ++b)
        if (!visited[b]) throw GridError("bus " + std::to_string(b) + " not connected to the slack");
    return f;
}

namespace {

// Set of line indices on the slack->bus tree path.
std::set<int> path_lines(const FeederModel& f, int bus) {
    std::set<int> out;
    while (bus != f.slack) {
        out.insert(f.parent_line[bus]);
        bus = f.parent_bus[bus];
    }
    return out;
}

// Interior buses of the tree path between a and b (endpoints excluded).
std::vector<int> path_interior(const FeederModel& f, int a, int b) {
    std::vector<int> up_a, up_b;
    for (int x = a; x != f.slack; x = f.parent_bus[x]) up_a.push_back(x);
    up_a.push_back(f.slack);
    for (int x = b; x != f.slack; x = f.parent_bus[x]) up_b.push_back(x);
    up_b.push_back(f.slack);
    std::set<int> in_a(up_a.begin(), up_a.end());
    int lca = up_b.front();
    for (int x : up_b)
        if (in_a.count(x)) { lca = x; break; }
    std::vector<int> interior;
    for (int x : up_a) {
        if (x == lca) break;
        if (x != a) interior.push_back(x);
    }
    if (lca != a && lca != b) interior.push_back(lca);
    for (int x : up_b) {
        if (x == lca) break;
        if (x != b) interior.push_back(x);
    }
    return interior;
}

} // namespace

Eigen::MatrixXd compute_x_matrix(const FeederModel& feeder) {
    const std::vector<int> inv = feeder.inverter_buses();
    if (inv.empty()) throw GridError("feeder has no inverter buses");
    const int n = static_cast<int>(inv.size());
    std::vector<std::set<int>> paths(n);
    for (int i = 0; i < n; ++i) paths[i] = path_lines(feeder, inv[i]);
    Eigen::MatrixXd x(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double sum = 0.0;
            for (int li : paths[i])
                if (paths[j].count(li)) sum += feeder.lines[li].x_ohm;
            x(i, j) = x(j, i) = sum;
        }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(x);
    if (llt.info() != Eigen::Success)
        throw GridError("reduced reactance matrix is not positive definite");
    return x;
}

Eigen::MatrixXd compute_g_matrix(const Eigen::MatrixXd& x) {
    if (x.rows() != x.cols()) throw GridError("X must be square");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(x);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= 0.0 || sv(0) / sv(sv.size() - 1) > 1e12)
        throw GridError("X is numerically singular (condition > 1e12)");
    Eigen::LLT<Eigen::MatrixXd> llt(x);
    if (llt.info() != Eigen::Success)
        throw GridError("X is not symmetric positive definite");
    return llt.solve(Eigen::MatrixXd::Identity(x.rows(), x.cols()));
}

std::vector<std::vector<int>> neighbor_graph(const FeederModel& feeder) {
    const std::vector<int> inv = feeder.inverter_buses();
    const int n = static_cast<int>(inv.size());
    std::set<int> inv_set(inv.begin(), inv.end());
    std::vector<std::vector<int>> nbrs(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            bool blocked = false;
            for (int b : path_interior(feeder, inv[i], inv[j]))
                if (inv_set.count(b)) { blocked = true; break; }
            if (!blocked) {
                nbrs[i].push_back(j);
                nbrs[j].push_back(i);
            }
        }
    }
    return nbrs;
}

bool g_entry_is_zero(const Eigen::MatrixXd& g, int i, int j) {
    const double thresh = 1e-9 * g.cwiseAbs().maxCoeff();
    return std::abs(g(i, j)) < thresh;
}

SensitivityPair make_sensitivity(const FeederModel& feeder) {
    SensitivityPair s;
    s.inverter_ids = feeder.inverter_buses();
    s.X = compute_x_matrix(feeder);
    s.G = compute_g_matrix(s.X);
    s.neighbors = neighbor_graph(feeder);
    s.explicit_matrices = false;
    return s;
}

SensitivityPair make_sensitivity_explicit(const FeederModel& feeder,
                                          Eigen::MatrixXd x, Eigen::MatrixXd g) {
    SensitivityPair s;
    s.inverter_ids = feeder.inverter_buses();
    const int n = static_cast<int>(s.inverter_ids.size());
    if (x.rows() != n || x.cols() != n || g.rows() != n || g.cols() != n)
        throw GridError("explicit X/G dimensions do not match the inverter count");
    if (!x.isApprox(x.transpose(), 1e-9) || !g.isApprox(g.transpose(), 1e-9))
        throw GridError("explicit X/G must be symmetric");
    s.X = std::move(x);
    s.G = std::move(g);
    s.neighbors = neighbor_graph(feeder);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const bool adjacent =
                std::find(s.neighbors[i].begin(), s.neighbors[i].end(), j) != s.neighbors[i].end();
            if (!adjacent && !g_entry_is_zero(s.G, i, j))
                throw GridError("explicit G couples non-neighbor inverters " +
                                std::to_string(s.inverter_ids[i]) + " and " +
                                std::to_string(s.inverter_ids[j]));
        }
    s.explicit_matrices = true;
    return s;
}

} // namespace voltgrid
