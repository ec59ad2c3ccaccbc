#include "rfs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rfs {

AssignmentSolution solve_assignment(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    const int m = static_cast<int>(cost.cols());
    if (n > m) throw std::invalid_argument("solve_assignment: needs rows <= columns");
    AssignmentSolution sol;
    sol.row_to_col.assign(static_cast<std::size_t>(n), -1);
    if (n == 0) return sol;

    const double inf = std::numeric_limits<double>::infinity();
    // Shortest augmenting paths with potentials, 1-based with column 0 as
    // the virtual root.
    std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> v(static_cast<std::size_t>(m) + 1, 0.0);
    std::vector<int> matched(static_cast<std::size_t>(m) + 1, 0);
    std::vector<int> way(static_cast<std::size_t>(m) + 1, 0);
    for (int i = 1; i <= n; ++i) {
        matched[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<std::size_t>(m) + 1, inf);
        std::vector<char> used(static_cast<std::size_t>(m) + 1, 0);
        do {
            used[static_cast<std::size_t>(j0)] = 1;
            int i0 = matched[static_cast<std::size_t>(j0)];
            int j1 = -1;
            double delta = inf;
            for (int j = 1; j <= m; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                             v[static_cast<std::size_t>(j)];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(matched[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (matched[static_cast<std::size_t>(j0)] != 0);
        do {
            int j1 = way[static_cast<std::size_t>(j0)];
            matched[static_cast<std::size_t>(j0)] = matched[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }
    for (int j = 1; j <= m; ++j) {
        int i = matched[static_cast<std::size_t>(j)];
        if (i == 0) continue;
        sol.row_to_col[static_cast<std::size_t>(i - 1)] = j - 1;
        sol.cost += cost(i - 1, j - 1);
    }
    return sol;
}

namespace {

void check_metric_params(double cutoff, double order) {
    if (!(cutoff > 0.0)) throw std::invalid_argument("ospa: cutoff must be positive");
    if (!(order >= 1.0)) throw std::invalid_argument("ospa: order must be at least 1");
}

/// Core OSPA combination given the cutoff-saturated base distances between
/// the smaller set (rows) and the larger (columns).
double ospa_from_base(const Eigen::MatrixXd& base, double cutoff, double order) {
    const int n = static_cast<int>(base.rows());
    const int m = static_cast<int>(base.cols());
    Eigen::MatrixXd powed = base.unaryExpr([order](double d) { return std::pow(d, order); });
    double total = solve_assignment(powed).cost +
                   std::pow(cutoff, order) * static_cast<double>(m - n);
    return std::pow(total / static_cast<double>(m), 1.0 / order);
}

}  // namespace

double ospa(const std::vector<Eigen::Vector2d>& x, const std::vector<Eigen::Vector2d>& y,
            double cutoff, double order) {
    check_metric_params(cutoff, order);
    if (x.empty() && y.empty()) return 0.0;
    if (x.empty() || y.empty()) return cutoff;
    const auto& small = x.size() <= y.size() ? x : y;
    const auto& large = x.size() <= y.size() ? y : x;
    Eigen::MatrixXd base(small.size(), large.size());
    for (std::size_t i = 0; i < small.size(); ++i)
        for (std::size_t j = 0; j < large.size(); ++j)
            base(static_cast<int>(i), static_cast<int>(j)) =
                std::min(cutoff, (small[i] - large[j]).norm());
    return ospa_from_base(base, cutoff, order);
}

double ospa2(const std::vector<TrackHistory>& truth, const std::vector<TrackHistory>& estimate,
             int t, const MetricConfig& config) {
    check_metric_params(config.cutoff, config.order);
    if (config.window < 1) throw std::invalid_argument("ospa2: window must be at least 1");
    const int lo = std::max(1, t - config.window + 1);
    if (t < 1) throw std::invalid_argument("ospa2: evaluation step must be at least 1");
    const int steps = t - lo + 1;

    auto in_window = [&](const TrackHistory& h) {
        for (int s = lo; s <= t; ++s)
            if (h.present(s)) return true;
        return false;
    };
    std::vector<const TrackHistory*> a, b;
    for (const auto& h : truth)
        if (in_window(h)) a.push_back(&h);
    for (const auto& h : estimate)
        if (in_window(h)) b.push_back(&h);

    if (a.empty() && b.empty()) return 0.0;
    if (a.empty() || b.empty()) return config.cutoff;
    if (a.size() > b.size()) std::swap(a, b);

    Eigen::MatrixXd base(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            double acc = 0.0;
            for (int s = lo; s <= t; ++s) {
                bool pa = a[i]->present(s);
                bool pb = b[j]->present(s);
                if (pa && pb)
                    acc += std::min(config.cutoff,
                                    (a[i]->points.at(s) - b[j]->points.at(s)).norm());
                else if (pa || pb)
                    acc += config.cutoff;
            }
            base(static_cast<int>(i), static_cast<int>(j)) = acc / static_cast<double>(steps);
        }
    }
    return ospa_from_base(base, config.cutoff, config.order);
}

}  // namespace rfs
