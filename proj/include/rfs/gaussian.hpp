#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace rfs {

/// One weighted Gaussian. State layout throughout the library is
/// [p_x, v_x, p_y, v_y] (meters, meters/second).
struct GaussianComponent {
    double weight = 1.0;
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;

    GaussianComponent() = default;
    GaussianComponent(double w, Eigen::VectorXd m, Eigen::MatrixXd p)
        : weight(w), mean(std::move(m)), covariance(std::move(p)) {}

    int dim() const { return static_cast<int>(mean.size()); }
};

using GaussianMixture = std::vector<GaussianComponent>;

/// log N(x; mean, cov) via LLT. Throws if cov is not positive definite.
inline double log_gaussian(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                           const Eigen::MatrixXd& cov) {
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("log_gaussian: covariance not positive definite");
    Eigen::VectorXd diff = x - mean;
    Eigen::VectorXd sol = llt.matrixL().solve(diff);
    double log_det = 0.0;
    for (int i = 0; i < cov.rows(); ++i) log_det += std::log(llt.matrixL()(i, i));
    constexpr double log_2pi = 1.8378770664093454836;
    return -0.5 * (sol.squaredNorm() + cov.rows() * log_2pi) - log_det;
}

inline bool is_symmetric(const Eigen::MatrixXd& m, double rel_tol = 1e-9) {
    double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

inline double min_eigenvalue(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

inline double mixture_weight_sum(const GaussianMixture& mix) {
    double sum = 0.0;
    for (const auto& c : mix) sum += c.weight;
    return sum;
}

/// Rescale component weights to sum to one.
inline void normalize_mixture(GaussianMixture& mix) {
    double sum = mixture_weight_sum(mix);
    if (!(sum > 0.0))
        throw std::runtime_error("normalize_mixture: total weight is zero");
    for (auto& c : mix) c.weight /= sum;
}

/// Keep the max_components heaviest components (weight descending, index
/// ascending on ties), then renormalize.
inline void cap_mixture(GaussianMixture& mix, int max_components) {
    if (max_components <= 0 || static_cast<int>(mix.size()) <= max_components) return;
    std::vector<int> order(mix.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return mix[a].weight > mix[b].weight; });
    order.resize(max_components);
    std::sort(order.begin(), order.end());
    GaussianMixture kept;
    kept.reserve(order.size());
    for (int i : order) kept.push_back(std::move(mix[i]));
    mix = std::move(kept);
    normalize_mixture(mix);
}

/// Weighted mean of a normalized mixture.
inline Eigen::VectorXd mixture_mean(const GaussianMixture& mix) {
    if (mix.empty()) throw std::runtime_error("mixture_mean: empty mixture");
    Eigen::VectorXd m = Eigen::VectorXd::Zero(mix.front().mean.size());
    for (const auto& c : mix) m += c.weight * c.mean;
    return m;
}

}  // namespace rfs
