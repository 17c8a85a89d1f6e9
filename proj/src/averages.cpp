#include "geomsub/averages.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "geomsub/config.hpp"

namespace geomsub {

namespace {

constexpr double kWeightSumTol = 1e-12;

// Tangent gradient sum a_j (x_j (-) x) at x.
TangentVector gradient_at(const WeightedData& data, const ManifoldPoint& x) {
    TangentVector g = zero_tangent(x);
    for (std::size_t j = 0; j < data.points.size(); ++j) {
        if (data.weights[j] == 0.0) continue;
        g.vec += data.weights[j] * log_point(x, data.points[j]).vec;
    }
    return g;
}

}  // namespace

void validate_weighted_data(const WeightedData& data) {
    if (data.weights.size() != data.points.size())
        throw ValidationError("weighted data: weights and points differ in length");
    if (data.points.empty()) throw ValidationError("weighted data: empty");
    double sum = std::accumulate(data.weights.begin(), data.weights.end(), 0.0);
    if (std::abs(sum - 1.0) > check_tol(kWeightSumTol))
        throw ValidationError("weighted data: weights sum to " + std::to_string(sum) +
                              ", expected 1");
    for (std::size_t j = 1; j < data.points.size(); ++j)
        if (!(data.points[j].kind == data.points[0].kind))
            throw ValidationError("weighted data: mixed manifold kinds");
}

double data_diameter(const WeightedData& data) {
    double d = 0.0;
    for (std::size_t i = 0; i < data.points.size(); ++i)
        for (std::size_t j = i + 1; j < data.points.size(); ++j)
            d = std::max(d, distance(data.points[i], data.points[j]));
    return d;
}

double MeanConfig::effective_damping(const WeightedData& data) const {
    if (damping) return *damping;
    bool negative = std::any_of(data.weights.begin(), data.weights.end(),
                                [](double w) { return w < 0.0; });
    return negative ? 0.5 : 1.0;
}

ManifoldPoint affine_average(const WeightedData& data) {
    validate_weighted_data(data);
    if (data.points[0].kind.geometry != Geometry::Euclidean)
        throw ValidationError("affine_average: Euclidean kind required");
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(data.points[0].coords.size());
    for (std::size_t j = 0; j < data.points.size(); ++j)
        acc += data.weights[j] * data.points[j].coords;
    return {data.points[0].kind, acc};
}

double frechet_residual(const WeightedData& data, const ManifoldPoint& x) {
    return tangent_norm(gradient_at(data, x));
}

ManifoldPoint frechet_mean(const WeightedData& data, const MeanConfig& cfg,
                           const std::optional<ManifoldPoint>& init) {
    validate_weighted_data(data);
    if (cfg.max_iter < 1 || cfg.tol <= 0.0)
        throw ValidationError("frechet_mean: max_iter >= 1 and tol > 0 required");

    const double diam = data_diameter(data);
    const double target = cfg.tol * (1.0 + diam);
    const double damping = cfg.effective_damping(data);

    ManifoldPoint x;
    if (init) {
        x = *init;
    } else {
        std::size_t heaviest =
            std::distance(data.weights.begin(),
                          std::max_element(data.weights.begin(), data.weights.end()));
        x = data.points[heaviest];
        // One full chart refinement before the damped loop.
        TangentVector g0 = gradient_at(data, x);
        if (tangent_norm(g0) <= target) return x;
        x = exp_point(x, g0);
    }

    for (int it = 0; it < cfg.max_iter; ++it) {
        TangentVector g = gradient_at(data, x);
        if (tangent_norm(g) <= target) return x;
        g.vec *= damping;
        x = exp_point(x, g);
    }
    if (frechet_residual(data, x) <= target) return x;
    throw NoConvergenceError("frechet_mean: no stationary point after " +
                             std::to_string(cfg.max_iter) + " iterations");
}

ManifoldPoint basepoint_average(const ManifoldPoint& base, const WeightedData& data) {
    validate_weighted_data(data);
    if (!(base.kind == data.points[0].kind))
        throw ValidationError("basepoint_average: base kind differs from data kind");
    // A single unit weight returns its point untouched.
    if (data.points.size() == 1 && data.weights[0] == 1.0) return data.points[0];
    return exp_point(base, gradient_at(data, base));
}

}  // namespace geomsub
