#pragma once

#include <optional>
#include <vector>

#include "geomsub/manifold.hpp"

namespace geomsub {

// Weights a_j summing to 1 (within 1e-12) paired with points of equal length.
// Negative weights are allowed.
struct WeightedData {
    std::vector<double> weights;
    std::vector<ManifoldPoint> points;
};

void validate_weighted_data(const WeightedData& data);

// Max pairwise geodesic distance of the points.
double data_diameter(const WeightedData& data);

struct MeanConfig {
    int max_iter = 100;
    double tol = 1e-12;  // stationarity threshold, measured as the tangent gradient norm
    // Step damping in (0, 1]. Unset picks 1.0, or 0.5 when any weight is negative.
    std::optional<double> damping;

    double effective_damping(const WeightedData& data) const;
};

// Exact weighted sum; Euclidean kind only.
ManifoldPoint affine_average(const WeightedData& data);

// Weighted Karcher fixed-point iteration: x <- x (+) damping * sum a_j (x_j (-) x),
// started from the heaviest-weight point refined by one full chart step.
// The result certifies || sum a_j (x_j (-) x) || <= tol * (1 + diameter);
// otherwise NoConvergenceError.
ManifoldPoint frechet_mean(const WeightedData& data, const MeanConfig& cfg = {},
                           const std::optional<ManifoldPoint>& init = std::nullopt);

// Stationarity residual || sum a_j (x_j (-) x) || at x; the certificate that
// frechet_mean outputs satisfy.
double frechet_residual(const WeightedData& data, const ManifoldPoint& x);

// Single-shot log/exp average: base (+) sum a_j (x_j (-) base).
ManifoldPoint basepoint_average(const ManifoldPoint& base, const WeightedData& data);

}  // namespace geomsub
