#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "geomsub/analysis.hpp"
#include "geomsub/subdivision.hpp"

namespace geomsub {

struct PyramidScheme {
    enum class Kind { Haar, Interpolatory };
    Kind kind = Kind::Haar;
    Mask mask;              // Interpolatory only
    SchemeVariant variant;  // Interpolatory only

    static PyramidScheme haar() { return {}; }
    static PyramidScheme interpolatory(Mask m, SchemeVariant v);

    int dilation() const { return kind == Kind::Haar ? 2 : mask.dilation; }
};

// Detail vectors of one level; `start` is the absolute index of vecs[0] at
// that level (open-boundary pyramids shrink at the edges, periodic ones
// keep start 0).
struct DetailLevel {
    std::int64_t start = 0;
    std::vector<TangentVector> vecs;
};

struct Pyramid {
    PyramidScheme scheme;
    Sequence coarse;                   // level 0
    std::vector<DetailLevel> details;  // levels 1..M, coarsest first
    std::int64_t original_length = 0;
    Boundary boundary = Boundary::Periodic;

    int levels() const { return static_cast<int>(details.size()); }
};

// M rounds of (midpoints, even-index residual logs). Haar details at level j
// are based at the level j-1 midpoints. Length must be divisible by 2^M.
Pyramid haar_decompose(const Sequence& seq, int levels);

// p_{2i} = m (+) q_i, p_{2i+1} = m (-) q_i. Details are parallel-transported
// to the current base first, so modified pyramids reconstruct meaningfully.
Sequence haar_reconstruct(const Pyramid& pyr);

// Interpolatory pyramid: forgetful decimation p^{(j-1)}_i = p^{(j)}_{Ni} plus
// residuals against the subdivision prediction. Even-index details are stored
// as exact zeros. Length must satisfy N^M | L (periodic) or N^M | L-1 (open).
Pyramid wavelet_decompose(const Sequence& seq, const Mask& mask, const SchemeVariant& variant,
                          int levels);

// p^{(j)} = Sp^{(j-1)} (+) q^{(j)}, transporting each stored detail to the
// freshly predicted base point.
Sequence wavelet_reconstruct(const Pyramid& pyr);

struct ThresholdPolicy {
    enum class Mode { Hard, KeepTop };
    Mode mode = Mode::Hard;
    double tau = 0.0;             // Hard: zero details with norm < tau * mu^level
    double fraction = 1.0;        // KeepTop: keep this fraction of detail slots
    double per_level_scale = 1.0; // mu

    static ThresholdPolicy hard(double tau, double mu = 1.0) {
        return {Mode::Hard, tau, 1.0, mu};
    }
    static ThresholdPolicy keep_top(double fraction) {
        return {Mode::KeepTop, 0.0, fraction, 1.0};
    }
};

struct ThresholdStats {
    std::size_t kept = 0;
    std::size_t dropped = 0;
    double dropped_energy = 0.0;  // sum of squared norms of zeroed details
};

// Zeroes details below the policy; never touches the coarse level.
Pyramid threshold(const Pyramid& pyr, const ThresholdPolicy& policy, ThresholdStats* stats = nullptr);

struct RegularityEstimate {
    double alpha_hat = 0.0;
    std::vector<double> per_level_max;  // max detail norm at levels 1..M
};

// Least-squares decay rate of log(max detail norm) against the level,
// alpha_hat = -slope / log N. The two coarsest levels are pre-asymptotic and
// excluded from the regression. alpha_hat is +inf when the usable details
// vanish identically.
RegularityEstimate estimate_regularity(const Pyramid& pyr);

struct StabilityConfig {
    double eps = 1e-3;  // coarse perturbation bound; details are bounded by eps * mu^level
    double mu = 0.5;
    int trials = 20;
    std::uint64_t seed = 0;
};

struct StabilityReport {
    double lipschitz = 0.0;  // max over trials of output deviation / input budget
    std::vector<double> per_trial;
};

// Perturbs coarse data and details, reconstructs, and reports the empirical
// Lipschitz constant of reconstruction.
StabilityReport stability_experiment(const Sequence& seq, const PyramidScheme& scheme, int levels,
                                     const StabilityConfig& cfg);

struct ApproximationOrderFit {
    double fitted_order = 0.0;
    std::vector<double> step_sizes;
    std::vector<double> max_errors;
};

// Samples f over [t0, t1] at each step size, subdivides `depth` rounds, and
// compares against f at the emitted parameters; fits the log-log slope of the
// max error. Errors below 1e-14 short-circuit to an infinite fitted order.
ApproximationOrderFit approximation_order_experiment(
    const std::function<ManifoldPoint(double)>& f, double t0, double t1,
    const std::vector<double>& steps, const Mask& mask, const SchemeVariant& variant, int depth);

}  // namespace geomsub
