#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "geomsub/averages.hpp"
#include "geomsub/manifold.hpp"

namespace geomsub {

// Coefficients {a_j} of a stationary rule Sp_i = sum_j a_{i-Nj} p_j.
// coeffs[k] is the coefficient a_{offset+k}.
struct Mask {
    int dilation = 2;
    int offset = 0;
    std::vector<double> coeffs;
    std::string name;

    // Midpoint of the support, the symmetry center for primal/dual masks.
    double center() const { return offset + (static_cast<double>(coeffs.size()) - 1.0) / 2.0; }
};

// Throws ValidationError unless every residue class of coefficients sums to 1
// (within 1e-12), i.e. the rule computes affine averages.
void validate_affine(const Mask& mask);

// Sp_{Ni} = p_i: the 0-residue class is a lone unit coefficient at index 0.
bool is_interpolatory(const Mask& mask);

Mask chaikin_mask();
Mask midpoint_mask();
Mask four_point_mask(double omega);
// Midpoint insertion followed by k rounds of averaging; symbol 2^{-k} (1+z)^{k+1}.
Mask lane_riesenfeld_mask(int k);

// |omega| < 1/6, the range with a guaranteed manifold convergence bound.
bool four_point_guaranteed(double omega);

// Primal masks commute with index reversal about a point (a_{c-k} = a_{c+k},
// integer center); dual masks about an edge (half-integer center).
enum class MaskSymmetry { Primal, Dual, None };
MaskSymmetry mask_symmetry(const Mask& mask, double tol = 1e-12);

enum class Boundary { Periodic, Open };

struct Sequence {
    ManifoldKind kind;
    std::vector<ManifoldPoint> points;
    Boundary boundary = Boundary::Periodic;
    // Absolute index of points[0]; tracks the shrinking support of
    // open-boundary refinement. Always 0 for periodic sequences.
    std::int64_t start = 0;
};

void validate_sequence(const Sequence& seq, const std::string& where = {});

enum class BasePointRule { FloorPoint, EdgeMidpoint };

// Edge midpoints for dual/interpolatory rules, floor points otherwise.
BasePointRule canonical_basepoint(const Mask& mask);

struct GeodesicStage {
    enum class Kind { Avg, CornerCut, MidpointInsert };
    Kind kind = Kind::Avg;
    double t = 0.0;
    double s = 0.0;

    static GeodesicStage avg(double t) { return {Kind::Avg, t, 0.0}; }
    static GeodesicStage corner_cut(double t, double s) { return {Kind::CornerCut, t, s}; }
    static GeodesicStage midpoint_insert() { return {Kind::MidpointInsert, 0.0, 0.5}; }
};

// How a linear mask is realized geometrically.
struct SchemeVariant {
    enum class Tag { Linear, Frechet, LogExp, Projection, GeodesicPipeline };
    Tag tag = Tag::Linear;
    BasePointRule basepoint = BasePointRule::FloorPoint;
    std::vector<GeodesicStage> stages;  // GeodesicPipeline only
    MeanConfig mean_config;             // Frechet only

    static SchemeVariant linear() { return {}; }
    static SchemeVariant frechet(MeanConfig cfg = {}) {
        SchemeVariant v;
        v.tag = Tag::Frechet;
        v.mean_config = cfg;
        return v;
    }
    static SchemeVariant logexp(BasePointRule bp = BasePointRule::FloorPoint) {
        SchemeVariant v;
        v.tag = Tag::LogExp;
        v.basepoint = bp;
        return v;
    }
    static SchemeVariant projection() {
        SchemeVariant v;
        v.tag = Tag::Projection;
        return v;
    }
    static SchemeVariant pipeline(std::vector<GeodesicStage> stages) {
        SchemeVariant v;
        v.tag = Tag::GeodesicPipeline;
        v.stages = std::move(stages);
        return v;
    }
};

// A complete subdivision rule: a mask plus its geometric realization, or a
// pipeline of geodesic averaging stages.
struct Rule {
    std::optional<Mask> mask;
    SchemeVariant variant;

    static Rule masked(Mask m, SchemeVariant v = {});
    static Rule pipeline(std::vector<GeodesicStage> stages);

    int dilation() const;
    double center() const;
};

Sequence subdivide_once(const Sequence& seq, const Mask& mask, const SchemeVariant& variant);
Sequence subdivide_once(const Sequence& seq, const Rule& rule);

// First and last output indices whose stencil (and the variant's base points)
// stay inside the open-boundary input range [lo, hi]. Throws when no output
// index qualifies.
std::pair<std::int64_t, std::int64_t> open_output_range(const Mask& mask,
                                                        const SchemeVariant& variant,
                                                        std::int64_t lo, std::int64_t hi);

// Applies geodesic averaging / corner-cutting stages left to right. The first
// stage must be MidpointInsert or CornerCut so the composite has dilation >= 2.
Sequence geodesic_pipeline_once(const Sequence& seq, const std::vector<GeodesicStage>& stages);

// One round of the interpolatory four-point rule with tension omega.
Sequence four_point(const Sequence& seq, double omega, const SchemeVariant& variant);

// k-fold application; errors are tagged with the failing round.
Sequence subdivide(const Sequence& seq, const Rule& rule, int rounds);

struct LimitSample {
    double param;
    ManifoldPoint point;
};

// Refined points paired with limit-curve parameters. Control point p_j sits
// at parameter j; index i at depth k maps to
//   i N^{-k} - c (1 - N^{-k}) / (N - 1),
// with c the mask's support center, so samples of interpolatory (primal)
// rules land on integers and samples of dual rules on shifted dyadics.
std::vector<LimitSample> limit_samples(const Sequence& seq, const Rule& rule, int depth);

struct DerivativeSample {
    double param;
    TangentVector value;
};

// Finite-difference derivative estimates N^{rk} Delta^r (S^k p). Order 1 is
// available on every geometry (log of consecutive points); orders >= 2 are
// Euclidean only.
std::vector<DerivativeSample> derivative_samples(const Sequence& seq, const Rule& rule, int depth,
                                                 int order);

}  // namespace geomsub
