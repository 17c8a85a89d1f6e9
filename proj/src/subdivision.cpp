#include "geomsub/subdivision.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "geomsub/config.hpp"

namespace geomsub {

namespace {

constexpr double kAffineTol = 1e-12;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return floor_div(a + b - 1, b); }

std::int64_t wrap(std::int64_t i, std::int64_t n) {
    std::int64_t r = i % n;
    return r < 0 ? r + n : r;
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

struct Stencil {
    std::vector<double> weights;
    std::vector<std::int64_t> indices;  // absolute input indices
};

// Nonzero mask entries contributing to output index i.
Stencil stencil_at(const Mask& mask, std::int64_t i) {
    const std::int64_t len = static_cast<std::int64_t>(mask.coeffs.size());
    const std::int64_t jmin = ceil_div(i - mask.offset - len + 1, mask.dilation);
    const std::int64_t jmax = floor_div(i - mask.offset, mask.dilation);
    Stencil st;
    for (std::int64_t j = jmin; j <= jmax; ++j) {
        double a = mask.coeffs[static_cast<std::size_t>(i - mask.dilation * j - mask.offset)];
        if (a == 0.0) continue;
        st.weights.push_back(a);
        st.indices.push_back(j);
    }
    return st;
}

// Input indices a variant needs in addition to the stencil (base points).
void variant_extra_indices(const SchemeVariant& variant, int dilation, std::int64_t i,
                           std::vector<std::int64_t>& extra) {
    if (variant.tag != SchemeVariant::Tag::LogExp) return;
    std::int64_t f = floor_div(i, dilation);
    extra.push_back(f);
    if (variant.basepoint == BasePointRule::EdgeMidpoint) extra.push_back(f + 1);
}

const ManifoldPoint& point_at(const Sequence& seq, std::int64_t abs_index) {
    const std::int64_t n = static_cast<std::int64_t>(seq.points.size());
    std::int64_t local = abs_index - seq.start;
    if (seq.boundary == Boundary::Periodic) local = wrap(local, n);
    return seq.points[static_cast<std::size_t>(local)];
}

ManifoldPoint evaluate_output(const Sequence& seq, const Mask& mask, const SchemeVariant& variant,
                              std::int64_t i) {
    Stencil st = stencil_at(mask, i);
    WeightedData data;
    data.weights = st.weights;
    data.points.reserve(st.indices.size());
    for (std::int64_t j : st.indices) data.points.push_back(point_at(seq, j));

    // A lone unit weight reproduces its point exactly, whatever the variant.
    if (data.points.size() == 1 && std::abs(data.weights[0] - 1.0) <= kAffineTol)
        return data.points[0];

    switch (variant.tag) {
        case SchemeVariant::Tag::Linear: return affine_average(data);
        case SchemeVariant::Tag::Frechet: return frechet_mean(data, variant.mean_config);
        case SchemeVariant::Tag::LogExp: {
            std::int64_t f = floor_div(i, mask.dilation);
            ManifoldPoint base = (variant.basepoint == BasePointRule::FloorPoint)
                                     ? point_at(seq, f)
                                     : geodesic_point(point_at(seq, f), point_at(seq, f + 1), 0.5);
            return basepoint_average(base, data);
        }
        case SchemeVariant::Tag::Projection: {
            if (seq.kind.geometry != Geometry::Rotation3)
                throw ValidationError("projection variant requires Rotation3 data");
            Eigen::Matrix3d acc = Eigen::Matrix3d::Zero();
            for (std::size_t k = 0; k < data.points.size(); ++k)
                acc += data.weights[k] * rotation_matrix(data.points[k]);
            return project_to_rotation(acc);
        }
        case SchemeVariant::Tag::GeodesicPipeline:
            throw ValidationError("pipeline variant has no mask realization");
    }
    throw NumericalError("evaluate_output: unreachable");
}

template <typename F>
auto with_output_index(std::int64_t i, F&& f) {
    try {
        return f();
    } catch (CutLocusError& e) {
        if (e.index < 0) throw CutLocusError(e.what(), i);
        throw;
    } catch (NoConvergenceError& e) {
        if (e.index < 0) throw NoConvergenceError(e.what(), i);
        throw;
    }
}

Sequence stage_avg(const Sequence& seq, double t) {
    const std::size_t n = seq.points.size();
    Sequence out{seq.kind, {}, seq.boundary, seq.start};
    const std::size_t count = (seq.boundary == Boundary::Periodic) ? n : n - 1;
    out.points.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const ManifoldPoint& a = seq.points[i];
        const ManifoldPoint& b = seq.points[(i + 1) % n];
        out.points.push_back(with_output_index(
            seq.start + static_cast<std::int64_t>(i), [&] { return geodesic_point(a, b, t); }));
    }
    return out;
}

Sequence stage_corner_cut(const Sequence& seq, double t, double s) {
    const std::size_t n = seq.points.size();
    Sequence out{seq.kind, {}, seq.boundary, 2 * seq.start};
    const std::size_t edges = (seq.boundary == Boundary::Periodic) ? n : n - 1;
    out.points.reserve(2 * edges);
    for (std::size_t i = 0; i < edges; ++i) {
        const ManifoldPoint& a = seq.points[i];
        const ManifoldPoint& b = seq.points[(i + 1) % n];
        std::int64_t abs_even = 2 * (seq.start + static_cast<std::int64_t>(i));
        out.points.push_back(
            with_output_index(abs_even, [&] { return geodesic_point(a, b, t); }));
        out.points.push_back(
            with_output_index(abs_even + 1, [&] { return geodesic_point(a, b, s); }));
    }
    return out;
}

Sequence stage_midpoint_insert(const Sequence& seq) {
    const std::size_t n = seq.points.size();
    Sequence out{seq.kind, {}, seq.boundary, 2 * seq.start};
    const bool periodic = seq.boundary == Boundary::Periodic;
    out.points.reserve(periodic ? 2 * n : 2 * n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        out.points.push_back(seq.points[i]);
        if (!periodic && i + 1 == n) break;
        const ManifoldPoint& a = seq.points[i];
        const ManifoldPoint& b = seq.points[(i + 1) % n];
        std::int64_t abs_odd = 2 * (seq.start + static_cast<std::int64_t>(i)) + 1;
        out.points.push_back(
            with_output_index(abs_odd, [&] { return geodesic_point(a, b, 0.5); }));
    }
    return out;
}

int pipeline_dilation(const std::vector<GeodesicStage>& stages) {
    int d = 1;
    for (const auto& st : stages)
        if (st.kind != GeodesicStage::Kind::Avg) d *= 2;
    return d;
}

// Index offset g of the composite: output j sits at input parameter (j+g)/M.
double pipeline_shift(const std::vector<GeodesicStage>& stages) {
    double g = 0.0;
    for (const auto& st : stages) {
        switch (st.kind) {
            case GeodesicStage::Kind::Avg: g += st.t; break;
            case GeodesicStage::Kind::CornerCut: g = 2.0 * g + st.t + st.s - 0.5; break;
            case GeodesicStage::Kind::MidpointInsert: g = 2.0 * g; break;
        }
    }
    return g;
}

void validate_stages(const std::vector<GeodesicStage>& stages) {
    if (stages.empty()) throw ValidationError("geodesic pipeline: no stages");
    if (stages.front().kind == GeodesicStage::Kind::Avg)
        throw ValidationError("geodesic pipeline: must begin with MidpointInsert or CornerCut");
    for (const auto& st : stages)
        if (st.kind == GeodesicStage::Kind::CornerCut && st.s == st.t)
            throw ValidationError("geodesic pipeline: corner cut requires s != t");
}

}  // namespace

void validate_affine(const Mask& mask) {
    if (mask.dilation < 2) throw ValidationError("mask: dilation must be >= 2");
    if (mask.coeffs.empty()) throw ValidationError("mask: empty coefficients");
    for (int r = 0; r < mask.dilation; ++r) {
        double sum = 0.0;
        for (std::size_t k = 0; k < mask.coeffs.size(); ++k)
            if (wrap(mask.offset + static_cast<std::int64_t>(k), mask.dilation) == r)
                sum += mask.coeffs[k];
        if (std::abs(sum - 1.0) > check_tol(kAffineTol)) {
            std::ostringstream os;
            os << "mask" << (mask.name.empty() ? "" : " '" + mask.name + "'")
               << ": residue class " << r << " sums to " << sum << ", expected 1";
            throw ValidationError(os.str());
        }
    }
}

bool is_interpolatory(const Mask& mask) {
    for (std::size_t k = 0; k < mask.coeffs.size(); ++k) {
        std::int64_t idx = mask.offset + static_cast<std::int64_t>(k);
        if (wrap(idx, mask.dilation) != 0) continue;
        if (idx == 0) {
            if (std::abs(mask.coeffs[k] - 1.0) > kAffineTol) return false;
        } else if (mask.coeffs[k] != 0.0) {
            return false;
        }
    }
    // The unit coefficient must actually be inside the support.
    return mask.offset <= 0 && mask.offset + static_cast<std::int64_t>(mask.coeffs.size()) > 0;
}

Mask chaikin_mask() { return {2, -2, {0.25, 0.75, 0.75, 0.25}, "chaikin"}; }

Mask midpoint_mask() { return {2, -1, {0.5, 1.0, 0.5}, "midpoint"}; }

Mask four_point_mask(double omega) {
    return {2, -3, {-omega, 0.0, 0.5 + omega, 1.0, 0.5 + omega, 0.0, -omega}, "fourpoint"};
}

bool four_point_guaranteed(double omega) { return std::abs(omega) < 1.0 / 6.0; }

MaskSymmetry mask_symmetry(const Mask& mask, double tol) {
    const std::size_t len = mask.coeffs.size();
    for (std::size_t k = 0; k < len / 2; ++k)
        if (std::abs(mask.coeffs[k] - mask.coeffs[len - 1 - k]) > tol) return MaskSymmetry::None;
    // Support center offset + (len-1)/2 is an integer iff len is odd.
    return (len % 2 == 1) ? MaskSymmetry::Primal : MaskSymmetry::Dual;
}

BasePointRule canonical_basepoint(const Mask& mask) {
    if (mask.dilation != 2) return BasePointRule::FloorPoint;
    if (is_interpolatory(mask) || mask_symmetry(mask) == MaskSymmetry::Dual)
        return BasePointRule::EdgeMidpoint;
    return BasePointRule::FloorPoint;
}

Mask lane_riesenfeld_mask(int k) {
    if (k < 0) throw ValidationError("lane_riesenfeld_mask: k must be >= 0");
    // Midpoint insertion followed by k averaging rounds: 2^{-(k+1)} (1+z)^{k+2}.
    Mask m;
    m.dilation = 2;
    m.offset = -static_cast<int>((k + 3) / 2);
    m.coeffs.resize(k + 3);
    double scale = std::ldexp(1.0, -(k + 1));
    for (int j = 0; j <= k + 2; ++j) m.coeffs[j] = scale * binomial(k + 2, j);
    m.name = "lane-riesenfeld:" + std::to_string(k);
    return m;
}

void validate_sequence(const Sequence& seq, const std::string& where) {
    std::string prefix = where.empty() ? std::string("sequence") : where;
    if (seq.boundary == Boundary::Periodic && seq.points.size() < 2)
        throw ValidationError(prefix + ": periodic sequence needs at least 2 points");
    if (seq.points.empty()) throw ValidationError(prefix + ": empty");
    for (std::size_t i = 0; i < seq.points.size(); ++i) {
        if (!(seq.points[i].kind == seq.kind))
            throw ValidationError(prefix + ": point " + std::to_string(i) +
                                  " has a different kind");
        validate_point(seq.points[i], prefix + ", point " + std::to_string(i));
    }
}

Rule Rule::masked(Mask m, SchemeVariant v) {
    validate_affine(m);
    if (v.tag == SchemeVariant::Tag::GeodesicPipeline)
        throw ValidationError("Rule::masked: use Rule::pipeline for stage-based rules");
    return {std::move(m), std::move(v)};
}

Rule Rule::pipeline(std::vector<GeodesicStage> stages) {
    validate_stages(stages);
    Rule r;
    r.variant = SchemeVariant::pipeline(std::move(stages));
    return r;
}

int Rule::dilation() const {
    if (mask) return mask->dilation;
    return pipeline_dilation(variant.stages);
}

double Rule::center() const {
    if (mask) return mask->center();
    return -pipeline_shift(variant.stages);
}

Sequence geodesic_pipeline_once(const Sequence& seq, const std::vector<GeodesicStage>& stages) {
    validate_stages(stages);
    Sequence cur = seq;
    for (const auto& st : stages) {
        switch (st.kind) {
            case GeodesicStage::Kind::Avg: cur = stage_avg(cur, st.t); break;
            case GeodesicStage::Kind::CornerCut: cur = stage_corner_cut(cur, st.t, st.s); break;
            case GeodesicStage::Kind::MidpointInsert: cur = stage_midpoint_insert(cur); break;
        }
        if (cur.points.empty())
            throw ValidationError("geodesic pipeline: sequence shrank to nothing");
    }
    return cur;
}

Sequence subdivide_once(const Sequence& seq, const Mask& mask, const SchemeVariant& variant) {
    if (variant.tag == SchemeVariant::Tag::GeodesicPipeline)
        return geodesic_pipeline_once(seq, variant.stages);
    validate_affine(mask);
    if (variant.tag == SchemeVariant::Tag::LogExp &&
        variant.basepoint == BasePointRule::EdgeMidpoint && mask.dilation != 2)
        throw ValidationError("edge-midpoint base points require dilation 2");

    const std::int64_t n = static_cast<std::int64_t>(seq.points.size());
    const std::int64_t N = mask.dilation;
    Sequence out{seq.kind, {}, seq.boundary, 0};

    if (seq.boundary == Boundary::Periodic) {
        out.points.reserve(static_cast<std::size_t>(N * n));
        for (std::int64_t i = 0; i < N * n; ++i)
            out.points.push_back(
                with_output_index(i, [&] { return evaluate_output(seq, mask, variant, i); }));
        return out;
    }

    // Open boundary: keep exactly the outputs whose stencil (and base points,
    // when the variant uses them) stay inside the stored range.
    auto [first, last] = open_output_range(mask, variant, seq.start, seq.start + n - 1);
    out.start = first;
    out.points.reserve(static_cast<std::size_t>(last - first + 1));
    for (std::int64_t i = first; i <= last; ++i)
        out.points.push_back(
            with_output_index(i, [&] { return evaluate_output(seq, mask, variant, i); }));
    return out;
}

std::pair<std::int64_t, std::int64_t> open_output_range(const Mask& mask,
                                                        const SchemeVariant& variant,
                                                        std::int64_t lo, std::int64_t hi) {
    const std::int64_t N = mask.dilation;
    const std::int64_t len = static_cast<std::int64_t>(mask.coeffs.size());
    std::int64_t first = 0, last = -1;
    bool any = false;
    for (std::int64_t i = N * (lo - 1) + mask.offset; i <= N * (hi + 1) + mask.offset + len; ++i) {
        const std::int64_t jmin = ceil_div(i - mask.offset - len + 1, N);
        const std::int64_t jmax = floor_div(i - mask.offset, N);
        if (jmin < lo || jmax > hi || jmin > jmax) continue;
        std::vector<std::int64_t> extra;
        variant_extra_indices(variant, mask.dilation, i, extra);
        bool ok = true;
        for (std::int64_t e : extra)
            if (e < lo || e > hi) ok = false;
        if (!ok) continue;
        if (!any) {
            first = i;
            any = true;
        }
        last = i;
    }
    if (!any) throw ValidationError("subdivide_once: no output index has a complete stencil");
    return {first, last};
}

Sequence subdivide_once(const Sequence& seq, const Rule& rule) {
    if (rule.mask) return subdivide_once(seq, *rule.mask, rule.variant);
    return geodesic_pipeline_once(seq, rule.variant.stages);
}

Sequence four_point(const Sequence& seq, double omega, const SchemeVariant& variant) {
    return subdivide_once(seq, four_point_mask(omega), variant);
}

Sequence subdivide(const Sequence& seq, const Rule& rule, int rounds) {
    if (rounds < 0) throw ValidationError("subdivide: negative round count");
    Sequence cur = seq;
    for (int r = 0; r < rounds; ++r) {
        try {
            cur = subdivide_once(cur, rule);
        } catch (CutLocusError& e) {
            if (e.round < 0) throw CutLocusError(e.what(), e.index, r);
            throw;
        } catch (NoConvergenceError& e) {
            if (e.round < 0) throw NoConvergenceError(e.what(), e.index, r);
            throw;
        }
    }
    return cur;
}

std::vector<LimitSample> limit_samples(const Sequence& seq, const Rule& rule, int depth) {
    if (depth < 0) throw ValidationError("limit_samples: negative depth");
    Sequence refined = subdivide(seq, rule, depth);
    const double N = rule.dilation();
    const double c = rule.center();
    const double scale = std::pow(N, -depth);
    const double shift = c * (1.0 - scale) / (N - 1.0);
    std::vector<LimitSample> out;
    out.reserve(refined.points.size());
    for (std::size_t k = 0; k < refined.points.size(); ++k) {
        double idx = static_cast<double>(refined.start + static_cast<std::int64_t>(k));
        out.push_back({idx * scale - shift, refined.points[k]});
    }
    return out;
}

std::vector<DerivativeSample> derivative_samples(const Sequence& seq, const Rule& rule, int depth,
                                                 int order) {
    if (order < 1) throw ValidationError("derivative_samples: order must be >= 1");
    if (order >= 2 && seq.kind.geometry != Geometry::Euclidean)
        throw ValidationError("derivative_samples: orders >= 2 require Euclidean data");

    Sequence refined = subdivide(seq, rule, depth);
    const double N = rule.dilation();
    const double c = rule.center();
    const double scale = std::pow(N, -depth);
    const double shift = c * (1.0 - scale) / (N - 1.0);
    const double deriv_scale = std::pow(N, static_cast<double>(order) * depth);
    const std::int64_t n = static_cast<std::int64_t>(refined.points.size());
    const bool periodic = refined.boundary == Boundary::Periodic;
    const std::int64_t count = periodic ? n : n - order;
    if (count < 1) throw ValidationError("derivative_samples: too few points for this order");

    auto param_of = [&](std::int64_t i) {
        return static_cast<double>(refined.start + i) * scale - shift;
    };

    std::vector<DerivativeSample> out;
    out.reserve(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i) {
        double param = 0.5 * (param_of(i) + param_of(i + order));
        if (order == 1) {
            const ManifoldPoint& a = refined.points[static_cast<std::size_t>(i)];
            const ManifoldPoint& b = refined.points[static_cast<std::size_t>((i + 1) % n)];
            TangentVector v = with_output_index(refined.start + i, [&] { return log_point(a, b); });
            v.vec *= deriv_scale;
            out.push_back({param, std::move(v)});
        } else {
            Eigen::VectorXd acc = Eigen::VectorXd::Zero(refined.kind.coord_size());
            for (int r = 0; r <= order; ++r) {
                double sign = (order - r) % 2 == 0 ? 1.0 : -1.0;
                acc += sign * binomial(order, r) *
                       refined.points[static_cast<std::size_t>((i + r) % n)].coords;
            }
            out.push_back({param, {refined.points[static_cast<std::size_t>(i)], deriv_scale * acc}});
        }
    }
    return out;
}

}  // namespace geomsub
