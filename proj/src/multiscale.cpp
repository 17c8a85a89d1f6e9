#include "geomsub/multiscale.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace geomsub {

namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) == (b < 0))) ++q;
    return q;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

std::int64_t ipow(std::int64_t base, int e) {
    std::int64_t r = 1;
    while (e-- > 0) r *= base;
    return r;
}

// Every N-th point, keeping absolute indices divisible by N.
Sequence decimate(const Sequence& seq, int N) {
    Sequence out{seq.kind, {}, seq.boundary, 0};
    const std::int64_t n = static_cast<std::int64_t>(seq.points.size());
    if (seq.boundary == Boundary::Periodic) {
        if (n % N != 0) throw LengthNotDivisibleError("decimate: length not divisible by N");
        for (std::int64_t i = 0; i < n; i += N) out.points.push_back(seq.points[i]);
        return out;
    }
    const std::int64_t first = ceil_div(seq.start, N);
    const std::int64_t last = floor_div(seq.start + n - 1, N);
    out.start = first;
    for (std::int64_t i = first; i <= last; ++i)
        out.points.push_back(seq.points[static_cast<std::size_t>(N * i - seq.start)]);
    return out;
}

const ManifoldPoint& at_abs(const Sequence& seq, std::int64_t abs_index) {
    std::int64_t local = abs_index - seq.start;
    const std::int64_t n = static_cast<std::int64_t>(seq.points.size());
    if (seq.boundary == Boundary::Periodic) {
        local %= n;
        if (local < 0) local += n;
    }
    return seq.points[static_cast<std::size_t>(local)];
}

double slope_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

TangentVector random_tangent(const ManifoldPoint& base, double norm, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    TangentVector v = zero_tangent(base);
    for (Eigen::Index i = 0; i < v.vec.size(); ++i) v.vec[i] = gauss(rng);
    if (base.kind.geometry == Geometry::Sphere)
        v.vec -= v.vec.dot(base.coords) * base.coords;
    double cur = tangent_norm(v);
    if (cur < 1e-300) return zero_tangent(base);
    v.vec *= norm / cur;
    return v;
}

}  // namespace

PyramidScheme PyramidScheme::interpolatory(Mask m, SchemeVariant v) {
    if (!is_interpolatory(m))
        throw MaskNotInterpolatoryError("pyramid scheme: mask is not interpolatory");
    PyramidScheme s;
    s.kind = Kind::Interpolatory;
    s.mask = std::move(m);
    s.variant = std::move(v);
    return s;
}

Pyramid haar_decompose(const Sequence& seq, int levels) {
    validate_sequence(seq, "haar_decompose");
    if (levels < 1) throw ValidationError("haar_decompose: levels must be >= 1");
    const std::int64_t n = static_cast<std::int64_t>(seq.points.size());
    if (n % ipow(2, levels) != 0)
        throw LengthNotDivisibleError("haar_decompose: length " + std::to_string(n) +
                                      " not divisible by 2^" + std::to_string(levels));
    Pyramid pyr;
    pyr.scheme = PyramidScheme::haar();
    pyr.original_length = n;
    pyr.boundary = seq.boundary;
    pyr.details.resize(levels);

    Sequence cur = seq;
    cur.start = 0;
    for (int j = levels; j >= 1; --j) {
        const std::size_t half = cur.points.size() / 2;
        Sequence mids{cur.kind, {}, cur.boundary, 0};
        mids.points.reserve(half);
        DetailLevel dl;
        dl.vecs.reserve(half);
        for (std::size_t i = 0; i < half; ++i) {
            const ManifoldPoint& a = cur.points[2 * i];
            const ManifoldPoint& b = cur.points[2 * i + 1];
            ManifoldPoint m = geodesic_point(a, b, 0.5);
            dl.vecs.push_back(log_point(m, a));
            mids.points.push_back(std::move(m));
        }
        pyr.details[j - 1] = std::move(dl);
        cur = std::move(mids);
    }
    pyr.coarse = std::move(cur);
    return pyr;
}

Sequence haar_reconstruct(const Pyramid& pyr) {
    if (pyr.scheme.kind != PyramidScheme::Kind::Haar)
        throw ValidationError("haar_reconstruct: pyramid scheme is not Haar");
    Sequence cur = pyr.coarse;
    for (int j = 1; j <= pyr.levels(); ++j) {
        const DetailLevel& dl = pyr.details[j - 1];
        if (dl.vecs.size() != cur.points.size())
            throw ValidationError("haar_reconstruct: level " + std::to_string(j) +
                                  " has " + std::to_string(dl.vecs.size()) + " details for " +
                                  std::to_string(cur.points.size()) + " points");
        Sequence fine{cur.kind, {}, cur.boundary, 0};
        fine.points.reserve(2 * cur.points.size());
        for (std::size_t i = 0; i < cur.points.size(); ++i) {
            // Transport unconditionally: after thresholding or edits the stored
            // base may no longer match the current midpoint.
            TangentVector v = parallel_transport(dl.vecs[i], cur.points[i]);
            fine.points.push_back(exp_point(cur.points[i], v));
            v.vec = -v.vec;
            fine.points.push_back(exp_point(cur.points[i], v));
        }
        cur = std::move(fine);
    }
    return cur;
}

Pyramid wavelet_decompose(const Sequence& seq, const Mask& mask, const SchemeVariant& variant,
                          int levels) {
    validate_sequence(seq, "wavelet_decompose");
    if (levels < 1) throw ValidationError("wavelet_decompose: levels must be >= 1");
    if (!is_interpolatory(mask))
        throw MaskNotInterpolatoryError("wavelet_decompose: mask is not interpolatory");
    const std::int64_t N = mask.dilation;
    const std::int64_t n = static_cast<std::int64_t>(seq.points.size());
    const std::int64_t block = ipow(N, levels);
    if (seq.boundary == Boundary::Periodic ? (n % block != 0) : ((n - 1) % block != 0))
        throw LengthNotDivisibleError(
            "wavelet_decompose: length " + std::to_string(n) + " incompatible with " +
            std::to_string(levels) + " levels of dilation " + std::to_string(N));

    Pyramid pyr;
    pyr.scheme = PyramidScheme::interpolatory(mask, variant);
    pyr.original_length = n;
    pyr.boundary = seq.boundary;
    pyr.details.resize(levels);

    Sequence cur = seq;
    for (int j = levels; j >= 1; --j) {
        Sequence coarse = decimate(cur, static_cast<int>(N));
        Sequence pred = subdivide_once(coarse, mask, variant);
        const std::int64_t lo = std::max(pred.start, cur.start);
        const std::int64_t hi = std::min(pred.start + static_cast<std::int64_t>(pred.points.size()),
                                         cur.start + static_cast<std::int64_t>(cur.points.size())) -
                                1;
        if (hi < lo) throw ValidationError("wavelet_decompose: prediction range is empty");
        DetailLevel dl;
        dl.start = (pyr.boundary == Boundary::Periodic) ? 0 : lo;
        dl.vecs.reserve(static_cast<std::size_t>(hi - lo + 1));
        for (std::int64_t i = lo; i <= hi; ++i) {
            const ManifoldPoint& predicted = at_abs(pred, i);
            if (i % N == 0) {
                // Redundant zero kept on purpose: Q does not forget.
                dl.vecs.push_back(zero_tangent(predicted));
            } else {
                dl.vecs.push_back(log_point(predicted, at_abs(cur, i)));
            }
        }
        pyr.details[j - 1] = std::move(dl);
        cur = std::move(coarse);
    }
    pyr.coarse = std::move(cur);

    // Open boundaries shrink during reconstruction; details outside the
    // reconstructable range have no recoverable base point, so drop them now.
    if (pyr.boundary == Boundary::Open) {
        std::int64_t lo = pyr.coarse.start;
        std::int64_t hi = lo + static_cast<std::int64_t>(pyr.coarse.points.size()) - 1;
        for (int j = 1; j <= levels; ++j) {
            auto [plo, phi] = open_output_range(mask, variant, lo, hi);
            DetailLevel& dl = pyr.details[j - 1];
            const std::int64_t dhi = dl.start + static_cast<std::int64_t>(dl.vecs.size()) - 1;
            const std::int64_t keep_lo = std::max(dl.start, plo);
            const std::int64_t keep_hi = std::min(dhi, phi);
            if (keep_lo > keep_hi)
                throw ValidationError("wavelet_decompose: too few points for " +
                                      std::to_string(levels) + " levels");
            dl.vecs.erase(dl.vecs.begin() + static_cast<std::ptrdiff_t>(keep_hi + 1 - dl.start),
                          dl.vecs.end());
            dl.vecs.erase(dl.vecs.begin(),
                          dl.vecs.begin() + static_cast<std::ptrdiff_t>(keep_lo - dl.start));
            dl.start = keep_lo;
            lo = keep_lo;
            hi = keep_hi;
        }
    }
    return pyr;
}

Sequence wavelet_reconstruct(const Pyramid& pyr) {
    if (pyr.scheme.kind != PyramidScheme::Kind::Interpolatory)
        throw ValidationError("wavelet_reconstruct: pyramid scheme is not interpolatory");
    Sequence cur = pyr.coarse;
    for (int j = 1; j <= pyr.levels(); ++j) {
        const DetailLevel& dl = pyr.details[j - 1];
        Sequence pred = subdivide_once(cur, pyr.scheme.mask, pyr.scheme.variant);
        const std::int64_t dl_end = dl.start + static_cast<std::int64_t>(dl.vecs.size()) - 1;
        Sequence fine{cur.kind, {}, cur.boundary, 0};
        if (pyr.boundary == Boundary::Periodic) {
            if (dl.vecs.size() != pred.points.size())
                throw ValidationError("wavelet_reconstruct: level " + std::to_string(j) +
                                      " detail count mismatch");
        } else {
            fine.start = std::max(pred.start, dl.start);
            std::int64_t pred_end =
                pred.start + static_cast<std::int64_t>(pred.points.size()) - 1;
            if (fine.start > std::min(pred_end, dl_end))
                throw ValidationError("wavelet_reconstruct: level " + std::to_string(j) +
                                      " has no overlap between details and prediction");
        }
        const std::int64_t count =
            (pyr.boundary == Boundary::Periodic)
                ? static_cast<std::int64_t>(pred.points.size())
                : std::min(pred.start + static_cast<std::int64_t>(pred.points.size()) - 1, dl_end) -
                      fine.start + 1;
        fine.points.reserve(static_cast<std::size_t>(count));
        for (std::int64_t k = 0; k < count; ++k) {
            const std::int64_t i = fine.start + k;
            const ManifoldPoint& base = at_abs(pred, i);
            const TangentVector& q =
                dl.vecs[static_cast<std::size_t>(pyr.boundary == Boundary::Periodic
                                                     ? i
                                                     : i - dl.start)];
            TangentVector v = parallel_transport(q, base);
            fine.points.push_back(exp_point(base, v));
        }
        cur = std::move(fine);
    }
    return cur;
}

Pyramid threshold(const Pyramid& pyr, const ThresholdPolicy& policy, ThresholdStats* stats) {
    Pyramid out = pyr;
    ThresholdStats st;
    auto zero_entry = [&](TangentVector& q) {
        st.dropped_energy += tangent_norm(q) * tangent_norm(q);
        ++st.dropped;
        q = zero_tangent(q.base);
    };

    if (policy.mode == ThresholdPolicy::Mode::Hard) {
        if (policy.tau < 0.0) throw ValidationError("threshold: tau must be >= 0");
        for (int j = 1; j <= out.levels(); ++j) {
            const double cut = policy.tau * std::pow(policy.per_level_scale, j);
            for (TangentVector& q : out.details[j - 1].vecs) {
                if (tangent_norm(q) < cut)
                    zero_entry(q);
                else
                    ++st.kept;
            }
        }
    } else {
        if (!(policy.fraction > 0.0 && policy.fraction <= 1.0))
            throw ValidationError("threshold: fraction must be in (0, 1]");
        struct Ref {
            int level;
            std::size_t index;
            double norm;
        };
        std::vector<Ref> refs;
        for (int j = 1; j <= out.levels(); ++j)
            for (std::size_t i = 0; i < out.details[j - 1].vecs.size(); ++i)
                refs.push_back({j, i, tangent_norm(out.details[j - 1].vecs[i])});
        std::size_t keep =
            static_cast<std::size_t>(std::ceil(policy.fraction * static_cast<double>(refs.size())));
        std::stable_sort(refs.begin(), refs.end(), [](const Ref& a, const Ref& b) {
            return a.norm > b.norm;
        });
        for (std::size_t r = 0; r < refs.size(); ++r) {
            TangentVector& q = out.details[refs[r].level - 1].vecs[refs[r].index];
            if (r < keep)
                ++st.kept;
            else
                zero_entry(q);
        }
    }
    if (stats) *stats = st;
    return out;
}

RegularityEstimate estimate_regularity(const Pyramid& pyr) {
    RegularityEstimate est;
    est.per_level_max.reserve(pyr.levels());
    for (const DetailLevel& dl : pyr.details) {
        double m = 0.0;
        for (const TangentVector& q : dl.vecs) m = std::max(m, tangent_norm(q));
        est.per_level_max.push_back(m);
    }
    // Levels 1 and 2 are pre-asymptotic; the theorem speaks about j -> inf.
    std::vector<double> xs, ys;
    for (int j = 3; j <= pyr.levels(); ++j) {
        double m = est.per_level_max[j - 1];
        if (m < 1e-300) continue;
        xs.push_back(static_cast<double>(j));
        ys.push_back(std::log(m));
    }
    if (xs.size() < 2) {
        est.alpha_hat = std::numeric_limits<double>::infinity();
        return est;
    }
    est.alpha_hat = -slope_fit(xs, ys) / std::log(static_cast<double>(pyr.scheme.dilation()));
    return est;
}

StabilityReport stability_experiment(const Sequence& seq, const PyramidScheme& scheme, int levels,
                                     const StabilityConfig& cfg) {
    if (cfg.trials < 1) throw ValidationError("stability_experiment: trials must be >= 1");
    Pyramid pyr = (scheme.kind == PyramidScheme::Kind::Haar)
                      ? haar_decompose(seq, levels)
                      : wavelet_decompose(seq, scheme.mask, scheme.variant, levels);
    auto reconstruct = [&](const Pyramid& p) {
        return scheme.kind == PyramidScheme::Kind::Haar ? haar_reconstruct(p)
                                                        : wavelet_reconstruct(p);
    };
    Sequence reference = reconstruct(pyr);

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    StabilityReport report;
    report.per_trial.reserve(cfg.trials);
    for (int t = 0; t < cfg.trials; ++t) {
        Pyramid mod = pyr;
        double budget = 0.0;
        double coarse_sup = 0.0;
        for (ManifoldPoint& p : mod.coarse.points) {
            double r = cfg.eps * unit(rng);
            p = exp_point(p, random_tangent(p, r, rng));
            coarse_sup = std::max(coarse_sup, r);
        }
        budget += coarse_sup;
        for (int j = 1; j <= mod.levels(); ++j) {
            double bound = cfg.eps * std::pow(cfg.mu, j);
            double level_sup = 0.0;
            for (TangentVector& q : mod.details[j - 1].vecs) {
                double r = bound * unit(rng);
                q.vec += random_tangent(q.base, r, rng).vec;
                level_sup = std::max(level_sup, r);
            }
            budget += level_sup;
        }
        Sequence out = reconstruct(mod);
        if (out.points.size() != reference.points.size())
            throw NumericalError("stability_experiment: reconstruction changed length");
        double dev = 0.0;
        for (std::size_t i = 0; i < out.points.size(); ++i)
            dev = std::max(dev, distance(out.points[i], reference.points[i]));
        double ratio = budget > 0.0 ? dev / budget : 0.0;
        report.per_trial.push_back(ratio);
        report.lipschitz = std::max(report.lipschitz, ratio);
    }
    return report;
}

ApproximationOrderFit approximation_order_experiment(
    const std::function<ManifoldPoint(double)>& f, double t0, double t1,
    const std::vector<double>& steps, const Mask& mask, const SchemeVariant& variant, int depth) {
    if (steps.size() < 2)
        throw ValidationError("approximation_order_experiment: need at least 2 step sizes");
    ApproximationOrderFit fit;
    Rule rule = Rule::masked(mask, variant);
    for (double h : steps) {
        const auto count = static_cast<std::int64_t>(std::llround((t1 - t0) / h)) + 1;
        if (count < 2) throw ValidationError("approximation_order_experiment: step too large");
        Sequence seq;
        seq.boundary = Boundary::Open;
        seq.points.reserve(static_cast<std::size_t>(count));
        for (std::int64_t i = 0; i < count; ++i) seq.points.push_back(f(t0 + h * i));
        seq.kind = seq.points[0].kind;
        double err = 0.0;
        for (const LimitSample& s : limit_samples(seq, rule, depth))
            err = std::max(err, distance(s.point, f(t0 + h * s.param)));
        fit.step_sizes.push_back(h);
        fit.max_errors.push_back(err);
    }
    bool all_tiny = std::all_of(fit.max_errors.begin(), fit.max_errors.end(),
                                [](double e) { return e < 1e-14; });
    if (all_tiny) {
        fit.fitted_order = std::numeric_limits<double>::infinity();
        return fit;
    }
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < fit.step_sizes.size(); ++i) {
        if (fit.max_errors[i] < 1e-300) continue;
        xs.push_back(std::log(fit.step_sizes[i]));
        ys.push_back(std::log(fit.max_errors[i]));
    }
    fit.fitted_order = xs.size() >= 2 ? slope_fit(xs, ys)
                                      : std::numeric_limits<double>::infinity();
    return fit;
}

}  // namespace geomsub
