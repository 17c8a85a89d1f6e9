#include "geomsub/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "geomsub/config.hpp"

namespace geomsub {

namespace {

constexpr double kRemainderTol = 1e-10;

// Kahan-compensated accumulator; norms feed pass/fail verdicts.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        double y = x - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

std::int64_t wrap(std::int64_t i, std::int64_t n) {
    std::int64_t r = i % n;
    return r < 0 ? r + n : r;
}

}  // namespace

LaurentPoly LaurentPoly::from_mask(const Mask& mask) { return {mask.offset, mask.coeffs}; }

LaurentPoly LaurentPoly::normalized(double tol) const {
    std::size_t lo = 0, hi = coeffs.size();
    while (lo < hi && std::abs(coeffs[lo]) <= tol) ++lo;
    while (hi > lo && std::abs(coeffs[hi - 1]) <= tol) --hi;
    if (lo == hi) return {0, {}};
    return {offset + static_cast<int>(lo),
            std::vector<double>(coeffs.begin() + lo, coeffs.begin() + hi)};
}

LaurentPoly laurent_mul(const LaurentPoly& a, const LaurentPoly& b) {
    if (a.coeffs.empty() || b.coeffs.empty()) return {0, {}};
    LaurentPoly out{a.offset + b.offset,
                    std::vector<double>(a.coeffs.size() + b.coeffs.size() - 1, 0.0)};
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) {
        if (a.coeffs[i] == 0.0) continue;
        for (std::size_t j = 0; j < b.coeffs.size(); ++j)
            out.coeffs[i + j] += a.coeffs[i] * b.coeffs[j];
    }
    return out;
}

LaurentDivision laurent_div(const LaurentPoly& num, const LaurentPoly& den) {
    LaurentPoly d = den.normalized();
    if (d.coeffs.empty()) throw ValidationError("laurent_div: zero divisor");
    const std::size_t ld = d.coeffs.size();
    if (num.coeffs.size() < ld) {
        double rmax = 0.0;
        for (double c : num.coeffs) rmax = std::max(rmax, std::abs(c));
        return {{0, {}}, rmax};
    }
    std::vector<double> rem = num.coeffs;
    const std::size_t lq = num.coeffs.size() - ld + 1;
    std::vector<double> q(lq, 0.0);
    const double lead = d.coeffs.back();
    for (std::size_t i = lq; i-- > 0;) {
        q[i] = rem[i + ld - 1] / lead;
        if (q[i] == 0.0) continue;
        for (std::size_t j = 0; j < ld; ++j) rem[i + j] -= q[i] * d.coeffs[j];
    }
    double rmax = 0.0;
    for (std::size_t j = 0; j + 1 < ld; ++j) rmax = std::max(rmax, std::abs(rem[j]));
    return {{num.offset - d.offset, std::move(q)}, rmax};
}

Mask derived_mask(const Mask& mask) {
    const int N = mask.dilation;
    // numerator N a(z) z^{N-1} (z - 1)
    LaurentPoly a = LaurentPoly::from_mask(mask);
    LaurentPoly zm1{0, {-1.0, 1.0}};
    LaurentPoly num = laurent_mul(a, zm1);
    num.offset += N - 1;
    for (double& c : num.coeffs) c *= N;
    // denominator z^N - 1
    LaurentPoly den{0, std::vector<double>(N + 1, 0.0)};
    den.coeffs.front() = -1.0;
    den.coeffs.back() = 1.0;

    LaurentDivision div = laurent_div(num, den);
    if (div.remainder_max > check_tol(kRemainderTol))
        throw NonZeroRemainderError(
            "derived_mask: mask is not affine-invariant (division remainder " +
            std::to_string(div.remainder_max) + ")");
    LaurentPoly q = div.quotient.normalized(0.0);
    Mask out;
    out.dilation = N;
    out.offset = q.offset;
    out.coeffs = q.coeffs;
    out.name = mask.name.empty() ? "derived" : "derived(" + mask.name + ")";
    return out;
}

double operator_norm(const Mask& mask) {
    double best = 0.0;
    for (int r = 0; r < mask.dilation; ++r) {
        KahanSum row;
        for (std::size_t k = 0; k < mask.coeffs.size(); ++k)
            if (wrap(mask.offset + static_cast<std::int64_t>(k), mask.dilation) == r)
                row.add(std::abs(mask.coeffs[k]));
        best = std::max(best, row.sum);
    }
    return best;
}

Mask mask_power(const Mask& mask, int m) {
    if (m < 1) throw ValidationError("mask_power: m must be >= 1");
    const int N = mask.dilation;
    LaurentPoly acc = LaurentPoly::from_mask(mask);
    int dilation = N;
    for (int k = 2; k <= m; ++k) {
        // a^{[k]}(z) = a^{[k-1]}(z) * a(z^{dilation})
        LaurentPoly up{mask.offset * dilation,
                       std::vector<double>((mask.coeffs.size() - 1) * dilation + 1, 0.0)};
        for (std::size_t j = 0; j < mask.coeffs.size(); ++j)
            up.coeffs[j * dilation] = mask.coeffs[j];
        acc = laurent_mul(acc, up);
        dilation *= N;
    }
    Mask out;
    out.dilation = dilation;
    out.offset = acc.offset;
    out.coeffs = acc.coeffs;
    out.name = mask.name.empty() ? "" : mask.name + "^" + std::to_string(m);
    return out;
}

ConvergenceReport contractivity_report(const Mask& mask, int max_power) {
    validate_affine(mask);
    if (max_power < 1) throw ValidationError("contractivity_report: max_power must be >= 1");
    ConvergenceReport report;
    report.max_power_tried = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int m = 1; m <= max_power; ++m) {
        Mask pm = mask_power(mask, m);
        Mask dm = derived_mask(pm);
        const double scaled = operator_norm(dm) / static_cast<double>(pm.dilation);
        report.norms.push_back({m, scaled});
        report.max_power_tried = m;
        best = std::min(best, scaled);
        if (scaled < 1.0) {
            report.gamma = scaled;
            report.holder_exponent = -std::log(scaled) / std::log(static_cast<double>(pm.dilation));
            report.verdict = ConvergenceReport::Verdict::Proven;
            return report;
        }
    }
    report.gamma = best;
    report.verdict = ConvergenceReport::Verdict::NotProven;
    return report;
}

double density(const Sequence& seq) {
    const std::size_t n = seq.points.size();
    if (n < 2) return 0.0;
    const std::size_t pairs = (seq.boundary == Boundary::Periodic) ? n : n - 1;
    double d = 0.0;
    for (std::size_t i = 0; i < pairs; ++i)
        d = std::max(d, distance(seq.points[i], seq.points[(i + 1) % n]));
    return d;
}

std::vector<double> empirical_contraction(const Sequence& seq, const Rule& rule, int rounds) {
    std::vector<double> ratios;
    ratios.reserve(rounds);
    Sequence cur = seq;
    double prev = density(cur);
    for (int k = 0; k < rounds; ++k) {
        cur = subdivide_once(cur, rule);
        double d = density(cur);
        ratios.push_back(prev > 0.0 ? d / prev : 0.0);
        prev = d;
    }
    return ratios;
}

double displacement_gap(const Sequence& seq, const Rule& rule) {
    const double delta = density(seq);
    if (delta == 0.0) return 0.0;
    Sequence refined = subdivide_once(seq, rule);
    const std::int64_t N = rule.dilation();
    const std::int64_t n = static_cast<std::int64_t>(seq.points.size());
    const std::int64_t m = static_cast<std::int64_t>(refined.points.size());
    double sup = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        const std::int64_t abs_in = seq.start + i;
        const std::int64_t abs_out = N * abs_in;
        std::int64_t local = abs_out - refined.start;
        if (refined.boundary == Boundary::Periodic) {
            local = wrap(local, m);
        } else if (local < 0 || local >= m) {
            continue;
        }
        sup = std::max(sup, distance(refined.points[static_cast<std::size_t>(local)],
                                     seq.points[static_cast<std::size_t>(i)]));
    }
    return sup / delta;
}

}  // namespace geomsub
