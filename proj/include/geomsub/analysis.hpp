#pragma once

#include <optional>
#include <vector>

#include "geomsub/subdivision.hpp"

namespace geomsub {

// Laurent polynomial sum_k coeffs[k] z^{offset+k}.
struct LaurentPoly {
    int offset = 0;
    std::vector<double> coeffs;

    static LaurentPoly from_mask(const Mask& mask);
    // Strips leading/trailing (near-)zero coefficients.
    LaurentPoly normalized(double tol = 0.0) const;
};

LaurentPoly laurent_mul(const LaurentPoly& a, const LaurentPoly& b);

struct LaurentDivision {
    LaurentPoly quotient;
    double remainder_max;  // max |coefficient| of the remainder
};

// Exact long division; the divisor's leading coefficient must be nonzero.
LaurentDivision laurent_div(const LaurentPoly& num, const LaurentPoly& den);

// Derived rule a*(z) = N a(z) z^{N-1} (z-1) / (z^N - 1), satisfying
// S* Delta = N Delta S. Throws NonZeroRemainderError when the mask is not
// affine-invariant (division leaves a remainder above 1e-10).
Mask derived_mask(const Mask& mask);

// max_i sum_j |a_{i-Nj}|, the sup-norm of S as an operator on sequences.
double operator_norm(const Mask& mask);

// Mask of S^m (dilation N^m), by coefficient convolution.
Mask mask_power(const Mask& mask, int m);

struct ConvergenceReport {
    struct Entry {
        int power;
        double scaled_norm;  // N^{-m} ||S^{*m}||
    };
    enum class Verdict { Proven, NotProven };

    std::vector<Entry> norms;
    double gamma = 0.0;  // best contractivity factor found; < 1 iff Proven
    std::optional<double> holder_exponent;
    Verdict verdict = Verdict::NotProven;
    int max_power_tried = 0;
};

// Scans powers m = 1.. until N^{-m} ||S^{*m}|| < 1 (then the limit exists and
// is Hoelder continuous with exponent -log gamma / log N^m) or max_power is
// exhausted.
ConvergenceReport contractivity_report(const Mask& mask, int max_power = 6);

// delta(p) = sup of consecutive geodesic distances (wraps when periodic).
double density(const Sequence& seq);

// Measured ratios delta(S^k p) / delta(S^{k-1} p), k = 1..rounds; 0/0 -> 0.
std::vector<double> empirical_contraction(const Sequence& seq, const Rule& rule, int rounds);

// sup_i d(Sp_{Ni}, p_i) / delta(p); 0 when delta(p) = 0.
double displacement_gap(const Sequence& seq, const Rule& rule);

}  // namespace geomsub
