#pragma once

#include <Eigen/Dense>

#include <initializer_list>
#include <random>

#include "geomsub/analysis.hpp"
#include "geomsub/manifold.hpp"
#include "geomsub/subdivision.hpp"

namespace testsupport {

using namespace geomsub;

inline ManifoldPoint euclid(std::initializer_list<double> xs) {
    Eigen::VectorXd v(xs.size());
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return {ManifoldKind::euclidean(static_cast<int>(xs.size())), v};
}

inline ManifoldPoint sphere3(double x, double y, double z) {
    Eigen::Vector3d v(x, y, z);
    v.normalize();
    return {ManifoldKind::sphere(2), v};
}

inline ManifoldPoint spd_from(const Eigen::MatrixXd& m) {
    return {ManifoldKind::spd(static_cast<int>(m.rows())), pack_sym(m)};
}

inline TangentVector tangent(const ManifoldPoint& base, std::initializer_list<double> xs) {
    Eigen::VectorXd v(xs.size());
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return {base, v};
}

inline Eigen::VectorXd gaussian_vector(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = g(rng);
    return v;
}

inline ManifoldPoint random_point(const ManifoldKind& kind, std::mt19937_64& rng) {
    switch (kind.geometry) {
        case Geometry::Euclidean:
            return {kind, gaussian_vector(kind.dim, rng)};
        case Geometry::Sphere: {
            Eigen::VectorXd v = gaussian_vector(kind.dim + 1, rng);
            v.normalize();
            return {kind, v};
        }
        case Geometry::Rotation3: {
            Eigen::VectorXd v = gaussian_vector(4, rng);
            v.normalize();
            if (v[0] < 0) v = -v;
            return {kind, v};
        }
        case Geometry::Spd: {
            const int n = kind.dim;
            Eigen::MatrixXd a(n, n);
            std::normal_distribution<double> g(0.0, 1.0);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) a(i, j) = g(rng);
            Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
            Eigen::MatrixXd q = qr.householderQ();
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            Eigen::VectorXd l(n);
            for (int i = 0; i < n; ++i) l[i] = std::exp(u(rng));
            return spd_from(q * l.asDiagonal() * q.transpose());
        }
    }
    throw std::logic_error("random_point");
}

inline TangentVector random_tangent(const ManifoldPoint& base, double norm,
                                    std::mt19937_64& rng) {
    TangentVector v = zero_tangent(base);
    v.vec = gaussian_vector(static_cast<int>(v.vec.size()), rng);
    if (base.kind.geometry == Geometry::Sphere)
        v.vec -= v.vec.dot(base.coords) * base.coords;
    double cur = tangent_norm(v);
    if (cur < 1e-12) return zero_tangent(base);
    v.vec *= norm / cur;
    return v;
}

// Smooth-ish random loop (or open arc) near a random base point.
inline Sequence random_sequence(const ManifoldKind& kind, int n, Boundary boundary,
                                double spread, std::mt19937_64& rng) {
    Sequence seq;
    seq.kind = kind;
    seq.boundary = boundary;
    ManifoldPoint base = random_point(kind, rng);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < n; ++i)
        seq.points.push_back(exp_point(base, random_tangent(base, spread * u(rng), rng)));
    return seq;
}

// Contracts the sequence toward its first point until density <= target.
inline Sequence shrink_to_density(Sequence seq, double target) {
    while (density(seq) > target) {
        const ManifoldPoint center = seq.points.front();
        for (ManifoldPoint& p : seq.points) p = geodesic_point(center, p, 0.8);
    }
    return seq;
}

}  // namespace testsupport
