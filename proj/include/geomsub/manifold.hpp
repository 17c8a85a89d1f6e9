#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <string>

#include "geomsub/errors.hpp"

namespace geomsub {

enum class Geometry { Euclidean, Sphere, Rotation3, Spd };

std::string geometry_name(Geometry g);

// Tag for one of the supported geometries.
//   Euclidean(d) : points in R^d,               coords length d
//   Sphere(d)    : unit vectors in R^{d+1},     coords length d+1
//   Rotation3    : unit quaternions [w,x,y,z],  coords length 4
//   Spd(n)       : positive definite n x n,     coords = packed upper triangle
struct ManifoldKind {
    Geometry geometry = Geometry::Euclidean;
    int dim = 1;  // d for Euclidean/Sphere, 3 for Rotation3, n for Spd

    static ManifoldKind euclidean(int d) { return {Geometry::Euclidean, d}; }
    static ManifoldKind sphere(int d) { return {Geometry::Sphere, d}; }
    static ManifoldKind rotation3() { return {Geometry::Rotation3, 3}; }
    static ManifoldKind spd(int n) { return {Geometry::Spd, n}; }

    int coord_size() const;
    // Dimension of the tangent-space chart used by TangentVector::vec.
    int tangent_size() const;
    bool operator==(const ManifoldKind&) const = default;
    std::string name() const;
};

struct ManifoldPoint {
    ManifoldKind kind;
    Eigen::VectorXd coords;
};

// Tangent vector attached to a base point. The chart per geometry:
// Euclidean: free vector; Sphere: ambient vector orthogonal to base;
// Rotation3: rotation vector (angle * axis) of the relative rotation,
// left-trivialized; Spd: packed symmetric matrix.
struct TangentVector {
    ManifoldPoint base;
    Eigen::VectorXd vec;
};

// Throws ValidationError unless p satisfies its kind's invariant
// (unit norm within 1e-12 for Sphere/Rotation3, symmetric positive
// definite for Spd). `where` is prepended to diagnostics.
void validate_point(const ManifoldPoint& p, const std::string& where = {});

TangentVector zero_tangent(const ManifoldPoint& p);

// Riemannian norm of v at its base point.
double tangent_norm(const TangentVector& v);

// p (+) v, the exponential map. Requires v.base == p.
ManifoldPoint exp_point(const ManifoldPoint& p, const TangentVector& v);

// q (-) p, the logarithm map; throws CutLocusError at/beyond the cut locus.
TangentVector log_point(const ManifoldPoint& p, const ManifoldPoint& q);

// Geodesic distance.
double distance(const ManifoldPoint& p, const ManifoldPoint& q);

// Moves v to the tangent space at `to`: Levi-Civita transport along the
// shortest geodesic (Euclidean, Sphere, Spd) resp. left translation
// (Rotation3). Norm-preserving.
TangentVector parallel_transport(const TangentVector& v, const ManifoldPoint& to);

// Geodesic point p (+) t * (q (-) p).
ManifoldPoint geodesic_point(const ManifoldPoint& p, const ManifoldPoint& q, double t);

// Polar factor (g g^T)^{-1/2} g of an invertible 3x3 matrix with positive
// determinant, returned as a Rotation3 point. O_3-equivariant on both sides.
ManifoldPoint project_to_rotation(const Eigen::Matrix3d& g);

// Rotation3 <-> 3x3 matrix conversions.
Eigen::Matrix3d rotation_matrix(const ManifoldPoint& p);
ManifoldPoint rotation_from_matrix(const Eigen::Matrix3d& r);

// Packed symmetric storage (row-major upper triangle).
Eigen::MatrixXd unpack_sym(const Eigen::VectorXd& packed, int n);
Eigen::VectorXd pack_sym(const Eigen::MatrixXd& m);

}  // namespace geomsub
