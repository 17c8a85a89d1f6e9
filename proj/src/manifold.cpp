#include "geomsub/manifold.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "geomsub/config.hpp"

namespace geomsub {

namespace {

constexpr double kUnitTol = 1e-12;
constexpr double kSymTol = 1e-12;
// Logs closer to the cut locus than this are refused rather than branched.
constexpr double kCutMargin = 1e-6;

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string describe(const ManifoldKind& k) { return k.name(); }

bool same_coords(const ManifoldPoint& p, const ManifoldPoint& q) {
    return p.coords.size() == q.coords.size() &&
           std::equal(p.coords.data(), p.coords.data() + p.coords.size(), q.coords.data());
}

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
    throw ValidationError(where.empty() ? msg : where + ": " + msg);
}

void require_same_kind(const ManifoldPoint& p, const ManifoldPoint& q, const char* op) {
    if (!(p.kind == q.kind)) {
        std::ostringstream os;
        os << op << ": kind mismatch (" << describe(p.kind) << " vs " << describe(q.kind) << ")";
        throw ValidationError(os.str());
    }
}

void require_base(const ManifoldPoint& p, const TangentVector& v, const char* op) {
    if (!(v.base.kind == p.kind) || v.base.coords.size() != p.coords.size() ||
        (v.base.coords - p.coords).cwiseAbs().maxCoeff() > check_tol(kUnitTol)) {
        throw ValidationError(std::string(op) + ": tangent vector base does not match the point");
    }
}

Eigen::Quaterniond as_quat(const ManifoldPoint& p) {
    // coords stored [w, x, y, z]
    return Eigen::Quaterniond(p.coords[0], p.coords[1], p.coords[2], p.coords[3]);
}

ManifoldPoint from_quat(const Eigen::Quaterniond& q) {
    ManifoldPoint p{ManifoldKind::rotation3(), VectorXd(4)};
    p.coords << q.w(), q.x(), q.y(), q.z();
    return p;
}

// sin(x)/x, stable near zero.
double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

struct SymEig {
    MatrixXd q;
    VectorXd l;
};

SymEig sym_eig(const MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
    if (es.info() != Eigen::Success) throw NumericalError("symmetric eigendecomposition failed");
    return {es.eigenvectors(), es.eigenvalues()};
}

MatrixXd apply_spectral(const MatrixXd& m, bool require_positive, double (*f)(double),
                        const char* what) {
    SymEig e = sym_eig(m);
    for (Eigen::Index i = 0; i < e.l.size(); ++i) {
        if (require_positive && e.l[i] <= 0.0)
            throw ValidationError(std::string(what) + ": matrix is not positive definite");
        e.l[i] = f(e.l[i]);
    }
    return e.q * e.l.asDiagonal() * e.q.transpose();
}

MatrixXd exp_sym(const MatrixXd& m) {
    return apply_spectral(m, false, [](double x) { return std::exp(x); }, "exp_sym");
}
MatrixXd log_sym(const MatrixXd& m) {
    return apply_spectral(m, true, [](double x) { return std::log(x); }, "log_sym");
}
MatrixXd sqrt_sym(const MatrixXd& m) {
    return apply_spectral(m, true, [](double x) { return std::sqrt(x); }, "sqrt_sym");
}

MatrixXd symmetrize(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

MatrixXd spd_matrix(const ManifoldPoint& p) { return unpack_sym(p.coords, p.kind.dim); }

}  // namespace

std::string geometry_name(Geometry g) {
    switch (g) {
        case Geometry::Euclidean: return "euclidean";
        case Geometry::Sphere: return "sphere";
        case Geometry::Rotation3: return "so3";
        case Geometry::Spd: return "spd";
    }
    return "?";
}

int ManifoldKind::coord_size() const {
    switch (geometry) {
        case Geometry::Euclidean: return dim;
        case Geometry::Sphere: return dim + 1;
        case Geometry::Rotation3: return 4;
        case Geometry::Spd: return dim * (dim + 1) / 2;
    }
    return 0;
}

int ManifoldKind::tangent_size() const {
    switch (geometry) {
        case Geometry::Euclidean: return dim;
        case Geometry::Sphere: return dim + 1;  // ambient, orthogonal to base
        case Geometry::Rotation3: return 3;
        case Geometry::Spd: return dim * (dim + 1) / 2;
    }
    return 0;
}

std::string ManifoldKind::name() const {
    std::ostringstream os;
    os << geometry_name(geometry);
    if (geometry == Geometry::Euclidean || geometry == Geometry::Sphere ||
        geometry == Geometry::Spd)
        os << "(" << dim << ")";
    return os.str();
}

Eigen::MatrixXd unpack_sym(const VectorXd& packed, int n) {
    MatrixXd m(n, n);
    int k = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            m(i, j) = packed[k];
            m(j, i) = packed[k];
            ++k;
        }
    return m;
}

Eigen::VectorXd pack_sym(const MatrixXd& m) {
    const int n = static_cast<int>(m.rows());
    VectorXd packed(n * (n + 1) / 2);
    int k = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) packed[k++] = 0.5 * (m(i, j) + m(j, i));
    return packed;
}

void validate_point(const ManifoldPoint& p, const std::string& where) {
    if (p.kind.dim < 1) fail(where, "dimension must be positive");
    if (p.coords.size() != p.kind.coord_size()) {
        std::ostringstream os;
        os << "expected " << p.kind.coord_size() << " coordinates for " << describe(p.kind)
           << ", got " << p.coords.size();
        fail(where, os.str());
    }
    if (!p.coords.allFinite()) fail(where, "non-finite coordinate");
    switch (p.kind.geometry) {
        case Geometry::Euclidean: break;
        case Geometry::Sphere:
        case Geometry::Rotation3: {
            double n = p.coords.norm();
            if (std::abs(n - 1.0) > check_tol(kUnitTol))
                fail(where, describe(p.kind) + " point is not a unit vector (norm " +
                                std::to_string(n) + ")");
            break;
        }
        case Geometry::Spd: {
            MatrixXd m = spd_matrix(p);
            SymEig e = sym_eig(m);
            if (e.l.minCoeff() <= 0.0)
                fail(where, "spd point has a non-positive eigenvalue (" +
                                std::to_string(e.l.minCoeff()) + ")");
            break;
        }
    }
}

TangentVector zero_tangent(const ManifoldPoint& p) {
    return {p, VectorXd::Zero(p.kind.tangent_size())};
}

double tangent_norm(const TangentVector& v) {
    switch (v.base.kind.geometry) {
        case Geometry::Euclidean:
        case Geometry::Sphere:
        case Geometry::Rotation3: return v.vec.norm();
        case Geometry::Spd: {
            const int n = v.base.kind.dim;
            MatrixXd a = spd_matrix(v.base);
            MatrixXd s = sqrt_sym(a);
            MatrixXd si = s.llt().solve(MatrixXd::Identity(n, n));
            return (si * unpack_sym(v.vec, n) * si.transpose()).norm();
        }
    }
    return 0.0;
}

ManifoldPoint exp_point(const ManifoldPoint& p, const TangentVector& v) {
    require_base(p, v, "exp_point");
    if (v.vec.isZero(0.0)) return p;
    switch (p.kind.geometry) {
        case Geometry::Euclidean: return {p.kind, p.coords + v.vec};
        case Geometry::Sphere: {
            double theta = v.vec.norm();
            VectorXd r = std::cos(theta) * p.coords + sinc(theta) * v.vec;
            r.normalize();
            return {p.kind, r};
        }
        case Geometry::Rotation3: {
            double theta = v.vec.norm();
            double h = 0.5 * theta;
            Eigen::Vector3d im = 0.5 * sinc(h) * Eigen::Vector3d(v.vec[0], v.vec[1], v.vec[2]);
            Eigen::Quaterniond dq(std::cos(h), im.x(), im.y(), im.z());
            Eigen::Quaterniond r = as_quat(p) * dq;
            r.normalize();
            return from_quat(r);
        }
        case Geometry::Spd: {
            const int n = p.kind.dim;
            MatrixXd a = spd_matrix(p);
            MatrixXd s = sqrt_sym(a);
            MatrixXd si = s.llt().solve(MatrixXd::Identity(n, n));
            MatrixXd w = symmetrize(si * unpack_sym(v.vec, n) * si.transpose());
            MatrixXd r = symmetrize(s * exp_sym(w) * s);
            return {p.kind, pack_sym(r)};
        }
    }
    throw NumericalError("exp_point: unreachable");
}

TangentVector log_point(const ManifoldPoint& p, const ManifoldPoint& q) {
    require_same_kind(p, q, "log_point");
    if (same_coords(p, q)) return zero_tangent(p);
    switch (p.kind.geometry) {
        case Geometry::Euclidean: return {p, q.coords - p.coords};
        case Geometry::Sphere: {
            double c = p.coords.dot(q.coords);
            c = std::clamp(c, -1.0, 1.0);
            VectorXd w = q.coords - c * p.coords;
            double s = w.norm();
            double theta = std::atan2(s, c);
            if (theta > M_PI - kCutMargin)
                throw CutLocusError("log_point: sphere points are (nearly) antipodal");
            if (s < 1e-14) return {p, w};
            return {p, (theta / s) * w};
        }
        case Geometry::Rotation3: {
            Eigen::Quaterniond rel = as_quat(p).conjugate() * as_quat(q);
            rel.normalize();
            if (rel.w() < 0.0) rel.coeffs() = -rel.coeffs();
            Eigen::Vector3d im = rel.vec();
            double s = im.norm();
            double theta = 2.0 * std::atan2(s, rel.w());
            if (theta > M_PI - kCutMargin)
                throw CutLocusError("log_point: rotation angle at/near pi");
            double factor = (s < 1e-14) ? 2.0 / rel.w() : theta / s;
            TangentVector v{p, VectorXd(3)};
            v.vec << factor * im.x(), factor * im.y(), factor * im.z();
            return v;
        }
        case Geometry::Spd: {
            const int n = p.kind.dim;
            MatrixXd a = spd_matrix(p);
            MatrixXd s = sqrt_sym(a);
            MatrixXd si = s.llt().solve(MatrixXd::Identity(n, n));
            MatrixXd w = symmetrize(si * spd_matrix(q) * si.transpose());
            MatrixXd l = log_sym(w);
            return {p, pack_sym(symmetrize(s * l * s))};
        }
    }
    throw NumericalError("log_point: unreachable");
}

double distance(const ManifoldPoint& p, const ManifoldPoint& q) {
    require_same_kind(p, q, "distance");
    if (same_coords(p, q)) return 0.0;
    switch (p.kind.geometry) {
        case Geometry::Euclidean: return (q.coords - p.coords).norm();
        case Geometry::Sphere: {
            double c = std::clamp(p.coords.dot(q.coords), -1.0, 1.0);
            double s = (q.coords - c * p.coords).norm();
            return std::atan2(s, c);
        }
        case Geometry::Rotation3: {
            Eigen::Quaterniond rel = as_quat(p).conjugate() * as_quat(q);
            rel.normalize();
            double w = std::abs(rel.w());
            return 2.0 * std::atan2(rel.vec().norm(), w);
        }
        case Geometry::Spd: {
            const int n = p.kind.dim;
            MatrixXd a = spd_matrix(p);
            MatrixXd s = sqrt_sym(a);
            MatrixXd si = s.llt().solve(MatrixXd::Identity(n, n));
            MatrixXd w = symmetrize(si * spd_matrix(q) * si.transpose());
            SymEig e = sym_eig(w);
            double acc = 0.0;
            for (Eigen::Index i = 0; i < e.l.size(); ++i) {
                if (e.l[i] <= 0.0) throw ValidationError("distance: matrix is not positive definite");
                double t = std::log(e.l[i]);
                acc += t * t;
            }
            return std::sqrt(acc);
        }
    }
    throw NumericalError("distance: unreachable");
}

TangentVector parallel_transport(const TangentVector& v, const ManifoldPoint& to) {
    require_same_kind(v.base, to, "parallel_transport");
    switch (to.kind.geometry) {
        case Geometry::Euclidean: return {to, v.vec};
        case Geometry::Sphere: {
            TangentVector u = log_point(v.base, to);
            double theta = u.vec.norm();
            if (theta < 1e-14) {
                // Re-project for hygiene; the bases agree to machine precision.
                VectorXd w = v.vec - v.vec.dot(to.coords) * to.coords;
                return {to, w};
            }
            VectorXd e = u.vec / theta;
            double a = v.vec.dot(e);
            VectorXd w = v.vec - a * e;
            VectorXd e_to = std::cos(theta) * e - std::sin(theta) * v.base.coords;
            return {to, a * e_to + w};
        }
        case Geometry::Rotation3:
            // Left translation keeps body-frame coordinates unchanged.
            return {to, v.vec};
        case Geometry::Spd: {
            const int n = to.kind.dim;
            MatrixXd a = spd_matrix(v.base);
            MatrixXd s = sqrt_sym(a);
            MatrixXd si = s.llt().solve(MatrixXd::Identity(n, n));
            MatrixXd m = symmetrize(si * spd_matrix(to) * si.transpose());
            MatrixXd e = s * sqrt_sym(m) * si;
            MatrixXd w = e * unpack_sym(v.vec, n) * e.transpose();
            return {to, pack_sym(symmetrize(w))};
        }
    }
    throw NumericalError("parallel_transport: unreachable");
}

ManifoldPoint geodesic_point(const ManifoldPoint& p, const ManifoldPoint& q, double t) {
    TangentVector v = log_point(p, q);
    v.vec *= t;
    return exp_point(p, v);
}

ManifoldPoint project_to_rotation(const Eigen::Matrix3d& g) {
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv[2] <= 1e-12 * std::max(1.0, sv[0]))
        throw ValidationError("project_to_rotation: matrix is (numerically) singular");
    if (g.determinant() < 0.0)
        throw ValidationError("project_to_rotation: negative determinant (not in GL+_3)");
    Eigen::Matrix3d r = svd.matrixU() * svd.matrixV().transpose();
    return rotation_from_matrix(r);
}

Eigen::Matrix3d rotation_matrix(const ManifoldPoint& p) {
    if (p.kind.geometry != Geometry::Rotation3)
        throw ValidationError("rotation_matrix: point is not a rotation");
    return as_quat(p).normalized().toRotationMatrix();
}

ManifoldPoint rotation_from_matrix(const Eigen::Matrix3d& r) {
    Eigen::Quaterniond q(r);
    q.normalize();
    if (q.w() < 0.0) q.coeffs() = -q.coeffs();
    return from_quat(q);
}

}  // namespace geomsub
