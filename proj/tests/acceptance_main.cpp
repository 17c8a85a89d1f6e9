// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "geomsub/io.hpp"
#include "geomsub/multiscale.hpp"
#include "support.hpp"

using namespace geomsub;
using namespace testsupport;

namespace {

struct Failure {
    std::string what;
};

void require(bool cond, const std::string& msg) {
    if (!cond) throw Failure{msg};
}

int failures = 0;

void run(const std::string& name, const std::function<void()>& body) {
    auto t0 = std::chrono::steady_clock::now();
    std::string verdict = "PASS";
    std::string detail;
    try {
        body();
    } catch (const Failure& f) {
        verdict = "FAIL";
        detail = f.what;
        ++failures;
    } catch (const std::exception& e) {
        verdict = "FAIL";
        detail = std::string("exception: ") + e.what();
        ++failures;
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s  %-38s (%.3f s)%s%s\n", verdict.c_str(), name.c_str(), secs,
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

// Quadratic cardinal B-spline on [0,3].
double bspline2(double x) {
    if (x <= 0.0 || x >= 3.0) return 0.0;
    if (x < 1.0) return 0.5 * x * x;
    if (x < 2.0) return 0.5 * (-2.0 * x * x + 6.0 * x - 3.0);
    return 0.5 * (3.0 - x) * (3.0 - x);
}

Eigen::VectorXd bspline_curve(const Sequence& seq, double t) {
    const auto n = static_cast<std::int64_t>(seq.points.size());
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(seq.points[0].coords.size());
    for (std::int64_t j = -2; j <= n + 2; ++j) {
        double w = bspline2(t - static_cast<double>(j) + 1.5);
        if (w == 0.0) continue;
        acc += w * seq.points[static_cast<std::size_t>(((j % n) + n) % n)].coords;
    }
    return acc;
}

// Closed random sphere loop contracted until its density is below target.
Sequence sphere_loop(double target_density, int n, std::mt19937_64& rng) {
    Sequence seq = random_sequence(ManifoldKind::sphere(2), n, Boundary::Periodic, 0.6, rng);
    return shrink_to_density(std::move(seq), target_density);
}

Sequence sample_scalar(const std::function<double(double)>& f, double t0, double t1,
                       std::int64_t count) {
    Sequence seq;
    seq.boundary = Boundary::Open;
    for (std::int64_t i = 0; i < count; ++i) {
        double t = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(count - 1);
        Eigen::VectorXd v(1);
        v[0] = f(t);
        seq.points.push_back({ManifoldKind::euclidean(1), v});
    }
    seq.kind = seq.points[0].kind;
    return seq;
}

void criterion_chaikin_analysis() {
    ConvergenceReport r = contractivity_report(chaikin_mask(), 6);
    require(r.verdict == ConvergenceReport::Verdict::Proven, "verdict not Proven");
    require(std::abs(r.gamma - 0.5) <= 1e-12, "gamma = " + fmt(r.gamma));
    require(r.holder_exponent.has_value(), "no Hoelder exponent");
    require(std::abs(*r.holder_exponent - 1.0) <= 1e-12,
            "exponent = " + fmt(*r.holder_exponent));
    Mask d = derived_mask(chaikin_mask());
    require(d.coeffs == std::vector<double>{0.5, 1.0, 0.5}, "derived mask != (1/2, 1, 1/2)");
}

void criterion_four_point_norms() {
    double norm = operator_norm(four_point_mask(1.0 / 16.0));
    require(std::abs(norm - 1.25) <= 1e-12, "||S|| = " + fmt(norm));
    ConvergenceReport r = contractivity_report(four_point_mask(1.0 / 16.0), 6);
    require(r.verdict == ConvergenceReport::Verdict::Proven, "verdict not Proven");
    require(r.max_power_tried <= 6, "needed more than 6 powers");
}

void criterion_bspline_limit() {
    std::mt19937_64 rng(20260810);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Sequence poly;
    poly.boundary = Boundary::Periodic;
    for (int i = 0; i < 6; ++i) {
        Eigen::VectorXd v(2);
        v << u(rng), u(rng);
        poly.points.push_back({ManifoldKind::euclidean(2), v});
    }
    poly.kind = poly.points[0].kind;
    auto samples = limit_samples(poly, Rule::masked(chaikin_mask(), SchemeVariant::linear()), 10);
    double err = 0.0;
    for (const auto& s : samples)
        err = std::max(err, (s.point.coords - bspline_curve(poly, s.param)).norm());
    require(err <= 1e-6, "max B-spline deviation = " + fmt(err));
}

void criterion_cubic_reproduction() {
    std::mt19937_64 rng(424242);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double c0 = u(rng), c1 = u(rng), c2 = u(rng), c3 = u(rng);
    auto cubic = [&](double t) { return ((c3 * t + c2) * t + c1) * t + c0; };
    Sequence seq = sample_scalar(cubic, -1.0, 1.0, 8 * 32 + 1);
    Pyramid pyr = wavelet_decompose(seq, four_point_mask(1.0 / 16.0), SchemeVariant::linear(), 5);
    double worst = 0.0;
    for (const DetailLevel& dl : pyr.details)
        for (const TangentVector& q : dl.vecs) worst = std::max(worst, tangent_norm(q));
    require(worst <= 1e-12, "max detail = " + fmt(worst));
}

void criterion_sphere_density_bound() {
    std::mt19937_64 rng(5550123);
    const double bound = 0.5 + 3.0 / 16.0 + 1e-9;
    for (int t = 0; t < 100; ++t) {
        Sequence seq = sphere_loop(0.3, 10, rng);
        double before = density(seq);
        if (before == 0.0) continue;
        Sequence out =
            four_point(seq, 1.0 / 16.0, SchemeVariant::logexp(BasePointRule::EdgeMidpoint));
        double ratio = density(out) / before;
        require(ratio <= bound, "trial " + std::to_string(t) + ": ratio = " + fmt(ratio));
    }
}

void criterion_sphere_frechet_four_point() {
    std::mt19937_64 rng(90210);
    Rule rule = Rule::masked(four_point_mask(1.0 / 16.0), SchemeVariant::frechet());
    for (int t = 0; t < 50; ++t) {
        Sequence seq = sphere_loop(0.30999, 12, rng);
        std::vector<double> ratios = empirical_contraction(seq, rule, 6);
        for (std::size_t k = 0; k < ratios.size(); ++k)
            require(ratios[k] < 1.0, "trial " + std::to_string(t) + ", round " +
                                         std::to_string(k + 1) + ": ratio = " + fmt(ratios[k]));
    }
}

void criterion_perfect_reconstruction() {
    std::mt19937_64 rng(777001);
    Mask mask = four_point_mask(1.0 / 16.0);
    for (const ManifoldKind& kind :
         {ManifoldKind::euclidean(3), ManifoldKind::sphere(2), ManifoldKind::rotation3(),
          ManifoldKind::spd(2)}) {
        const double tol = kind.geometry == Geometry::Euclidean ? 1e-12 : 1e-9;
        SchemeVariant variant = kind.geometry == Geometry::Euclidean
                                    ? SchemeVariant::linear()
                                    : SchemeVariant::logexp(BasePointRule::EdgeMidpoint);
        for (int t = 0; t < 200; ++t) {
            Sequence seq =
                shrink_to_density(random_sequence(kind, 16, Boundary::Periodic, 0.35, rng), 0.3);
            Pyramid hp = haar_decompose(seq, 3);
            Sequence hback = haar_reconstruct(hp);
            Pyramid wp = wavelet_decompose(seq, mask, variant, 3);
            Sequence wback = wavelet_reconstruct(wp);
            for (std::size_t i = 0; i < seq.points.size(); ++i) {
                double he = distance(hback.points[i], seq.points[i]);
                double we = distance(wback.points[i], seq.points[i]);
                require(he <= tol, kind.name() + " haar trial " + std::to_string(t) +
                                       ": error = " + fmt(he));
                require(we <= tol, kind.name() + " wavelet trial " + std::to_string(t) +
                                       ": error = " + fmt(we));
            }
        }
    }
}

void criterion_frechet_certificate() {
    std::mt19937_64 rng(31415926);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    for (const ManifoldKind& kind :
         {ManifoldKind::euclidean(3), ManifoldKind::sphere(2), ManifoldKind::rotation3(),
          ManifoldKind::spd(2)}) {
        const bool allow_negative =
            kind.geometry == Geometry::Euclidean || kind.geometry == Geometry::Spd;
        for (int t = 0; t < 500; ++t) {
            ManifoldPoint base = random_point(kind, rng);
            WeightedData data;
            const int k = 5;
            double sum = 0.0;
            for (int j = 0; j < k; ++j) {
                double w = u(rng);
                if (allow_negative && j == 0 && t % 2 == 0) w = -0.4 * u(rng);
                data.weights.push_back(w);
                sum += w;
                data.points.push_back(exp_point(base, random_tangent(base, 0.2, rng)));
            }
            for (double& w : data.weights) w /= sum;
            double diam = data_diameter(data);
            require(diam <= 0.5, "configuration diameter exceeded 0.5");
            ManifoldPoint mean = frechet_mean(data);
            double res = frechet_residual(data, mean);
            require(res <= 1e-10 * (1.0 + diam),
                    kind.name() + " trial " + std::to_string(t) + ": residual = " + fmt(res));
            if (kind.geometry == Geometry::Euclidean) {
                double gap = (mean.coords - affine_average(data).coords).norm();
                require(gap <= 1e-12, "affine gap = " + fmt(gap));
            }
        }
    }
}

void criterion_equivariance_suite() {
    std::mt19937_64 rng(8675309);
    std::normal_distribution<double> gauss(0.0, 1.0);
    // motion-group projection equivariance
    for (int t = 0; t < 100; ++t) {
        ManifoldPoint u = random_point(ManifoldKind::rotation3(), rng);
        Eigen::Matrix3d um = rotation_matrix(u);
        Eigen::Matrix3d g;
        do {
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) g(i, j) = gauss(rng);
        } while (g.determinant() <= 0.05);
        Eigen::Matrix3d base = rotation_matrix(project_to_rotation(g));
        double e1 =
            (rotation_matrix(project_to_rotation(um * g)) - um * base).cwiseAbs().maxCoeff();
        double e2 =
            (rotation_matrix(project_to_rotation(g * um)) - base * um).cwiseAbs().maxCoeff();
        require(e1 <= 1e-8 && e2 <= 1e-8,
                "projection equivariance error = " + fmt(std::max(e1, e2)));
    }
    // sphere-rotation equivariance of subdivision
    for (int t = 0; t < 100; ++t) {
        Sequence seq = sphere_loop(0.4, 8, rng);
        Eigen::Matrix3d rot = rotation_matrix(random_point(ManifoldKind::rotation3(), rng));
        Sequence rotated = seq;
        for (ManifoldPoint& p : rotated.points) p.coords = rot * p.coords;
        SchemeVariant v = SchemeVariant::logexp(BasePointRule::EdgeMidpoint);
        Sequence a = subdivide_once(rotated, four_point_mask(1.0 / 16.0), v);
        Sequence b = subdivide_once(seq, four_point_mask(1.0 / 16.0), v);
        for (std::size_t i = 0; i < a.points.size(); ++i) {
            double err = (a.points[i].coords - rot * b.points[i].coords).norm();
            require(err <= 1e-8, "subdivision equivariance error = " + fmt(err));
        }
    }
    // spd congruence invariance of the distance
    for (int t = 0; t < 100; ++t) {
        ManifoldPoint a = random_point(ManifoldKind::spd(3), rng);
        ManifoldPoint b = random_point(ManifoldKind::spd(3), rng);
        Eigen::Matrix3d g;
        do {
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) g(i, j) = gauss(rng);
        } while (std::abs(g.determinant()) < 0.05);
        ManifoldPoint ga = spd_from(g * unpack_sym(a.coords, 3) * g.transpose());
        ManifoldPoint gb = spd_from(g * unpack_sym(b.coords, 3) * g.transpose());
        double err = std::abs(distance(ga, gb) - distance(a, b));
        require(err <= 1e-8, "congruence invariance error = " + fmt(err));
    }
}

void criterion_regularity_estimation() {
    Mask mask = four_point_mask(1.0 / 16.0);
    Sequence abs_seq =
        sample_scalar([](double t) { return std::abs(t); }, -1.0, 1.0, 4 * 256 + 1);
    RegularityEstimate abs_est =
        estimate_regularity(wavelet_decompose(abs_seq, mask, SchemeVariant::linear(), 8));
    require(abs_est.alpha_hat >= 0.85 && abs_est.alpha_hat <= 1.15,
            "|t| alpha = " + fmt(abs_est.alpha_hat));

    Sequence tt_seq = sample_scalar([](double t) { return t * std::abs(t); }, -1.0, 1.0,
                                    4 * 256 + 1);
    RegularityEstimate tt_est =
        estimate_regularity(wavelet_decompose(tt_seq, mask, SchemeVariant::linear(), 8));
    require(tt_est.alpha_hat >= 1.9, "t|t| alpha = " + fmt(tt_est.alpha_hat));
}

void criterion_spd_hadamard_contraction() {
    std::mt19937_64 rng(13579);
    Rule rule = Rule::masked(chaikin_mask(), SchemeVariant::frechet());
    for (int t = 0; t < 5; ++t) {
        Sequence seq = random_sequence(ManifoldKind::spd(3), 6, Boundary::Periodic, 0.6, rng);
        std::vector<double> ratios = empirical_contraction(seq, rule, 8);
        for (std::size_t k = 0; k < ratios.size(); ++k)
            require(ratios[k] < 1.0, "trial " + std::to_string(t) + ", round " +
                                         std::to_string(k + 1) + ": ratio = " + fmt(ratios[k]));
    }
}

}  // namespace

int main() {
    run("1. chaikin-analysis", criterion_chaikin_analysis);
    run("2. four-point-norms", criterion_four_point_norms);
    run("3. bspline-limit", criterion_bspline_limit);
    run("4. cubic-reproduction", criterion_cubic_reproduction);
    run("5. sphere-density-bound", criterion_sphere_density_bound);
    run("6. sphere-frechet-four-point", criterion_sphere_frechet_four_point);
    run("7. perfect-reconstruction", criterion_perfect_reconstruction);
    run("8. frechet-certificate", criterion_frechet_certificate);
    run("9. equivariance-suite", criterion_equivariance_suite);
    run("10. regularity-estimation", criterion_regularity_estimation);
    run("11. spd-hadamard-contraction", criterion_spd_hadamard_contraction);
    std::printf("NOTE  12. Hermite, multivariate grids, and irregular meshes are out of scope;"
                " no criteria cover them.\n");
    return failures == 0 ? 0 : 1;
}
