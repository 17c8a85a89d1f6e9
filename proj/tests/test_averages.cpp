#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "geomsub/averages.hpp"
#include "support.hpp"

using namespace geomsub;
using namespace testsupport;

TEST_CASE("affine average basics") {
    WeightedData mid{{0.5, 0.5}, {euclid({0.0}), euclid({1.0})}};
    CHECK(affine_average(mid).coords[0] == 0.5);

    WeightedData single{{1.0}, {euclid({3.0, -2.0})}};
    CHECK((affine_average(single).coords - euclid({3.0, -2.0}).coords).norm() == 0.0);

    WeightedData negative{{-1.0, 1.0, 1.0}, {euclid({0.0}), euclid({1.0}), euclid({2.0})}};
    CHECK(affine_average(negative).coords[0] == 3.0);
}

TEST_CASE("affine average rejects bad input") {
    WeightedData bad{{0.5, 0.6}, {euclid({0.0}), euclid({1.0})}};
    CHECK_THROWS_AS((void)affine_average(bad), ValidationError);
    WeightedData sphere_data{{1.0}, {sphere3(0, 0, 1)}};
    CHECK_THROWS_AS((void)affine_average(sphere_data), ValidationError);
}

TEST_CASE("two-point frechet mean is the geodesic point") {
    std::mt19937_64 rng(31);
    for (const ManifoldKind& kind :
         {ManifoldKind::sphere(2), ManifoldKind::rotation3(), ManifoldKind::spd(3)}) {
        for (double t : {0.25, 0.5, 0.8}) {
            ManifoldPoint a = random_point(kind, rng);
            ManifoldPoint b = exp_point(a, random_tangent(a, 0.8, rng));
            WeightedData data{{1.0 - t, t}, {a, b}};
            ManifoldPoint mean = frechet_mean(data);
            CHECK(distance(mean, geodesic_point(a, b, t)) < 1e-10);
        }
    }
}

TEST_CASE("frechet mean of identical points returns immediately") {
    ManifoldPoint p = sphere3(0.3, -0.4, 1.0);
    WeightedData data{{0.25, 0.25, 0.5}, {p, p, p}};
    ManifoldPoint mean = frechet_mean(data);
    CHECK((mean.coords - p.coords).norm() == 0.0);
}

TEST_CASE("euclidean frechet matches the affine closed form") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        const int k = 4;
        WeightedData data;
        double sum = 0.0;
        for (int j = 0; j < k; ++j) {
            double w = u(rng) + 0.3;
            data.weights.push_back(w);
            sum += w;
            data.points.push_back(random_point(ManifoldKind::euclidean(3), rng));
        }
        for (double& w : data.weights) w /= sum;
        ManifoldPoint mean = frechet_mean(data);
        CHECK((mean.coords - affine_average(data).coords).norm() < 1e-12);
    }
}

TEST_CASE("stationarity certificate on random configurations") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    for (const ManifoldKind& kind :
         {ManifoldKind::euclidean(2), ManifoldKind::sphere(2), ManifoldKind::rotation3(),
          ManifoldKind::spd(2)}) {
        for (int t = 0; t < 30; ++t) {
            WeightedData data;
            ManifoldPoint base = random_point(kind, rng);
            double sum = 0.0;
            for (int j = 0; j < 5; ++j) {
                double w = u(rng);
                data.weights.push_back(w);
                sum += w;
                data.points.push_back(exp_point(base, random_tangent(base, 0.25, rng)));
            }
            for (double& w : data.weights) w /= sum;
            ManifoldPoint mean = frechet_mean(data);
            double diam = data_diameter(data);
            CHECK(frechet_residual(data, mean) <= 1e-12 * (1.0 + diam));
        }
    }
}

TEST_CASE("negative weights on spd converge with damping") {
    std::mt19937_64 rng(43);
    ManifoldPoint base = random_point(ManifoldKind::spd(3), rng);
    WeightedData data;
    for (double w : {-0.0625, 0.5625, 0.5625, -0.0625}) data.weights.push_back(w);
    for (int j = 0; j < 4; ++j)
        data.points.push_back(exp_point(base, random_tangent(base, 0.2, rng)));
    MeanConfig cfg;
    CHECK(cfg.effective_damping(data) == 0.5);
    ManifoldPoint mean = frechet_mean(data);
    CHECK(frechet_residual(data, mean) <= 1e-12 * (1.0 + data_diameter(data)));
}

TEST_CASE("no convergence is reported, not silently accepted") {
    WeightedData data{{0.5, 0.5}, {sphere3(1, 0, 0), sphere3(0, 1, 0)}};
    MeanConfig cfg;
    cfg.max_iter = 1;
    cfg.damping = 1e-4;  // cripple the step so one iteration cannot reach tol
    CHECK_THROWS_AS((void)frechet_mean(data, cfg, sphere3(1, 0.2, 0.4)), NoConvergenceError);
}

TEST_CASE("basepoint average at the frechet mean returns the base") {
    std::mt19937_64 rng(47);
    for (const ManifoldKind& kind : {ManifoldKind::sphere(2), ManifoldKind::spd(2)}) {
        ManifoldPoint base = random_point(kind, rng);
        WeightedData data;
        for (int j = 0; j < 4; ++j) {
            data.weights.push_back(0.25);
            data.points.push_back(exp_point(base, random_tangent(base, 0.3, rng)));
        }
        ManifoldPoint mean = frechet_mean(data);
        CHECK(distance(basepoint_average(mean, data), mean) < 1e-10);
    }
}

TEST_CASE("basepoint average is base-independent on euclidean data") {
    std::mt19937_64 rng(53);
    WeightedData data;
    for (double w : {0.2, 0.3, 0.5}) data.weights.push_back(w);
    for (int j = 0; j < 3; ++j) data.points.push_back(random_point(ManifoldKind::euclidean(2), rng));
    ManifoldPoint expected = affine_average(data);
    for (int t = 0; t < 5; ++t) {
        ManifoldPoint base = random_point(ManifoldKind::euclidean(2), rng);
        CHECK((basepoint_average(base, data).coords - expected.coords).norm() < 1e-13);
    }
}

TEST_CASE("symmetric sphere pair averages to the base") {
    ManifoldPoint base = sphere3(0, 0, 1);
    const double theta = 0.4;
    WeightedData data{{0.5, 0.5},
                      {exp_point(base, tangent(base, {theta, 0, 0})),
                       exp_point(base, tangent(base, {-theta, 0, 0}))}};
    CHECK(distance(basepoint_average(base, data), base) < 1e-14);
}

TEST_CASE("permutation invariance of the averages") {
    std::mt19937_64 rng(59);
    for (const ManifoldKind& kind : {ManifoldKind::sphere(2), ManifoldKind::spd(2)}) {
        ManifoldPoint base = random_point(kind, rng);
        WeightedData data;
        double weights[4] = {0.1, 0.2, 0.3, 0.4};
        for (int j = 0; j < 4; ++j) {
            data.weights.push_back(weights[j]);
            data.points.push_back(exp_point(base, random_tangent(base, 0.3, rng)));
        }
        WeightedData shuffled;
        for (int j : {2, 0, 3, 1}) {
            shuffled.weights.push_back(data.weights[j]);
            shuffled.points.push_back(data.points[j]);
        }
        CHECK(distance(frechet_mean(data), frechet_mean(shuffled)) < 1e-10);
        CHECK(distance(basepoint_average(base, data), basepoint_average(base, shuffled)) < 1e-10);
    }
    // bitwise for affine sums in fixed order is not required after shuffling,
    // but the result must agree to round-off
    WeightedData e{{0.25, 0.75}, {euclid({1.0, 0.0}), euclid({0.0, 1.0})}};
    WeightedData es{{0.75, 0.25}, {euclid({0.0, 1.0}), euclid({1.0, 0.0})}};
    CHECK((affine_average(e).coords - affine_average(es).coords).norm() < 1e-15);
}

TEST_CASE("rotating the inputs rotates the mean") {
    std::mt19937_64 rng(61);
    for (int t = 0; t < 20; ++t) {
        // Sphere: apply a random rotation matrix
        ManifoldPoint base = random_point(ManifoldKind::sphere(2), rng);
        WeightedData data;
        for (int j = 0; j < 4; ++j) {
            data.weights.push_back(0.25);
            data.points.push_back(exp_point(base, random_tangent(base, 0.3, rng)));
        }
        Eigen::Matrix3d rot = rotation_matrix(random_point(ManifoldKind::rotation3(), rng));
        WeightedData rotated = data;
        for (ManifoldPoint& p : rotated.points) p.coords = rot * p.coords;
        ManifoldPoint lhs = frechet_mean(rotated);
        ManifoldPoint rhs = frechet_mean(data);
        rhs.coords = rot * rhs.coords;
        CHECK(distance(lhs, rhs) < 1e-9);

        // Rotation3: left-translate by a random rotation
        ManifoldPoint qbase = random_point(ManifoldKind::rotation3(), rng);
        WeightedData qdata;
        for (int j = 0; j < 4; ++j) {
            qdata.weights.push_back(0.25);
            qdata.points.push_back(exp_point(qbase, random_tangent(qbase, 0.3, rng)));
        }
        ManifoldPoint u = random_point(ManifoldKind::rotation3(), rng);
        WeightedData qrot = qdata;
        for (ManifoldPoint& p : qrot.points)
            p = rotation_from_matrix(rotation_matrix(u) * rotation_matrix(p));
        ManifoldPoint qlhs = frechet_mean(qrot);
        ManifoldPoint qrhs =
            rotation_from_matrix(rotation_matrix(u) * rotation_matrix(frechet_mean(qdata)));
        CHECK(distance(qlhs, qrhs) < 1e-9);
    }
}
