#include <curved_nbody/geometry.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "test_support.hpp"

using namespace curved_nbody;

TEST(Curvature, SignFollowsKappa) {
    EXPECT_EQ(Curvature(2.5).sigma(), 1);
    EXPECT_EQ(Curvature(-0.3).sigma(), -1);
    EXPECT_THROW(Curvature(0.0), DomainError);
    EXPECT_THROW(Curvature(std::numeric_limits<double>::quiet_NaN()), DomainError);
}

TEST(SigmaInner, Examples) {
    EXPECT_EQ(sigma_inner({1, 0, 0}, {1, 0, 0}, 1), 1.0);
    EXPECT_EQ(sigma_inner({0, 0, 1}, {0, 0, 1}, -1), -1.0);
    EXPECT_EQ(sigma_inner({1, 2, 3}, {4, 5, 6}, 1), 32.0);
}

TEST(SigmaInner, SymmetricAndBilinear) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    for (int sigma : {1, -1}) {
        for (int trial = 0; trial < 200; ++trial) {
            const Vec3 a{g(rng), g(rng), g(rng)}, b{g(rng), g(rng), g(rng)}, d{g(rng), g(rng), g(rng)};
            const double s = g(rng);
            EXPECT_EQ(sigma_inner(a, b, sigma), sigma_inner(b, a, sigma));
            const double lhs = sigma_inner(s * a + d, b, sigma);
            const double rhs = s * sigma_inner(a, b, sigma) + sigma_inner(d, b, sigma);
            EXPECT_NEAR(lhs, rhs, 1e-12 * (1 + std::abs(lhs)));
        }
    }
}

TEST(SurfaceResidual, Examples) {
    EXPECT_EQ(surface_residual({1, 0, 0}, Curvature(1)), 0.0);
    EXPECT_EQ(surface_residual({0, 0, 1}, Curvature(-1)), 0.0);
    EXPECT_EQ(surface_residual({2, 0, 0}, Curvature(1)), 3.0);
}

TEST(ProjectPoint, Examples) {
    EXPECT_EQ(project_point({2, 0, 0}, Curvature(1)), (Vec3{1, 0, 0}));
    EXPECT_EQ(project_point({0, 0.6, 0.8}, Curvature(1)), (Vec3{0, 0.6, 0.8}));
    EXPECT_EQ(project_point({0, 0, 2}, Curvature(-1)), (Vec3{0, 0, 1}));
}

TEST(ProjectPoint, RejectsNonProjectable) {
    // spacelike vector for the hyperboloid: kappa (p.p) = -(1) < 0
    EXPECT_THROW(project_point({1, 0, 0}, Curvature(-1)), DomainError);
    EXPECT_THROW(project_point({0, 0, 0}, Curvature(1)), DomainError);
}

TEST(ProjectPoint, LandsOnSurfaceWithinFourUlps) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> k(0.1, 5.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const bool pos = trial % 2 == 0;
        const Curvature c(pos ? k(rng) : -k(rng));
        Vec3 p{g(rng), g(rng), g(rng)};
        if (!pos) p.z = std::abs(p.z) + std::hypot(p.x, p.y) + 0.01;
        const auto q = project_point(p, c);
        // ulps of |kappa| |q|^2, which is 1 on the sphere
        const double scale = std::abs(c.kappa()) * (q.x * q.x + q.y * q.y + q.z * q.z);
        EXPECT_LE(std::abs(surface_residual(q, c)), 4 * std::numeric_limits<double>::epsilon() * scale);
    }
}

TEST(ProjectTangent, Examples) {
    EXPECT_EQ(project_tangent({1, 0, 0}, {1, 1, 0}, Curvature(1)), (Vec3{0, 1, 0}));
    EXPECT_EQ(project_tangent({1, 0, 0}, {0, 3, -2}, Curvature(1)), (Vec3{0, 3, -2}));
    EXPECT_EQ(project_tangent({0, 0, 1}, {1, 0, 1}, Curvature(-1)), (Vec3{1, 0, 0}));
}

TEST(ProjectTangent, OrthogonalAndIdempotent) {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> g;
    for (double kappa : {1.0, -1.0, 3.0, -0.25}) {
        const Curvature c(kappa);
        for (int trial = 0; trial < 500; ++trial) {
            const auto s = test_support::random_state(rng, c, 1);
            const Vec3& p = s.positions[0];
            const Vec3 v{g(rng), g(rng), g(rng)};
            const auto t = project_tangent(p, v, c);
            EXPECT_LE(std::abs(sigma_inner(p, t, c)), 1e-14 * p.norm() * v.norm());
            const auto tt = project_tangent(p, t, c);
            EXPECT_LE((tt - t).norm(), 1e-13 * (1 + t.norm()));
        }
    }
}
