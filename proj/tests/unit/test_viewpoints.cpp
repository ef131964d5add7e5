#include "slsim/error.hpp"
#include "slsim/viewpoints.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>

using namespace slsim;

namespace
{

const DepthRange kRange{0.5, 4.0};

double axis_angle_to(const Pose& pose, const Vec3& centroid)
{
    const Vec3 axis = pose.linear().col(2);
    const Vec3 to = (centroid - pose.translation()).normalized();
    return std::atan2(axis.cross(to).norm(), axis.dot(to));
}

// Two-sided one-sample Kolmogorov–Smirnov statistic against U(lo, hi).
double ks_uniform(std::vector< double > xs, double lo, double hi)
{
    std::sort(xs.begin(), xs.end());
    const double n = double(xs.size());
    double d = 0;
    for (std::size_t i = 0; i < xs.size(); ++i)
    {
        const double f = (xs[i] - lo) / (hi - lo);
        d = std::max({d, double(i + 1) / n - f, f - double(i) / n});
    }
    return d;
}

} // namespace

TEST(Icosphere, VertexCounts)
{
    EXPECT_EQ(icosphere_vertices(0).size(), 12u);
    EXPECT_EQ(icosphere_vertices(1).size(), 42u);
    EXPECT_EQ(icosphere_vertices(2).size(), 162u);
    for (const Vec3& v : icosphere_vertices(2))
        EXPECT_NEAR(v.norm(), 1.0, 1e-12);
    EXPECT_THROW(icosphere_vertices(-1), ConfigError);
}

TEST(Icosphere, VerticesAreDistinct)
{
    const auto v = icosphere_vertices(1);
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j)
            EXPECT_GT((v[i] - v[j]).norm(), 0.1);
}

TEST(Viewpoints, TwelveIcospherePosesLookAtCentroid)
{
    const Vec3 centroid(0.1, -0.2, 0.3);
    ViewpointConfig cfg;
    const auto poses = sample_viewpoints(cfg, centroid, kRange);
    ASSERT_EQ(poses.size(), 12u);
    for (const Pose& p : poses)
    {
        EXPECT_LT(axis_angle_to(p, centroid), 1e-6);
        EXPECT_NEAR((p.translation() - centroid).norm(), 1.25, 1e-12);
        EXPECT_TRUE((p.linear().transpose() * p.linear()).isIdentity(1e-12));
        EXPECT_NEAR(p.linear().determinant(), 1.0, 1e-12);
    }
}

TEST(Viewpoints, RandomPosesLookAtCentroidAndStayInCap)
{
    ViewpointConfig cfg;
    cfg.mode = ViewpointMode::random;
    cfg.count = 500;
    cfg.cap_half_angle_deg = 40;
    cfg.cap_axis = Vec3(0, 1, 0);
    const Vec3 centroid(1, 2, 3);
    const auto poses = sample_viewpoints(cfg, centroid, kRange);
    ASSERT_EQ(poses.size(), 500u);
    const double cos_cap = std::cos(40.0 * std::numbers::pi / 180.0);
    for (const Pose& p : poses)
    {
        EXPECT_LT(axis_angle_to(p, centroid), 1e-6);
        const Vec3 dir = (p.translation() - centroid).normalized();
        EXPECT_GE(dir.dot(Vec3(0, 1, 0)), cos_cap - 1e-12);
    }
}

TEST(Viewpoints, RandomRadiiAreUniform)
{
    ViewpointConfig cfg;
    cfg.mode = ViewpointMode::random;
    cfg.count = 1000;
    cfg.radius_min_m = 0.8;
    cfg.radius_max_m = 2.2;
    cfg.seed = 17;
    const Vec3 centroid = Vec3::Zero();
    std::vector< double > radii;
    for (const Pose& p : sample_viewpoints(cfg, centroid, kRange))
        radii.push_back(p.translation().norm());
    // Critical value of the KS statistic at significance 0.05.
    EXPECT_LT(ks_uniform(radii, 0.8, 2.2), 1.358 / std::sqrt(1000.0));
    EXPECT_GE(*std::min_element(radii.begin(), radii.end()), 0.8);
    EXPECT_LE(*std::max_element(radii.begin(), radii.end()), 2.2);
}

TEST(Viewpoints, SameSeedSamePoses)
{
    ViewpointConfig cfg;
    cfg.mode = ViewpointMode::random;
    cfg.count = 20;
    const auto a = sample_viewpoints(cfg, Vec3::Zero(), kRange);
    const auto b = sample_viewpoints(cfg, Vec3::Zero(), kRange);
    cfg.seed = 2;
    const auto c = sample_viewpoints(cfg, Vec3::Zero(), kRange);
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        EXPECT_TRUE(a[i].matrix() == b[i].matrix());
        EXPECT_FALSE(a[i].matrix() == c[i].matrix());
    }
}

TEST(Viewpoints, PoleViewsStayWellDefined)
{
    ViewpointConfig cfg;
    cfg.mode = ViewpointMode::random;
    cfg.count = 50;
    cfg.cap_half_angle_deg = 0.01;
    for (const Vec3& axis : {Vec3(0, 1, 0), Vec3(0, -1, 0), Vec3(0, 0, -1)})
    {
        cfg.cap_axis = axis;
        for (const Pose& p : sample_viewpoints(cfg, Vec3::Zero(), kRange))
        {
            ASSERT_TRUE(p.matrix().allFinite());
            EXPECT_LT(axis_angle_to(p, Vec3::Zero()), 1e-6);
        }
    }
}

TEST(Viewpoints, InvalidRangesRejected)
{
    ViewpointConfig cfg;
    cfg.radius_min_m = 2.0;
    cfg.radius_max_m = 1.0;
    EXPECT_THROW(sample_viewpoints(cfg, Vec3::Zero(), kRange), ConfigError);
    cfg.radius_min_m = 3.0;
    cfg.radius_max_m = 5.0;
    EXPECT_THROW(sample_viewpoints(cfg, Vec3::Zero(), kRange), ConfigError);
    cfg = ViewpointConfig{};
    cfg.mode = ViewpointMode::random;
    cfg.count = -1;
    EXPECT_THROW(sample_viewpoints(cfg, Vec3::Zero(), kRange), ConfigError);
    cfg.count = 5;
    cfg.cap_half_angle_deg = 0;
    EXPECT_THROW(sample_viewpoints(cfg, Vec3::Zero(), kRange), ConfigError);
}
