#include "property.hpp"

#include "slsim/error.hpp"
#include "slsim/scene.hpp"

#include <gtest/gtest.h>

#include <limits>

using namespace slsim;

namespace
{

struct BruteHit
{
    double t = std::numeric_limits< double >::infinity();
    Vec3 point = Vec3::Zero();
    bool hit = false;
};

// Exhaustive search over every triangle of every instance, written independently of the accelerator.
BruteHit brute_force(const Scene& scene, const Ray& ray)
{
    BruteHit best;
    for (const auto& inst : scene.instances)
        for (const auto& tri : inst.mesh->triangles)
        {
            const Vec3 a = inst.pose * inst.mesh->vertices[std::size_t(tri[0])];
            const Vec3 b = inst.pose * inst.mesh->vertices[std::size_t(tri[1])];
            const Vec3 c = inst.pose * inst.mesh->vertices[std::size_t(tri[2])];
            // Solve origin + t·dir = a + u·(b − a) + v·(c − a) by Cramer's rule.
            Mat3 m;
            m.col(0) = -ray.direction;
            m.col(1) = b - a;
            m.col(2) = c - a;
            const double det = m.determinant();
            if (std::abs(det) < 1e-14)
                continue;
            const Vec3 x = m.inverse() * (ray.origin - a);
            const double t = x[0], u = x[1], v = x[2];
            if (u < 0 || v < 0 || u + v > 1 || t <= AcceleratedScene::kMinDistance)
                continue;
            if (t < best.t)
            {
                best.t = t;
                best.point = ray.origin + t * ray.direction;
                best.hit = true;
            }
        }
    return best;
}

Vec3 random_unit(Rng& rng)
{
    const double z = rng.uniform(-1, 1);
    const double phi = rng.uniform(0, 2 * std::numbers::pi);
    const double s = std::sqrt(1 - z * z);
    return {s * std::cos(phi), s * std::sin(phi), z};
}

Pose random_pose(Rng& rng, double spread)
{
    Pose p = Pose::Identity();
    p.linear() = Eigen::AngleAxisd(rng.uniform(0, 2 * std::numbers::pi), random_unit(rng)).toRotationMatrix();
    p.translation() = Vec3(rng.uniform(-spread, spread), rng.uniform(-spread, spread), rng.uniform(-spread, spread));
    return p;
}

Mesh random_soup(Rng& rng, int triangles)
{
    Mesh m;
    for (int i = 0; i < triangles; ++i)
    {
        const Vec3 c(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
        const int base = int(m.vertices.size());
        for (int k = 0; k < 3; ++k)
            m.vertices.push_back(c + 0.3 * Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)));
        m.triangles.emplace_back(base, base + 1, base + 2);
    }
    compute_face_normals(m);
    drop_degenerate(m);
    return m;
}

Scene single(Mesh mesh, const Pose& pose = Pose::Identity())
{
    Scene s;
    Instance inst;
    inst.mesh = std::make_shared< const Mesh >(std::move(mesh));
    inst.pose = pose;
    s.instances.push_back(inst);
    return s;
}

Ray ray_toward(const Vec3& origin, const Vec3& target)
{
    return Ray{origin, (target - origin).normalized()};
}

} // namespace

TEST(Scene, SingleTriangleCentroidRayMatchesBruteForce)
{
    Mesh m;
    m.vertices = {Vec3(0, 0, 2), Vec3(1, 0, 2), Vec3(0, 1, 2)};
    m.triangles = {Eigen::Vector3i(0, 1, 2)};
    compute_face_normals(m);
    const Scene scene = single(m);
    const AcceleratedScene accel(scene);
    const Vec3 centroid = (m.vertices[0] + m.vertices[1] + m.vertices[2]) / 3.0;
    const Ray ray = ray_toward(Vec3(0.1, -0.2, 0), centroid);
    const auto hit = accel.intersect(ray);
    const BruteHit oracle = brute_force(scene, ray);
    ASSERT_TRUE(hit.has_value());
    ASSERT_TRUE(oracle.hit);
    EXPECT_LT((hit->point - oracle.point).norm(), 1e-6);
    EXPECT_LT((hit->point - centroid).norm(), 1e-6);
}

TEST(Scene, MissingRayHasNoHit)
{
    const AcceleratedScene accel(single(make_box(Vec3(1, 1, 1))));
    EXPECT_FALSE(accel.intersect(Ray{Vec3(0, 5, 0), Vec3(0, 1, 0)}).has_value());
}

TEST(Scene, EmptySceneAlwaysMisses)
{
    const AcceleratedScene accel{Scene{}};
    EXPECT_EQ(accel.triangle_count(), 0u);
    EXPECT_FALSE(accel.intersect(Ray{}).has_value());
    EXPECT_FALSE(accel.occluded(Ray{}, 10.0));
}

TEST(Scene, WallPlaneAtTwoMeters)
{
    Pose pose = Pose::Identity();
    pose.translation() = Vec3(0, 0, 2);
    const AcceleratedScene accel(single(make_quad(10, 10), pose));
    const auto hit = accel.intersect(Ray{Vec3::Zero(), Vec3::UnitZ()});
    ASSERT_TRUE(hit.has_value());
    EXPECT_NEAR(hit->distance, 2.0, 1e-12);
    EXPECT_NEAR(hit->normal.dot(Vec3::UnitZ()), -1.0, 1e-12);
}

TEST(Scene, RayInsideCubeHitsInteriorFace)
{
    const AcceleratedScene accel(single(make_box(Vec3(2, 2, 2))));
    const auto hit = accel.intersect(Ray{Vec3(0.2, 0.1, 0), Vec3::UnitX()});
    ASSERT_TRUE(hit.has_value());
    EXPECT_NEAR(hit->point.x(), 1.0, 1e-12);
    EXPECT_NEAR(hit->distance, 0.8, 1e-12);
    // Normals face the incoming ray, so an interior hit reports an inward normal.
    EXPECT_LT(hit->normal.dot(Vec3::UnitX()), 0.0);
}

TEST(Scene, GrazingRaysOnSphereAgreeWithBruteForce)
{
    const Scene scene = single(make_uv_sphere(0.5, 16, 32));
    const AcceleratedScene accel(scene);
    for (int i = -20; i <= 20; ++i)
    {
        const double y = 0.5 + 1e-3 * i;
        const Ray ray{Vec3(-3, y, 0.013 * i), Vec3::UnitX()};
        const auto hit = accel.intersect(ray);
        const BruteHit oracle = brute_force(scene, ray);
        ASSERT_EQ(hit.has_value(), oracle.hit) << "offset " << i;
        if (oracle.hit)
            EXPECT_NEAR(hit->distance, oracle.t, 1e-9);
    }
}

TEST(Scene, TenThousandTrianglesThousandRaysMatchBruteForce)
{
    Rng rng(2024);
    const Scene scene = single(random_soup(rng, 10000));
    const AcceleratedScene accel(scene);
    ASSERT_EQ(accel.triangle_count(), scene.instances[0].mesh->size());
    int hits = 0;
    for (int i = 0; i < 1000; ++i)
    {
        const Vec3 origin = 4.0 * random_unit(rng);
        const Ray ray = ray_toward(origin, Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)));
        const auto hit = accel.intersect(ray);
        const BruteHit oracle = brute_force(scene, ray);
        ASSERT_EQ(hit.has_value(), oracle.hit) << "ray " << i;
        if (oracle.hit)
        {
            ++hits;
            ASSERT_NEAR(hit->distance, oracle.t, 1e-9) << "ray " << i;
            ASSERT_EQ(accel.occluded(ray, oracle.t + 1e-6), true);
            ASSERT_EQ(accel.occluded(ray, oracle.t - 1e-6), false);
        }
    }
    EXPECT_GT(hits, 500);
}

TEST(Scene, PropertyRandomSmallScenesMatchBruteForce)
{
    const auto result = proptest::check_property(100, 11, [](Rng& rng, int) -> std::optional< std::string > {
        Scene scene;
        const int instances = 1 + int(rng.index(3));
        for (int k = 0; k < instances; ++k)
        {
            Instance inst;
            inst.mesh = std::make_shared< const Mesh >(random_soup(rng, 1 + int(rng.index(33))));
            inst.pose = random_pose(rng, 0.5);
            scene.instances.push_back(inst);
        }
        const AcceleratedScene accel(scene);
        for (int i = 0; i < 1000; ++i)
        {
            const Ray ray = ray_toward(3.0 * random_unit(rng), 0.8 * random_unit(rng));
            const auto hit = accel.intersect(ray);
            const BruteHit oracle = brute_force(scene, ray);
            if (hit.has_value() != oracle.hit)
                return "hit mismatch on ray " + std::to_string(i);
            if (oracle.hit && std::abs(hit->distance - oracle.t) > 1e-9)
                return "distance mismatch on ray " + std::to_string(i);
        }
        return std::nullopt;
    });
    EXPECT_TRUE(result.passed()) << result.describe();
    EXPECT_EQ(result.cases_run, 100);
}

TEST(Scene, PropertyRigidPosePreservesDistances)
{
    const auto result = proptest::check_property(100, 12, [](Rng& rng, int) -> std::optional< std::string > {
        const Mesh m = random_soup(rng, 20);
        const Pose pose = random_pose(rng, 10.0);
        if (!is_rigid(pose))
            return "generated pose is not rigid";
        const Mesh t = transformed(m, pose);
        for (std::size_t i = 0; i + 1 < m.vertices.size(); ++i)
        {
            const double d0 = (m.vertices[i] - m.vertices[i + 1]).norm();
            const double d1 = (t.vertices[i] - t.vertices[i + 1]).norm();
            if (std::abs(d1 - d0) > 1e-6 * d0)
                return "distance changed at vertex " + std::to_string(i);
        }
        validate(t);
        return std::nullopt;
    });
    EXPECT_TRUE(result.passed()) << result.describe();
}

TEST(Scene, TargetBoundsCoverOnlyTargets)
{
    Scene scene = single(make_box(Vec3(1, 1, 1)));
    EXPECT_FALSE(scene.target_bounds().has_value());
    Instance target;
    target.mesh = std::make_shared< const Mesh >(make_box(Vec3(2, 2, 2)));
    target.pose.translation() = Vec3(5, 0, 0);
    target.is_target = true;
    scene.instances.push_back(target);
    const auto tb = scene.target_bounds();
    ASSERT_TRUE(tb.has_value());
    EXPECT_TRUE(tb->lo.isApprox(Vec3(4, -1, -1)));
    EXPECT_TRUE(tb->hi.isApprox(Vec3(6, 1, 1)));
    EXPECT_TRUE(scene.bounds().lo.isApprox(Vec3(-0.5, -1, -1)));
}

TEST(Scene, ValidationRejectsBadInstances)
{
    Scene scene = single(make_box(Vec3(1, 1, 1)));
    EXPECT_NO_THROW(validate(scene));

    Scene scaled = scene;
    scaled.instances[0].pose.linear() *= 2.0;
    EXPECT_THROW(validate(scaled), ConfigError);

    Scene bad_material = scene;
    bad_material.instances[0].material.albedo = 1.5;
    EXPECT_THROW(validate(bad_material), ConfigError);

    Scene no_mesh = scene;
    no_mesh.instances[0].mesh.reset();
    EXPECT_THROW(validate(no_mesh), ConfigError);
}

TEST(Mesh, ValidationRejectsBrokenMeshes)
{
    Mesh m = make_box(Vec3(1, 1, 1));
    EXPECT_NO_THROW(validate(m));

    Mesh out_of_range = m;
    out_of_range.triangles[0][1] = 99;
    EXPECT_THROW(validate(out_of_range), FormatError);

    Mesh nan = m;
    nan.vertices[0].x() = std::numeric_limits< double >::quiet_NaN();
    EXPECT_THROW(validate(nan), FormatError);

    Mesh bad_normal = m;
    bad_normal.face_normals[0] *= 1.01;
    EXPECT_THROW(validate(bad_normal), FormatError);
}

TEST(Mesh, DegenerateTrianglesAreDroppedAndCounted)
{
    Mesh m;
    m.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(2, 0, 0)};
    m.triangles = {Eigen::Vector3i(0, 1, 2), Eigen::Vector3i(0, 1, 3), Eigen::Vector3i(1, 1, 2)};
    compute_face_normals(m);
    EXPECT_EQ(drop_degenerate(m), 2u);
    EXPECT_EQ(m.size(), 1u);
    EXPECT_NO_THROW(validate(m));
}

TEST(Mesh, PrimitiveNormalsPointOutward)
{
    for (const Mesh& m : {make_box(Vec3(1, 2, 3)), make_uv_sphere(0.7), make_cylinder(0.3, 1.0)})
    {
        validate(m);
        for (std::size_t i = 0; i < m.size(); ++i)
        {
            const auto& t = m.triangles[i];
            const Vec3 c = (m.vertices[std::size_t(t[0])] + m.vertices[std::size_t(t[1])] +
                            m.vertices[std::size_t(t[2])]) /
                           3.0;
            EXPECT_GT(m.face_normals[i].dot(c), 0.0);
        }
    }
}
