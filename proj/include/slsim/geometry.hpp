#ifndef SLSIM_GEOMETRY_HPP
#define SLSIM_GEOMETRY_HPP

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <limits>

namespace slsim
{

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Rigid transform. Camera poses are world_from_camera.
using Pose = Eigen::Isometry3d;

struct Ray
{
    Vec3 origin = Vec3::Zero();
    Vec3 direction = Vec3::UnitZ(); // unit length
};

struct Aabb
{
    Vec3 lo = Vec3::Constant(std::numeric_limits< double >::infinity());
    Vec3 hi = Vec3::Constant(-std::numeric_limits< double >::infinity());

    void extend(const Vec3& p)
    {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    void extend(const Aabb& b)
    {
        lo = lo.cwiseMin(b.lo);
        hi = hi.cwiseMax(b.hi);
    }
    [[nodiscard]] bool empty() const { return (hi.array() < lo.array()).any(); }
    [[nodiscard]] Vec3 center() const { return 0.5 * (lo + hi); }
    [[nodiscard]] Vec3 extent() const { return hi - lo; }
    [[nodiscard]] bool contains(const Aabb& b) const
    {
        return (b.lo.array() >= lo.array()).all() && (b.hi.array() <= hi.array()).all();
    }
    [[nodiscard]] bool overlaps(const Aabb& b) const
    {
        return (b.lo.array() <= hi.array()).all() && (lo.array() <= b.hi.array()).all();
    }
};

/// Rotation orthonormal within `tol` and det = +1.
inline bool is_rigid(const Pose& pose, double tol = 1e-6)
{
    const Mat3 r = pose.linear();
    return (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() < tol && std::abs(r.determinant() - 1.0) < tol &&
           pose.matrix().allFinite() && pose.matrix().row(3).isApprox(Eigen::RowVector4d(0, 0, 0, 1));
}

/// Camera convention: +z optical axis, +x right, +y down. Returns world_from_camera.
inline Pose look_at(const Vec3& eye, const Vec3& target, const Vec3& up_hint = Vec3::UnitY())
{
    const Vec3 z = (target - eye).normalized();
    Vec3 up = up_hint.normalized();
    if (std::abs(z.dot(up)) > 1.0 - 1e-9)
        up = std::abs(z.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitZ();
    const Vec3 x = z.cross(up).normalized(); // image right
    const Vec3 y = z.cross(x);               // image down
    Pose pose = Pose::Identity();
    pose.linear().col(0) = x;
    pose.linear().col(1) = y;
    pose.linear().col(2) = z;
    pose.translation() = eye;
    return pose;
}

} // namespace slsim

#endif // SLSIM_GEOMETRY_HPP
