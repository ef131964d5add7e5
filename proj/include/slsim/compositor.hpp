#ifndef SLSIM_COMPOSITOR_HPP
#define SLSIM_COMPOSITOR_HPP

#include "slsim/depth_map.hpp"
#include "slsim/scene.hpp"

#include <cstdint>

namespace slsim
{

/// Adds `count` random boxes, spheres and cylinders with random poses, sizes and materials. Each
/// primitive's world bounding box lies inside `bounds` and clear of the target instances' bounding box.
/// Placement uses rejection sampling; throws ConfigError if a primitive cannot be placed.
Scene add_primitive_clutter(const Scene& scene, int count, const Aabb& bounds, std::uint64_t seed);

/// Occlusion-correct composition of a reconstructed scan over a real background scan: per pixel the
/// nearest valid layer wins. Throws DimensionError when resolutions differ.
DepthMap blend_real_background(const DepthMap& foreground, const DepthMap& background);

/// Scene instances whose role is background get re-posed for frame `frame`: translated along `velocity`
/// (m per frame). Realizes moving predefined geometry across a sequence.
Scene move_background(const Scene& scene, const Vec3& velocity_per_frame, int frame);

} // namespace slsim

#endif // SLSIM_COMPOSITOR_HPP
