#include "slsim/scene.hpp"

#include "slsim/error.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

namespace slsim
{

Aabb Scene::bounds() const
{
    Aabb box;
    for (const auto& inst : instances)
        for (const auto& v : inst.mesh->vertices)
            box.extend(inst.pose * v);
    return box;
}

std::optional< Aabb > Scene::target_bounds() const
{
    std::optional< Aabb > box;
    for (const auto& inst : instances)
    {
        if (!inst.is_target)
            continue;
        if (!box)
            box = Aabb{};
        for (const auto& v : inst.mesh->vertices)
            box->extend(inst.pose * v);
    }
    return box;
}

void validate(const Scene& scene)
{
    for (std::size_t i = 0; i < scene.instances.size(); ++i)
    {
        const auto& inst = scene.instances[i];
        std::ostringstream where;
        where << "instance " << i;
        if (!inst.mesh)
            throw ConfigError(where.str() + " has no mesh");
        if (!is_rigid(inst.pose))
            throw ConfigError(where.str() + " pose is not a rigid transform");
        if (!inst.material.valid())
            throw ConfigError(where.str() + " material parameters out of range");
    }
    if (!(scene.ambient >= 0.0))
        throw ConfigError("ambient irradiance must be non-negative");
}

AcceleratedScene build_accelerator(Scene scene) { return AcceleratedScene(std::move(scene)); }

AcceleratedScene::AcceleratedScene(Scene scene) : scene_(std::move(scene))
{
    std::vector< Vec3 > centroids;
    for (std::size_t i = 0; i < scene_.instances.size(); ++i)
    {
        const auto& inst = scene_.instances[i];
        for (std::size_t t = 0; t < inst.mesh->triangles.size(); ++t)
        {
            const auto& idx = inst.mesh->triangles[t];
            const Vec3 a = inst.pose * inst.mesh->vertices[idx[0]];
            const Vec3 b = inst.pose * inst.mesh->vertices[idx[1]];
            const Vec3 c = inst.pose * inst.mesh->vertices[idx[2]];
            tris_.push_back({a, b - a, c - a, int(i), int(t)});
            centroids.push_back((a + b + c) / 3.0);
        }
    }
    if (!tris_.empty())
    {
        nodes_.reserve(2 * tris_.size());
        build(0, int(tris_.size()), centroids);
    }
}

int AcceleratedScene::build(int first, int count, std::vector< Vec3 >& centroids)
{
    const int index = int(nodes_.size());
    nodes_.emplace_back();
    Aabb box, cbox;
    for (int i = first; i < first + count; ++i)
    {
        const auto& t = tris_[i];
        box.extend(t.v0);
        box.extend(t.v0 + t.e1);
        box.extend(t.v0 + t.e2);
        cbox.extend(centroids[i]);
    }
    nodes_[index].box = box;

    constexpr int kLeafSize = 4;
    int axis = 0;
    cbox.extent().maxCoeff(&axis);
    if (count <= kLeafSize || cbox.extent()[axis] <= 0.0)
    {
        nodes_[index].left = first;
        nodes_[index].count = count;
        return index;
    }

    // Median split on the longest centroid axis; permutation applied to tris_ and centroids together.
    std::vector< int > order(count);
    std::iota(order.begin(), order.end(), first);
    const int mid = count / 2;
    std::nth_element(order.begin(), order.begin() + mid, order.end(), [&](int a, int b) {
        return centroids[a][axis] < centroids[b][axis] || (centroids[a][axis] == centroids[b][axis] && a < b);
    });
    std::vector< Tri > tmp_tris;
    std::vector< Vec3 > tmp_cent;
    tmp_tris.reserve(count);
    tmp_cent.reserve(count);
    for (int k : order)
    {
        tmp_tris.push_back(tris_[k]);
        tmp_cent.push_back(centroids[k]);
    }
    std::copy(tmp_tris.begin(), tmp_tris.end(), tris_.begin() + first);
    std::copy(tmp_cent.begin(), tmp_cent.end(), centroids.begin() + first);

    // Left child is always index + 1; internal nodes store the right child in `left`.
    build(first, mid, centroids);
    const int right = build(first + mid, count - mid, centroids);
    nodes_[index].left = right;
    nodes_[index].count = 0;
    return index;
}

namespace
{

bool slab(const Aabb& box, const Vec3& origin, const Vec3& inv_dir, double t_max, double& t_enter)
{
    double t0 = 0.0, t1 = t_max;
    for (int k = 0; k < 3; ++k)
    {
        double a = (box.lo[k] - origin[k]) * inv_dir[k];
        double b = (box.hi[k] - origin[k]) * inv_dir[k];
        if (a > b)
            std::swap(a, b);
        // NaN (0 * inf) means the ray lies in the slab plane; keep the interval unchanged.
        if (!(a != a))
            t0 = std::max(t0, a);
        if (!(b != b))
            t1 = std::min(t1, b);
        if (t0 > t1)
            return false;
    }
    t_enter = t0;
    return true;
}

} // namespace

template < bool AnyHit >
bool AcceleratedScene::traverse(const Ray& ray, double t_max, int& tri_out, double& t_out, double& u_out,
                                double& v_out) const
{
    if (nodes_.empty())
        return false;
    const Vec3 inv_dir = ray.direction.cwiseInverse();
    int stack[128];
    int sp = 0;
    stack[sp++] = 0;
    bool found = false;
    double best = t_max;
    while (sp > 0)
    {
        const int ni = stack[--sp];
        const Node& node = nodes_[ni];
        double t_enter = 0.0;
        if (!slab(node.box, ray.origin, inv_dir, best, t_enter))
            continue;
        if (node.count > 0)
        {
            for (int i = node.left; i < node.left + node.count; ++i)
            {
                const Tri& tri = tris_[i];
                double t, u, v;
                if (intersect_triangle(ray, tri.v0, tri.e1, tri.e2, kMinDistance, best, t, u, v))
                {
                    found = true;
                    best = t;
                    tri_out = i;
                    t_out = t;
                    u_out = u;
                    v_out = v;
                    if constexpr (AnyHit)
                        return true;
                }
            }
            continue;
        }
        const int l = ni + 1;
        const int r = node.left;
        stack[sp++] = r;
        stack[sp++] = l;
    }
    return found;
}

std::optional< Hit > AcceleratedScene::intersect(const Ray& ray) const
{
    int tri = -1;
    double t = 0, u = 0, v = 0;
    if (!traverse< false >(ray, std::numeric_limits< double >::infinity(), tri, t, u, v))
        return std::nullopt;
    return shade(ray, tri, t, u, v);
}

bool AcceleratedScene::occluded(const Ray& ray, double max_distance) const
{
    int tri = -1;
    double t = 0, u = 0, v = 0;
    return traverse< true >(ray, max_distance, tri, t, u, v);
}

Hit AcceleratedScene::shade(const Ray& ray, int tri_index, double t, double u, double v) const
{
    const Tri& tri = tris_[tri_index];
    const Instance& inst = scene_.instances[tri.instance];
    const Mesh& mesh = *inst.mesh;
    const auto& idx = mesh.triangles[tri.local];
    const Mat3 rot = inst.pose.linear();
    const double w = 1.0 - u - v;

    Hit hit;
    hit.distance = t;
    hit.point = ray.origin + t * ray.direction;
    hit.instance = tri.instance;
    hit.triangle = tri.local;
    hit.material = &inst.material;

    Vec3 ng = rot * mesh.face_normals[tri.local];
    Vec3 ns = ng;
    if (!mesh.vertex_normals.empty())
    {
        const Vec3 interp = w * mesh.vertex_normals[idx[0]] + u * mesh.vertex_normals[idx[1]] + v * mesh.vertex_normals[idx[2]];
        if (interp.norm() > 1e-12)
            ns = (rot * interp).normalized();
    }
    if (!mesh.uvs.empty())
    {
        hit.uv = w * mesh.uvs[idx[0]] + u * mesh.uvs[idx[1]] + v * mesh.uvs[idx[2]];
        if (mesh.normal_map)
        {
            // Tangent frame from UV gradients of the triangle.
            const Vec2 duv1 = mesh.uvs[idx[1]] - mesh.uvs[idx[0]];
            const Vec2 duv2 = mesh.uvs[idx[2]] - mesh.uvs[idx[0]];
            const double det = duv1.x() * duv2.y() - duv2.x() * duv1.y();
            if (std::abs(det) > 1e-14)
            {
                Vec3 tangent = (duv2.y() * tri.e1 - duv1.y() * tri.e2) / det;
                tangent = (tangent - ns * ns.dot(tangent));
                if (tangent.norm() > 1e-12)
                {
                    tangent.normalize();
                    const Vec3 bitangent = ns.cross(tangent);
                    const Vec3 m = mesh.normal_map->sample(hit.uv);
                    ns = (m.x() * tangent + m.y() * bitangent + m.z() * ns).normalized();
                }
            }
        }
    }
    if (ng.dot(ray.direction) > 0)
        ng = -ng;
    if (ns.dot(ray.direction) > 0)
        ns = -ns;
    hit.geometric_normal = ng;
    hit.normal = ns;
    return hit;
}

template bool AcceleratedScene::traverse< true >(const Ray&, double, int&, double&, double&, double&) const;
template bool AcceleratedScene::traverse< false >(const Ray&, double, int&, double&, double&, double&) const;

} // namespace slsim
