#include "slsim/config.hpp"

#include "slsim/error.hpp"
#include "slsim/image_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace slsim
{

using nlohmann::json;

namespace
{

json vec3(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json intrinsics_json(const Intrinsics& k)
{
    return {{"fx", k.fx},
            {"fy", k.fy},
            {"cx", k.cx},
            {"cy", k.cy},
            {"width", k.width},
            {"height", k.height},
            {"distortion",
             {{"k1", k.distortion.k1},
              {"k2", k.distortion.k2},
              {"k3", k.distortion.k3},
              {"p1", k.distortion.p1},
              {"p2", k.distortion.p2}}}};
}

json material_json(const Material& m)
{
    return {{"albedo", m.albedo}, {"reflectance_ratio", m.reflectance_ratio}, {"roughness", m.roughness}};
}

const char* motion_name(MotionSpec::Mode m)
{
    switch (m)
    {
    case MotionSpec::Mode::static_pose:
        return "static";
    case MotionSpec::Mode::linear_velocity:
        return "linear_velocity";
    case MotionSpec::Mode::vibration:
        return "vibration";
    case MotionSpec::Mode::rolling_shutter:
        return "rolling_shutter";
    }
    return "static";
}

json to_json(const SimConfig& c)
{
    const SensorModel& s = c.sensor;
    json overlays = json::array();
    for (const auto& o : c.overlays)
        overlays.push_back({{"name", o.name}, {"coefficients", o.coefficients}});
    return {
        {"seed", c.seed},
        {"write_ir", c.write_ir},
        {"sensor",
         {{"camera", intrinsics_json(s.camera)},
          {"projector", intrinsics_json(s.projector)},
          {"baseline_m", s.baseline_m},
          {"orientation", s.orientation == StereoOrientation::horizontal ? "horizontal" : "vertical"},
          {"depth_range_m", {s.depth_range.z_min, s.depth_range.z_max}},
          {"window_size_px", s.window_size_px},
          {"subpixel_denominator", s.subpixel_denominator},
          {"subpixel_method", s.subpixel_method == SubpixelMethod::parabolic ? "parabolic" : "equiangular"},
          {"ir_bit_depth", s.ir_bit_depth},
          {"footprint_samples", s.footprint_samples},
          {"projector_power", s.projector_power},
          {"uniqueness_ratio", s.uniqueness_ratio},
          {"min_texture_levels", s.min_texture_levels},
          {"consistency_px", s.consistency_px},
          {"reference_depth_m", s.reference_depth()}}},
        {"pattern",
         {{"file", c.pattern.file.string()},
          {"side_px", c.pattern.side_px},
          {"density", c.pattern.density},
          {"seed", c.pattern.seed}}},
        {"noise",
         {{"lens_distortion", c.noise.lens_distortion},
          {"gaussian_sigma", c.noise.gaussian_sigma},
          {"grain_sigma", c.noise.grain_sigma},
          {"scratch_count", c.noise.scratch_count},
          {"scratch_strength", c.noise.scratch_strength}}},
        {"post",
         {{"smooth_kernel_px", c.post.smooth_kernel_px},
          {"fill_holes", c.post.fill_holes},
          {"max_gap_px", c.post.max_gap_px}}},
        {"motion",
         {{"mode", motion_name(c.motion.mode)},
          {"velocity_mps", vec3(c.motion.velocity)},
          {"amplitude_m", c.motion.amplitude},
          {"exposures", c.motion.exposures},
          {"frame_time_s", c.motion.frame_time}}},
        {"scene",
         {{"ambient", c.ambient},
          {"object",
           {{"mesh", c.object.mesh.string()},
            {"primitive", c.object.primitive},
            {"size_m", c.object.size_m},
            {"unit_scale", c.object.unit_scale},
            {"position", vec3(c.object.position)},
            {"material", material_json(c.object.material)}}},
          {"background",
           {{"mode", c.background.mode},
            {"clutter_count", c.background.clutter_count},
            {"clutter_bounds_min", vec3(c.background.clutter_bounds.lo)},
            {"clutter_bounds_max", vec3(c.background.clutter_bounds.hi)},
            {"clutter_seed", c.background.clutter_seed},
            {"velocity_per_frame", vec3(c.background.velocity_per_frame)},
            {"real_depth_png", c.background.real_depth_png.string()}}}}},
        {"viewpoints",
         {{"mode", c.viewpoints.mode == ViewpointMode::icosphere ? "icosphere" : "random"},
          {"subdivision", c.viewpoints.subdivision},
          {"count", c.viewpoints.count},
          {"radius_range_m", {c.viewpoints.radius_min_m, c.viewpoints.radius_max_m}},
          {"cap_half_angle_deg", c.viewpoints.cap_half_angle_deg},
          {"cap_axis", vec3(c.viewpoints.cap_axis)},
          {"seed", c.viewpoints.seed}}},
        {"benchmark",
         {{"distances_m", c.benchmark.distances_m},
          {"tilts_deg", c.benchmark.tilts_deg},
          {"seeds", c.benchmark.seeds},
          {"base_seed", c.benchmark.base_seed},
          {"wall_material", material_json(c.benchmark.wall)},
          {"ambient", c.benchmark.ambient},
          {"workers", c.benchmark.workers},
          {"overlays", overlays}}},
    };
}

/// Reads keys of one JSON object, naming the full key path in errors.
class Reader
{
  public:
    Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {}

    template < typename T >
    T get(const std::string& key) const
    {
        try
        {
            return node_.at(key).get< T >();
        }
        catch (const json::exception& e)
        {
            throw ConfigError("config key '" + path_ + key + "': " + e.what());
        }
    }
    Vec3 vec(const std::string& key) const
    {
        const auto v = get< std::vector< double > >(key);
        if (v.size() != 3)
            fail(key, "expected 3 numbers");
        return {v[0], v[1], v[2]};
    }
    std::pair< double, double > range(const std::string& key) const
    {
        const auto v = get< std::vector< double > >(key);
        if (v.size() != 2)
            fail(key, "expected [min, max]");
        return {v[0], v[1]};
    }
    Reader sub(const std::string& key) const
    {
        if (!node_.contains(key) || !node_.at(key).is_object())
            fail(key, "expected an object");
        return Reader(node_.at(key), path_ + key + ".");
    }
    [[noreturn]] void fail(const std::string& key, const std::string& why) const
    {
        throw ConfigError("config key '" + path_ + key + "': " + why);
    }

  private:
    const json& node_;
    std::string path_;
};

Intrinsics read_intrinsics(const Reader& r)
{
    Intrinsics k;
    k.fx = r.get< double >("fx");
    k.fy = r.get< double >("fy");
    k.cx = r.get< double >("cx");
    k.cy = r.get< double >("cy");
    k.width = r.get< int >("width");
    k.height = r.get< int >("height");
    const Reader d = r.sub("distortion");
    k.distortion = {d.get< double >("k1"), d.get< double >("k2"), d.get< double >("k3"), d.get< double >("p1"),
                    d.get< double >("p2")};
    return k;
}

Material read_material(const Reader& r)
{
    Material m;
    m.albedo = r.get< double >("albedo");
    m.reflectance_ratio = r.get< double >("reflectance_ratio");
    m.roughness = r.get< double >("roughness");
    return m;
}

std::filesystem::path resolve(const std::string& p, const std::filesystem::path& base)
{
    if (p.empty())
        return {};
    const std::filesystem::path path(p);
    return std::filesystem::absolute(path.is_absolute() || base.empty() ? path : base / path).lexically_normal();
}

void reject_unknown(const json& user, const json& defaults, const std::string& path)
{
    for (auto it = user.begin(); it != user.end(); ++it)
    {
        if (!defaults.contains(it.key()))
            throw ConfigError("unknown config key '" + path + it.key() + "'");
        const json& d = defaults.at(it.key());
        if (d.is_object())
        {
            if (!it.value().is_object())
                throw ConfigError("config key '" + path + it.key() + "': expected an object");
            reject_unknown(it.value(), d, path + it.key() + ".");
        }
    }
}

SimConfig from_json(const json& j, const std::filesystem::path& base)
{
    SimConfig c;
    const Reader root(j, "");
    c.seed = root.get< std::uint64_t >("seed");
    c.write_ir = root.get< bool >("write_ir");

    const Reader s = root.sub("sensor");
    SensorModel& sm = c.sensor;
    sm.camera = read_intrinsics(s.sub("camera"));
    sm.projector = read_intrinsics(s.sub("projector"));
    sm.baseline_m = s.get< double >("baseline_m");
    const auto orientation = s.get< std::string >("orientation");
    if (orientation == "horizontal")
        sm.orientation = StereoOrientation::horizontal;
    else if (orientation == "vertical")
        sm.orientation = StereoOrientation::vertical;
    else
        s.fail("orientation", "expected horizontal or vertical");
    const auto [z_min, z_max] = s.range("depth_range_m");
    sm.depth_range = {z_min, z_max};
    sm.window_size_px = s.get< int >("window_size_px");
    sm.subpixel_denominator = s.get< int >("subpixel_denominator");
    const auto method = s.get< std::string >("subpixel_method");
    if (method == "parabolic")
        sm.subpixel_method = SubpixelMethod::parabolic;
    else if (method == "equiangular")
        sm.subpixel_method = SubpixelMethod::equiangular;
    else
        s.fail("subpixel_method", "expected parabolic or equiangular");
    sm.ir_bit_depth = s.get< int >("ir_bit_depth");
    sm.footprint_samples = s.get< int >("footprint_samples");
    sm.projector_power = s.get< double >("projector_power");
    sm.uniqueness_ratio = s.get< double >("uniqueness_ratio");
    sm.min_texture_levels = s.get< int >("min_texture_levels");
    sm.consistency_px = s.get< double >("consistency_px");
    sm.reference_depth_m = s.get< double >("reference_depth_m");

    const Reader p = root.sub("pattern");
    c.pattern.file = resolve(p.get< std::string >("file"), base);
    c.pattern.side_px = p.get< int >("side_px");
    c.pattern.density = p.get< double >("density");
    c.pattern.seed = p.get< std::uint64_t >("seed");

    const Reader n = root.sub("noise");
    c.noise.lens_distortion = n.get< bool >("lens_distortion");
    c.noise.gaussian_sigma = n.get< double >("gaussian_sigma");
    c.noise.grain_sigma = n.get< double >("grain_sigma");
    c.noise.scratch_count = n.get< int >("scratch_count");
    c.noise.scratch_strength = n.get< double >("scratch_strength");
    if (!c.noise.valid())
        throw ConfigError("config section 'noise': sigmas and scratch count must be non-negative");

    const Reader pp = root.sub("post");
    c.post.smooth_kernel_px = pp.get< int >("smooth_kernel_px");
    c.post.fill_holes = pp.get< bool >("fill_holes");
    c.post.max_gap_px = pp.get< int >("max_gap_px");
    if (c.post.smooth_kernel_px < 1 || c.post.smooth_kernel_px % 2 == 0 || c.post.max_gap_px < 0)
        throw ConfigError("config section 'post': kernel must be odd and positive, max gap non-negative");

    const Reader m = root.sub("motion");
    const auto mode = m.get< std::string >("mode");
    if (mode == "static")
        c.motion.mode = MotionSpec::Mode::static_pose;
    else if (mode == "linear_velocity")
        c.motion.mode = MotionSpec::Mode::linear_velocity;
    else if (mode == "vibration")
        c.motion.mode = MotionSpec::Mode::vibration;
    else if (mode == "rolling_shutter")
        c.motion.mode = MotionSpec::Mode::rolling_shutter;
    else
        m.fail("mode", "expected static, linear_velocity, vibration or rolling_shutter");
    c.motion.velocity = m.vec("velocity_mps");
    c.motion.amplitude = m.get< double >("amplitude_m");
    c.motion.exposures = m.get< int >("exposures");
    c.motion.frame_time = m.get< double >("frame_time_s");
    if (!c.motion.valid())
        throw ConfigError("config section 'motion': exposures >= 1, amplitude >= 0, frame time > 0 required");

    const Reader sc = root.sub("scene");
    c.ambient = sc.get< double >("ambient");
    const Reader o = sc.sub("object");
    c.object.mesh = resolve(o.get< std::string >("mesh"), base);
    c.object.primitive = o.get< std::string >("primitive");
    if (c.object.primitive != "sphere" && c.object.primitive != "box" && c.object.primitive != "cylinder")
        o.fail("primitive", "expected sphere, box or cylinder");
    c.object.size_m = o.get< double >("size_m");
    c.object.unit_scale = o.get< double >("unit_scale");
    c.object.position = o.vec("position");
    c.object.material = read_material(o.sub("material"));
    const Reader b = sc.sub("background");
    c.background.mode = b.get< std::string >("mode");
    if (c.background.mode != "none" && c.background.mode != "clutter" && c.background.mode != "geometry" &&
        c.background.mode != "real")
        b.fail("mode", "expected none, clutter, geometry or real");
    c.background.clutter_count = b.get< int >("clutter_count");
    c.background.clutter_bounds = {b.vec("clutter_bounds_min"), b.vec("clutter_bounds_max")};
    c.background.clutter_seed = b.get< std::uint64_t >("clutter_seed");
    c.background.velocity_per_frame = b.vec("velocity_per_frame");
    c.background.real_depth_png = resolve(b.get< std::string >("real_depth_png"), base);
    if (c.background.mode == "real" && c.background.real_depth_png.empty())
        b.fail("real_depth_png", "required when mode is real");

    const Reader v = root.sub("viewpoints");
    const auto vmode = v.get< std::string >("mode");
    if (vmode == "icosphere")
        c.viewpoints.mode = ViewpointMode::icosphere;
    else if (vmode == "random")
        c.viewpoints.mode = ViewpointMode::random;
    else
        v.fail("mode", "expected icosphere or random");
    c.viewpoints.subdivision = v.get< int >("subdivision");
    c.viewpoints.count = v.get< int >("count");
    std::tie(c.viewpoints.radius_min_m, c.viewpoints.radius_max_m) = v.range("radius_range_m");
    c.viewpoints.cap_half_angle_deg = v.get< double >("cap_half_angle_deg");
    c.viewpoints.cap_axis = v.vec("cap_axis");
    c.viewpoints.seed = v.get< std::uint64_t >("seed");

    const Reader bm = root.sub("benchmark");
    c.benchmark.distances_m = bm.get< std::vector< double > >("distances_m");
    c.benchmark.tilts_deg = bm.get< std::vector< double > >("tilts_deg");
    c.benchmark.seeds = bm.get< int >("seeds");
    c.benchmark.base_seed = bm.get< std::uint64_t >("base_seed");
    c.benchmark.wall = read_material(bm.sub("wall_material"));
    c.benchmark.ambient = bm.get< double >("ambient");
    c.benchmark.workers = bm.get< unsigned >("workers");
    const json& overlays = j.at("benchmark").at("overlays");
    if (!overlays.is_array())
        bm.fail("overlays", "expected an array");
    for (const auto& item : overlays)
    {
        const Reader r(item, "benchmark.overlays[].");
        c.overlays.push_back({r.get< std::string >("name"), r.get< std::vector< double > >("coefficients")});
    }
    return c;
}

} // namespace

SimConfig default_config()
{
    SimConfig c;
    c.sensor = SensorModel{};
    return c;
}

SimConfig parse_config(const std::string& text, const std::filesystem::path& base_dir)
{
    json user;
    try
    {
        user = json::parse(text);
    }
    catch (const json::parse_error& e)
    {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!user.is_object())
        throw ConfigError("config must be a JSON object");
    json merged = to_json(default_config());
    reject_unknown(user, merged, "");
    merged.merge_patch(user);
    return from_json(merged, base_dir);
}

SimConfig load_config(const std::filesystem::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot read config " + path.string());
    std::ostringstream text;
    text << f.rdbuf();
    return parse_config(text.str(), path.parent_path());
}

std::string dump_config(const SimConfig& config) { return to_json(config).dump(2) + "\n"; }

std::uint64_t fnv1a64(const std::string& bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes)
    {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t config_hash(const SimConfig& config) { return fnv1a64(to_json(config).dump()); }

SensorModel build_sensor(const SimConfig& config)
{
    SensorModel s = config.sensor;
    if (!config.pattern.file.empty())
    {
        if (!std::filesystem::exists(config.pattern.file))
            throw IoError("pattern file not found: " + config.pattern.file.string());
        s.pattern = std::make_shared< const Pattern >(pad_pattern_square(read_intensity_png(config.pattern.file)));
    }
    else
    {
        if (config.pattern.side_px < 64 || !(config.pattern.density > 0 && config.pattern.density < 0.5))
            throw ConfigError("config section 'pattern': side_px >= 64 and density in (0, 0.5) required");
        s.pattern = std::make_shared< const Pattern >(
            generate_dot_pattern(config.pattern.side_px, config.pattern.density, config.pattern.seed, s.window_size_px));
    }
    validate(s);
    return s;
}

} // namespace slsim
