#include "slsim/dataset.hpp"

#include "slsim/compositor.hpp"
#include "slsim/error.hpp"
#include "slsim/image_io.hpp"
#include "slsim/mesh_io.hpp"
#include "slsim/parallel.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>

namespace slsim
{

using nlohmann::json;

namespace
{

constexpr double kFloorSide = 6.0;

std::string frame_name(const char* prefix, int index, const char* ext)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%05d.%s", prefix, index, ext);
    return buf;
}

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast< unsigned long long >(v));
    return buf;
}

void write_atomically(const std::filesystem::path& path, const std::string& text)
{
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f)
            throw IoError("cannot write " + tmp.string());
        f << text;
        if (!f)
            throw IoError("failed writing " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw IoError("cannot replace " + path.string() + ": " + ec.message());
}

} // namespace

Scene build_scene(const SimConfig& config)
{
    const ObjectConfig& o = config.object;
    Instance target;
    if (!o.mesh.empty())
    {
        if (!std::filesystem::exists(o.mesh))
            throw IoError("object mesh not found: " + o.mesh.string());
        target.mesh = std::make_shared< const Mesh >(load_mesh(o.mesh, o.unit_scale).mesh);
    }
    else if (o.primitive == "box")
        target.mesh = std::make_shared< const Mesh >(make_box(Vec3::Constant(o.size_m)));
    else if (o.primitive == "cylinder")
        target.mesh = std::make_shared< const Mesh >(make_cylinder(0.5 * o.size_m, o.size_m, 48));
    else
        target.mesh = std::make_shared< const Mesh >(make_uv_sphere(0.5 * o.size_m, 32, 64));
    target.pose = Pose::Identity();
    target.pose.translation() = o.position;
    target.material = o.material;
    target.is_target = true;

    Scene scene;
    scene.ambient = config.ambient;
    scene.instances.push_back(std::move(target));

    const BackgroundConfig& bg = config.background;
    if (bg.mode == "clutter")
        scene = add_primitive_clutter(scene, bg.clutter_count, bg.clutter_bounds, bg.clutter_seed);
    else if (bg.mode == "geometry")
    {
        const Aabb box = scene.bounds();
        Instance floor;
        floor.mesh = std::make_shared< const Mesh >(make_quad(kFloorSide, kFloorSide));
        floor.pose = Pose::Identity();
        floor.pose.linear() = Eigen::AngleAxisd(std::numbers::pi / 2, Vec3::UnitX()).toRotationMatrix();
        floor.pose.translation() = Vec3(box.center().x(), box.lo.y() - 1e-3, box.center().z());
        scene.instances.push_back(std::move(floor));
    }
    validate(scene);
    return scene;
}

Scene scene_for_frame(const Scene& base, const SimConfig& config, int frame)
{
    if (config.background.mode != "geometry" || config.background.velocity_per_frame.isZero())
        return base;
    return move_background(base, config.background.velocity_per_frame, frame);
}

Pose canonical_pose(const Pose& pose)
{
    Pose out = Pose::Identity();
    out.linear() = Eigen::Quaterniond(pose.linear()).normalized().toRotationMatrix();
    out.translation() = pose.translation();
    return out;
}

std::vector< Pose > dataset_viewpoints(const SimConfig& config, const Scene& scene)
{
    const auto target = scene.target_bounds();
    const Vec3 centroid = target ? target->center() : scene.bounds().center();
    std::vector< Pose > poses = sample_viewpoints(config.viewpoints, centroid, config.sensor.depth_range);
    for (Pose& p : poses)
        p = canonical_pose(p);
    return poses;
}

std::string manifest_json(const Manifest& m)
{
    json frames = json::array();
    for (const auto& f : m.frames)
    {
        const Eigen::Quaterniond q(f.pose.linear());
        const Vec3 t = f.pose.translation();
        frames.push_back({{"index", f.index},
                          {"depth", f.depth_file},
                          {"ir", f.ir_file.empty() ? json(nullptr) : json(f.ir_file)},
                          {"pose", {{"quaternion_wxyz", {q.w(), q.x(), q.y(), q.z()}}, {"translation", {t.x(), t.y(), t.z()}}}},
                          {"config_hash", hex64(m.config_hash)},
                          {"seed", f.seed}});
    }
    const json doc = {{"config_hash", hex64(m.config_hash)},
                      {"config", m.config_file},
                      {"width", m.width},
                      {"height", m.height},
                      {"depth_encoding", "uint16 millimeters, 0 = invalid"},
                      {"throughput", {{"seconds", m.seconds}, {"frames_per_second", m.frames_per_second}}},
                      {"frames", frames}};
    return doc.dump(2) + "\n";
}

Manifest read_manifest(const std::filesystem::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot read manifest " + path.string());
    Manifest m;
    try
    {
        const json doc = json::parse(f);
        m.config_hash = std::stoull(doc.at("config_hash").get< std::string >(), nullptr, 16);
        m.config_file = doc.at("config").get< std::string >();
        m.width = doc.at("width").get< int >();
        m.height = doc.at("height").get< int >();
        m.seconds = doc.at("throughput").at("seconds").get< double >();
        m.frames_per_second = doc.at("throughput").at("frames_per_second").get< double >();
        for (const auto& item : doc.at("frames"))
        {
            FrameRecord r;
            r.index = item.at("index").get< int >();
            r.depth_file = item.at("depth").get< std::string >();
            if (!item.at("ir").is_null())
                r.ir_file = item.at("ir").get< std::string >();
            const auto q = item.at("pose").at("quaternion_wxyz").get< std::vector< double > >();
            const auto t = item.at("pose").at("translation").get< std::vector< double > >();
            if (q.size() != 4 || t.size() != 3)
                throw FormatError(path.string() + ": pose needs 4 quaternion and 3 translation values");
            r.pose = Pose::Identity();
            r.pose.linear() = Eigen::Quaterniond(q[0], q[1], q[2], q[3]).normalized().toRotationMatrix();
            r.pose.translation() = Vec3(t[0], t[1], t[2]);
            r.seed = item.at("seed").get< std::uint64_t >();
            m.frames.push_back(std::move(r));
        }
    }
    catch (const json::exception& e)
    {
        throw FormatError(path.string() + ": malformed manifest: " + e.what());
    }
    catch (const std::invalid_argument&)
    {
        throw FormatError(path.string() + ": malformed config hash");
    }
    std::sort(m.frames.begin(), m.frames.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
    return m;
}

DatasetSummary generate_dataset(const SimConfig& config, const DatasetOptions& options, std::ostream* log)
{
    const SensorModel sensor = build_sensor(config);
    const Scene base = build_scene(config);
    std::vector< Pose > poses = dataset_viewpoints(config, base);
    if (options.max_frames >= 0 && options.max_frames < int(poses.size()))
        poses.resize(std::size_t(options.max_frames));
    std::optional< DepthMap > real_background;
    if (config.background.mode == "real")
    {
        if (!std::filesystem::exists(config.background.real_depth_png))
            throw IoError("background depth not found: " + config.background.real_depth_png.string());
        real_background = read_depth_png(config.background.real_depth_png);
        if (real_background->rows() != sensor.camera.height || real_background->cols() != sensor.camera.width)
            throw DimensionError("background depth " + config.background.real_depth_png.string() +
                                 " does not match the camera resolution");
    }

    std::error_code ec;
    std::filesystem::create_directories(options.out_dir, ec);
    if (ec)
        throw IoError("cannot create " + options.out_dir.string() + ": " + ec.message());

    const std::uint64_t hash = config_hash(config);
    const std::filesystem::path manifest_path = options.out_dir / "manifest.json";
    std::map< int, FrameRecord > done;
    if (std::filesystem::exists(manifest_path))
    {
        const Manifest previous = read_manifest(manifest_path);
        if (previous.config_hash != hash)
            throw ConfigError(manifest_path.string() + " was written by a different configuration (hash " +
                              hex64(previous.config_hash) + ", now " + hex64(hash) + ")");
        for (const auto& r : previous.frames)
            if (r.index >= 0 && r.index < int(poses.size()) && std::filesystem::exists(options.out_dir / r.depth_file) &&
                (r.ir_file.empty() || std::filesystem::exists(options.out_dir / r.ir_file)))
                done.emplace(r.index, r);
    }
    write_atomically(options.out_dir / "config.json", dump_config(config));

    Manifest manifest;
    manifest.config_hash = hash;
    manifest.config_file = "config.json";
    manifest.width = sensor.camera.width;
    manifest.height = sensor.camera.height;
    std::mutex writer;
    auto flush = [&] {
        manifest.frames.clear();
        for (const auto& [index, record] : done)
            manifest.frames.push_back(record);
        write_atomically(manifest_path, manifest_json(manifest));
    };
    flush();

    std::vector< int > todo;
    for (int i = 0; i < int(poses.size()); ++i)
        if (!done.contains(i))
            todo.push_back(i);

    const Pipeline pipeline(sensor, config.noise, config.post);
    const auto start = std::chrono::steady_clock::now();
    parallel_for(
        0, int(todo.size()),
        [&](int k) {
            const int index = todo[std::size_t(k)];
            const AcceleratedScene accel(scene_for_frame(base, config, index));
            const std::uint64_t seed = config.seed + std::uint64_t(index);
            const Frame frame = pipeline.run(accel, poses[std::size_t(index)], config.motion, seed);
            FrameRecord rec;
            rec.index = index;
            rec.pose = poses[std::size_t(index)];
            rec.seed = seed;
            rec.depth_file = frame_name("depth", index, "png");
            const DepthMap depth =
                real_background ? blend_real_background(frame.post_depth, *real_background) : frame.post_depth;
            write_depth_png(options.out_dir / rec.depth_file, depth);
            if (config.write_ir)
            {
                rec.ir_file = frame_name("ir", index, "png");
                write_intensity_png(options.out_dir / rec.ir_file, frame.noisy.intensities, 16);
            }
            const std::lock_guard lock(writer);
            done.emplace(index, rec);
            flush();
        },
        std::max(1u, options.jobs));
    const double seconds = std::chrono::duration< double >(std::chrono::steady_clock::now() - start).count();

    DatasetSummary summary;
    summary.frames_total = int(poses.size());
    summary.frames_rendered = int(todo.size());
    summary.frames_resumed = summary.frames_total - summary.frames_rendered;
    summary.seconds = seconds;
    summary.frames_per_second = seconds > 0 ? summary.frames_rendered / seconds : 0.0;
    summary.manifest = manifest_path;
    manifest.seconds = seconds;
    manifest.frames_per_second = summary.frames_per_second;
    flush();
    if (log)
        *log << "simulated " << summary.frames_rendered << " frames (" << summary.frames_resumed << " resumed) at "
             << sensor.camera.width << "x" << sensor.camera.height << " in " << seconds << " s: "
             << summary.frames_per_second << " frames/s with " << std::max(1u, options.jobs) << " job(s)\n";
    return summary;
}

std::vector< std::filesystem::path > write_frame_stages(const Frame& frame, int ir_bit_depth,
                                                        const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
    const int png_bits = ir_bit_depth > 8 ? 16 : 8;
    std::vector< std::filesystem::path > out{dir / "ir.png", dir / "ir_noisy.png", dir / "disparity.pfm",
                                             dir / "depth_raw.png", dir / "depth_post.png"};
    write_intensity_png(out[0], frame.ideal.intensities, png_bits);
    write_intensity_png(out[1], frame.noisy.intensities, png_bits);
    write_pfm(out[2], frame.disparity.values);
    write_depth_png(out[3], frame.raw_depth);
    write_depth_png(out[4], frame.post_depth);
    return out;
}

} // namespace slsim
