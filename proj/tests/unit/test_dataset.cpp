#include "temp_dir.hpp"

#include "slsim/config.hpp"
#include "slsim/dataset.hpp"
#include "slsim/error.hpp"
#include "slsim/image_io.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace slsim;
namespace fs = std::filesystem;

namespace
{

// Quarter-VGA camera keeps each frame fast while exercising the full pipeline.
SimConfig small_config()
{
    SimConfig c = parse_config(R"({
        "sensor": {"camera": {"width": 160, "height": 120, "fx": 145, "fy": 145, "cx": 79.5, "cy": 59.5}},
        "pattern": {"side_px": 256},
        "scene": {"background": {"mode": "geometry"}}
    })");
    c.sensor.projector.width = c.sensor.projector.height = 256;
    c.sensor.projector.fx = c.sensor.projector.fy = 232;
    c.sensor.projector.cx = c.sensor.projector.cy = 127.5;
    return c;
}

std::set< std::string > files_in(const fs::path& dir)
{
    std::set< std::string > out;
    for (const auto& e : fs::directory_iterator(dir))
        out.insert(e.path().filename().string());
    return out;
}

} // namespace

TEST(Dataset, TwelveIcosphereFramesAndManifest)
{
    proptest::TempDir dir("ds12");
    const SimConfig c = small_config();
    const DatasetSummary s = generate_dataset(c, DatasetOptions{dir.path(), 1, -1});
    EXPECT_EQ(s.frames_total, 12);
    EXPECT_EQ(s.frames_rendered, 12);
    EXPECT_GT(s.frames_per_second, 0.0);
    const Manifest m = read_manifest(s.manifest);
    ASSERT_EQ(m.frames.size(), 12u);
    EXPECT_EQ(m.config_hash, config_hash(c));
    EXPECT_EQ(m.width, 160);
    EXPECT_EQ(m.height, 120);
    for (int i = 0; i < 12; ++i)
    {
        EXPECT_EQ(m.frames[std::size_t(i)].index, i);
        EXPECT_EQ(m.frames[std::size_t(i)].seed, c.seed + std::uint64_t(i));
    }
}

TEST(Dataset, ManifestListsEveryEmittedFileOnce)
{
    proptest::TempDir dir("complete");
    SimConfig c = small_config();
    c.write_ir = true;
    generate_dataset(c, DatasetOptions{dir.path(), 1, 4});
    const Manifest m = read_manifest(dir / "manifest.json");
    std::multiset< std::string > listed{m.config_file};
    for (const auto& f : m.frames)
    {
        listed.insert(f.depth_file);
        listed.insert(f.ir_file);
    }
    for (const auto& name : listed)
        EXPECT_EQ(listed.count(name), 1u) << name;
    std::set< std::string > on_disk = files_in(dir.path());
    on_disk.erase("manifest.json");
    EXPECT_EQ(on_disk, std::set< std::string >(listed.begin(), listed.end()));
}

TEST(Dataset, RerunIsBitIdentical)
{
    proptest::TempDir a("run_a"), b("run_b");
    const SimConfig c = small_config();
    generate_dataset(c, DatasetOptions{a.path(), 1, 4});
    generate_dataset(c, DatasetOptions{b.path(), 1, 4});
    for (const auto& name : files_in(a.path()))
        if (name != "manifest.json")
            EXPECT_EQ(proptest::read_bytes(a / name), proptest::read_bytes(b / name)) << name;
    const Manifest ma = read_manifest(a / "manifest.json"), mb = read_manifest(b / "manifest.json");
    for (std::size_t i = 0; i < ma.frames.size(); ++i)
        EXPECT_TRUE(ma.frames[i].pose.matrix() == mb.frames[i].pose.matrix());
}

TEST(Dataset, ParallelJobsMatchSerial)
{
    proptest::TempDir a("serial"), b("parallel");
    const SimConfig c = small_config();
    generate_dataset(c, DatasetOptions{a.path(), 1, 3});
    generate_dataset(c, DatasetOptions{b.path(), 3, 3});
    for (int i = 0; i < 3; ++i)
    {
        const std::string name = "depth_0000" + std::to_string(i) + ".png";
        EXPECT_EQ(proptest::read_bytes(a / name), proptest::read_bytes(b / name)) << name;
    }
}

TEST(Dataset, ManifestPoseReRendersIdentically)
{
    proptest::TempDir dir("rerender");
    const SimConfig c = small_config();
    generate_dataset(c, DatasetOptions{dir.path(), 1, 3});
    const Manifest m = read_manifest(dir / "manifest.json");
    const SimConfig reloaded = load_config(dir / m.config_file);
    const Pipeline pipeline(build_sensor(reloaded), reloaded.noise, reloaded.post);
    const Scene base = build_scene(reloaded);
    for (const FrameRecord& f : m.frames)
    {
        const AcceleratedScene accel(scene_for_frame(base, reloaded, f.index));
        const Frame frame = pipeline.run(accel, f.pose, reloaded.motion, f.seed);
        const PngImage stored = read_png(dir / f.depth_file);
        EXPECT_TRUE((stored.planes[0] == encode_depth_mm(frame.post_depth)).all()) << f.depth_file;
        EXPECT_GT(frame.post_depth.valid_count(), 0);
    }
}

TEST(Dataset, CanonicalPoseSurvivesManifestRoundTrip)
{
    const Pose p = canonical_pose(sample_viewpoints(ViewpointConfig{}, Vec3(0.1, 0, 0), DepthRange{0.4, 8})[3]);
    Manifest m;
    m.frames.push_back(FrameRecord{0, "depth_00000.png", "", p, 5});
    proptest::TempDir dir("pose");
    dir.write("manifest.json", manifest_json(m));
    const Manifest back = read_manifest(dir / "manifest.json");
    ASSERT_EQ(back.frames.size(), 1u);
    EXPECT_TRUE(back.frames[0].pose.matrix() == p.matrix());
    EXPECT_TRUE(canonical_pose(p).matrix() == p.matrix());
}

TEST(Dataset, InterruptedRunResumes)
{
    proptest::TempDir fresh("fresh"), resumed("resumed");
    const SimConfig c = small_config();
    generate_dataset(c, DatasetOptions{fresh.path(), 1, 6});
    generate_dataset(c, DatasetOptions{resumed.path(), 1, 2});
    // Losing a frame file forces that frame to be rendered again.
    fs::remove(resumed / "depth_00001.png");
    const DatasetSummary s = generate_dataset(c, DatasetOptions{resumed.path(), 1, 6});
    EXPECT_EQ(s.frames_resumed, 1);
    EXPECT_EQ(s.frames_rendered, 5);
    EXPECT_EQ(files_in(fresh.path()), files_in(resumed.path()));
    for (const auto& name : files_in(fresh.path()))
        if (name != "manifest.json")
            EXPECT_EQ(proptest::read_bytes(fresh / name), proptest::read_bytes(resumed / name)) << name;
}

TEST(Dataset, ResumeRefusesDifferentConfig)
{
    proptest::TempDir dir("drift");
    SimConfig c = small_config();
    generate_dataset(c, DatasetOptions{dir.path(), 1, 1});
    c.noise.gaussian_sigma = 0.01;
    EXPECT_THROW(generate_dataset(c, DatasetOptions{dir.path(), 1, 1}), ConfigError);
}

TEST(Dataset, MissingAssetsNamed)
{
    proptest::TempDir dir("assets");
    SimConfig c = small_config();
    c.object.mesh = dir / "absent.obj";
    try
    {
        generate_dataset(c, DatasetOptions{dir / "out", 1, 1});
        FAIL() << "expected IoError";
    }
    catch (const IoError& e)
    {
        EXPECT_NE(std::string(e.what()).find("absent.obj"), std::string::npos);
    }
    c = small_config();
    c.background.mode = "real";
    c.background.real_depth_png = dir / "bg.png";
    EXPECT_THROW(generate_dataset(c, DatasetOptions{dir / "out2", 1, 1}), IoError);
}

TEST(Dataset, MalformedManifestRejected)
{
    proptest::TempDir dir("badmanifest");
    dir.write("m.json", "{\"frames\": 3}");
    EXPECT_THROW(read_manifest(dir / "m.json"), FormatError);
    dir.write("n.json", "not json");
    EXPECT_THROW(read_manifest(dir / "n.json"), FormatError);
    EXPECT_THROW(read_manifest(dir / "absent.json"), IoError);
}

TEST(Dataset, RealBackgroundFillsHoles)
{
    proptest::TempDir dir("real");
    SimConfig c = small_config();
    c.background.mode = "real";
    DepthMap bg(120, 160);
    for (int y = 0; y < 120; ++y)
        for (int x = 0; x < 160; ++x)
            bg.set(y, x, 3.0);
    write_depth_png(dir / "bg.png", bg);
    c.background.real_depth_png = dir / "bg.png";
    generate_dataset(c, DatasetOptions{dir / "out", 1, 1});
    const DepthMap d = read_depth_png(dir / "out" / "depth_00000.png");
    EXPECT_EQ(d.valid_count(), 120 * 160);
    EXPECT_LE(d.values.maxCoeff(), 3.0);
    EXPECT_LT(d.values.minCoeff(), 3.0);
}

TEST(Dataset, FrameStagesWritten)
{
    proptest::TempDir dir("stages");
    const SimConfig c = small_config();
    const Pipeline pipeline(build_sensor(c), c.noise, c.post);
    const Scene base = build_scene(c);
    const Frame f = pipeline.run(AcceleratedScene(base), dataset_viewpoints(c, base)[0], c.motion, 1);
    const auto paths = write_frame_stages(f, 10, dir.path());
    std::set< std::string > names;
    for (const auto& p : paths)
    {
        EXPECT_TRUE(fs::exists(p));
        names.insert(p.filename().string());
    }
    EXPECT_EQ(names, (std::set< std::string >{"ir.png", "ir_noisy.png", "disparity.pfm", "depth_raw.png",
                                               "depth_post.png"}));
    const ImageF disparity = read_pfm(dir / "disparity.pfm");
    for (Eigen::Index i = 0; i < disparity.size(); ++i)
        EXPECT_EQ(std::isnan(disparity.data()[i]), !f.disparity.valid.data()[i]);
}
