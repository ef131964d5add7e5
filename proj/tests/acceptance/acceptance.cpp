// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 when any fails.

#include "matcher_oracle.hpp"
#include "property.hpp"
#include "temp_dir.hpp"

#include "slsim/benchmark.hpp"
#include "slsim/capture_noise.hpp"
#include "slsim/depth_post.hpp"
#include "slsim/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <regex>
#include <sstream>
#include <thread>

using namespace slsim;

namespace
{

struct Outcome
{
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration< double >(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v, int precision = 3)
{
    std::ostringstream os;
    os.precision(precision);
    os << v;
    return os.str();
}

FlatWallConfig wall_grid(std::vector< double > distances, std::vector< double > tilts, int seeds)
{
    FlatWallConfig cfg;
    cfg.distances_m = std::move(distances);
    cfg.tilts_deg = std::move(tilts);
    cfg.seeds = seeds;
    cfg.workers = 0;
    return cfg;
}

struct CellMean
{
    double std_error_mm = 0;
    double valid_fraction = 0;
};

CellMean cell_mean(const BenchmarkReport& report, double distance, double tilt)
{
    CellMean m;
    int n = 0;
    for (const auto& r : report.records)
        if (r.distance_m == distance && r.tilt_deg == tilt)
        {
            m.std_error_mm += r.std_error_mm;
            m.valid_fraction += r.valid_fraction;
            ++n;
        }
    m.std_error_mm /= n;
    m.valid_fraction /= n;
    return m;
}

Outcome oracle_equivalence()
{
    const auto start = std::chrono::steady_clock::now();
    const auto result = proptest::check_property(200, 2024, [](Rng& rng, int) {
        return proptest::compare_with_oracle(proptest::random_pair(rng, 64));
    });
    const double secs = seconds_since(start);
    return {result.passed() && secs < 60.0, result.describe() + " in " + fmt(secs) + " s"};
}

Outcome noiseless_fidelity()
{
    const SensorModel sensor = SensorModel::kinect_like();
    const Pipeline pipeline(sensor, NoiseConfig::none(), PostConfig{});
    const BenchmarkReport r = run_flat_wall(pipeline, wall_grid({1.0}, {0.0}, 1));
    // Spacing between the representable disparities bracketing 1 m.
    const double fb = sensor.camera.fx * sensor.baseline_m;
    const double step = 1.0 / sensor.subpixel_denominator;
    const double k = std::floor(fb / 1.0 / step);
    const double floor_mm = 1000.0 * (fb / (k * step) - fb / ((k + 1) * step));
    const BenchmarkRecord& rec = r.records.front();
    return {rec.std_error_mm <= floor_mm && rec.valid_fraction > 0.95,
            "std " + fmt(rec.std_error_mm) + " mm <= floor " + fmt(floor_mm) + " mm, valid " +
                fmt(rec.valid_fraction, 4) + " > 0.95"};
}

Outcome distance_trend(const BenchmarkReport& report)
{
    std::vector< double > means;
    std::string curve;
    for (int i = 0; i <= 6; ++i)
    {
        means.push_back(cell_mean(report, 1.0 + 0.5 * i, 0.0).std_error_mm);
        curve += (i ? " " : "") + fmt(means.back());
    }
    bool monotone = true;
    for (std::size_t i = 1; i < means.size(); ++i)
        monotone &= means[i] >= means[i - 1];
    const double ratio = means[6] / means[2];
    return {monotone && ratio >= 3.0 && ratio <= 6.0,
            "std(4 m)/std(2 m) = " + fmt(ratio) + " in [3, 6], " + (monotone ? "monotone" : "NOT monotone") +
                " over 1-4 m: " + curve + " mm"};
}

Outcome tilt_behavior(const BenchmarkReport& frontal, const Pipeline& pipeline)
{
    const BenchmarkReport tilted = run_flat_wall(pipeline, wall_grid({2.0}, {80.0}, 5));
    const double v0 = cell_mean(frontal, 2.0, 0.0).valid_fraction;
    const double v80 = cell_mean(tilted, 2.0, 80.0).valid_fraction;
    return {v80 < 0.5 && v80 < 0.5 * v0, "valid at 80 deg " + fmt(v80) + " vs 0 deg " + fmt(v0)};
}

// Invalid or non-wall pixels between the occluder silhouette column and the first valid wall pixel, stepping
// `dir` along the row.
int band_width(const DepthMap& depth, int row, int silhouette, int dir, double wall_z)
{
    int width = 0;
    for (int x = silhouette + dir; x >= 0 && x < depth.cols(); x += dir, ++width)
        if (depth.valid(row, x) && std::abs(depth.values(row, x) - wall_z) < 0.05 * wall_z)
            return width;
    return width;
}

Outcome shadow_band(std::vector< DepthMap >& collected)
{
    const SensorModel sensor = SensorModel::kinect_like();
    const double z_o = 1.0, z_w = 2.0, half = 0.15;
    Scene scene = make_wall_scene(z_w, 0.0, Material{}, 0.02);
    Instance occluder;
    occluder.mesh = std::make_shared< const Mesh >(make_box(Vec3(2 * half, 2 * half, 0.02)));
    occluder.pose.translation() = Vec3(0, 0, z_o - 0.01);
    scene.instances.push_back(occluder);
    const Pipeline pipeline(sensor, NoiseConfig{}, PostConfig{});
    const Frame f = pipeline.run(AcceleratedScene(scene), Pose::Identity(), MotionSpec{}, 1);
    collected.push_back(f.raw_depth);

    const double fx = sensor.camera.fx, cx = sensor.camera.cx;
    const double fb = fx * sensor.baseline_m;
    const double analytic = fb * (1.0 / z_o - 1.0 / z_w);
    // Front-face silhouette columns of the occluder.
    const int right = int(std::floor(cx + fx * half / (z_o - 0.02)));
    const int left = int(std::ceil(cx - fx * half / (z_o - 0.02)));
    // The projector sits at -x in the camera frame, so its shadow falls on the +x side.
    const int away = sensor.camera_from_projector().translation().x() < 0 ? +1 : -1;
    std::vector< int > away_widths, near_widths;
    const int rows_half = int(fx * 0.5 * half / z_o);
    for (int y = int(sensor.camera.cy) - rows_half; y <= int(sensor.camera.cy) + rows_half; ++y)
    {
        away_widths.push_back(band_width(f.raw_depth, y, away > 0 ? right : left, away, z_w));
        near_widths.push_back(band_width(f.raw_depth, y, away > 0 ? left : right, -away, z_w));
    }
    auto median = [](std::vector< int > v) {
        std::nth_element(v.begin(), v.begin() + std::ptrdiff_t(v.size() / 2), v.end());
        return double(v[v.size() / 2]);
    };
    const double measured = median(away_widths), opposite = median(near_widths);
    const bool within = std::abs(measured - analytic) <= 0.3 * analytic;
    return {within && measured > opposite,
            "band " + fmt(measured) + " px vs analytic " + fmt(analytic, 4) + " px (+-30%) on the " +
                (away > 0 ? "+x" : "-x") + " side, away from the projector; projector-facing edge " +
                fmt(opposite) + " px"};
}

Outcome quantization_structure(std::vector< DepthMap > maps, const SensorModel& sensor)
{
    // Extra frames cover tilted walls and a blurred object; post-processing here skips interpolation.
    const Pipeline noisy(sensor, NoiseConfig{}, PostConfig{3, false, 0});
    for (const auto& [d, t] : {std::pair{1.3, 0.0}, {2.7, 40.0}, {3.6, 65.0}})
    {
        const Frame f = noisy.run(AcceleratedScene(make_wall_scene(d, t, Material{}, 0.02)), Pose::Identity(),
                                  MotionSpec{}, 3);
        maps.push_back(f.raw_depth);
        maps.push_back(f.post_depth);
    }
    Scene scene = make_wall_scene(2.5, 10.0, Material{}, 0.02);
    Instance ball;
    ball.mesh = std::make_shared< const Mesh >(make_uv_sphere(0.25));
    ball.pose.translation() = Vec3(-0.1, 0.05, 1.2);
    scene.instances.push_back(ball);
    MotionSpec blur;
    blur.mode = MotionSpec::Mode::linear_velocity;
    blur.velocity = Vec3(0.3, 0, 0);
    blur.exposures = 4;
    const Frame f = noisy.run(AcceleratedScene(scene), Pose::Identity(), blur, 4);
    maps.push_back(f.raw_depth);
    maps.push_back(f.post_depth);

    const double fb = sensor.camera.fx * sensor.baseline_m;
    const double den = sensor.subpixel_denominator;
    long checked = 0;
    for (const DepthMap& m : maps)
        for (Eigen::Index i = 0; i < m.values.size(); ++i)
        {
            if (!m.valid.data()[i])
                continue;
            const double z = m.values.data()[i];
            const double k = std::round(fb / z * den);
            if (fb / (k / den) != z)
                return {false, "depth " + fmt(z, 17) + " m is not f*b/(k/" + fmt(den) + ")"};
            ++checked;
        }
    return {checked > 0, std::to_string(checked) + " valid depths over " + std::to_string(maps.size()) +
                             " maps all equal f*b/(k/" + fmt(den) + ")"};
}

DepthMap random_depth(Rng& rng)
{
    const int rows = 1 + int(rng.index(24)), cols = 1 + int(rng.index(48));
    const double fill = rng.uniform();
    DepthMap d(rows, cols);
    for (int y = 0; y < rows; ++y)
        for (int x = 0; x < cols; ++x)
            if (rng.uniform() < fill)
                d.set(y, x, rng.uniform(0.4, 8.0));
    return d;
}

Outcome property_suites()
{
    const auto fill = proptest::check_property(200, 71, [](Rng& rng, int) -> std::optional< std::string > {
        const DepthMap d = random_depth(rng);
        const DepthMap f = fill_holes(d, int(rng.index(12)));
        for (Eigen::Index i = 0; i < d.values.size(); ++i)
            if (d.valid.data()[i] && (!f.valid.data()[i] || f.values.data()[i] != d.values.data()[i]))
                return "valid pixel " + std::to_string(i) + " altered";
        return std::nullopt;
    });

    const Intrinsics vga = SensorModel::kinect_like().camera;
    const auto lens = proptest::check_property(200, 72, [&](Rng& rng, int) -> std::optional< std::string > {
        Intrinsics intr = vga;
        intr.distortion = Distortion{rng.uniform(-0.05, 0.05), 0, 0, 0, 0};
        for (int i = 0; i < 50; ++i)
        {
            const Vec2 p(rng.uniform(0, intr.width - 1), rng.uniform(0, intr.height - 1));
            const double err = (intr.undistort_pixel(intr.distort_pixel(p)) - p).norm();
            if (!(err <= 0.05))
                return "round trip error " + std::to_string(err) + " px";
        }
        return std::nullopt;
    });

    // Small camera so a hundred full pipeline runs stay quick.
    SensorModel small = SensorModel::kinect_like();
    small.camera = Intrinsics{145, 145, 79.5, 59.5, 160, 120, {-0.008, 0, 0, 0, 0}};
    small.projector = Intrinsics{232, 232, 127.5, 127.5, 256, 256, {}};
    small.pattern = std::make_shared< const Pattern >(generate_dot_pattern(256, 0.1, 7, 9));
    const auto determinism = proptest::check_property(100, 73, [&](Rng& rng, int) -> std::optional< std::string > {
        NoiseConfig noise;
        noise.gaussian_sigma = rng.uniform(0, 0.02);
        noise.grain_sigma = rng.uniform(0, 0.05);
        noise.scratch_count = int(rng.index(3));
        const std::uint64_t seed = rng.index(1u << 30);
        Scene scene = make_wall_scene(rng.uniform(1.0, 3.0), rng.uniform(0, 60), Material{}, 0.02);
        Instance ball;
        ball.mesh = std::make_shared< const Mesh >(make_uv_sphere(rng.uniform(0.05, 0.3)));
        ball.pose.translation() = Vec3(rng.uniform(-0.3, 0.3), rng.uniform(-0.2, 0.2), rng.uniform(0.6, 0.9));
        scene.instances.push_back(ball);
        const AcceleratedScene accel(scene);
        const Frame a = Pipeline(small, noise, PostConfig{}).run(accel, Pose::Identity(), MotionSpec{}, seed);
        const Frame b = Pipeline(small, noise, PostConfig{}).run(accel, Pose::Identity(), MotionSpec{}, seed);
        auto same = [](const ValidatedField& x, const ValidatedField& y) {
            return (x.valid == y.valid).all() && ((x.values == y.values) || (x.values.isNaN() && y.values.isNaN())).all();
        };
        if (!(a.ideal.intensities == b.ideal.intensities).all() || !(a.noisy.intensities == b.noisy.intensities).all())
            return std::string("captures differ");
        if (!same(a.disparity, b.disparity) || !same(a.raw_depth, b.raw_depth) || !same(a.post_depth, b.post_depth))
            return std::string("depth outputs differ");
        return std::nullopt;
    });

    return {fill.passed() && lens.passed() && determinism.passed() && fill.cases_run >= 100 && lens.cases_run >= 100 &&
                determinism.cases_run >= 100,
            "fill_holes: " + fill.describe() + "; lens round trip: " + lens.describe() + "; determinism: " +
                determinism.describe()};
}

Outcome throughput()
{
    proptest::TempDir dir("acceptance_simulate");
    const unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    const std::string cmd = std::string(SLSIM_CLI_PATH) + " simulate --count 6 --jobs " + std::to_string(jobs) +
                            " --out '" + (dir / "out").string() + "' 2>&1";
    std::string output;
    if (FILE* pipe = popen(cmd.c_str(), "r"))
    {
        char buf[512];
        while (std::fgets(buf, sizeof buf, pipe))
            output += buf;
        if (pclose(pipe) != 0)
            return {false, "simulate failed: " + output};
    }
    std::smatch m;
    const std::regex pattern(R"(at (\d+)x(\d+) in [^:]*: ([0-9.eE+-]+) frames/s)");
    if (!std::regex_search(output, m, pattern))
        return {false, "no throughput line in: " + output};
    const bool vga = m[1] == "640" && m[2] == "480";
    const double fps = std::stod(m[3]);
    return {vga && fps >= 1.0, fmt(fps) + " frames/s at " + m[1].str() + "x" + m[2].str() + " with " +
                                   std::to_string(jobs) + " job(s), target >= 1"};
}

} // namespace

int main()
{
    int failures = 0;
    auto report = [&](int id, const std::string& name, const std::function< Outcome() >& check) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try
        {
            o = check();
        }
        catch (const std::exception& e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << id << "] " << name << ": " << o.detail << " ("
                  << fmt(seconds_since(start)) << " s)" << std::endl;
    };

    const SensorModel sensor = SensorModel::kinect_like();
    const Pipeline default_noise(sensor, NoiseConfig{}, PostConfig{});
    BenchmarkReport distance_report;
    std::vector< DepthMap > collected;

    report(1, "matcher equals brute-force search", oracle_equivalence);
    report(2, "noiseless wall at 1 m", noiseless_fidelity);
    report(3, "error grows with distance", [&] {
        distance_report = run_flat_wall(default_noise, wall_grid({1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0}, {0.0}, 5));
        return distance_trend(distance_report);
    });
    report(4, "grazing wall loses depth", [&] { return tilt_behavior(distance_report, default_noise); });
    report(5, "shadow band width", [&] { return shadow_band(collected); });
    report(6, "depths on the disparity grid", [&] { return quantization_structure(collected, sensor); });
    report(7, "property suites", property_suites);
    report(8, "simulate throughput", throughput);

    std::cout << (failures ? std::to_string(failures) + " criterion(s) failed" : "all criteria passed") << std::endl;
    return failures ? 1 : 0;
}
