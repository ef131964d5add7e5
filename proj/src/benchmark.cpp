#include "slsim/benchmark.hpp"

#include "slsim/error.hpp"
#include "slsim/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

namespace slsim
{

namespace
{

constexpr double kNaN = std::numeric_limits< double >::quiet_NaN();
constexpr double kWallSide = 400.0;

Eigen::Matrix3d tilt_rotation(double tilt_deg)
{
    return Eigen::AngleAxisd(tilt_deg * std::numbers::pi / 180.0, Vec3::UnitY()).toRotationMatrix();
}

struct Moments
{
    double sum = 0, sum2 = 0;
    long n = 0;
    void add(double v)
    {
        sum += v;
        sum2 += v * v;
        ++n;
    }
    [[nodiscard]] double stddev() const
    {
        if (n == 0)
            return kNaN;
        const double mean = sum / double(n);
        return std::sqrt(std::max(0.0, sum2 / double(n) - mean * mean));
    }
};

} // namespace

double ErrorModelOverlay::operator()(double z_m) const
{
    double acc = 0.0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it)
        acc = acc * z_m + *it;
    return acc;
}

FlatWallConfig FlatWallConfig::defaults()
{
    FlatWallConfig c;
    for (int i = 0; i <= 6; ++i)
        c.distances_m.push_back(1.0 + 0.5 * i);
    for (int t = 0; t <= 80; t += 10)
        c.tilts_deg.push_back(t);
    return c;
}

ImageF wall_ground_truth(const Intrinsics& camera, double distance_m, double tilt_deg)
{
    const Vec3 n = tilt_rotation(tilt_deg) * Vec3(0, 0, -1);
    const double offset = n.dot(Vec3(0, 0, distance_m));
    ImageF out(camera.height, camera.width);
    for (int y = 0; y < camera.height; ++y)
        for (int x = 0; x < camera.width; ++x)
        {
            const Vec3 r((x - camera.cx) / camera.fx, (y - camera.cy) / camera.fy, 1.0);
            const double denom = n.dot(r);
            const double t = denom != 0.0 ? offset / denom : kNaN;
            out(y, x) = t > 0 ? t : kNaN;
        }
    return out;
}

Scene make_wall_scene(double distance_m, double tilt_deg, const Material& material, double ambient)
{
    Scene scene;
    Instance wall;
    wall.mesh = std::make_shared< const Mesh >(make_quad(kWallSide, kWallSide));
    wall.pose = Pose::Identity();
    wall.pose.linear() = tilt_rotation(tilt_deg);
    wall.pose.translation() = Vec3(0, 0, distance_m);
    wall.material = material;
    wall.is_target = true;
    scene.instances.push_back(std::move(wall));
    scene.ambient = ambient;
    return scene;
}

BenchmarkRecord evaluate_wall(const DepthMap& depth, const ImageF& truth, const SensorModel& sensor)
{
    if (depth.rows() != truth.rows() || depth.cols() != truth.cols())
        throw DimensionError("depth map and ground truth differ in size");
    const int h = sensor.window_size_px / 2;
    const double cx = sensor.camera.cx, cy = sensor.camera.cy;
    const double r_max = std::hypot(std::max(cx, depth.cols() - 1 - cx), std::max(cy, depth.rows() - 1 - cy));

    Moments all;
    std::array< Moments, kRadialBins > bins;
    long eligible = 0, valid = 0;
    for (Eigen::Index y = h; y < depth.rows() - h; ++y)
        for (Eigen::Index x = h; x < depth.cols() - h; ++x)
        {
            ++eligible;
            const double z = truth(y, x);
            if (!depth.valid(y, x) || !std::isfinite(z))
                continue;
            ++valid;
            const double e = (depth.values(y, x) - z) * 1000.0;
            all.add(e);
            const double r = std::hypot(double(x) - cx, double(y) - cy) / r_max;
            bins[std::size_t(std::min(kRadialBins - 1, int(r * kRadialBins)))].add(e);
        }

    BenchmarkRecord rec;
    rec.valid_fraction = eligible > 0 ? double(valid) / double(eligible) : 0.0;
    rec.std_error_mm = all.stddev();
    for (std::size_t b = 0; b < bins.size(); ++b)
        rec.radial_std_mm[b] = bins[b].stddev();
    return rec;
}

BenchmarkReport run_flat_wall(const Pipeline& pipeline, const FlatWallConfig& config)
{
    const SensorModel& sensor = pipeline.sensor();
    if (config.distances_m.empty() || config.tilts_deg.empty())
        throw ConfigError("benchmark needs at least one distance and one tilt");
    if (config.seeds < 1)
        throw ConfigError("benchmark needs at least one seed");
    for (double d : config.distances_m)
        if (!(d >= sensor.depth_range.z_min && d <= sensor.depth_range.z_max))
        {
            std::ostringstream msg;
            msg << "benchmark distance " << d << " m outside the sensor range [" << sensor.depth_range.z_min << ", "
                << sensor.depth_range.z_max << "]";
            throw ConfigError(msg.str());
        }
    for (double t : config.tilts_deg)
        if (!(t >= 0.0 && t < 90.0))
        {
            std::ostringstream msg;
            msg << "benchmark tilt " << t << " deg outside [0, 90)";
            throw ConfigError(msg.str());
        }
    if (!config.wall.valid() || !(config.ambient >= 0))
        throw ConfigError("benchmark wall material or ambient level invalid");

    struct Cell
    {
        double distance, tilt;
        std::vector< BenchmarkRecord > records;
    };
    std::vector< Cell > cells;
    for (double d : config.distances_m)
        for (double t : config.tilts_deg)
            cells.push_back({d, t, {}});

    parallel_for(
        0, int(cells.size()),
        [&](int i) {
            Cell& cell = cells[std::size_t(i)];
            const AcceleratedScene accel(make_wall_scene(cell.distance, cell.tilt, config.wall, config.ambient));
            const IrCapture capture = render_capture(accel, sensor, Pose::Identity());
            const ImageF truth = wall_ground_truth(sensor.camera, cell.distance, cell.tilt);
            for (int s = 0; s < config.seeds; ++s)
            {
                const std::uint64_t seed = config.base_seed + std::uint64_t(s);
                BenchmarkRecord rec = evaluate_wall(pipeline.reconstruct(capture, seed).raw_depth, truth, sensor);
                rec.distance_m = cell.distance;
                rec.tilt_deg = cell.tilt;
                rec.seed = int(seed);
                cell.records.push_back(rec);
            }
        },
        config.workers);

    BenchmarkReport report;
    for (const Cell& cell : cells)
        report.records.insert(report.records.end(), cell.records.begin(), cell.records.end());
    return report;
}

std::string report_csv(const BenchmarkReport& report)
{
    // Shortest form that parses back to the same double.
    const auto num = [](double v) {
        if (std::isnan(v))
            return std::string("nan");
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, res.ptr);
    };
    std::ostringstream out;
    out << "distance_m,tilt_deg,seed,valid_fraction,std_error_mm";
    for (int b = 0; b < kRadialBins; ++b)
        out << ",bin" << b;
    out << '\n';
    for (const auto& r : report.records)
    {
        out << num(r.distance_m) << ',' << num(r.tilt_deg) << ',' << r.seed << ',' << num(r.valid_fraction) << ','
            << num(r.std_error_mm);
        for (double v : r.radial_std_mm)
            out << ',' << num(v);
        out << '\n';
    }
    return out.str();
}

namespace
{

struct Series
{
    std::string label;
    std::vector< Vec2 > points;
    bool dashed = false;
};

std::string svg_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                     const std::vector< Series >& series)
{
    constexpr double W = 640, H = 420, L = 70, R = 170, T = 40, B = 55;
    double x0 = std::numeric_limits< double >::infinity(), x1 = -x0, y1 = 0.0;
    for (const auto& s : series)
        for (const auto& p : s.points)
            if (std::isfinite(p.y()))
            {
                x0 = std::min(x0, p.x());
                x1 = std::max(x1, p.x());
                y1 = std::max(y1, p.y());
            }
    if (!std::isfinite(x0))
        x0 = 0, x1 = 1;
    if (x1 <= x0)
        x1 = x0 + 1;
    if (y1 <= 0)
        y1 = 1;
    y1 *= 1.1;
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - B - y / y1 * (H - T - B); };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                   "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    std::ostringstream o;
    o.precision(6);
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << (W - R + L) / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title
      << "</text>\n"
      << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i)
    {
        const double xv = x0 + (x1 - x0) * i / 5.0, yv = y1 * i / 5.0;
        o << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << xv << "</text>\n"
          << "<text x=\"" << L - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << yv << "</text>\n"
          << "<line x1=\"" << L << "\" y1=\"" << py(yv) << "\" x2=\"" << W - R << "\" y2=\"" << py(yv)
          << "\" stroke=\"#ddd\"/>\n";
    }
    o << "<text x=\"" << (W - R + L) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << x_label
      << "</text>\n"
      << "<text transform=\"translate(18," << (H - B + T) / 2 << ") rotate(-90)\" text-anchor=\"middle\">" << y_label
      << "</text>\n";
    for (std::size_t i = 0; i < series.size(); ++i)
    {
        const auto& s = series[i];
        const char* c = colors[i % 10];
        o << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"2\""
          << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"";
        for (const auto& p : s.points)
            if (std::isfinite(p.y()))
                o << px(p.x()) << ',' << py(p.y()) << ' ';
        o << "\"/>\n";
        const double ly = T + 16.0 * double(i);
        o << "<line x1=\"" << W - R + 12 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 32 << "\" y2=\"" << ly
          << "\" stroke=\"" << c << "\" stroke-width=\"2\"" << (s.dashed ? " stroke-dasharray=\"6,4\"" : "")
          << "/>\n<text x=\"" << W - R + 38 << "\" y=\"" << ly + 4 << "\">" << s.label << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot open " + path.string() + " for writing");
    f << text;
    if (!f)
        throw IoError("failed writing " + path.string());
}

std::string number_label(const std::string& prefix, double v, const std::string& unit)
{
    std::ostringstream o;
    o << prefix << v << unit;
    return o.str();
}

} // namespace

std::vector< std::filesystem::path > export_report(const BenchmarkReport& report, const std::filesystem::path& out_dir,
                                                   const Intrinsics& camera)
{
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    // Seed-averaged statistics per (distance, tilt).
    struct Cell
    {
        double std_sum = 0;
        int std_n = 0;
        std::array< double, kRadialBins > bin_sum{};
        std::array< int, kRadialBins > bin_n{};
    };
    std::map< std::pair< double, double >, Cell > cells;
    for (const auto& r : report.records)
    {
        Cell& c = cells[{r.distance_m, r.tilt_deg}];
        if (std::isfinite(r.std_error_mm))
            c.std_sum += r.std_error_mm, ++c.std_n;
        for (int b = 0; b < kRadialBins; ++b)
            if (std::isfinite(r.radial_std_mm[std::size_t(b)]))
                c.bin_sum[std::size_t(b)] += r.radial_std_mm[std::size_t(b)], ++c.bin_n[std::size_t(b)];
    }
    auto mean_std = [](const Cell& c) { return c.std_n ? c.std_sum / c.std_n : kNaN; };

    std::vector< double > tilts, distances;
    for (const auto& [key, cell] : cells)
    {
        distances.push_back(key.first);
        tilts.push_back(key.second);
    }
    std::sort(tilts.begin(), tilts.end());
    tilts.erase(std::unique(tilts.begin(), tilts.end()), tilts.end());
    std::sort(distances.begin(), distances.end());
    distances.erase(std::unique(distances.begin(), distances.end()), distances.end());
    const double base_tilt = tilts.empty() ? 0.0 : tilts.front();

    std::vector< Series > by_distance;
    {
        Series s{number_label("tilt ", base_tilt, " deg"), {}, false};
        for (double d : distances)
            if (auto it = cells.find({d, base_tilt}); it != cells.end())
                s.points.emplace_back(d * 1000.0, mean_std(it->second));
        by_distance.push_back(std::move(s));
        for (const auto& overlay : report.overlays)
        {
            Series o{overlay.name, {}, true};
            if (!distances.empty())
                for (int i = 0; i <= 50; ++i)
                {
                    const double z = distances.front() + (distances.back() - distances.front()) * i / 50.0;
                    o.points.emplace_back(z * 1000.0, overlay(z));
                }
            by_distance.push_back(std::move(o));
        }
    }

    std::vector< Series > by_tilt;
    for (double d : distances)
    {
        Series s{number_label("", d, " m"), {}, false};
        for (double t : tilts)
            if (auto it = cells.find({d, t}); it != cells.end())
                s.points.emplace_back(t, mean_std(it->second));
        by_tilt.push_back(std::move(s));
    }

    // Radial axis in pixels from the principal point, at bin centres.
    const double r_max = std::hypot(std::max(camera.cx, camera.width - 1 - camera.cx),
                                    std::max(camera.cy, camera.height - 1 - camera.cy));
    std::vector< Series > by_radius;
    for (double d : distances)
    {
        auto it = cells.find({d, base_tilt});
        if (it == cells.end())
            continue;
        Series s{number_label("", d, " m"), {}, false};
        for (int b = 0; b < kRadialBins; ++b)
        {
            const auto& c = it->second;
            const double v = c.bin_n[std::size_t(b)] ? c.bin_sum[std::size_t(b)] / c.bin_n[std::size_t(b)] : kNaN;
            s.points.emplace_back((b + 0.5) / kRadialBins * r_max, v);
        }
        by_radius.push_back(std::move(s));
    }

    std::vector< std::filesystem::path > written{out_dir / "flat_wall.csv", out_dir / "error_vs_distance.svg",
                                                 out_dir / "error_vs_tilt.svg", out_dir / "error_vs_radius.svg"};
    write_text(written[0], report_csv(report));
    write_text(written[1], svg_plot("Depth error vs distance", "distance (mm)", "std error (mm)", by_distance));
    write_text(written[2], svg_plot("Depth error vs tilt", "tilt (deg)", "std error (mm)", by_tilt));
    write_text(written[3], svg_plot("Depth error vs radial distance", "radius (px)", "std error (mm)", by_radius));
    return written;
}

} // namespace slsim
