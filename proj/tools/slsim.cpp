// Command-line front end: dataset simulation, flat-wall benchmark, pattern generation, stage dumps.

#include "slsim/config.hpp"
#include "slsim/dataset.hpp"
#include "slsim/error.hpp"
#include "slsim/image_io.hpp"
#include "slsim/parallel.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>

namespace
{

enum ExitCode
{
    ok = 0,
    unexpected = 1,
    usage = 2,
    config_error = 3,
    io_error = 4,
    format_error = 5,
    input_error = 6,
};

slsim::SimConfig config_from(const std::string& path)
{
    return path.empty() ? slsim::default_config() : slsim::load_config(path);
}

int run_simulate(const std::string& config_path, const std::string& out, unsigned jobs,
                 std::optional< std::uint64_t > seed, int count)
{
    slsim::SimConfig config = config_from(config_path);
    if (seed)
        config.seed = *seed;
    slsim::DatasetOptions options;
    options.out_dir = out;
    options.jobs = jobs;
    options.max_frames = count;
    const auto summary = slsim::generate_dataset(config, options, &std::cout);
    std::cout << "manifest: " << summary.manifest.string() << "\n";
    return ok;
}

int run_benchmark(const std::string& config_path, const std::string& out, unsigned jobs,
                  std::optional< std::uint64_t > seed, const std::vector< double >& distances,
                  const std::vector< double >& tilts, int seeds)
{
    slsim::SimConfig config = config_from(config_path);
    if (!distances.empty())
        config.benchmark.distances_m = distances;
    if (!tilts.empty())
        config.benchmark.tilts_deg = tilts;
    if (seeds > 0)
        config.benchmark.seeds = seeds;
    if (seed)
        config.benchmark.base_seed = *seed;
    if (jobs > 0)
        config.benchmark.workers = jobs;
    const slsim::Pipeline pipeline(slsim::build_sensor(config), config.noise, slsim::PostConfig{});
    const auto start = std::chrono::steady_clock::now();
    slsim::BenchmarkReport report = slsim::run_flat_wall(pipeline, config.benchmark);
    report.overlays = config.overlays;
    const double seconds = std::chrono::duration< double >(std::chrono::steady_clock::now() - start).count();
    for (const auto& path : slsim::export_report(report, out, pipeline.sensor().camera))
        std::cout << "wrote " << path.string() << "\n";
    std::cout << report.records.size() << " records in " << seconds << " s\n";
    return ok;
}

int run_pattern(const std::string& out, int side, double density, std::uint64_t seed, int window)
{
    if (side < 64 || !(density > 0 && density < 0.5))
        throw slsim::ConfigError("pattern needs side >= 64 and density in (0, 0.5)");
    const slsim::Pattern p = slsim::generate_dot_pattern(side, density, seed, window);
    slsim::write_intensity_png(out, p.image, 8);
    std::cout << "wrote " << out << " (" << side << "x" << side << ", " << p.image.sum() / double(side * side)
              << " lit)\n";
    return ok;
}

int run_inspect(const std::string& config_path, const std::string& out, int frame_index,
                std::optional< std::uint64_t > seed)
{
    slsim::SimConfig config = config_from(config_path);
    if (seed)
        config.seed = *seed;
    const slsim::SensorModel sensor = slsim::build_sensor(config);
    const slsim::Scene base = slsim::build_scene(config);
    const auto poses = slsim::dataset_viewpoints(config, base);
    if (frame_index < 0 || frame_index >= int(poses.size()))
        throw slsim::ConfigError("frame index " + std::to_string(frame_index) + " outside [0, " +
                                 std::to_string(poses.size()) + ")");
    const slsim::Pipeline pipeline(sensor, config.noise, config.post);
    const slsim::AcceleratedScene accel(slsim::scene_for_frame(base, config, frame_index));
    const slsim::Frame frame = pipeline.run(accel, poses[std::size_t(frame_index)], config.motion,
                                            config.seed + std::uint64_t(frame_index));
    for (const auto& path : slsim::write_frame_stages(frame, sensor.ir_bit_depth, out))
        std::cout << "wrote " << path.string() << "\n";
    std::cout << "valid pixels: raw " << frame.raw_depth.valid_count() << ", post " << frame.post_depth.valid_count()
              << " of " << frame.raw_depth.values.size() << "\n";
    return ok;
}

int run_config(const std::string& config_path, const std::string& out)
{
    const std::string text = slsim::dump_config(config_from(config_path));
    if (out.empty())
    {
        std::cout << text;
        return ok;
    }
    std::ofstream f(out, std::ios::binary);
    if (!(f << text))
        throw slsim::IoError("cannot write " + out);
    return ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Structured-light depth sensor simulator"};
    app.require_subcommand(1);

    std::string config_path, out;
    unsigned jobs = 0;
    std::optional< std::uint64_t > seed;
    int count = -1, frame_index = 0, seeds = 0;
    std::vector< double > distances, tilts;
    int side = 1024, window = 9;
    double density = 0.1;
    std::uint64_t pattern_seed = 7;

    auto* simulate = app.add_subcommand("simulate", "Render depth scans over sampled viewpoints");
    simulate->add_option("--config", config_path, "JSON config (defaults when omitted)");
    simulate->add_option("--out", out, "Output directory")->required();
    simulate->add_option("--jobs", jobs, "Frames rendered concurrently")->default_val(1);
    simulate->add_option("--seed", seed, "Base noise seed");
    simulate->add_option("--count", count, "Render only the first N viewpoints");

    auto* benchmark = app.add_subcommand("benchmark", "Flat-wall depth error benchmark");
    benchmark->add_option("--config", config_path, "JSON config (defaults when omitted)");
    benchmark->add_option("--out", out, "Output directory")->required();
    benchmark->add_option("--jobs", jobs, "Wall cells evaluated concurrently");
    benchmark->add_option("--seed", seed, "Base noise seed");
    benchmark->add_option("--distances", distances, "Wall distances in meters")->delimiter(',');
    benchmark->add_option("--tilts", tilts, "Wall tilts in degrees")->delimiter(',');
    benchmark->add_option("--seeds", seeds, "Noise seeds per cell");

    auto* pattern = app.add_subcommand("pattern", "Generate a dot pattern PNG");
    pattern->add_option("--out", out, "Output PNG")->required();
    pattern->add_option("--side", side, "Side length in pixels")->default_val(1024);
    pattern->add_option("--density", density, "Lit pixel fraction")->default_val(0.1);
    pattern->add_option("--seed", pattern_seed, "Pattern seed")->default_val(7);
    pattern->add_option("--window", window, "Matching window used for uniqueness repair")->default_val(9);

    auto* inspect = app.add_subcommand("inspect", "Dump every pipeline stage of one frame");
    inspect->add_option("--config", config_path, "JSON config (defaults when omitted)");
    inspect->add_option("--out", out, "Output directory")->required();
    inspect->add_option("--frame", frame_index, "Viewpoint index")->default_val(0);
    inspect->add_option("--seed", seed, "Base noise seed");

    auto* config = app.add_subcommand("config", "Print the effective configuration with every default");
    config->add_option("--config", config_path, "JSON config to complete");
    config->add_option("--out", out, "Write to a file instead of stdout");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? ok : usage;
    }

    try
    {
        if (simulate->parsed())
            return run_simulate(config_path, out, std::max(1u, jobs), seed, count);
        if (benchmark->parsed())
            return run_benchmark(config_path, out, jobs, seed, distances, tilts, seeds);
        if (pattern->parsed())
            return run_pattern(out, side, density, pattern_seed, window);
        if (inspect->parsed())
            return run_inspect(config_path, out, frame_index, seed);
        if (config->parsed())
            return run_config(config_path, out);
    }
    catch (const slsim::ConfigError& e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    }
    catch (const slsim::IoError& e)
    {
        std::cerr << "io error: " << e.what() << "\n";
        return io_error;
    }
    catch (const slsim::FormatError& e)
    {
        std::cerr << "format error: " << e.what() << "\n";
        return format_error;
    }
    catch (const std::invalid_argument& e)
    {
        std::cerr << "invalid input: " << e.what() << "\n";
        return input_error;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return unexpected;
    }
    return usage;
}
