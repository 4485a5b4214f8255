// Command-line front end: synthetic benchmark generation, disparity
// transformation, damage segmentation, roll-angle sweeps and the
// three-method runtime/sigma comparison.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "roadseg/eval.hpp"
#include "roadseg/io.hpp"
#include "roadseg/roll_solver.hpp"
#include "roadseg/segmentation.hpp"
#include "roadseg/synth.hpp"
#include "roadseg/transform.hpp"

namespace fs = std::filesystem;
using namespace roadseg;

namespace {

std::string fmt(double value, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
    return buf;
}

std::string fmt_sci(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6e", value);
    return buf;
}

MapFormat parse_format(const std::string& name, const std::string& path) {
    if (name == "png16") return MapFormat::PngUint16Div256;
    if (name == "pgm16") return MapFormat::Pgm16Div256;
    if (name == "csv") return MapFormat::CsvReal;
    if (name == "f64") return MapFormat::BinaryF64;
    if (name.empty()) return sniff_format(path);
    throw FormatError("unknown --format '" + name + "' (png16|pgm16|csv|f64)");
}

std::string format_ext(MapFormat f) {
    switch (f) {
        case MapFormat::PngUint16Div256: return "png";
        case MapFormat::Pgm16Div256: return "pgm";
        case MapFormat::CsvReal: return "csv";
        case MapFormat::BinaryF64: return "dspf";
    }
    return "dspf";
}

TransformOptions parse_delta(const std::string& spec) {
    TransformOptions opt;
    if (spec == "auto") return opt;
    if (spec.rfind("fixed:", 0) == 0) {
        opt.policy = DeltaPolicy::Fixed;
        try {
            opt.fixed_delta = std::stod(spec.substr(6));
        } catch (const std::exception&) {
            throw ParseError("--delta fixed:X needs a number, got '" + spec + "'");
        }
        return opt;
    }
    throw ParseError("--delta must be 'auto' or 'fixed:X', got '" + spec + "'");
}

std::vector<double> parse_kappa_list(const std::string& text) {
    std::vector<double> out;
    std::string cell;
    std::stringstream ss(text);
    while (std::getline(ss, cell, ',')) {
        try {
            out.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw ParseError("--kappa expects comma-separated numbers, got '" + text + "'");
        }
        if (out.back() < 0) throw ParseError("--kappa values must be >= 0");
    }
    if (out.empty()) throw ParseError("--kappa list is empty");
    return out;
}

struct LoadedInput {
    DisparityMap map;
    RoadMask mask;
    std::string stem;
};

LoadedInput load_input(const std::string& input, const std::string& mask_path,
                       const std::string& format_name) {
    LoadedInput in;
    in.map = read_disparity(input, parse_format(format_name, input));
    if (mask_path.empty())
        in.mask = RoadMask::full(in.map.width, in.map.height);
    else
        in.mask = read_mask(mask_path);
    require_same_shape(in.map.width, in.map.height, in.mask.width, in.mask.height, "input mask");
    in.stem = fs::path(input).stem().string();
    return in;
}

void write_vdisparity_image(const DisparityMap& map, const RoadMask& mask, const std::string& path) {
    const VDisparity vd = v_disparity(map, mask, 256);
    std::uint32_t peak = 1;
    for (auto c : vd.counts) peak = std::max(peak, c);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path);
    out << "P5\n" << vd.bins << " " << vd.rows << "\n255\n";
    std::vector<unsigned char> bytes(static_cast<std::size_t>(vd.bins) * vd.rows, 0);
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        const double c = vd.counts[i];
        // log scale keeps sparse rows visible
        bytes[i] = c > 0 ? static_cast<unsigned char>(55 + 200.0 * std::log1p(c) / std::log1p(peak)) : 0;
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

struct TransformOutcome {
    RoadModel model;
    TransformedMap transformed;
    SigmaReport sig;
};

TransformOutcome run_transform(const LoadedInput& in, const TransformOptions& delta_opt) {
    TransformOutcome out;
    out.model = estimate(in.map, in.mask);
    out.transformed = transform_map(in.map, in.mask, out.model, delta_opt);
    out.sig = sigma(out.transformed);
    return out;
}

void write_model_report(const TransformOutcome& t, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path);
    out << "theta_deg = " << fmt(rad2deg(t.model.theta)) << "\n";
    out << "a0 = " << fmt(t.model.a0, 9) << "\n";
    out << "a1 = " << fmt(t.model.a1, 9) << "\n";
    out << "e_min = " << fmt_sci(t.model.e_min) << "\n";
    out << "g_value = " << fmt_sci(t.model.g_value) << "\n";
    out << "delta = " << fmt(t.transformed.delta, 9) << "\n";
    out << "sigma = " << fmt(t.sig.sigma, 9) << "\n";
    out << "n_pixels = " << t.model.n_pixels << "\n";
    out << "used_fallback = " << (t.model.used_fallback ? 1 : 0) << "\n";
}

void print_model_report(const TransformOutcome& t) {
    std::printf("theta_deg      %s\n", fmt(rad2deg(t.model.theta)).c_str());
    std::printf("a0             %s\n", fmt(t.model.a0, 9).c_str());
    std::printf("a1             %s\n", fmt(t.model.a1, 9).c_str());
    std::printf("e_min          %s\n", fmt_sci(t.model.e_min).c_str());
    std::printf("delta          %s\n", fmt(t.transformed.delta, 9).c_str());
    std::printf("sigma          %s\n", fmt(t.sig.sigma, 9).c_str());
    std::printf("n_pixels       %lld\n", static_cast<long long>(t.model.n_pixels));
    if (t.model.used_fallback) std::printf("note           closed form degenerate; grid fallback used\n");
}

// Writes the transformed map; always the exact f64 grid, plus a 16-bit PNG
// preview when the values fit the div-256 encoding.
void write_transformed(const TransformedMap& t, const fs::path& dir) {
    write_disparity(t.map, (dir / "transformed.dspf").string(), MapFormat::BinaryF64);
    double peak = 0;
    for (std::size_t i = 0; i < t.map.values.size(); ++i)
        if (t.map.valid[i]) peak = std::max(peak, t.map.values[i]);
    if (peak < 255.5)
        write_disparity(t.map, (dir / "transformed.png").string(), MapFormat::PngUint16Div256);
}

// --- subcommands -------------------------------------------------------------

int cmd_synth(const std::string& out_dir, double kappa, std::uint64_t seed,
              const std::string& spec_path, const std::string& format_name) {
    const MapFormat format =
        format_name.empty() ? MapFormat::BinaryF64 : parse_format(format_name, "");
    fs::create_directories(out_dir);

    std::vector<SynthSpec> specs;
    if (!spec_path.empty()) {
        SynthSpec spec = read_spec(spec_path);
        if (kappa > 0) spec.kappa = kappa;
        spec.seed = seed;
        specs.push_back(spec);
    } else {
        specs = benchmark_suite(kappa, seed);
    }

    std::vector<std::vector<std::string>> manifest;
    for (std::size_t k = 0; k < specs.size(); ++k) {
        const SynthSpec& spec = specs[k];
        char name[32];
        std::snprintf(name, sizeof(name), "map_%03zu", k);
        const fs::path dir = fs::path(out_dir) / name;
        fs::create_directories(dir);

        const SynthOutput out = generate(spec);
        write_disparity(out.map, (dir / ("disparity." + format_ext(format))).string(), format);
        write_mask(out.mask, (dir / "mask.pgm").string());
        write_mask(out.truth.damage, (dir / "truth.pgm").string());
        write_spec(spec, (dir / "spec.cfg").string());

        manifest.push_back({std::to_string(k), name, fmt(rad2deg(spec.theta)), fmt(spec.a0, 9),
                            fmt(spec.a1, 9), fmt(spec.kappa, 3), std::to_string(spec.seed),
                            std::to_string(spec.rig.width), std::to_string(spec.rig.height),
                            std::to_string(spec.potholes.size())});
    }
    write_csv((fs::path(out_dir) / "manifest.csv").string(),
              {"index", "dir", "theta_deg", "a0", "a1", "kappa", "seed", "width", "height",
               "n_potholes"},
              manifest);
    std::printf("wrote %zu map(s) under %s\n", specs.size(), out_dir.c_str());
    return 0;
}

int cmd_transform(const std::string& input, const std::string& mask_path,
                  const std::string& format_name, const std::string& out_dir,
                  const std::string& delta_spec) {
    const LoadedInput in = load_input(input, mask_path, format_name);
    const TransformOutcome t = run_transform(in, parse_delta(delta_spec));

    const fs::path dir = fs::path(out_dir) / in.stem;
    fs::create_directories(dir);
    write_transformed(t.transformed, dir);
    write_model_report(t, (dir / "report.txt").string());
    write_vdisparity_image(in.map, in.mask, (dir / "vdisp.pgm").string());
    write_csv((fs::path(out_dir) / "manifest.csv").string(),
              {"dir", "theta_deg", "a0", "a1", "e_min", "delta", "sigma"},
              {{in.stem, fmt(rad2deg(t.model.theta)), fmt(t.model.a0, 9), fmt(t.model.a1, 9),
                fmt_sci(t.model.e_min), fmt(t.transformed.delta, 9), fmt(t.sig.sigma, 9)}});
    print_model_report(t);
    return 0;
}

int cmd_segment(const std::string& input, const std::string& mask_path,
                const std::string& format_name, const std::string& out_dir,
                const std::string& delta_spec, const std::string& polarity_name, int min_area,
                const std::string& truth_path) {
    if (min_area < 0) throw ParseError("--min-area must be >= 0");
    Polarity polarity;
    if (polarity_name == "below")
        polarity = Polarity::Below;
    else if (polarity_name == "above")
        polarity = Polarity::Above;
    else
        throw ParseError("--polarity must be 'below' or 'above'");

    const LoadedInput in = load_input(input, mask_path, format_name);
    const TransformOutcome t = run_transform(in, parse_delta(delta_spec));
    SegmentationResult seg = segment(t.transformed, polarity);
    if (min_area > 0) seg = clean_mask(seg, min_area);

    const fs::path dir = fs::path(out_dir) / in.stem;
    fs::create_directories(dir);
    write_transformed(t.transformed, dir);
    write_model_report(t, (dir / "report.txt").string());
    write_segmentation(seg, "", (dir / "segmentation.ppm").string());

    print_model_report(t);
    std::printf("threshold      %s\n", fmt(seg.threshold, 9).c_str());
    std::printf("n_damaged      %lld\n", static_cast<long long>(seg.n_damaged));
    std::printf("n_undamaged    %lld\n", static_cast<long long>(seg.n_undamaged));
    if (seg.degenerate) std::printf("note           degenerate histogram; nothing labeled damaged\n");

    if (!truth_path.empty()) {
        const RoadMask truth = read_mask(truth_path);
        RoadMask pred(seg.width, seg.height);
        pred.member = seg.damage;
        RoadMask domain(seg.width, seg.height);
        domain.member = seg.region;
        const PixelMetrics pm = pixel_metrics(pred, truth, domain);
        const std::vector<std::string> header = {"precision", "recall", "f_score", "iou",
                                                 "accuracy"};
        const std::vector<std::vector<std::string>> rows = {
            {fmt(pm.precision), fmt(pm.recall), fmt(pm.f_score), fmt(pm.iou), fmt(pm.accuracy)}};
        std::fputs(format_table(header, rows).c_str(), stdout);
        write_csv((dir / "metrics.csv").string(), header, rows);
    }
    return 0;
}

int cmd_evaluate(const std::string& out_dir, const std::string& kappa_list, std::uint64_t seed) {
    const std::vector<double> kappas = parse_kappa_list(kappa_list);
    fs::create_directories(out_dir);

    // 51 thetas x |kappas| grid of absolute roll-angle errors in degrees.
    std::vector<std::vector<double>> grid(51, std::vector<double>(kappas.size(), 0.0));
    std::vector<double> theta_deg(51, 0.0);
    for (std::size_t kc = 0; kc < kappas.size(); ++kc) {
        const std::vector<SynthSpec> suite = benchmark_suite(kappas[kc], seed);
#pragma omp parallel for schedule(dynamic)
        for (int k = 0; k < static_cast<int>(suite.size()); ++k) {
            const SynthOutput out = serial::generate(suite[k]);
            const RoadModel model = serial::estimate(out.map, out.mask);
            grid[k][kc] = delta_theta(model.theta, suite[k].theta);
            theta_deg[k] = rad2deg(suite[k].theta);
        }
    }

    std::vector<std::string> header = {"theta_deg"};
    for (double k : kappas) header.push_back("kappa_" + fmt(k, 0));
    std::vector<std::vector<std::string>> rows;
    for (int k = 0; k < 51; ++k) {
        std::vector<std::string> row = {fmt(theta_deg[k], 1)};
        for (std::size_t kc = 0; kc < kappas.size(); ++kc) row.push_back(fmt_sci(grid[k][kc]));
        rows.push_back(std::move(row));
    }
    write_csv((fs::path(out_dir) / "delta_theta.csv").string(), header, rows);

    std::vector<std::vector<std::string>> summary;
    for (std::size_t kc = 0; kc < kappas.size(); ++kc) {
        double worst = 0;
        for (int k = 0; k < 51; ++k) worst = std::max(worst, grid[k][kc]);
        summary.push_back({fmt(kappas[kc], 0), fmt_sci(worst)});
    }
    std::fputs(format_table({"kappa", "max_delta_theta_deg"}, summary).c_str(), stdout);
    std::printf("grid written to %s\n", (fs::path(out_dir) / "delta_theta.csv").string().c_str());
    return 0;
}

int cmd_bench(const std::string& input, const std::string& mask_path,
              const std::string& format_name, const std::string& out_dir, int repeats, double kappa,
              std::uint64_t seed) {
    DisparityMap map;
    RoadMask mask;
    if (input.empty()) {
        SynthSpec spec;
        spec.rig = kitti_rig();
        spec.theta = deg2rad(4.0);
        spec.kappa = kappa;
        spec.seed = seed;
        SynthOutput out = serial::generate(spec);
        map = std::move(out.map);
        mask = std::move(out.mask);
        std::printf("input: synthetic %dx%d plane, theta 4 deg, kappa %s, seed %llu\n", map.width,
                    map.height, fmt(kappa, 1).c_str(), static_cast<unsigned long long>(seed));
    } else {
        LoadedInput in = load_input(input, mask_path, format_name);
        map = std::move(in.map);
        mask = std::move(in.mask);
    }

    const BenchReport report = bench(map, mask, repeats);
    std::vector<std::vector<std::string>> rows;
    for (const BenchRow& r : report.rows)
        rows.push_back({r.method, fmt(r.sigma, 9), fmt(r.elapsed * 1e6, 3), fmt(rad2deg(r.theta)),
                        std::to_string(r.evaluations)});
    const std::vector<std::string> header = {"method", "sigma", "solve_us", "theta_deg",
                                             "evaluations"};
    std::fputs(format_table(header, rows).c_str(), stdout);
    std::printf("shared accumulate pass: %.3f ms over %lld pixels (single thread)\n",
                report.accumulate_seconds * 1e3, static_cast<long long>(report.n_pixels));
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_csv((fs::path(out_dir) / "bench.csv").string(), header, rows);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Road disparity transformation and damage segmentation"};
    app.require_subcommand(1);

    std::string input, mask_path, format_name, out_dir, truth_path, spec_path;
    std::string delta_spec = "auto";
    std::string polarity_name = "below";
    std::string kappa_list = "0,10,20,30,40,50";
    double kappa = 0.0;
    std::uint64_t seed = 1729;
    int min_area = 0;
    int repeats = 5;

    CLI::App* synth = app.add_subcommand("synth", "Generate synthetic disparity maps");
    synth->add_option("--out", out_dir, "Output directory")->required();
    synth->add_option("--kappa", kappa, "Noise scale")->capture_default_str();
    synth->add_option("--seed", seed, "Base random seed")->capture_default_str();
    synth->add_option("--spec", spec_path,
                      "Key-value spec file for a single map (default: 51-map suite)");
    synth->add_option("--format", format_name, "Map format: png16|pgm16|csv|f64 (default f64)");

    CLI::App* transform =
        app.add_subcommand("transform", "Estimate the road model and flatten the map");
    transform->add_option("--input", input, "Disparity map file")->required();
    transform->add_option("--mask", mask_path, "Road mask (P5 graymap; default: full image)");
    transform->add_option("--format", format_name, "Input format (default: by extension)");
    transform->add_option("--out", out_dir, "Output directory")->required();
    transform->add_option("--delta", delta_spec, "Offset policy: auto | fixed:X")
        ->capture_default_str();

    CLI::App* segment_cmd = app.add_subcommand("segment", "Transform and extract damaged areas");
    segment_cmd->add_option("--input", input, "Disparity map file")->required();
    segment_cmd->add_option("--mask", mask_path, "Road mask (P5 graymap; default: full image)");
    segment_cmd->add_option("--format", format_name, "Input format (default: by extension)");
    segment_cmd->add_option("--out", out_dir, "Output directory")->required();
    segment_cmd->add_option("--delta", delta_spec, "Offset policy: auto | fixed:X")
        ->capture_default_str();
    segment_cmd->add_option("--polarity", polarity_name, "Damage side: below | above")
        ->capture_default_str();
    segment_cmd->add_option("--min-area", min_area, "Remove damage components smaller than this")
        ->capture_default_str();
    segment_cmd->add_option("--truth", truth_path, "Ground-truth damage mask for metrics");

    CLI::App* evaluate =
        app.add_subcommand("evaluate", "Roll-angle error sweep over the 51-map suite");
    evaluate->add_option("--out", out_dir, "Output directory")->required();
    evaluate->add_option("--kappa", kappa_list, "Comma-separated noise scales")
        ->capture_default_str();
    evaluate->add_option("--seed", seed, "Base random seed")->capture_default_str();

    CLI::App* bench_cmd = app.add_subcommand("bench", "Compare closed form vs GD vs GSS");
    bench_cmd->add_option("--input", input, "Disparity map file (default: synthetic map)");
    bench_cmd->add_option("--mask", mask_path, "Road mask (P5 graymap; default: full image)");
    bench_cmd->add_option("--format", format_name, "Input format (default: by extension)");
    bench_cmd->add_option("--out", out_dir, "Directory for bench.csv (optional)");
    bench_cmd->add_option("--repeats", repeats, "Timing samples per method")->capture_default_str();
    bench_cmd->add_option("--kappa", kappa, "Noise scale for the synthetic default")
        ->capture_default_str();
    bench_cmd->add_option("--seed", seed, "Seed for the synthetic default")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) return cmd_synth(out_dir, kappa, seed, spec_path, format_name);
        if (transform->parsed())
            return cmd_transform(input, mask_path, format_name, out_dir, delta_spec);
        if (segment_cmd->parsed())
            return cmd_segment(input, mask_path, format_name, out_dir, delta_spec, polarity_name,
                               min_area, truth_path);
        if (evaluate->parsed()) return cmd_evaluate(out_dir, kappa_list, seed);
        if (bench_cmd->parsed())
            return cmd_bench(input, mask_path, format_name, out_dir, repeats, kappa, seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
