#include "roadseg/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>

namespace roadseg {

namespace {

using Clock = std::chrono::steady_clock;

template <bool Parallel>
SigmaReport sigma_impl(const TransformedMap& t) {
    const DisparityMap& map = t.map;
    const int h = map.height;

    // Two passes with per-row partials merged in order, like the moment sums.
    std::vector<double> row_sum(static_cast<std::size_t>(h), 0.0);
    std::vector<std::int64_t> row_n(static_cast<std::size_t>(h), 0);
#pragma omp parallel for schedule(static) if (Parallel)
    for (int v = 0; v < h; ++v) {
        const std::size_t base = static_cast<std::size_t>(v) * map.width;
        double s = 0.0;
        std::int64_t n = 0;
        for (int u = 0; u < map.width; ++u) {
            if (!map.valid[base + u]) continue;
            s += map.values[base + u];
            ++n;
        }
        row_sum[v] = s;
        row_n[v] = n;
    }
    CompensatedSum total;
    std::int64_t m = 0;
    for (int v = 0; v < h; ++v) {
        total.add(row_sum[v]);
        m += row_n[v];
    }
    if (m == 0) throw EmptySelection("sigma: no valid pixel");
    const double mean = total.value() / static_cast<double>(m);

    std::vector<double> row_dev(static_cast<std::size_t>(h), 0.0);
#pragma omp parallel for schedule(static) if (Parallel)
    for (int v = 0; v < h; ++v) {
        const std::size_t base = static_cast<std::size_t>(v) * map.width;
        double s = 0.0;
        for (int u = 0; u < map.width; ++u) {
            if (!map.valid[base + u]) continue;
            const double d = map.values[base + u] - mean;
            s += d * d;
        }
        row_dev[v] = s;
    }
    CompensatedSum dev;
    for (int v = 0; v < h; ++v) dev.add(row_dev[v]);

    SigmaReport rep;
    rep.m = m;
    rep.sigma = std::sqrt(std::max(0.0, dev.value() / static_cast<double>(m)));
    return rep;
}

}  // namespace

SigmaReport sigma(const TransformedMap& t) { return sigma_impl<true>(t); }

namespace serial {
SigmaReport sigma(const TransformedMap& t) { return sigma_impl<false>(t); }
}  // namespace serial

PixelMetrics metrics_from_counts(std::int64_t tp, std::int64_t fp, std::int64_t fn, std::int64_t tn) {
    PixelMetrics m;
    m.tp = tp;
    m.fp = fp;
    m.fn = fn;
    m.tn = tn;
    auto ratio = [](std::int64_t num, std::int64_t den, std::int64_t err) {
        if (den == 0) return err == 0 ? 1.0 : 0.0;
        return static_cast<double>(num) / static_cast<double>(den);
    };
    m.precision = ratio(tp, tp + fp, fp);
    m.recall = ratio(tp, tp + fn, fn);
    m.iou = ratio(tp, tp + fp + fn, fp + fn);
    if (m.precision + m.recall > 0.0)
        m.f_score = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    else
        m.f_score = (fp + fn == 0) ? 1.0 : 0.0;
    const std::int64_t total = tp + fp + fn + tn;
    m.accuracy = ratio(tp + tn, total, fp + fn);
    return m;
}

PixelMetrics pixel_metrics(const RoadMask& pred, const RoadMask& truth, const RoadMask& domain) {
    require_same_shape(pred.width, pred.height, truth.width, truth.height, "pixel_metrics");
    require_same_shape(pred.width, pred.height, domain.width, domain.height, "pixel_metrics");

    const std::int64_t npx = static_cast<std::int64_t>(pred.member.size());
    std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
#pragma omp parallel for schedule(static) reduction(+ : tp, fp, fn, tn)
    for (std::int64_t i = 0; i < npx; ++i) {
        if (!domain.member[i]) continue;
        const bool p = pred.member[i] != 0;
        const bool t = truth.member[i] != 0;
        if (p && t)
            ++tp;
        else if (p && !t)
            ++fp;
        else if (!p && t)
            ++fn;
        else
            ++tn;
    }
    return metrics_from_counts(tp, fp, fn, tn);
}

double delta_theta(double estimated_rad, double actual_rad) {
    double diff = std::fmod(std::abs(estimated_rad - actual_rad), kPi);
    diff = std::min(diff, kPi - diff);
    return rad2deg(diff);
}

VDisparity v_disparity(const DisparityMap& map, const RoadMask& mask, int bins) {
    require_same_shape(map.width, map.height, mask.width, mask.height, "v_disparity");
    if (bins < 1) throw Error("v_disparity: bins must be >= 1");

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    const std::int64_t npx = static_cast<std::int64_t>(map.values.size());
#pragma omp parallel for schedule(static) reduction(min : lo) reduction(max : hi)
    for (std::int64_t i = 0; i < npx; ++i) {
        if (!map.valid[i] || !mask.member[i]) continue;
        lo = std::min(lo, map.values[i]);
        hi = std::max(hi, map.values[i]);
    }
    if (!std::isfinite(lo)) throw EmptySelection("v_disparity: no valid masked pixel");
    if (hi <= lo) hi = lo + 1.0;

    VDisparity vd;
    vd.rows = map.height;
    vd.bins = bins;
    vd.lo = lo;
    vd.hi = hi;
    vd.counts.assign(static_cast<std::size_t>(map.height) * bins, 0);
#pragma omp parallel for schedule(static)
    for (int v = 0; v < map.height; ++v) {
        const std::size_t base = static_cast<std::size_t>(v) * map.width;
        std::uint32_t* row = vd.counts.data() + static_cast<std::size_t>(v) * bins;
        for (int u = 0; u < map.width; ++u) {
            const std::size_t i = base + u;
            if (!map.valid[i] || !mask.member[i]) continue;
            int b = static_cast<int>((map.values[i] - lo) / (hi - lo) * bins);
            if (b < 0) b = 0;
            if (b >= bins) b = bins - 1;
            ++row[b];
        }
    }
    return vd;
}

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Median per-call seconds of fn over `repeats` samples, one warm-up excluded.
// Each sample loops the call enough times to outlast the clock granularity.
double time_solver(const std::function<void()>& fn, int repeats) {
    fn();  // warm-up
    int inner = 1;
    for (;;) {
        const auto t0 = Clock::now();
        for (int i = 0; i < inner; ++i) fn();
        const double s = std::chrono::duration<double>(Clock::now() - t0).count();
        if (s >= 20e-6 || inner >= (1 << 20)) break;
        inner *= 4;
    }
    std::vector<double> samples;
    samples.reserve(repeats);
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = Clock::now();
        for (int i = 0; i < inner; ++i) fn();
        samples.push_back(std::chrono::duration<double>(Clock::now() - t0).count() / inner);
    }
    return median(samples);
}

}  // namespace

BenchReport bench(const DisparityMap& map, const RoadMask& mask, int repeats) {
    if (repeats < 1) throw Error("bench: repeats must be >= 1");

    BenchReport report;

    // Shared single pass; timed separately so the per-method figures isolate
    // what actually differs between them.
    const auto tacc0 = Clock::now();
    const Moments m = serial::accumulate(map, mask);
    report.accumulate_seconds = std::chrono::duration<double>(Clock::now() - tacc0).count();
    report.n_pixels = m.n;

    struct Solved {
        RoadModel model;
        int evaluations = 0;
    };
    struct Method {
        const char* name;
        std::function<Solved(const Moments&)> run;
    };
    const double bracket = deg2rad(kDefaultBracketDeg);
    std::vector<Method> methods;
    methods.push_back({"closed-form", [](const Moments& mm) {
                           const WCoefficients w = compute_w(mm);
                           RollSolution sol;
                           try {
                               sol = solve_roll_angle(w);
                           } catch (const DegenerateObjective&) {
                               sol = fallback_grid_solve(w);
                           }
                           return Solved{fit_model(mm, sol.theta), 2};
                       }});
    methods.push_back({"gd", [](const Moments& mm) {
                           const WCoefficients w = compute_w(mm);
                           const IterativeSolveReport r =
                               gd_solve(w, 0.0, kDefaultGdStep, kDefaultSolveTol, kDefaultGdMaxIter);
                           return Solved{fit_model(mm, r.theta), r.evaluations};
                       }});
    methods.push_back({"gss", [bracket](const Moments& mm) {
                           const WCoefficients w = compute_w(mm);
                           const IterativeSolveReport r = gss_solve(w, -bracket, bracket, kDefaultSolveTol);
                           return Solved{fit_model(mm, r.theta), r.evaluations};
                       }});

    for (const Method& method : methods) {
        BenchRow row;
        row.method = method.name;

        const Solved solved = method.run(m);
        row.theta = solved.model.theta;
        row.evaluations = solved.evaluations;
        const TransformedMap t = serial::transform_map(map, mask, solved.model);
        row.sigma = serial::sigma(t).sigma;

        row.elapsed = time_solver([&] { method.run(m); }, repeats);
        report.rows.push_back(row);
    }
    return report;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path);
    if (!out) throw IoError("write_csv: cannot open " + path);
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
    if (!out) throw IoError("write_csv: write failed for " + path);
}

std::string format_table(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width(header.size(), 0);
    for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
    for (const auto& row : rows)
        for (std::size_t i = 0; i < row.size() && i < width.size(); ++i)
            width[i] = std::max(width[i], row[i].size());

    std::string out;
    auto emit = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out += row[i];
            if (i + 1 < row.size()) out.append(width[i] - row[i].size() + 2, ' ');
        }
        out += "\n";
    };
    emit(header);
    for (const auto& row : rows) emit(row);
    return out;
}

}  // namespace roadseg
