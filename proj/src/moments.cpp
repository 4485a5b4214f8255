#include "roadseg/moments.hpp"

#include <vector>

namespace roadseg {

Moments merge(const Moments& a, const Moments& b) {
    Moments m;
    m.n = a.n + b.n;
    m.su = a.su + b.su;
    m.sv = a.sv + b.sv;
    m.sd = a.sd + b.sd;
    m.suu = a.suu + b.suu;
    m.svv = a.svv + b.svv;
    m.suv = a.suv + b.suv;
    m.sdu = a.sdu + b.sdu;
    m.sdv = a.sdv + b.sdv;
    m.sdd = a.sdd + b.sdd;
    return m;
}

void add_sample(Moments& m, double u, double v, double d) {
    m.n += 1;
    m.su += u;
    m.sv += v;
    m.sd += d;
    m.suu += u * u;
    m.svv += v * v;
    m.suv += u * v;
    m.sdu += d * u;
    m.sdv += d * v;
    m.sdd += d * d;
}

namespace {

// Plain double sums over a single row; rows are short enough that the
// round-off stays far below the cross-row compensation level. v is constant
// along a row, so the v-weighted sums factor out of the inner loop.
Moments accumulate_row(const DisparityMap& map, const RoadMask& mask, int v) {
    const std::size_t base = static_cast<std::size_t>(v) * map.width;
    const double vd = static_cast<double>(v);
    std::int64_t n = 0;
    double su = 0.0, sd = 0.0, suu = 0.0, sdu = 0.0, sdd = 0.0;
    for (int u = 0; u < map.width; ++u) {
        const std::size_t i = base + u;
        if (!map.valid[i] || !mask.member[i]) continue;
        const double ud = static_cast<double>(u);
        const double d = map.values[i];
        ++n;
        su += ud;
        sd += d;
        suu += ud * ud;
        sdu += d * ud;
        sdd += d * d;
    }
    Moments m;
    m.n = n;
    m.su = su;
    m.sv = static_cast<double>(n) * vd;
    m.sd = sd;
    m.suu = suu;
    m.svv = static_cast<double>(n) * vd * vd;
    m.suv = su * vd;
    m.sdu = sdu;
    m.sdv = sd * vd;
    m.sdd = sdd;
    return m;
}

struct CompensatedMoments {
    CompensatedSum su, sv, sd, suu, svv, suv, sdu, sdv, sdd;
    std::int64_t n = 0;

    void add(const Moments& m) {
        n += m.n;
        su.add(m.su);
        sv.add(m.sv);
        sd.add(m.sd);
        suu.add(m.suu);
        svv.add(m.svv);
        suv.add(m.suv);
        sdu.add(m.sdu);
        sdv.add(m.sdv);
        sdd.add(m.sdd);
    }

    Moments result() const {
        Moments m;
        m.n = n;
        m.su = su.value();
        m.sv = sv.value();
        m.sd = sd.value();
        m.suu = suu.value();
        m.svv = svv.value();
        m.suv = suv.value();
        m.sdu = sdu.value();
        m.sdv = sdv.value();
        m.sdd = sdd.value();
        return m;
    }
};

}  // namespace

Moments accumulate(const DisparityMap& map, const RoadMask& mask) {
    require_same_shape(map.width, map.height, mask.width, mask.height, "accumulate");

    std::vector<Moments> rows(static_cast<std::size_t>(map.height));
#pragma omp parallel for schedule(static)
    for (int v = 0; v < map.height; ++v) rows[v] = accumulate_row(map, mask, v);

    // Merge row partials in a fixed order so the result is identical for any
    // thread count.
    CompensatedMoments acc;
    for (const Moments& r : rows) acc.add(r);
    Moments m = acc.result();
    if (m.n == 0) throw EmptySelection("accumulate: no valid masked pixel");
    return m;
}

namespace serial {

Moments accumulate(const DisparityMap& map, const RoadMask& mask) {
    require_same_shape(map.width, map.height, mask.width, mask.height, "accumulate");

    // Same row kernel and merge order as the parallel version, so the two
    // paths agree bit for bit.
    CompensatedMoments acc;
    for (int v = 0; v < map.height; ++v) acc.add(accumulate_row(map, mask, v));
    Moments m = acc.result();
    if (m.n == 0) throw EmptySelection("accumulate: no valid masked pixel");
    return m;
}

}  // namespace serial

}  // namespace roadseg
