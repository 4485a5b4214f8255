#include "roadseg/io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <vector>

namespace roadseg {

namespace {

constexpr char kDspfMagic[4] = {'D', 'S', 'P', 'F'};

std::string lower_ext(const std::string& path) {
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return "";
    std::string ext = path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// --- 16-bit grayscale PNG ---------------------------------------------------

DisparityMap read_png16(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IoError("read_disparity: cannot open " + path);

    png_byte header[8];
    if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8))
        throw ParseError("read_disparity: " + path + " is not a PNG file");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("read_disparity: libpng initialization failed");
    }

    std::vector<png_bytep> row_ptrs;
    std::vector<png_byte> data;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ParseError("read_disparity: libpng failed to decode " + path);
    }

    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int depth = png_get_bit_depth(png, info);
    const int color = png_get_color_type(png, info);
    if (depth != 16 || color != PNG_COLOR_TYPE_GRAY) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("read_disparity: " + path + " must be 16-bit grayscale, got depth " +
                          std::to_string(depth) + " color type " + std::to_string(color));
    }
    if (w < 1 || h < 1) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw EmptyMap("read_disparity: empty image " + path);
    }

    data.resize(static_cast<std::size_t>(w) * h * 2);
    row_ptrs.resize(h);
    for (png_uint_32 v = 0; v < h; ++v) row_ptrs[v] = data.data() + static_cast<std::size_t>(v) * w * 2;
    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    DisparityMap map(static_cast<int>(w), static_cast<int>(h));
    for (std::size_t i = 0; i < static_cast<std::size_t>(w) * h; ++i) {
        // PNG stores 16-bit samples big-endian
        const unsigned s = (static_cast<unsigned>(data[2 * i]) << 8) | data[2 * i + 1];
        if (s == 0) continue;  // 0 marks a missing measurement
        map.values[i] = static_cast<double>(s) / 256.0;
        map.valid[i] = 1;
    }
    return map;
}

std::uint16_t encode_div256(double d, const std::string& path) {
    if (!(d >= 0.0) || !std::isfinite(d))
        throw RangeError("write_disparity: negative or non-finite value for " + path);
    const double scaled = std::round(d * 256.0);
    if (scaled > 65535.0)
        throw RangeError("write_disparity: value " + std::to_string(d) +
                         " does not fit the 16-bit div-256 encoding of " + path);
    const auto s = static_cast<std::uint16_t>(scaled);
    return s == 0 ? std::uint16_t{1} : s;  // keep valid pixels distinct from "missing"
}

void write_png16(const DisparityMap& map, const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw IoError("write_disparity: cannot open " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError("write_disparity: libpng initialization failed");
    }

    std::vector<png_byte> data(static_cast<std::size_t>(map.width) * map.height * 2, 0);
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        if (!map.valid[i]) continue;
        const std::uint16_t s = encode_div256(map.values[i], path);
        data[2 * i] = static_cast<png_byte>(s >> 8);
        data[2 * i + 1] = static_cast<png_byte>(s & 0xff);
    }
    std::vector<png_bytep> row_ptrs(map.height);
    for (int v = 0; v < map.height; ++v)
        row_ptrs[v] = data.data() + static_cast<std::size_t>(v) * map.width * 2;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("write_disparity: libpng failed to encode " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, map.width, map.height, 16, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, row_ptrs.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

// --- PGM --------------------------------------------------------------------

// Reads the P5 header: width, height, maxval, skipping comments.
void read_pgm_header(std::istream& in, const std::string& path, int& w, int& h, int& maxval) {
    std::string magic;
    in >> magic;
    if (magic != "P5") throw ParseError("read: " + path + " is not a P5 graymap");
    auto next_int = [&](int& target) {
        for (;;) {
            in >> std::ws;
            if (in.peek() == '#') {
                std::string comment;
                std::getline(in, comment);
                continue;
            }
            if (!(in >> target)) throw ParseError("read: malformed P5 header in " + path);
            return;
        }
    };
    next_int(w);
    next_int(h);
    next_int(maxval);
    in.get();  // single whitespace after maxval
    if (w < 1 || h < 1) throw EmptyMap("read: empty graymap " + path);
}

DisparityMap read_pgm16(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("read_disparity: cannot open " + path);
    int w, h, maxval;
    read_pgm_header(in, path, w, h, maxval);
    if (maxval != 65535)
        throw FormatError("read_disparity: " + path + " must have maxval 65535, got " +
                          std::to_string(maxval));

    std::vector<unsigned char> data(static_cast<std::size_t>(w) * h * 2);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (static_cast<std::size_t>(in.gcount()) != data.size())
        throw ParseError("read_disparity: truncated graymap " + path);

    DisparityMap map(w, h);
    for (std::size_t i = 0; i < static_cast<std::size_t>(w) * h; ++i) {
        const unsigned s = (static_cast<unsigned>(data[2 * i]) << 8) | data[2 * i + 1];
        if (s == 0) continue;
        map.values[i] = static_cast<double>(s) / 256.0;
        map.valid[i] = 1;
    }
    return map;
}

void write_pgm16(const DisparityMap& map, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("write_disparity: cannot open " + path);
    out << "P5\n" << map.width << " " << map.height << "\n65535\n";
    std::vector<unsigned char> data(static_cast<std::size_t>(map.width) * map.height * 2, 0);
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        if (!map.valid[i]) continue;
        const std::uint16_t s = encode_div256(map.values[i], path);
        data[2 * i] = static_cast<unsigned char>(s >> 8);
        data[2 * i + 1] = static_cast<unsigned char>(s & 0xff);
    }
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) throw IoError("write_disparity: write failed for " + path);
}

// --- CSV --------------------------------------------------------------------

DisparityMap read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("read_disparity: cannot open " + path);

    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<double> row;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            try {
                std::size_t pos = 0;
                const double d = std::stod(cell, &pos);
                while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
                if (pos != cell.size()) throw std::invalid_argument(cell);
                row.push_back(d);
            } catch (const std::exception&) {
                throw ParseError("read_disparity: bad cell '" + cell + "' in " + path);
            }
        }
        if (row.empty()) throw ParseError("read_disparity: empty row in " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw EmptyMap("read_disparity: no data in " + path);
    const std::size_t w = rows.front().size();
    for (const auto& row : rows)
        if (row.size() != w) throw ParseError("read_disparity: ragged rows in " + path);

    DisparityMap map(static_cast<int>(w), static_cast<int>(rows.size()));
    for (std::size_t v = 0; v < rows.size(); ++v)
        for (std::size_t u = 0; u < w; ++u) {
            const double d = rows[v][u];
            if (std::isnan(d) || d < 0.0) continue;  // invalid cell
            if (!std::isfinite(d)) throw ParseError("read_disparity: infinite cell in " + path);
            map.set(static_cast<int>(u), static_cast<int>(v), d);
        }
    return map;
}

void write_csv_map(const DisparityMap& map, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("write_disparity: cannot open " + path);
    out.precision(17);
    for (int v = 0; v < map.height; ++v) {
        for (int u = 0; u < map.width; ++u) {
            if (u) out << ",";
            if (map.is_valid(u, v))
                out << map.at(u, v);
            else
                out << "nan";
        }
        out << "\n";
    }
    if (!out) throw IoError("write_disparity: write failed for " + path);
}

// --- binary f64 grid ----------------------------------------------------------

void store_u64le(unsigned char* p, std::uint64_t x) {
    for (int i = 0; i < 8; ++i) p[i] = static_cast<unsigned char>((x >> (8 * i)) & 0xff);
}

std::uint64_t load_u64le(const unsigned char* p) {
    std::uint64_t x = 0;
    for (int i = 0; i < 8; ++i) x |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return x;
}

DisparityMap read_dspf(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("read_disparity: cannot open " + path);

    unsigned char header[20];
    in.read(reinterpret_cast<char*>(header), 20);
    if (in.gcount() != 20 || std::memcmp(header, kDspfMagic, 4) != 0)
        throw ParseError("read_disparity: " + path + " lacks the DSPF header");
    const std::uint64_t w = load_u64le(header + 4);
    const std::uint64_t h = load_u64le(header + 12);
    if (w < 1 || h < 1) throw EmptyMap("read_disparity: empty grid in " + path);
    if (w > (1u << 20) || h > (1u << 20) || w * h > (1ull << 30))
        throw ParseError("read_disparity: implausible grid size in " + path);

    std::vector<unsigned char> data(static_cast<std::size_t>(w) * h * 8);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (static_cast<std::size_t>(in.gcount()) != data.size())
        throw ParseError("read_disparity: truncated grid in " + path);

    DisparityMap map(static_cast<int>(w), static_cast<int>(h));
    for (std::size_t i = 0; i < static_cast<std::size_t>(w) * h; ++i) {
        const std::uint64_t bits = load_u64le(data.data() + 8 * i);
        double d;
        std::memcpy(&d, &bits, 8);
        if (std::isnan(d)) continue;
        if (!std::isfinite(d) || d < 0.0)
            throw FormatError("read_disparity: negative or infinite value in " + path);
        map.values[i] = d;
        map.valid[i] = 1;
    }
    return map;
}

void write_dspf(const DisparityMap& map, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("write_disparity: cannot open " + path);

    unsigned char header[20];
    std::memcpy(header, kDspfMagic, 4);
    store_u64le(header + 4, static_cast<std::uint64_t>(map.width));
    store_u64le(header + 12, static_cast<std::uint64_t>(map.height));
    out.write(reinterpret_cast<const char*>(header), 20);

    std::vector<unsigned char> data(map.values.size() * 8);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        const double d = map.valid[i] ? map.values[i] : nan;
        std::uint64_t bits;
        std::memcpy(&bits, &d, 8);
        store_u64le(data.data() + 8 * i, bits);
    }
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) throw IoError("write_disparity: write failed for " + path);
}

}  // namespace

MapFormat sniff_format(const std::string& path) {
    const std::string ext = lower_ext(path);
    if (ext == "png") return MapFormat::PngUint16Div256;
    if (ext == "pgm") return MapFormat::Pgm16Div256;
    if (ext == "csv") return MapFormat::CsvReal;
    if (ext == "dspf" || ext == "bin") return MapFormat::BinaryF64;
    throw FormatError("sniff_format: cannot infer a map format from '" + path + "'");
}

DisparityMap read_disparity(const std::string& path, MapFormat format) {
    switch (format) {
        case MapFormat::PngUint16Div256: return read_png16(path);
        case MapFormat::Pgm16Div256: return read_pgm16(path);
        case MapFormat::CsvReal: return read_csv(path);
        case MapFormat::BinaryF64: return read_dspf(path);
    }
    throw FormatError("read_disparity: unknown format");
}

void write_disparity(const DisparityMap& map, const std::string& path, MapFormat format) {
    switch (format) {
        case MapFormat::PngUint16Div256: write_png16(map, path); return;
        case MapFormat::Pgm16Div256: write_pgm16(map, path); return;
        case MapFormat::CsvReal: write_csv_map(map, path); return;
        case MapFormat::BinaryF64: write_dspf(map, path); return;
    }
    throw FormatError("write_disparity: unknown format");
}

RoadMask read_mask(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("read_mask: cannot open " + path);
    int w, h, maxval;
    read_pgm_header(in, path, w, h, maxval);
    if (maxval < 1 || maxval > 255)
        throw FormatError("read_mask: " + path + " must be 8-bit (maxval <= 255), got " +
                          std::to_string(maxval));

    std::vector<unsigned char> data(static_cast<std::size_t>(w) * h);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (static_cast<std::size_t>(in.gcount()) != data.size())
        throw ParseError("read_mask: truncated graymap " + path);

    RoadMask mask(w, h);
    for (std::size_t i = 0; i < data.size(); ++i) mask.member[i] = data[i] ? 1 : 0;
    return mask;
}

void write_mask(const RoadMask& mask, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("write_mask: cannot open " + path);
    out << "P5\n" << mask.width << " " << mask.height << "\n255\n";
    std::vector<unsigned char> data(mask.member.size());
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = mask.member[i] ? 255 : 0;
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) throw IoError("write_mask: write failed for " + path);
}

std::string segmentation_mask_path(const std::string& overlay_path) {
    const auto dot = overlay_path.find_last_of('.');
    const auto slash = overlay_path.find_last_of("/\\");
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return overlay_path + "_mask.pgm";
    return overlay_path.substr(0, dot) + "_mask.pgm";
}

void write_segmentation(const SegmentationResult& result, const std::string& base_pgm_path,
                        const std::string& path) {
    std::vector<unsigned char> base;
    if (!base_pgm_path.empty()) {
        std::ifstream in(base_pgm_path, std::ios::binary);
        if (!in) throw IoError("write_segmentation: cannot open base image " + base_pgm_path);
        int w, h, maxval;
        read_pgm_header(in, base_pgm_path, w, h, maxval);
        if (w != result.width || h != result.height)
            throw DimensionMismatch("write_segmentation: base image shape differs");
        if (maxval > 255) throw FormatError("write_segmentation: base image must be 8-bit");
        base.resize(static_cast<std::size_t>(w) * h);
        in.read(reinterpret_cast<char*>(base.data()), static_cast<std::streamsize>(base.size()));
        if (static_cast<std::size_t>(in.gcount()) != base.size())
            throw ParseError("write_segmentation: truncated base image");
    }

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("write_segmentation: cannot open " + path);
    out << "P6\n" << result.width << " " << result.height << "\n255\n";
    std::vector<unsigned char> rgb(static_cast<std::size_t>(result.width) * result.height * 3, 0);
    for (std::size_t i = 0; i < result.region.size(); ++i) {
        unsigned char r, g, b;
        if (result.region[i] && result.damage[i]) {
            r = 255; g = 0; b = 0;        // damaged: red
        } else if (result.region[i]) {
            r = 128; g = 0; b = 128;      // undamaged road: purple
        } else {
            const unsigned char gray = base.empty() ? 0 : base[i];
            r = g = b = gray;             // off-road: untouched base
        }
        rgb[3 * i] = r;
        rgb[3 * i + 1] = g;
        rgb[3 * i + 2] = b;
    }
    out.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
    if (!out) throw IoError("write_segmentation: write failed for " + path);

    RoadMask damage(result.width, result.height);
    damage.member = result.damage;
    write_mask(damage, segmentation_mask_path(path));
}

}  // namespace roadseg
