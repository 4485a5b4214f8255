#pragma once

#include <string>

#include "roadseg/core.hpp"
#include "roadseg/segmentation.hpp"

namespace roadseg {

enum class MapFormat {
    PngUint16Div256,  // 16-bit grayscale PNG, disparity = stored / 256, 0 = invalid
    Pgm16Div256,      // P5 maxval 65535, same encoding
    CsvReal,          // comma-separated reals; NaN or negative = invalid
    BinaryF64,        // "DSPF" magic, u64-le width/height, f64-le grid; NaN = invalid
};

/// Picks the format from the file extension (.png .pgm .csv .dspf).
MapFormat sniff_format(const std::string& path);

DisparityMap read_disparity(const std::string& path, MapFormat format);
void write_disparity(const DisparityMap& map, const std::string& path, MapFormat format);

/// 8-bit P5 graymap; nonzero = member.
RoadMask read_mask(const std::string& path);
void write_mask(const RoadMask& mask, const std::string& path);

/// Writes a color overlay (undamaged purple, damaged red, off-road pixels
/// showing the optional base graymap) to `path` (PPM) and the raw damage mask
/// to the sibling path with "_mask.pgm" appended to the stem.
void write_segmentation(const SegmentationResult& result, const std::string& base_pgm_path,
                        const std::string& path);

/// Path of the raw mask emitted next to a write_segmentation overlay.
std::string segmentation_mask_path(const std::string& overlay_path);

}  // namespace roadseg
