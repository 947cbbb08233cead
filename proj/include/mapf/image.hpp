#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mapf/grid.hpp"

namespace mapf {

struct Rgb {
    uint8_t r = 0, g = 0, b = 0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Raster rendering of a map. Pixel row 0 is the TOP of the map (internal
// y = height-1): images are vertically flipped relative to internal
// coordinates so that up on screen means increasing y.
struct MapImage {
    int width_px = 0;
    int height_px = 0;
    int cell_size = 0;
    std::vector<uint8_t> rgb;  // row-major, 3 bytes per pixel

    Rgb pixel(int px, int py) const {
        size_t i = (static_cast<size_t>(py) * width_px + px) * 3;
        return {rgb[i], rgb[i + 1], rgb[i + 2]};
    }
};

struct RenderStyle {
    Rgb free_color{255, 255, 255};
    Rgb obstacle_color{0, 0, 0};
};

// Optional per-cell marker (agent/goal overlays), drawn as an inset square.
struct CellMarker {
    Coord cell;
    Rgb color;
};

MapImage render_image(const GridMap& m, int cell_size = 16, const RenderStyle& style = {},
                      const std::vector<CellMarker>& markers = {});

// Minimal PNG encoder (8-bit truecolor, zlib-deflated). The MM prompt
// attachment uses this encoding.
std::vector<uint8_t> encode_png(const MapImage& img);
void write_png(const std::string& path, const MapImage& img);

std::string base64_encode(const std::vector<uint8_t>& bytes);

}  // namespace mapf
