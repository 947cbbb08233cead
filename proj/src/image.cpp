#include "mapf/image.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace mapf {

namespace {

void fill_cell(MapImage& img, Coord cell, int map_height, Rgb color, int inset) {
    // Internal y flips to pixel rows counted from the top.
    int top = (map_height - 1 - cell.y) * img.cell_size;
    int left = cell.x * img.cell_size;
    for (int py = top + inset; py < top + img.cell_size - inset; ++py) {
        for (int px = left + inset; px < left + img.cell_size - inset; ++px) {
            size_t i = (static_cast<size_t>(py) * img.width_px + px) * 3;
            img.rgb[i] = color.r;
            img.rgb[i + 1] = color.g;
            img.rgb[i + 2] = color.b;
        }
    }
}

void put_u32_be(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v >> 24));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

void put_chunk(std::vector<uint8_t>& out, const char type[4],
               const std::vector<uint8_t>& data) {
    put_u32_be(out, static_cast<uint32_t>(data.size()));
    size_t type_at = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    uint32_t crc = crc32(0L, out.data() + type_at, static_cast<uInt>(4 + data.size()));
    put_u32_be(out, crc);
}

}  // namespace

MapImage render_image(const GridMap& m, int cell_size, const RenderStyle& style,
                      const std::vector<CellMarker>& markers) {
    if (cell_size < 1) throw std::invalid_argument("render_image: cell_size must be >= 1");
    MapImage img;
    img.cell_size = cell_size;
    img.width_px = m.width() * cell_size;
    img.height_px = m.height() * cell_size;
    img.rgb.assign(static_cast<size_t>(img.width_px) * img.height_px * 3, 0);

    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x)
            fill_cell(img, {x, y}, m.height(),
                      m.is_obstacle({x, y}) ? style.obstacle_color : style.free_color, 0);

    int inset = std::max(1, cell_size / 8);
    for (const CellMarker& mk : markers) {
        if (!m.in_bounds(mk.cell))
            throw std::invalid_argument("render_image: marker out of bounds");
        fill_cell(img, mk.cell, m.height(), mk.color, inset);
    }
    return img;
}

std::vector<uint8_t> encode_png(const MapImage& img) {
    static const uint8_t signature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    std::vector<uint8_t> out(signature, signature + 8);

    std::vector<uint8_t> ihdr;
    put_u32_be(ihdr, static_cast<uint32_t>(img.width_px));
    put_u32_be(ihdr, static_cast<uint32_t>(img.height_px));
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(2);  // truecolor
    ihdr.push_back(0);  // deflate
    ihdr.push_back(0);  // adaptive filtering
    ihdr.push_back(0);  // no interlace
    put_chunk(out, "IHDR", ihdr);

    // One filter byte (0 = None) per scanline.
    size_t stride = static_cast<size_t>(img.width_px) * 3;
    std::vector<uint8_t> raw;
    raw.reserve((stride + 1) * img.height_px);
    for (int y = 0; y < img.height_px; ++y) {
        raw.push_back(0);
        raw.insert(raw.end(), img.rgb.begin() + y * stride, img.rgb.begin() + (y + 1) * stride);
    }

    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<uint8_t> idat(bound);
    if (compress2(idat.data(), &bound, raw.data(), static_cast<uLong>(raw.size()),
                  Z_BEST_COMPRESSION) != Z_OK)
        throw std::runtime_error("encode_png: deflate failed");
    idat.resize(bound);
    put_chunk(out, "IDAT", idat);
    put_chunk(out, "IEND", {});
    return out;
}

void write_png(const std::string& path, const MapImage& img) {
    std::vector<uint8_t> bytes = encode_png(img);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_png: cannot open " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

std::string base64_encode(const std::vector<uint8_t>& bytes) {
    static const char table[] =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    size_t i = 0;
    while (i + 3 <= bytes.size()) {
        uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
        out.push_back(table[(v >> 18) & 63]);
        out.push_back(table[(v >> 12) & 63]);
        out.push_back(table[(v >> 6) & 63]);
        out.push_back(table[v & 63]);
        i += 3;
    }
    if (i + 1 == bytes.size()) {
        uint32_t v = bytes[i] << 16;
        out.push_back(table[(v >> 18) & 63]);
        out.push_back(table[(v >> 12) & 63]);
        out += "==";
    } else if (i + 2 == bytes.size()) {
        uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
        out.push_back(table[(v >> 18) & 63]);
        out.push_back(table[(v >> 12) & 63]);
        out.push_back(table[(v >> 6) & 63]);
        out.push_back('=');
    }
    return out;
}

}  // namespace mapf
