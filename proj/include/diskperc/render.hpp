#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "diskperc/lattice.hpp"

namespace diskperc {

struct Rgb {
    std::uint8_t r = 255, g = 255, b = 255;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel

    Image(int w, int h, Rgb fill = {});
    Rgb at(int x, int y) const;
    void set(int x, int y, Rgb c);
};

struct RenderStyle {
    int size = 800;                 // square image side in pixels
    bool outline = true;
    Rgb occupied{0, 0, 0};
    Rgb level_set{120, 170, 230};
    Rgb interface{220, 20, 20};
    Rgb outline_colour{90, 90, 90};
};

/// Optional layers drawn under the occupied set.
struct RenderLayers {
    const VertexSet* occupied = nullptr;
    const Eigen::VectorXd* field = nullptr;  // painted where field >= level
    double level = 0.0;
    const std::vector<int>* interface = nullptr;
};

Image render_disk(const LatticeDisk& lattice, const RenderLayers& layers, const RenderStyle& style = {});

/// Outer boundary of the occupied set seen from the boundary arc complementary to
/// [arc_lo, arc_hi] (angles in radians): flood fill the vacant set from the inner
/// boundary vertices outside the arc; the interface is the filled vertices that
/// touch the flooded region.
std::vector<int> interface_vertices(const LatticeDisk& lattice, const VertexSet& occupied, double arc_lo,
                                    double arc_hi);

void write_png(const Image& image, const std::string& path);

/// Polylines in the unit square [-1,1]^2 (or any box given by `lo`/`hi`) as an SVG document.
std::string svg_polylines(const std::vector<std::vector<Point>>& lines, Point lo, Point hi, int size = 800,
                          bool unit_circle = true);
void write_text(const std::string& text, const std::string& path);

}  // namespace diskperc
