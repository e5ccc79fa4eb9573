#include "diskperc/render.hpp"

#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <iomanip>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <png.h>

namespace diskperc {

Image::Image(int w, int h, Rgb fill) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("Image: empty size");
    for (std::size_t k = 0; k < rgb.size(); k += 3) {
        rgb[k] = fill.r;
        rgb[k + 1] = fill.g;
        rgb[k + 2] = fill.b;
    }
}

Rgb Image::at(int x, int y) const {
    const auto k = (static_cast<std::size_t>(y) * width + x) * 3;
    return {rgb[k], rgb[k + 1], rgb[k + 2]};
}

void Image::set(int x, int y, Rgb c) {
    const auto k = (static_cast<std::size_t>(y) * width + x) * 3;
    rgb[k] = c.r;
    rgb[k + 1] = c.g;
    rgb[k + 2] = c.b;
}

Image render_disk(const LatticeDisk& lattice, const RenderLayers& layers, const RenderStyle& style) {
    const int S = style.size;
    Image img(S, S);
    std::vector<std::uint8_t> on_interface;
    if (layers.interface) {
        on_interface.assign(static_cast<std::size_t>(lattice.vertex_count()), 0);
        for (int v : *layers.interface) on_interface[static_cast<std::size_t>(v)] = 1;
    }
    const int n = lattice.n();
    const double px = 2.0 / S;
    for (int y = 0; y < S; ++y) {
        for (int x = 0; x < S; ++x) {
            const Point p{-1.0 + (x + 0.5) * px, 1.0 - (y + 0.5) * px};
            const double rho = norm(p);
            if (style.outline && std::abs(rho - 1.0) <= 0.75 * px + 1e-12) {
                img.set(x, y, style.outline_colour);
                continue;
            }
            if (rho >= 1.0) continue;
            const auto v = lattice.vertex_at({static_cast<int>(std::lround(p.x * n)), static_cast<int>(std::lround(p.y * n))});
            if (!v) continue;
            if (!on_interface.empty() && on_interface[static_cast<std::size_t>(*v)]) img.set(x, y, style.interface);
            else if (layers.occupied && layers.occupied->contains(*v)) img.set(x, y, style.occupied);
            else if (layers.field && (*layers.field)[*v] >= layers.level) img.set(x, y, style.level_set);
        }
    }
    return img;
}

std::vector<int> interface_vertices(const LatticeDisk& lattice, const VertexSet& occupied, double arc_lo,
                                    double arc_hi) {
    using std::numbers::pi;
    auto on_arc = [&](double theta) {
        for (double shift : {-2 * pi, 0.0, 2 * pi})
            if (theta + shift >= arc_lo && theta + shift <= arc_hi) return true;
        return false;
    };
    const int N = lattice.vertex_count();
    std::vector<std::uint8_t> flooded(static_cast<std::size_t>(N), 0);
    std::deque<int> queue;
    for (int v : lattice.inner_boundary()) {
        const Point p = lattice.position(v);
        if (!occupied.contains(v) && !on_arc(std::atan2(p.y, p.x))) {
            flooded[static_cast<std::size_t>(v)] = 1;
            queue.push_back(v);
        }
    }
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        for (NeighbourCode w : lattice.neighbours(v)) {
            if (is_boundary_code(w) || flooded[static_cast<std::size_t>(w)] || occupied.contains(w)) continue;
            flooded[static_cast<std::size_t>(w)] = 1;
            queue.push_back(w);
        }
    }
    std::vector<int> out;
    for (int v = 0; v < N; ++v) {
        if (flooded[static_cast<std::size_t>(v)]) continue;
        for (NeighbourCode w : lattice.neighbours(v)) {
            if (!is_boundary_code(w) && flooded[static_cast<std::size_t>(w)]) {
                out.push_back(v);
                break;
            }
        }
    }
    return out;
}

void write_png(const Image& image, const std::string& path) {
    std::unique_ptr<std::FILE, int (*)(std::FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
    if (!fp) throw std::runtime_error("write_png: cannot open " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("write_png: libpng initialisation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("write_png: libpng error while writing " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < image.height; ++y) {
        auto* row = const_cast<png_bytep>(image.rgb.data() + static_cast<std::size_t>(y) * image.width * 3);
        png_write_row(png, row);
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    if (std::ferror(fp.get())) throw std::runtime_error("write_png: I/O error on " + path);
}

std::string svg_polylines(const std::vector<std::vector<Point>>& lines, Point lo, Point hi, int size,
                          bool unit_circle) {
    const double sx = size / (hi.x - lo.x), sy = size / (hi.y - lo.y);
    std::ostringstream os;
    os << std::fixed << std::setprecision(2);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\" viewBox=\"0 0 "
       << size << ' ' << size << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (unit_circle) {
        os << "<circle cx=\"" << -lo.x * sx << "\" cy=\"" << hi.y * sy << "\" r=\"" << sx
           << "\" fill=\"none\" stroke=\"#5a5a5a\" stroke-width=\"1\"/>\n";
    }
    for (const auto& line : lines) {
        if (line.empty()) continue;
        os << "<polyline fill=\"none\" stroke=\"#dc1414\" stroke-width=\"1\" points=\"";
        for (const Point& p : line) os << (p.x - lo.x) * sx << ',' << (hi.y - p.y) * sy << ' ';
        os << "\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void write_text(const std::string& text, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace diskperc
