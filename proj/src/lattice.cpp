#include "diskperc/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace diskperc {

namespace {
constexpr std::int32_t kNone = std::numeric_limits<std::int32_t>::min();

bool inside_disk(Site s, int n) noexcept {
    const long long r2 = static_cast<long long>(s.i) * s.i + static_cast<long long>(s.j) * s.j;
    return r2 < static_cast<long long>(n) * n;
}
}  // namespace

LatticeDisk::LatticeDisk(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("LatticeDisk: mesh parameter n must be >= 1");
    const int side = 2 * n + 1;
    grid_.assign(static_cast<std::size_t>(side) * side, kNone);

    // Row-major over the bounding square, dense remap.
    for (int j = -n; j <= n; ++j) {
        for (int i = -n; i <= n; ++i) {
            if (inside_disk({i, j}, n)) {
                grid_[static_cast<std::size_t>(grid_index({i, j}))] = static_cast<std::int32_t>(sites_.size());
                sites_.push_back({i, j});
            }
        }
    }

    nbr_.resize(sites_.size());
    bdeg_.assign(sites_.size(), 0);
    bedge_id_.assign(sites_.size(), std::array<int, 4>{-1, -1, -1, -1});
    for (int v = 0; v < vertex_count(); ++v) {
        const Site s = sites_[static_cast<std::size_t>(v)];
        for (int d = 0; d < 4; ++d) {
            const Site t{s.i + kSteps[static_cast<std::size_t>(d)].i, s.j + kSteps[static_cast<std::size_t>(d)].j};
            auto& slot = grid_[static_cast<std::size_t>(grid_index(t))];
            if (slot >= 0) {
                nbr_[static_cast<std::size_t>(v)][static_cast<std::size_t>(d)] = slot;
                if (slot > v) edges_.push_back({v, slot});
                continue;
            }
            if (slot == kNone) {
                slot = -static_cast<std::int32_t>(boundary_sites_.size()) - 1;
                boundary_sites_.push_back(t);
            }
            nbr_[static_cast<std::size_t>(v)][static_cast<std::size_t>(d)] = slot;
            bedge_id_[static_cast<std::size_t>(v)][static_cast<std::size_t>(d)] = static_cast<int>(boundary_edges_.size());
            boundary_edges_.push_back({boundary_index(slot), v, d});
            ++bdeg_[static_cast<std::size_t>(v)];
        }
        if (bdeg_[static_cast<std::size_t>(v)] > 0) inner_boundary_.push_back(v);
    }
}

std::optional<int> LatticeDisk::vertex_at(Site s) const noexcept {
    if (!in_grid(s)) return std::nullopt;
    const auto code = grid_[static_cast<std::size_t>(grid_index(s))];
    if (code >= 0) return code;
    return std::nullopt;
}

std::optional<int> LatticeDisk::boundary_at(Site s) const noexcept {
    if (!in_grid(s)) return std::nullopt;
    const auto code = grid_[static_cast<std::size_t>(grid_index(s))];
    if (code < 0 && code != kNone) return boundary_index(code);
    return std::nullopt;
}

std::optional<int> LatticeDisk::vertex_near(Point p) const noexcept {
    const Site s{static_cast<int>(std::lround(p.x * n_)), static_cast<int>(std::lround(p.y * n_))};
    return vertex_at(s);
}

VertexSet LatticeDisk::all() const { return VertexSet(vertex_count(), true); }
VertexSet LatticeDisk::none() const { return VertexSet(vertex_count(), false); }

int VertexSet::count() const noexcept {
    return static_cast<int>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::vector<int> VertexSet::indices() const {
    std::vector<int> out;
    for (int v = 0; v < size(); ++v)
        if (contains(v)) out.push_back(v);
    return out;
}

VertexSet VertexSet::complement() const {
    VertexSet out(size());
    for (std::size_t k = 0; k < bits_.size(); ++k) out.bits_[k] = bits_[k] ? 0 : 1;
    return out;
}

VertexSet& VertexSet::operator|=(const VertexSet& o) {
    if (o.size() != size()) throw std::invalid_argument("VertexSet: size mismatch");
    for (std::size_t k = 0; k < bits_.size(); ++k) bits_[k] |= o.bits_[k];
    return *this;
}

VertexSet& VertexSet::operator&=(const VertexSet& o) {
    if (o.size() != size()) throw std::invalid_argument("VertexSet: size mismatch");
    for (std::size_t k = 0; k < bits_.size(); ++k) bits_[k] &= o.bits_[k];
    return *this;
}

bool VertexSet::subset_of(const VertexSet& o) const noexcept {
    if (o.size() != size()) return false;
    for (std::size_t k = 0; k < bits_.size(); ++k)
        if (bits_[k] && !o.bits_[k]) return false;
    return true;
}

VertexSet ball_vertices(const LatticeDisk& lattice, Point center, double radius, bool closed) {
    VertexSet out = lattice.none();
    if (radius <= 0.0) {
        // B(x, 0) := {x}
        if (auto v = lattice.vertex_near(center)) {
            const Point p = lattice.position(*v);
            if (p.x == center.x && p.y == center.y) out.insert(*v);
        }
        return out;
    }
    const double r2 = radius * radius;
    for (int v = 0; v < lattice.vertex_count(); ++v) {
        const Point p = lattice.position(v);
        const double dx = p.x - center.x;
        const double dy = p.y - center.y;
        const double d2 = dx * dx + dy * dy;
        if (closed ? d2 <= r2 : d2 < r2) out.insert(v);
    }
    return out;
}

VertexSet annulus_sector(const LatticeDisk& lattice, double r, double r_outer, double eps,
                         SectorSide side, int level) {
    if (!(r >= 0.0 && r < r_outer && r_outer < 1.0 - eps && eps > 0.0))
        throw std::invalid_argument("annulus_sector: need 0 <= r < r' < 1 - eps");
    if (level < 0 || level > 2) throw std::invalid_argument("annulus_sector: level must be 0, 1 or 2");

    using std::numbers::pi;
    const double outer = 1.0 - level * eps / 2.0;
    const double inner = r + level * (r_outer - r) / 2.0 - 1.0 / lattice.n();
    const double lo = side == SectorSide::Plus ? -(2 - level) * pi / 8 : -(10 - level) * pi / 8;
    const double hi = side == SectorSide::Plus ? (10 - level) * pi / 8 : (2 - level) * pi / 8;

    auto in_window = [&](double theta) {
        for (double shift : {-2 * pi, 0.0, 2 * pi})
            if (theta + shift >= lo && theta + shift <= hi) return true;
        return false;
    };

    VertexSet out = lattice.none();
    for (int v = 0; v < lattice.vertex_count(); ++v) {
        const Point p = lattice.position(v);
        const double rho = norm(p);
        if (rho > outer || rho < inner) continue;
        const double theta = (p.x == 0.0 && p.y == 0.0) ? 0.0 : std::atan2(p.y, p.x);
        if (in_window(theta)) out.insert(v);
    }
    return out;
}

VertexSet outside_radius(const LatticeDisk& lattice, double radius) {
    VertexSet out = lattice.none();
    for (int v = 0; v < lattice.vertex_count(); ++v)
        if (norm(lattice.position(v)) >= radius) out.insert(v);
    return out;
}

}  // namespace diskperc
