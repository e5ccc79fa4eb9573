#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace diskperc {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline double norm(Point p) noexcept { return std::hypot(p.x, p.y); }

/// Integer coordinates on Z^2; the physical point is (i/n, j/n).
struct Site {
    int i = 0;
    int j = 0;
    friend bool operator==(const Site&, const Site&) = default;
};

/// Neighbour slot encoding: >= 0 is a vertex index of D_n, < 0 encodes the
/// outer boundary point with index -(code + 1).
using NeighbourCode = std::int32_t;

constexpr bool is_boundary_code(NeighbourCode c) noexcept { return c < 0; }
constexpr int boundary_index(NeighbourCode c) noexcept { return -c - 1; }

/// Directions in neighbour-table order: +x, -x, +y, -y.
inline constexpr std::array<Site, 4> kSteps{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};

struct BoundaryEdge {
    int boundary = 0;  // index into outer_boundary()
    int vertex = 0;    // interior endpoint
    int direction = 0; // step from vertex to boundary point
};

class VertexSet;

/// The lattice disk D_n = (1/n)Z^2 ∩ {|x| < 1} with its outer boundary
/// (lattice points outside adjacent to D_n) and the list of boundary edges.
/// Immutable after construction.
class LatticeDisk {
public:
    explicit LatticeDisk(int n);

    int n() const noexcept { return n_; }
    int vertex_count() const noexcept { return static_cast<int>(sites_.size()); }
    int interior_edge_count() const noexcept { return static_cast<int>(edges_.size()); }
    int boundary_edge_count() const noexcept { return static_cast<int>(boundary_edges_.size()); }

    Site site(int v) const noexcept { return sites_[static_cast<std::size_t>(v)]; }
    Point position(int v) const noexcept { return to_point(sites_[static_cast<std::size_t>(v)]); }
    Point to_point(Site s) const noexcept { return {s.i / static_cast<double>(n_), s.j / static_cast<double>(n_)}; }

    const std::array<NeighbourCode, 4>& neighbours(int v) const noexcept {
        return nbr_[static_cast<std::size_t>(v)];
    }
    NeighbourCode neighbour(int v, int dir) const noexcept { return nbr_[static_cast<std::size_t>(v)][static_cast<std::size_t>(dir)]; }

    /// Number of boundary neighbours (kappa_x in the killed-walk picture).
    int boundary_degree(int v) const noexcept { return bdeg_[static_cast<std::size_t>(v)]; }

    std::span<const Site> outer_boundary() const noexcept { return boundary_sites_; }
    std::span<const BoundaryEdge> boundary_edges() const noexcept { return boundary_edges_; }
    std::span<const std::array<int, 2>> interior_edges() const noexcept { return edges_; }
    /// Vertices adjacent to the outer boundary.
    std::span<const int> inner_boundary() const noexcept { return inner_boundary_; }

    std::optional<int> vertex_at(Site s) const noexcept;
    std::optional<int> boundary_at(Site s) const noexcept;
    /// Vertex nearest to a physical point, if that lattice point is in D_n.
    std::optional<int> vertex_near(Point p) const noexcept;

    bool is_inner_boundary(int v) const noexcept { return bdeg_[static_cast<std::size_t>(v)] > 0; }
    /// Index into boundary_edges() of the edge (v, v + step(dir)), or -1 if interior.
    int boundary_edge_id(int v, int dir) const noexcept {
        return bedge_id_[static_cast<std::size_t>(v)][static_cast<std::size_t>(dir)];
    }

    VertexSet all() const;
    VertexSet none() const;

private:
    int grid_index(Site s) const noexcept { return (s.j + n_) * (2 * n_ + 1) + (s.i + n_); }
    bool in_grid(Site s) const noexcept { return s.i >= -n_ && s.i <= n_ && s.j >= -n_ && s.j <= n_; }

    int n_;
    std::vector<Site> sites_;
    std::vector<std::array<NeighbourCode, 4>> nbr_;
    std::vector<int> bdeg_;
    std::vector<std::array<int, 4>> bedge_id_;
    std::vector<Site> boundary_sites_;
    std::vector<BoundaryEdge> boundary_edges_;
    std::vector<std::array<int, 2>> edges_;
    std::vector<int> inner_boundary_;
    std::vector<std::int32_t> grid_;  // >=0 vertex, <0 boundary code, INT32_MIN none
};

/// Bitmap over the vertex indices of one LatticeDisk.
class VertexSet {
public:
    VertexSet() = default;
    explicit VertexSet(int size, bool value = false)
        : bits_(static_cast<std::size_t>(size), value ? 1 : 0) {}

    int size() const noexcept { return static_cast<int>(bits_.size()); }
    bool contains(int v) const noexcept { return bits_[static_cast<std::size_t>(v)] != 0; }
    void insert(int v) noexcept { bits_[static_cast<std::size_t>(v)] = 1; }
    void erase(int v) noexcept { bits_[static_cast<std::size_t>(v)] = 0; }
    void set(int v, bool value) noexcept { bits_[static_cast<std::size_t>(v)] = value ? 1 : 0; }

    int count() const noexcept;
    bool empty() const noexcept { return count() == 0; }
    std::vector<int> indices() const;

    VertexSet complement() const;
    VertexSet& operator|=(const VertexSet& o);
    VertexSet& operator&=(const VertexSet& o);
    friend VertexSet operator|(VertexSet a, const VertexSet& b) { return a |= b; }
    friend VertexSet operator&(VertexSet a, const VertexSet& b) { return a &= b; }
    bool subset_of(const VertexSet& o) const noexcept;

    friend bool operator==(const VertexSet&, const VertexSet&) = default;

    std::span<const std::uint8_t> raw() const noexcept { return bits_; }

private:
    std::vector<std::uint8_t> bits_;
};

/// Vertices within `radius` of `center` (strictly, or weakly if `closed`).
/// Radius zero returns the vertex at `center` when it is a lattice point.
VertexSet ball_vertices(const LatticeDisk& lattice, Point center, double radius, bool closed = false);

enum class SectorSide { Plus, Minus };

/// Discrete annular sector H^{(n),±}_{j,eps}: closed outer radius 1 - j*eps/2,
/// open inner radius r + j(r'-r)/2 - 1/n, argument window
/// [-(2-j)pi/8, (10-j)pi/8] for Plus and its mirror image for Minus.
VertexSet annulus_sector(const LatticeDisk& lattice, double r, double r_outer, double eps,
                         SectorSide side, int level);

/// Vertices v with |v| >= radius (the target of B_n(r) <-> dB_n(radius)).
VertexSet outside_radius(const LatticeDisk& lattice, double radius);

}  // namespace diskperc
