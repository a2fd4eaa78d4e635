#pragma once

// The Voronoi complex: cells of the tessellation, their orbits under the
// group, stabilizers, orientation characters, and boundary matrices.

#include <map>
#include <vector>

#include "bianchi/voronoi.hpp"
#include "bianchi/zhomology.hpp"

namespace bianchi {

/// A cone face of dimension dim + 1 (dim in {1, 2, 3}).
struct Cell {
    int dim = 0;
    RaySet rays;
    int node = -1;  // perfect form it was cut from
    int local = -1; // facet or edge index in that form (-1 for the top cell)
};

/// Oriented span of a cell: basis rays (by index, greedy over the sorted ray
/// list) and the first coordinate subset on which they have a nonzero minor.
struct Orientation {
    std::vector<int> basis;
    std::vector<int> coords;
    int sign = 0; // sign of the basis minor on `coords`
};

inline Orientation orient(const RaySet& rays)
{
    Orientation o;
    std::vector<ConePoint> chosen;
    for (std::size_t i = 0; i < rays.size(); ++i) {
        chosen.push_back(rays.points[i]);
        if (linalg::rank(chosen) == static_cast<int>(chosen.size())) o.basis.push_back(static_cast<int>(i));
        else chosen.pop_back();
    }
    const int k = static_cast<int>(chosen.size());
    for (int mask = 0; mask < 16; ++mask) {
        if (__builtin_popcount(mask) != k) continue;
        std::vector<int> c;
        for (int t = 0; t < 4; ++t)
            if (mask & (1 << t)) c.push_back(t);
        if (o.coords.empty() || c < o.coords) {
            mpz_class m = linalg::minor(chosen, c);
            if (m != 0) {
                o.coords = c;
                o.sign = sgn(m);
            }
        }
    }
    if (o.coords.empty()) throw internal_guard("orient: no nonzero minor");
    return o;
}

struct CellOrbit {
    Cell representative;
    std::vector<GroupElement> stabilizer;
    bool orientation_preserving = true;
    Orientation orientation;
    int orbit_id = -1;
};

struct CellComplex {
    Int D = 0;
    Flavor flavor = Flavor::GL2;
    std::vector<Cell> cells;
    /// Per cell: its orbit and g with g.representative = cell.
    std::vector<int> orbit_of;
    std::vector<GroupElement> witness;
    /// orbits[n - 1] lists the orbits of dimension n.
    std::array<std::vector<CellOrbit>, 3> orbits;
    /// Cell indices per node: top cell, facet cells, edge cells.
    std::vector<int> top_cell;
    std::vector<std::vector<int>> facet_cell;
    std::vector<std::vector<int>> edge_cell;

    const CellOrbit& orbit(int cell) const { return orbits[cells[cell].dim - 1][orbit_of[cell]]; }

    /// Cell indices of the codimension-1 faces of a cell (empty for 1-cells).
    std::vector<int> faces(int cell) const
    {
        const Cell& c = cells[cell];
        if (c.dim == 3) return facet_cell[c.node];
        std::vector<int> out;
        if (c.dim == 2)
            for (int e : graph_facet_edges[c.node][c.local]) out.push_back(edge_cell[c.node][e]);
        return out;
    }

    std::vector<std::vector<std::vector<int>>> graph_facet_edges;
};

/// All faces of dimension 1..3 of every perfect cone in the graph.
inline CellComplex faces_of(const OrderContext& ctx, const VoronoiGraph& g)
{
    CellComplex cx;
    cx.D = g.D;
    cx.flavor = g.flavor;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const PerfectForm& p = g.nodes[i].perfect;
        const int node = static_cast<int>(i);
        cx.top_cell.push_back(static_cast<int>(cx.cells.size()));
        cx.cells.push_back(Cell{3, p.rays, node, -1});
        std::vector<int> fc, ec;
        for (std::size_t f = 0; f < p.facets.size(); ++f) {
            fc.push_back(static_cast<int>(cx.cells.size()));
            cx.cells.push_back(Cell{2, sub_rayset(ctx, p.rays, p.facets[f].rays), node, static_cast<int>(f)});
        }
        for (std::size_t e = 0; e < p.edges.size(); ++e) {
            ec.push_back(static_cast<int>(cx.cells.size()));
            cx.cells.push_back(Cell{1, sub_rayset(ctx, p.rays, p.edge_rays[e]), node, static_cast<int>(e)});
        }
        cx.facet_cell.push_back(std::move(fc));
        cx.edge_cell.push_back(std::move(ec));
        cx.graph_facet_edges.push_back(p.facet_edges);
    }
    return cx;
}

/// Sign of det on the orientation coordinates of the images q(g v_b) of the
/// basis rays.
inline int transported_sign(const OrderContext& ctx, const RaySet& rep, const Orientation& o, const GroupElement& g)
{
    std::vector<ConePoint> cols;
    for (int b : o.basis) cols.push_back(rank_one(ctx, ctx.act(g, rep.vectors[b][0])));
    return sgn(linalg::minor(cols, o.coords));
}

/// Groups the cells into orbits, computing stabilizers and orientation flags.
inline void classify_orbits(const OrderContext& ctx, CellComplex& cx)
{
    cx.orbit_of.assign(cx.cells.size(), -1);
    cx.witness.assign(cx.cells.size(), ctx.identity());
    std::array<std::map<std::vector<Int>, std::vector<int>>, 3> buckets;
    for (std::size_t i = 0; i < cx.cells.size(); ++i) {
        const Cell& c = cx.cells[i];
        auto& orbits = cx.orbits[c.dim - 1];
        auto& bucket = buckets[c.dim - 1][c.rays.key()];
        bool found = false;
        for (int o : bucket) {
            if (auto g = find_map(ctx, cx.flavor, orbits[o].representative.rays, c.rays)) {
                cx.orbit_of[i] = o;
                cx.witness[i] = *g;
                found = true;
                break;
            }
        }
        if (found) continue;
        CellOrbit orb;
        orb.representative = c;
        orb.orbit_id = static_cast<int>(orbits.size());
        orb.stabilizer = find_maps(ctx, cx.flavor, c.rays, c.rays, true);
        if (orb.stabilizer.empty()) throw internal_guard("stabilizer lacks the identity");
        orb.orientation = orient(c.rays);
        for (const auto& s : orb.stabilizer)
            if (transported_sign(ctx, c.rays, orb.orientation, s) != orb.orientation.sign)
                orb.orientation_preserving = false;
        bucket.push_back(orb.orbit_id);
        cx.orbit_of[i] = orb.orbit_id;
        orbits.push_back(std::move(orb));
    }
}

/// Incidence sign of the face `face` (a cell index) in the orbit
/// representative `sigma`, comparing the transported orientation of the
/// face with the one induced from sigma (outward normal first).
inline int incidence(const OrderContext& ctx, const CellComplex& cx, const CellOrbit& sigma, int face)
{
    const RaySet& s = sigma.representative.rays;
    const RaySet& t = cx.cells[face].rays;
    int inward = -1;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (t.index_of(s.points[i]) < 0) {
            inward = static_cast<int>(i);
            break;
        }
    if (inward < 0) throw internal_guard("incidence: face has all rays of the cell");
    const CellOrbit& tau = cx.orbit(face);
    const GroupElement& g = cx.witness[face];
    std::vector<ConePoint> cols{s.points[inward]};
    for (int b : tau.orientation.basis) {
        ConePoint p = rank_one(ctx, ctx.act(g, tau.representative.rays.vectors[b][0]));
        if (t.index_of(p) < 0) throw internal_guard("incidence: witness does not map onto the face");
        cols.push_back(p);
    }
    int d = sgn(linalg::minor(cols, sigma.orientation.coords));
    if (d == 0) throw internal_guard("incidence: degenerate face orientation");
    return -d * sigma.orientation.sign;
}

/// d_n : V_n -> V_{n-1} for n in {2, 3}, on orientation-preserving orbits.
/// Returns the matrix with rows/columns indexed by position among the
/// orientation-preserving orbits of each dimension.
inline SparseIntMatrix boundary(const OrderContext& ctx, const CellComplex& cx, int n)
{
    if (n < 2 || n > 3) throw std::invalid_argument("boundary: n must be 2 or 3");
    auto index = [&](int dim) {
        std::vector<int> idx;
        int k = 0;
        for (const auto& o : cx.orbits[dim - 1]) idx.push_back(o.orientation_preserving ? k++ : -1);
        return std::pair{idx, k};
    };
    auto [rows, nr] = index(n - 1);
    auto [cols, nc] = index(n);
    std::map<std::pair<int, int>, long> entries;
    // orbit representatives are the first cells of their orbit (identity witness)
    std::vector<int> rep_cell(cx.orbits[n - 1].size(), -1);
    for (std::size_t i = 0; i < cx.cells.size(); ++i)
        if (cx.cells[i].dim == n && rep_cell[cx.orbit_of[i]] < 0) rep_cell[cx.orbit_of[i]] = static_cast<int>(i);
    for (std::size_t o = 0; o < cx.orbits[n - 1].size(); ++o) {
        if (cols[o] < 0) continue;
        const CellOrbit& sigma = cx.orbits[n - 1][o];
        for (int face : cx.faces(rep_cell[o])) {
            int r = rows[cx.orbit_of[face]];
            if (r < 0) continue;
            entries[{r, cols[o]}] += incidence(ctx, cx, sigma, face);
        }
    }
    SparseIntMatrix m(nr, nc);
    for (const auto& [rc, v] : entries)
        if (v != 0) m.set(rc.first, rc.second, mpz_class(v));
    return m;
}

/// Number of orientation-preserving orbits of dimension n.
inline int chain_rank(const CellComplex& cx, int n)
{
    int k = 0;
    for (const auto& o : cx.orbits[n - 1]) k += o.orientation_preserving ? 1 : 0;
    return k;
}

} // namespace bianchi
