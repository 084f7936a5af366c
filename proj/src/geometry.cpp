#include "islr/geometry.hpp"

#include <algorithm>
#include <climits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace islr {

namespace {

long floor_div(long a, long b) {
    long q = a / b, r = a % b;
    return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

// Geometric endpoints of a bond on the dual lattice.
std::pair<std::pair<long, long>, std::pair<long, long>> bond_ends(const Bond& b) {
    switch (b.side) {
        case 0: return {{b.mx, b.my}, {b.mx, b.my + 1}};          // west
        case 1: return {{b.mx + 1, b.my}, {b.mx + 1, b.my + 1}};  // east
        case 2: return {{b.mx, b.my}, {b.mx + 1, b.my}};          // south
        default: return {{b.mx, b.my + 1}, {b.mx + 1, b.my + 1}}; // north
    }
}

const long kSide[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};

// All boundary bonds whose minus cell lies in the box (plus boundary).
std::vector<Bond> box_bonds(const SpinConfig& cfg) {
    std::vector<Bond> out;
    for (long y = cfg.y0; y < cfg.y0 + cfg.ny; ++y)
        for (long x = cfg.x0; x < cfg.x0 + cfg.nx; ++x) {
            if (cfg.box_at(x, y) != -1) continue;
            for (int s = 0; s < 4; ++s)
                if (cfg.at(x + kSide[s][0], y + kSide[s][1]) == 1)
                    out.push_back(Bond{x, y, s});
        }
    return out;
}

// Corner record: the two bonds meeting at a dual vertex.
struct CornerRec {
    Bond a, b;
};

// Local 2x2 rule at the dual vertex (vx,vy); cells NW,NE,SW,SE around it.
void corners_at_vertex(const SpinConfig& cfg, long vx, long vy, std::vector<CornerRec>& out) {
    long cx[4] = {vx - 1, vx, vx - 1, vx};
    long cy[4] = {vy, vy, vy - 1, vy - 1};  // NW NE SW SE
    int m[4];
    int cnt = 0;
    for (int i = 0; i < 4; ++i) {
        m[i] = (cfg.at(cx[i], cy[i]) == -1);
        cnt += m[i];
    }
    auto bond_between = [&](int i, int j) {  // bond separating cells i (minus) and j
        long dx = cx[j] - cx[i], dy = cy[j] - cy[i];
        int side = dx == 1 ? 1 : dx == -1 ? 0 : dy == 1 ? 3 : 2;
        return Bond{cx[i], cy[i], side};
    };
    if (cnt == 1) {
        int i = 0;
        while (!m[i]) ++i;
        // wrap the lone minus cell: both bonds carry it
        int h = (i == 0) ? 1 : (i == 1) ? 0 : (i == 2) ? 3 : 2;  // horizontal neighbour
        int v = (i == 0) ? 2 : (i == 1) ? 3 : (i == 2) ? 0 : 1;  // vertical neighbour
        out.push_back({bond_between(i, h), bond_between(i, v)});
    } else if (cnt == 3) {
        int i = 0;
        while (m[i]) ++i;  // the lone plus cell
        int h = (i == 0) ? 1 : (i == 1) ? 0 : (i == 2) ? 3 : 2;
        int v = (i == 0) ? 2 : (i == 1) ? 3 : (i == 2) ? 0 : 1;
        out.push_back({bond_between(h, i), bond_between(v, i)});
    } else if (cnt == 2 && ((m[0] && m[3]) || (m[1] && m[2]))) {
        // chopped vertex: two corners, one per minus quadrant
        for (int i = 0; i < 4; ++i) {
            if (!m[i]) continue;
            int h = (i == 0) ? 1 : (i == 1) ? 0 : (i == 2) ? 3 : 2;
            int v = (i == 0) ? 2 : (i == 1) ? 3 : (i == 2) ? 0 : 1;
            out.push_back({bond_between(i, h), bond_between(i, v)});
        }
    }
}

}  // namespace

std::pair<long, long> TilePartition::tile_of_cell(long x, long y) const {
    return {floor_div(x - ox, ell), floor_div(y - oy, ell)};
}

ContourSet extract_contours(const SpinConfig& cfg) {
    cfg.validate();
    if (cfg.bc.kind != BoundaryKind::Plus)
        throw std::domain_error("contour extraction needs plus boundary");
    auto bonds = box_bonds(cfg);
    ContourSet cs;
    cs.total_bonds = long(bonds.size());
    if (bonds.empty()) return cs;

    std::map<std::pair<long, long>, std::vector<size_t>> at_vertex;
    for (size_t i = 0; i < bonds.size(); ++i) {
        auto [e1, e2] = bond_ends(bonds[i]);
        at_vertex[e1].push_back(i);
        at_vertex[e2].push_back(i);
    }
    // partner of bond i across each of its endpoints
    auto partner = [&](size_t i, std::pair<long, long> v) -> size_t {
        auto& inc = at_vertex[v];
        if (inc.size() == 2) return inc[0] == i ? inc[1] : inc[0];
        // 4-valent vertex: continue onto the bond wrapping the same minus cell
        for (size_t j : inc)
            if (j != i && bonds[j].mx == bonds[i].mx && bonds[j].my == bonds[i].my) return j;
        throw std::logic_error("unresolvable dual vertex");
    };

    std::vector<char> used(bonds.size(), 0);
    for (size_t start = 0; start < bonds.size(); ++start) {
        if (used[start]) continue;
        std::vector<Bond> loop;
        long corners = 0;
        size_t cur = start;
        auto [sv, v] = bond_ends(bonds[start]);
        // walk the cycle leaving through vertex v each step
        while (!used[cur]) {
            used[cur] = 1;
            loop.push_back(bonds[cur]);
            size_t nxt = partner(cur, v);
            if (bonds[nxt].vertical() != bonds[cur].vertical()) ++corners;
            auto [a, b] = bond_ends(bonds[nxt]);
            v = (a == v) ? b : a;
            cur = nxt;
        }
        cs.contours.push_back(std::move(loop));
        cs.corners.push_back(corners);
        cs.total_corners += corners;
    }
    return cs;
}

TilePartition tile_partition(const SpinConfig& cfg, long ell,
                             long ox, long oy, long margin_tiles) {
    cfg.validate();
    if (cfg.bc.kind == BoundaryKind::Periodic)
        throw std::domain_error("tile partition needs an infinite background");
    if (ell < 5) throw std::domain_error("tile side must be >= 5");
    TilePartition p;
    p.ell = ell;
    p.ox = ox;
    p.oy = oy;
    p.tx0 = floor_div(cfg.x0 - ox, ell) - margin_tiles;
    p.ty0 = floor_div(cfg.y0 - oy, ell) - margin_tiles;
    long tx1 = floor_div(cfg.x0 + cfg.nx - 1 - ox, ell) + margin_tiles;
    long ty1 = floor_div(cfg.y0 + cfg.ny - 1 - oy, ell) + margin_tiles;
    p.ntx = tx1 - p.tx0 + 1;
    p.nty = ty1 - p.ty0 + 1;
    p.tiles.assign(size_t(p.ntx * p.nty), Tile{});
    for (long ty = p.ty0; ty <= ty1; ++ty)
        for (long tx = p.tx0; tx <= tx1; ++tx) {
            Tile& t = p.tiles[size_t((ty - p.ty0) * p.ntx + (tx - p.tx0))];
            t.tx = tx;
            t.ty = ty;
        }
    auto tile_ref = [&](long tx, long ty) -> Tile& {
        return p.tiles[size_t((ty - p.ty0) * p.ntx + (tx - p.tx0))];
    };
    auto in_range = [&](long tx, long ty) {
        return tx >= p.tx0 && tx <= tx1 && ty >= p.ty0 && ty <= ty1;
    };

    // corners: local rule over all dual vertices of the window (+1 margin)
    const long wx0 = ox + p.tx0 * ell, wy0 = oy + p.ty0 * ell;
    const long wx1 = ox + (tx1 + 1) * ell, wy1 = oy + (ty1 + 1) * ell;  // exclusive
    std::vector<CornerRec> recs;
    for (long vy = wy0; vy <= wy1; ++vy)
        for (long vx = wx0; vx <= wx1; ++vx)
            corners_at_vertex(cfg, vx, vy, recs);
    for (auto& r : recs)
        for (const Bond* b : {&r.a, &r.b}) {
            auto [tx, ty] = p.tile_of_cell(b->mx, b->my);
            if (!in_range(tx, ty))
                throw std::logic_error("corner bond outside tiled window");
            tile_ref(tx, ty).nc2 += 1;
            p.total_nc2 += 1;
        }

    // holes: an s x s square of constant sign fully inside the tile
    const long s = ell / 5;
    for (auto& t : p.tiles) {
        const long cx0 = ox + t.tx * ell, cy0 = oy + t.ty * ell;
        std::vector<long> pre(size_t((ell + 1) * (ell + 1)), 0);
        for (long j = 0; j < ell; ++j)
            for (long i = 0; i < ell; ++i) {
                long v = cfg.at(cx0 + i, cy0 + j) == -1 ? 1 : 0;
                pre[size_t((j + 1) * (ell + 1) + i + 1)] =
                    v + pre[size_t(j * (ell + 1) + i + 1)] +
                    pre[size_t((j + 1) * (ell + 1) + i)] - pre[size_t(j * (ell + 1) + i)];
            }
        auto rect = [&](long i, long j) {  // minus count of s x s at (i,j)
            return pre[size_t((j + s) * (ell + 1) + i + s)] - pre[size_t(j * (ell + 1) + i + s)] -
                   pre[size_t((j + s) * (ell + 1) + i)] + pre[size_t(j * (ell + 1) + i)];
        };
        for (long j = 0; j + s <= ell && !t.hole; ++j)
            for (long i = 0; i + s <= ell; ++i) {
                long c = rect(i, j);
                if (c == 0 || c == s * s) {
                    t.hole = true;
                    break;
                }
            }
        t.bad = t.hole || t.nc2 > 0;
        if (t.hole) ++p.hole_tiles;
    }

    // good regions: 4-connected components of good tiles
    std::vector<long> comp(p.tiles.size(), -1);
    for (size_t i = 0; i < p.tiles.size(); ++i) {
        if (p.tiles[i].bad || comp[i] >= 0) continue;
        long id = long(p.regions.size());
        GoodRegion g;
        std::vector<size_t> stack{i};
        comp[i] = id;
        while (!stack.empty()) {
            size_t k = stack.back();
            stack.pop_back();
            g.tiles.push_back(k);
            const Tile& t = p.tiles[k];
            for (auto& d : kSide) {
                long tx = t.tx + d[0], ty = t.ty + d[1];
                if (!in_range(tx, ty)) continue;
                size_t ki = size_t((ty - p.ty0) * p.ntx + (tx - p.tx0));
                if (!p.tiles[ki].bad && comp[ki] < 0) {
                    comp[ki] = id;
                    stack.push_back(ki);
                }
            }
        }
        g.area = long(g.tiles.size()) * ell * ell;
        p.regions.push_back(std::move(g));
    }

    // orientations, boundaries, and stripe inventories
    for (auto& g : p.regions) {
        std::set<std::pair<long, long>> gset;
        for (size_t k : g.tiles) gset.insert({p.tiles[k].tx, p.tiles[k].ty});
        for (auto& [tx, ty] : gset)
            for (auto& d : kSide)
                if (!gset.count({tx + d[0], ty + d[1]})) g.boundary += ell;
        auto in_region_cell = [&](long x, long y) {
            return gset.count(p.tile_of_cell(x, y)) != 0;
        };
        // orientation from contour bonds assigned to the region
        for (auto& [tx, ty] : gset) {
            const long cx0 = ox + tx * ell, cy0 = oy + ty * ell;
            for (long y = cy0; y < cy0 + ell; ++y)
                for (long x = cx0; x < cx0 + ell; ++x) {
                    if (cfg.at(x, y) != -1) continue;
                    for (int sd = 0; sd < 4; ++sd) {
                        if (cfg.at(x + kSide[sd][0], y + kSide[sd][1]) != 1) continue;
                        int o = sd < 2 ? 0 : 1;  // vertical bond -> vertical stripes
                        if (g.orientation == -1) g.orientation = o;
                        else if (g.orientation != o)
                            throw ConstructionViolation("mixed stripe orientations in a good region");
                    }
                }
        }
        // stripe areas: per row, each maximal in-region constant-sign run is
        // credited to the width of the full stripe it belongs to (the true
        // sign-change lines may lie just outside the region)
        if (g.orientation >= 0) {
            const bool vert = g.orientation == 0;
            long lo1 = LONG_MAX, hi1 = LONG_MIN, lo2 = LONG_MAX, hi2 = LONG_MIN;
            for (auto& [tx, ty] : gset) {
                long a = vert ? ty : tx, b = vert ? tx : ty;
                lo1 = std::min(lo1, a); hi1 = std::max(hi1, a);
                lo2 = std::min(lo2, b); hi2 = std::max(hi2, b);
            }
            auto cell = [&](long along, long across) {  // across = stripe axis coordinate
                long x = vert ? across : along, y = vert ? along : across;
                return std::pair<long, long>{x, y};
            };
            const long cap = (hi2 - lo2 + 3) * ell;  // safety bound for the width walk
            auto sign_at = [&](long along, long c) {
                auto [x, y] = cell(along, c);
                return cfg.at(x, y);
            };
            for (long tr = lo1; tr <= hi1; ++tr)
                for (long r = 0; r < ell; ++r) {
                    long along = (vert ? oy : ox) + tr * ell + r;
                    long c0 = (vert ? ox : oy) + lo2 * ell, c1 = (vert ? ox : oy) + (hi2 + 1) * ell;
                    long c = c0;
                    while (c < c1) {
                        auto [x, y] = cell(along, c);
                        if (!in_region_cell(x, y)) {
                            ++c;
                            continue;
                        }
                        int sg = sign_at(along, c);
                        long run = 0;
                        while (c < c1) {
                            auto [qx, qy] = cell(along, c);
                            if (!in_region_cell(qx, qy) || sign_at(along, c) != sg) break;
                            ++run;
                            ++c;
                        }
                        // extend to the true stripe boundaries
                        long lft = c - run, rgt = c;
                        long guard = 0;
                        while (sign_at(along, lft - 1) == sg && ++guard < cap) --lft;
                        guard = 0;
                        while (sign_at(along, rgt) == sg && ++guard < cap) ++rgt;
                        g.stripe_area[rgt - lft] += run;
                    }
                }
        }
    }
    return p;
}

Localization localize_bubbles(const SpinConfig& cfg, const TilePartition& part) {
    Localization loc;
    loc.part = part;
    const long ell = part.ell;
    const long wx0 = part.ox + part.tx0 * ell, wy0 = part.oy + part.ty0 * ell;
    const long wnx = part.ntx * ell, wny = part.nty * ell;
    auto in_window = [&](long x, long y) {
        return x >= wx0 && x < wx0 + wnx && y >= wy0 && y < wy0 + wny;
    };
    auto widx = [&](long x, long y) { return size_t((y - wy0) * wnx + (x - wx0)); };

    // droplet ids over the whole window
    std::vector<long> did(size_t(wnx) * size_t(wny), -1);
    long ndrop = 0;
    for (long y = wy0; y < wy0 + wny; ++y)
        for (long x = wx0; x < wx0 + wnx; ++x) {
            if (cfg.at(x, y) != -1 || did[widx(x, y)] >= 0) continue;
            std::vector<std::pair<long, long>> stack{{x, y}};
            did[widx(x, y)] = ndrop;
            while (!stack.empty()) {
                auto [cx, cy] = stack.back();
                stack.pop_back();
                for (auto& d : kSide) {
                    long px = cx + d[0], py = cy + d[1];
                    if (in_window(px, py) && cfg.at(px, py) == -1 && did[widx(px, py)] < 0) {
                        did[widx(px, py)] = ndrop;
                        stack.push_back({px, py});
                    }
                }
            }
            ++ndrop;
        }

    // region id per tile: bad tiles are their own region
    std::vector<long> region_of_tile(part.tiles.size(), -1);
    for (size_t r = 0; r < part.regions.size(); ++r)
        for (size_t k : part.regions[r].tiles) region_of_tile[k] = long(r);

    auto build_bubbles = [&](const std::vector<std::pair<long, long>>& qcells) {
        BubbleConfig bc = bubbles_within(cfg, qcells);
        for (auto& b : bc.bubbles)
            b.droplet_id = did[widx(b.cells.front().first, b.cells.front().second)];
        return bc;
    };

    loc.tile_bubbles.resize(part.tiles.size());
    for (size_t k = 0; k < part.tiles.size(); ++k) {
        if (!part.tiles[k].bad) continue;
        std::vector<std::pair<long, long>> cells;
        const Tile& t = part.tiles[k];
        for (long y = 0; y < ell; ++y)
            for (long x = 0; x < ell; ++x)
                cells.push_back({part.ox + t.tx * ell + x, part.oy + t.ty * ell + y});
        loc.tile_bubbles[k] = build_bubbles(cells);
    }
    loc.region_bubbles.resize(part.regions.size());
    for (size_t r = 0; r < part.regions.size(); ++r) {
        std::vector<std::pair<long, long>> cells;
        for (size_t k : part.regions[r].tiles) {
            const Tile& t = part.tiles[k];
            for (long y = 0; y < ell; ++y)
                for (long x = 0; x < ell; ++x)
                    cells.push_back({part.ox + t.tx * ell + x, part.oy + t.ty * ell + y});
        }
        loc.region_bubbles[r] = build_bubbles(cells);
    }
    return loc;
}

std::vector<std::pair<Bond, Bond>> corner_records(const SpinConfig& cfg, long vx0, long vy0,
                                                  long vx1, long vy1) {
    std::vector<CornerRec> recs;
    for (long vy = vy0; vy <= vy1; ++vy)
        for (long vx = vx0; vx <= vx1; ++vx) corners_at_vertex(cfg, vx, vy, recs);
    std::vector<std::pair<Bond, Bond>> out;
    out.reserve(recs.size());
    for (auto& r : recs) out.push_back({r.a, r.b});
    return out;
}

BubbleConfig bubbles_within(const SpinConfig& cfg,
                            const std::vector<std::pair<long, long>>& qcells) {
    BubbleConfig bc;
    std::set<std::pair<long, long>> q(qcells.begin(), qcells.end());
    std::set<std::pair<long, long>> seen;
    for (auto& c : qcells) {
        if (cfg.at(c.first, c.second) != -1 || seen.count(c)) continue;
        Bubble b;
        std::set<std::pair<long, long>> mine;
        std::vector<std::pair<long, long>> stack{c};
        seen.insert(c);
        mine.insert(c);
        while (!stack.empty()) {
            auto [cx, cy] = stack.back();
            stack.pop_back();
            b.cells.push_back({cx, cy});
            for (auto& d : kSide) {
                std::pair<long, long> n{cx + d[0], cy + d[1]};
                if (q.count(n) && cfg.at(n.first, n.second) == -1 && !seen.count(n)) {
                    seen.insert(n);
                    mine.insert(n);
                    stack.push_back(n);
                }
            }
        }
        std::sort(b.cells.begin(), b.cells.end(), [](auto& u, auto& v) {
            return u.second != v.second ? u.second < v.second : u.first < v.first;
        });
        // contour bonds and facing distances within the bubble
        for (auto& [mx, my] : b.cells)
            for (int sd = 0; sd < 4; ++sd) {
                if (cfg.at(mx + kSide[sd][0], my + kSide[sd][1]) != 1) continue;
                b.contour.push_back(Bond{mx, my, sd});
                // walk across the bubble away from the bond
                long dx = -kSide[sd][0], dy = -kSide[sd][1];
                long k = 0;
                while (mine.count({mx + (k + 1) * dx, my + (k + 1) * dy})) ++k;
                long nx2 = mx + (k + 1) * dx, ny2 = my + (k + 1) * dy;
                // facing bond exists only if the far neighbour is a plus spin
                if (cfg.at(nx2, ny2) == 1)
                    b.facing.push_back(k + 1);
                else
                    b.facing.push_back(kInfSpacing);  // droplet continues outside Q
            }
        bc.bubbles.push_back(std::move(b));
    }
    return bc;
}

// ------------------------------------------------------------ deformation

// Transposed copy of a configuration (x and y swapped everywhere).
SpinConfig transpose_config(const SpinConfig& c) {
    SpinConfig t = SpinConfig::filled(c.y0, c.x0, c.ny, c.nx, 1, c.bc);
    t.bc.vertical = !c.bc.vertical;
    for (long y = c.y0; y < c.y0 + c.ny; ++y)
        for (long x = c.x0; x < c.x0 + c.nx; ++x)
            t.set(y, x, c.box_at(x, y));
    return t;
}

namespace {

long cell_perimeter(const std::set<std::pair<long, long>>& s) {
    long per = 0;
    for (auto& [x, y] : s)
        for (auto& d : kSide)
            if (!s.count({x + d[0], y + d[1]})) ++per;
    return per;
}

}  // namespace

DeformedRegion deform_good_region(const SpinConfig& cfg, const TilePartition& part,
                                  size_t region_index) {
    const GoodRegion& g = part.regions.at(region_index);
    if (g.orientation == 1) {
        // transpose the whole problem and redo
        SpinConfig t = transpose_config(cfg);
        TilePartition tp = tile_partition(t, part.ell, part.oy, part.ox, 2);
        // find the transposed region: the one containing the first tile transposed
        const Tile& t0 = part.tiles[g.tiles.front()];
        for (size_t r = 0; r < tp.regions.size(); ++r)
            for (size_t k : tp.regions[r].tiles)
                if (tp.tiles[k].tx == t0.ty && tp.tiles[k].ty == t0.tx) {
                    DeformedRegion dr = deform_good_region(t, tp, r);
                    dr.transposed = true;
                    return dr;
                }
        throw std::logic_error("transposed region not found");
    }

    const long ell = part.ell;
    DeformedRegion out;
    out.ell = ell;
    std::set<std::pair<long, long>> gtiles, cells;
    for (size_t k : g.tiles) gtiles.insert({part.tiles[k].tx, part.tiles[k].ty});
    for (auto& [tx, ty] : gtiles)
        for (long y = 0; y < ell; ++y)
            for (long x = 0; x < ell; ++x)
                cells.insert({part.ox + tx * ell + x, part.oy + ty * ell + y});
    out.old_boundary = g.boundary;

    const long reach = 2 * ell / 5;
    // full-height contour line test at column c over a row band
    auto line_ok = [&](long c, long ry0) {
        for (long y = ry0; y < ry0 + ell; ++y)
            if (cfg.at(c - 1, y) == cfg.at(c, y)) return false;
        return true;
    };
    auto cut_bubble = [&](long c, long ry0) {  // boundary column c splits a droplet
        for (long y = ry0; y < ry0 + ell; ++y)
            if (cfg.at(c - 1, y) == -1 && cfg.at(c, y) == -1) return true;
        return false;
    };

    for (auto& [tx, ty] : gtiles) {
        const long ry0 = part.oy + ty * ell;
        if (!gtiles.count({tx - 1, ty})) {  // west boundary, interior to the east
            long c = part.ox + tx * ell;
            if (cut_bubble(c, ry0)) {
                long s = 1;
                while (s <= reach && !line_ok(c + s, ry0)) ++s;
                if (s > reach)
                    throw ConstructionViolation("no full-height contour line within 2l/5");
                for (long x = c; x < c + s; ++x)
                    for (long y = ry0; y < ry0 + ell; ++y) cells.erase({x, y});
            }
        }
        if (!gtiles.count({tx + 1, ty})) {  // east boundary, interior to the west
            long c = part.ox + (tx + 1) * ell;
            if (cut_bubble(c, ry0)) {
                long s = 1;
                while (s <= reach && !line_ok(c - s, ry0)) ++s;
                if (s > reach)
                    throw ConstructionViolation("no full-height contour line within 2l/5");
                for (long x = c - s; x < c; ++x)
                    for (long y = ry0; y < ry0 + ell; ++y) cells.erase({x, y});
            }
        }
    }
    out.new_boundary = cell_perimeter(cells);
    if (out.new_boundary > 2 * out.old_boundary)
        throw ConstructionViolation("deformation more than doubled the boundary");

    // bubbles must now be rectangles
    std::set<std::pair<long, long>> seen;
    for (auto& c : cells) {
        if (cfg.at(c.first, c.second) != -1 || seen.count(c)) continue;
        long x1 = c.first, x2 = c.first, y1 = c.second, y2 = c.second;
        long n = 0;
        std::vector<std::pair<long, long>> stack{c};
        seen.insert(c);
        while (!stack.empty()) {
            auto [cx, cy] = stack.back();
            stack.pop_back();
            ++n;
            x1 = std::min(x1, cx); x2 = std::max(x2, cx);
            y1 = std::min(y1, cy); y2 = std::max(y2, cy);
            for (auto& d : kSide) {
                std::pair<long, long> nb{cx + d[0], cy + d[1]};
                if (cells.count(nb) && cfg.at(nb.first, nb.second) == -1 && !seen.count(nb)) {
                    seen.insert(nb);
                    stack.push_back(nb);
                }
            }
        }
        if (n != (x2 - x1 + 1) * (y2 - y1 + 1))
            throw ConstructionViolation("non-rectangular bubble after deformation");
        out.bubbles.push_back(RectBubble{x1, x2 + 1, y1, y2 + 1});
    }
    std::sort(out.bubbles.begin(), out.bubbles.end(), [](auto& a, auto& b) {
        return a.x1 != b.x1 ? a.x1 < b.x1 : a.y1 < b.y1;
    });
    out.cells.assign(cells.begin(), cells.end());
    std::sort(out.cells.begin(), out.cells.end(), [](auto& a, auto& b) {
        return a.second != b.second ? a.second < b.second : a.first < b.first;
    });
    return out;
}

// --------------------------------------------------------------- slicing

SlicedRegion slice_good_region(const SpinConfig& cfg_in, const DeformedRegion& g) {
    const SpinConfig cfg = g.transposed ? transpose_config(cfg_in) : cfg_in;
    SlicedRegion out;
    out.region = g;
    const long ell = g.ell;
    std::set<std::pair<long, long>> cells(g.cells.begin(), g.cells.end());
    if (cells.empty()) return out;

    // bands keyed off the lowest row (deformation keeps bands tile-aligned)
    long ymin = LONG_MAX;
    for (auto& c : g.cells) ymin = std::min(ymin, c.second);
    long band0 = ymin;  // tile-aligned by construction
    std::map<long, std::set<long>> band_cols;
    for (auto& [x, y] : g.cells) band_cols[(y - band0) / ell].insert(x);

    for (auto& [b, cols] : band_cols) {
        long y1 = band0 + b * ell;
        long run_start = LONG_MIN, prev = LONG_MIN;
        auto flush = [&](long cend) {
            if (run_start == LONG_MIN) return;
            Slice sl;
            sl.y1 = y1;
            sl.y2 = y1 + ell;
            // column signs are uniform across the band
            std::vector<long> widths, spacings;
            long h = 0, w = 0;
            bool started = false;
            for (long x = run_start; x < cend; ++x) {
                if (cfg.at(x, y1) == -1) {
                    if (started && h == 0) spacings.push_back(w);
                    started = true;
                    w = 0;
                    ++h;
                } else {
                    if (h > 0) widths.push_back(h);
                    h = 0;
                    if (started) ++w;
                }
            }
            if (h > 0) widths.push_back(h);
            while (spacings.size() >= widths.size() && !spacings.empty()) spacings.pop_back();
            sl.seq.widths = widths;
            sl.seq.spacings = spacings;
            out.slices.push_back(std::move(sl));
        };
        for (long x : cols) {
            if (run_start == LONG_MIN) run_start = x;
            else if (x != prev + 1) {
                flush(prev + 1);
                run_start = x;
            }
            prev = x;
        }
        flush(prev + 1);
    }

    // boundary walk: trace the region outline and collect droplet-side segments
    struct DirEdge {
        long vx, vy;  // start vertex
        int dir;      // 0 +x, 1 +y, 2 -x, 3 -y
    };
    const long dvx[4] = {1, 0, -1, 0}, dvy[4] = {0, 1, 0, -1};
    // inside cell to the LEFT of travel direction
    auto left_cell = [&](const DirEdge& e) -> std::pair<long, long> {
        switch (e.dir) {
            case 0: return {e.vx, e.vy};          // moving +x, cell above
            case 1: return {e.vx - 1, e.vy};      // moving +y, cell left
            case 2: return {e.vx - 1, e.vy - 1};  // moving -x, cell below
            default: return {e.vx, e.vy - 1};     // moving -y, cell right
        }
    };
    auto right_cell = [&](const DirEdge& e) -> std::pair<long, long> {
        switch (e.dir) {
            case 0: return {e.vx, e.vy - 1};
            case 1: return {e.vx, e.vy};
            case 2: return {e.vx - 1, e.vy};
            default: return {e.vx - 1, e.vy - 1};
        }
    };
    auto is_boundary = [&](const DirEdge& e) {
        return cells.count(left_cell(e)) && !cells.count(right_cell(e));
    };
    std::set<std::tuple<long, long, int>> visited;
    std::vector<std::vector<DirEdge>> loops;
    for (auto& [cx, cy] : g.cells) {
        // south side of a cell with nothing below: travel +x with interior on left
        DirEdge start{cx, cy, 0};
        if (!is_boundary(start) || visited.count({cx, cy, 0})) continue;
        std::vector<DirEdge> loop;
        DirEdge e = start;
        do {
            visited.insert({e.vx, e.vy, e.dir});
            loop.push_back(e);
            long nvx = e.vx + dvx[e.dir], nvy = e.vy + dvy[e.dir];
            // prefer right turn, then straight, then left (keeps interior left)
            int cand[3] = {(e.dir + 3) % 4, e.dir, (e.dir + 1) % 4};
            bool moved = false;
            for (int d : cand) {
                DirEdge n{nvx, nvy, d};
                if (is_boundary(n)) {
                    e = n;
                    moved = true;
                    break;
                }
            }
            if (!moved) throw std::logic_error("boundary walk stuck");
        } while (!(e.vx == start.vx && e.vy == start.vy && e.dir == start.dir));
        loops.push_back(std::move(loop));
    }

    // red edges: horizontal boundary edges whose inside cell is a minus spin
    auto bubble_of = [&](long x, long y) -> long {
        for (size_t i = 0; i < g.bubbles.size(); ++i) {
            auto& r = g.bubbles[i];
            if (x >= r.x1 && x < r.x2 && y >= r.y1 && y < r.y2) return long(i);
        }
        return -1;
    };
    for (auto& loop : loops) {
        const size_t n = loop.size();
        auto red = [&](size_t i) -> long {  // bubble id or -1
            const DirEdge& e = loop[i];
            if (e.dir % 2 != 0) return -1;
            auto [cx, cy] = left_cell(e);
            if (cfg.at(cx, cy) != -1) return -1;
            return bubble_of(cx, cy);
        };
        // group consecutive red edges of the same bubble into segments
        std::vector<std::pair<size_t, size_t>> runs;  // [start, len]
        size_t i = 0;
        while (i < n && red(i) >= 0) ++i;  // start off-segment (if possible)
        if (i == n) i = 0;                 // fully red loop: degenerate, start anywhere
        size_t scanned = 0, first = i;
        while (scanned < n) {
            size_t j = (first + scanned) % n;
            if (red(j) >= 0) {
                size_t len = 1;
                while (len < n && red((j + len) % n) == red(j) &&
                       loop[(j + len) % n].dir == loop[j].dir)
                    ++len;
                runs.push_back({j, len});
                scanned += len;
            } else {
                ++scanned;
            }
        }
        for (auto& [st, len] : runs) {
            const DirEdge& e0 = loop[st];
            const DirEdge& e1 = loop[(st + len - 1) % n];
            BoundarySegment seg;
            seg.bubble = size_t(red(st));
            long xa = e0.vx, xb = e1.vx + dvx[e1.dir];
            seg.x1 = std::min(xa, xb);
            seg.x2 = std::max(xa, xb);
            seg.y = e0.vy;
            auto [icx, icy] = left_cell(e0);
            seg.top = icy < e0.vy;  // inside cell below the edge -> top side
            // net horizontal displacement along the boundary walk from a
            // segment end to the nearest red edge in that walk direction
            auto walk = [&](size_t from, int step, long refx) {
                size_t k = from;
                for (size_t cnt = 0; cnt + 1 < n; ++cnt) {
                    k = size_t((long(k) + step + long(n)) % long(n));
                    if (red(k) >= 0) {
                        const DirEdge& e = loop[k];
                        // first vertex of the red edge met by the walk
                        long ex = (step > 0) ? e.vx : e.vx + dvx[e.dir];
                        long d = std::abs(ex - refx);
                        return d == 0 ? kInfSpacing : d;
                    }
                }
                return kInfSpacing;
            };
            long ref_fwd = e1.vx + dvx[e1.dir];  // vertex where the loop leaves
            long ref_bwd = e0.vx;                // vertex where the loop enters
            long fwd = walk((st + len - 1) % n, +1, ref_fwd);
            long bwd = walk(st, -1, ref_bwd);
            bool fwd_is_right = ref_fwd > ref_bwd;
            if (fwd_is_right) {
                seg.w2 = fwd;
                seg.w1 = bwd;
            } else {
                seg.w1 = fwd;
                seg.w2 = bwd;
            }
            out.segments.push_back(seg);
        }
    }
    std::sort(out.segments.begin(), out.segments.end(), [](auto& a, auto& b) {
        if (a.y != b.y) return a.y < b.y;
        return a.x1 < b.x1;
    });
    return out;
}

std::vector<std::pair<std::pair<long, long>, std::pair<long, long>>>
path_pair_set(const Droplet& d) {
    std::set<std::pair<long, long>> in(d.cells.begin(), d.cells.end());
    auto crossings = [&](std::pair<long, long> a, std::pair<long, long> b, bool hfirst) {
        long cnt = 0;
        long x = a.first, y = a.second;
        bool cur = true;  // a is in the droplet
        auto step = [&](long nx, long ny) {
            bool nxt = in.count({nx, ny}) != 0;
            if (nxt != cur) ++cnt;
            cur = nxt;
            x = nx;
            y = ny;
        };
        if (hfirst) {
            while (x != b.first) step(x + (b.first > x ? 1 : -1), y);
            while (y != b.second) step(x, y + (b.second > y ? 1 : -1));
        } else {
            while (y != b.second) step(x, y + (b.second > y ? 1 : -1));
            while (x != b.first) step(x + (b.first > x ? 1 : -1), y);
        }
        return cnt;
    };
    std::vector<std::pair<std::pair<long, long>, std::pair<long, long>>> out;
    for (size_t i = 0; i < d.cells.size(); ++i)
        for (size_t j = i + 1; j < d.cells.size(); ++j)
            if (crossings(d.cells[i], d.cells[j], true) >= 2 &&
                crossings(d.cells[i], d.cells[j], false) >= 2)
                out.push_back({d.cells[i], d.cells[j]});
    return out;
}

// ---------------------------------------------------------------- output

std::string decomposition_json(const TilePartition& p) {
    std::ostringstream os;
    os << "{\"ell\":" << p.ell << ",\"nc2\":" << p.total_nc2
       << ",\"hole_tiles\":" << p.hole_tiles << ",\"tiles\":[";
    bool first = true;
    for (auto& t : p.tiles) {
        if (!t.bad && t.nc2 == 0 && !t.hole) continue;  // report interesting tiles only
        if (!first) os << ',';
        first = false;
        os << "{\"tx\":" << t.tx << ",\"ty\":" << t.ty << ",\"nc2\":" << t.nc2
           << ",\"hole\":" << (t.hole ? "true" : "false")
           << ",\"bad\":" << (t.bad ? "true" : "false") << '}';
    }
    os << "],\"good_regions\":[";
    for (size_t r = 0; r < p.regions.size(); ++r) {
        if (r) os << ',';
        auto& g = p.regions[r];
        os << "{\"orientation\":\"" << (g.orientation == 0 ? "v" : g.orientation == 1 ? "h" : "-")
           << "\",\"area\":" << g.area << ",\"boundary\":" << g.boundary << ",\"A\":{";
        bool f2 = true;
        for (auto& [h, a] : g.stripe_area) {
            if (!f2) os << ',';
            f2 = false;
            os << '"' << h << "\":" << a;
        }
        os << "}}";
    }
    os << "]}";
    return os.str();
}

std::string decomposition_svg(const SpinConfig& cfg, const TilePartition& p) {
    const long ell = p.ell;
    const long x0 = p.ox + p.tx0 * ell, y0 = p.oy + p.ty0 * ell;
    const long w = p.ntx * ell, h = p.nty * ell;
    const int u = 8;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w * u << "\" height=\""
       << h * u << "\" viewBox=\"0 0 " << w * u << ' ' << h * u << "\">\n";
    for (long y = y0; y < y0 + h; ++y)
        for (long x = x0; x < x0 + w; ++x)
            if (cfg.at(x, y) == -1)
                os << "<rect x=\"" << (x - x0) * u << "\" y=\"" << (y0 + h - 1 - y) * u
                   << "\" width=\"" << u << "\" height=\"" << u << "\" fill=\"#b0b0b0\"/>\n";
    for (auto& t : p.tiles)
        os << "<rect x=\"" << (p.ox + t.tx * ell - x0) * u << "\" y=\""
           << (y0 + h - (p.oy + (t.ty + 1) * ell)) * u << "\" width=\"" << ell * u
           << "\" height=\"" << ell * u << "\" fill=\"none\" stroke=\""
           << (t.bad ? "#d03030" : "#3060c0") << "\" stroke-width=\"1\"/>\n";
    os << "</svg>\n";
    return os.str();
}

}  // namespace islr
