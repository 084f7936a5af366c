#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "islr/geometry.hpp"

#include <random>
#include <set>

using namespace islr;

namespace {

SpinConfig plus_box(long x0, long y0, long nx, long ny) {
    return SpinConfig::filled(x0, y0, nx, ny, 1, Boundary{BoundaryKind::Plus, 0, true, 0});
}

SpinConfig random_box(std::mt19937& rng, long n, double pminus) {
    SpinConfig c = plus_box(0, 0, n, n);
    std::bernoulli_distribution flip(pminus);
    for (long y = 0; y < n; ++y)
        for (long x = 0; x < n; ++x)
            if (flip(rng)) c.set(x, y, -1);
    return c;
}

long direct_bond_count(const SpinConfig& c) {
    long cnt = 0;
    const long dx[4] = {-1, 1, 0, 0}, dy[4] = {0, 0, -1, 1};
    for (long y = c.y0; y < c.y0 + c.ny; ++y)
        for (long x = c.x0; x < c.x0 + c.nx; ++x) {
            if (c.box_at(x, y) != -1) continue;
            for (int s = 0; s < 4; ++s)
                if (c.at(x + dx[s], y + dy[s]) == 1) ++cnt;
        }
    return cnt;
}

}  // namespace

TEST_CASE("contours of elementary droplets") {
    SpinConfig c = plus_box(0, 0, 8, 8);
    c.set(3, 3, -1);
    ContourSet cs = extract_contours(c);
    CHECK(cs.contours.size() == 1);
    CHECK(cs.total_bonds == 4);
    CHECK(cs.total_corners == 4);

    SpinConfig r = plus_box(0, 0, 9, 9);
    for (long y = 2; y < 4; ++y)
        for (long x = 2; x < 5; ++x) r.set(x, y, -1);
    cs = extract_contours(r);
    CHECK(cs.contours.size() == 1);
    CHECK(cs.total_bonds == 2 * (3 + 2));
    CHECK(cs.total_corners == 4);
}

TEST_CASE("chopped diagonal pair splits into two contours") {
    SpinConfig c = plus_box(0, 0, 8, 8);
    c.set(3, 3, -1);
    c.set(4, 4, -1);
    ContourSet cs = extract_contours(c);
    CHECK(cs.contours.size() == 2);
    CHECK(cs.total_bonds == 8);
    CHECK(cs.total_corners == 8);
    CHECK(cs.corners[0] == 4);
    CHECK(cs.corners[1] == 4);
}

TEST_CASE("chopping preserves bonds and closes contours") {
    std::mt19937 rng(420);
    for (int t = 0; t < 50; ++t) {
        SpinConfig c = random_box(rng, 12, 0.35);
        ContourSet cs = extract_contours(c);
        CHECK(cs.total_bonds == direct_bond_count(c));
        long in_contours = 0;
        std::set<Bond> seen;
        for (auto& loop : cs.contours) {
            CHECK(loop.size() >= 4);
            in_contours += long(loop.size());
            for (auto& b : loop) CHECK(seen.insert(b).second);
        }
        CHECK(in_contours == cs.total_bonds);
    }
}

TEST_CASE("tile corner counts add up to the contour corner total") {
    std::mt19937 rng(77);
    for (int t = 0; t < 100; ++t) {
        SpinConfig c = random_box(rng, 12, 0.3);
        ContourSet cs = extract_contours(c);
        long ell = 5 + long(rng() % 5);
        long ox = long(rng() % 7) - 3, oy = long(rng() % 7) - 3;
        TilePartition p = tile_partition(c, ell, ox, oy);
        CHECK(p.total_nc2 == 2 * cs.total_corners);
        long per_tile = 0;
        for (auto& tl : p.tiles) per_tile += tl.nc2;
        CHECK(per_tile == p.total_nc2);
    }
}

TEST_CASE("all-plus window: every tile has a hole, no good regions") {
    SpinConfig c = plus_box(0, 0, 10, 10);
    TilePartition p = tile_partition(c, 5);
    CHECK(p.hole_tiles == long(p.tiles.size()));
    for (auto& t : p.tiles) {
        CHECK(t.hole);
        CHECK(t.bad);
        CHECK(t.nc2 == 0);
    }
    CHECK(p.regions.empty());
}

TEST_CASE("perfect stripes: one good region carrying its full area at width h") {
    const long h = 2, ell = 10 * h;
    Boundary bc{BoundaryKind::OptimalStriped, h, true, 0};
    SpinConfig c = SpinConfig::background_patch(0, 0, 40, 40, bc);
    TilePartition p = tile_partition(c, ell);
    for (auto& t : p.tiles) CHECK(!t.bad);
    REQUIRE(p.regions.size() == 1);
    const GoodRegion& g = p.regions[0];
    CHECK(g.orientation == 0);
    CHECK(g.area == long(p.tiles.size()) * ell * ell);
    REQUIRE(g.stripe_area.count(h));
    CHECK(g.stripe_area.at(h) == g.area);
    CHECK(g.stripe_area.size() == 1);

    Boundary hb{BoundaryKind::OptimalStriped, h, false, 0};
    SpinConfig ch = SpinConfig::background_patch(0, 0, 40, 40, hb);
    TilePartition ph = tile_partition(ch, ell);
    REQUIRE(ph.regions.size() == 1);
    CHECK(ph.regions[0].orientation == 1);
    CHECK(ph.regions[0].stripe_area.at(h) == ph.regions[0].area);
}

TEST_CASE("bubble localization: whole droplet, straddling droplet, facing rule") {
    // a 2x4 bar across the boundary between two tiles of side 5
    SpinConfig c = plus_box(0, 0, 20, 20);
    for (long y = 7; y < 9; ++y)
        for (long x = 3; x < 7; ++x) c.set(x, y, -1);
    TilePartition p = tile_partition(c, 5);
    Localization loc = localize_bubbles(c, p);

    std::vector<const Bubble*> found;
    for (auto& bc2 : loc.tile_bubbles)
        for (auto& b : bc2.bubbles) found.push_back(&b);
    for (auto& bc2 : loc.region_bubbles)
        for (auto& b : bc2.bubbles) found.push_back(&b);
    REQUIRE(found.size() == 2);  // one droplet, split by the tile line at x=5
    CHECK(found[0]->droplet_id == found[1]->droplet_id);
    CHECK(found[0]->cells.size() + found[1]->cells.size() == 8);

    // facing distances: symmetric where finite, infinite toward the cut
    long inf_seen = 0;
    for (const Bubble* b : found) {
        std::set<std::pair<long, long>> mine(b->cells.begin(), b->cells.end());
        for (size_t i = 0; i < b->contour.size(); ++i) {
            long d = b->facing[i];
            if (d == kInfSpacing) {
                ++inf_seen;
                continue;
            }
            const Bond& bd = b->contour[i];
            Bond mirror = bd;
            if (bd.side == 0) { mirror.mx += d - 1; mirror.side = 1; }
            else if (bd.side == 1) { mirror.mx -= d - 1; mirror.side = 0; }
            else if (bd.side == 2) { mirror.my += d - 1; mirror.side = 3; }
            else { mirror.my -= d - 1; mirror.side = 2; }
            bool ok = false;
            for (size_t j = 0; j < b->contour.size(); ++j)
                if (b->contour[j] == mirror && b->facing[j] == d) ok = true;
            CHECK(ok);
        }
    }
    CHECK(inf_seen == 4);  // the two 1-cell-high rows on each side of the cut

    // droplet fully inside one tile -> a single bubble equal to the droplet
    SpinConfig c2 = plus_box(0, 0, 20, 20);
    c2.set(2, 2, -1);
    c2.set(3, 2, -1);
    TilePartition p2 = tile_partition(c2, 5);
    Localization loc2 = localize_bubbles(c2, p2);
    long nb = 0;
    for (auto& bc2 : loc2.tile_bubbles) nb += long(bc2.bubbles.size());
    for (auto& bc2 : loc2.region_bubbles) nb += long(bc2.bubbles.size());
    CHECK(nb == 1);
}

TEST_CASE("deformation: fixed point on the perfect configuration") {
    const long h = 2, ell = 20;
    Boundary bc{BoundaryKind::OptimalStriped, h, true, 0};
    SpinConfig c = SpinConfig::background_patch(0, 0, 40, 40, bc);
    TilePartition p = tile_partition(c, ell);
    REQUIRE(p.regions.size() == 1);
    DeformedRegion g = deform_good_region(c, p, 0);
    CHECK(g.new_boundary == g.old_boundary);
    CHECK(long(g.cells.size()) == p.regions[0].area);
    CHECK(long(g.bubbles.size()) * h * long(p.nty) * ell == long(p.regions[0].area) / 2);
}

TEST_CASE("deformation removes a strip when the boundary cuts a stripe") {
    const long h = 2, ell = 15;
    Boundary bc{BoundaryKind::OptimalStriped, h, true, 0};
    SpinConfig c = SpinConfig::background_patch(0, 0, 60, 45, bc);
    c.set(20, 20, -1);  // corner-carrying droplet inside tile (1,1)
    TilePartition p = tile_partition(c, ell);
    long nbad = 0;
    for (auto& t : p.tiles)
        if (t.bad) ++nbad;
    REQUIRE(nbad == 1);
    REQUIRE(p.regions.size() == 1);
    DeformedRegion g = deform_good_region(c, p, 0);
    CHECK(g.new_boundary <= 2 * g.old_boundary);
    // the region's east boundary at x=15 cuts the stripe at columns 14-15:
    // one 1 x ell strip is pushed out
    CHECK(long(g.cells.size()) == p.regions[0].area - ell);
    for (auto& rb : g.bubbles) CHECK(rb.x2 - rb.x1 == h);
}

TEST_CASE("slicing the perfect region: bookkeeping and end spacings") {
    const long h = 2, ell = 20;
    Boundary bc{BoundaryKind::OptimalStriped, h, true, 0};
    SpinConfig c = SpinConfig::background_patch(0, 0, 40, 40, bc);
    TilePartition p = tile_partition(c, ell);
    DeformedRegion g = deform_good_region(c, p, 0);
    SlicedRegion s = slice_good_region(c, g);

    CHECK(long(s.slices.size()) == p.nty);
    long area = 0;
    for (auto& sl : s.slices) {
        long sum = 0;
        for (long w : sl.seq.widths) {
            CHECK(w == h);
            sum += w;
        }
        for (long w : sl.seq.spacings) {
            CHECK(w == h);
            sum += w;
        }
        // margins are the plus cells outside the outermost stripes
        long extent = sum;
        long band_cells = 0;
        for (auto& cl : g.cells)
            if (cl.second >= sl.y1 && cl.second < sl.y2) ++band_cells;
        long margins = band_cells / ell - extent;
        CHECK(margins >= 0);
        area += (extent + margins) * ell;
    }
    CHECK(area == long(g.cells.size()));

    // two segments per stripe, length h each, with exactly four infinite
    // spacings at the outer ends of the walk
    CHECK(s.segments.size() == 2 * g.bubbles.size());
    long ninf = 0;
    for (auto& seg : s.segments) {
        CHECK(seg.x2 - seg.x1 == h);
        if (seg.w1 == kInfSpacing) ++ninf;
        if (seg.w2 == kInfSpacing) ++ninf;
        if (seg.w1 != kInfSpacing) CHECK(seg.w1 == h);
        if (seg.w2 != kInfSpacing) CHECK(seg.w2 == h);
    }
    CHECK(ninf == 4);
}

TEST_CASE("slicing a notched region reproduces the end-spacing pattern") {
    // three bands of height 5 with a bite taken out of the middle band,
    // five rectangular bubbles, two of them meeting the interior hole
    SpinConfig c = plus_box(0, 0, 20, 15);
    auto fill = [&](long x1, long x2, long y1, long y2) {
        for (long y = y1; y < y2; ++y)
            for (long x = x1; x < x2; ++x) c.set(x, y, -1);
    };
    fill(2, 4, 0, 15);
    fill(6, 8, 0, 15);
    fill(11, 13, 0, 5);
    fill(12, 14, 10, 15);
    fill(16, 18, 0, 15);

    DeformedRegion g;
    g.ell = 5;
    for (long y = 0; y < 15; ++y)
        for (long x = 0; x < 20; ++x) {
            if (y >= 5 && y < 10 && x >= 10 && x < 15) continue;
            g.cells.push_back({x, y});
        }
    g.bubbles = {RectBubble{2, 4, 0, 15}, RectBubble{6, 8, 0, 15},
                 RectBubble{11, 13, 0, 5}, RectBubble{12, 14, 10, 15},
                 RectBubble{16, 18, 0, 15}};
    SlicedRegion s = slice_good_region(c, g);

    REQUIRE(s.slices.size() == 4);
    std::vector<std::vector<long>> widths;
    for (auto& sl : s.slices) widths.push_back(sl.seq.widths);
    std::sort(widths.begin(), widths.end());
    CHECK(widths[0] == std::vector<long>{2});
    CHECK(widths[1] == std::vector<long>{2, 2});
    CHECK(widths[2] == std::vector<long>{2, 2, 2, 2});
    CHECK(widths[3] == std::vector<long>{2, 2, 2, 2});

    REQUIRE(s.segments.size() == 10);
    std::map<size_t, int> per_bubble;
    long ninf = 0;
    for (auto& seg : s.segments) {
        ++per_bubble[seg.bubble];
        if (seg.w1 == kInfSpacing) ++ninf;
        if (seg.w2 == kInfSpacing) ++ninf;
    }
    for (auto& [b, n] : per_bubble) CHECK(n == 2);  // pairs by droplet
    CHECK(ninf == 4);
    for (auto& seg : s.segments) {
        bool leftmost = seg.bubble == 0, rightmost = seg.bubble == 4;
        CHECK((seg.w1 == kInfSpacing) == leftmost);
        CHECK((seg.w2 == kInfSpacing) == rightmost);
    }
}

TEST_CASE("screened pair set: convex empty, horseshoe tips present, brute oracle") {
    auto droplet_of = [](std::vector<std::pair<long, long>> cells) {
        Droplet d;
        d.cells = std::move(cells);
        return d;
    };
    // rectangle: both axis paths stay inside
    std::vector<std::pair<long, long>> rect;
    for (long y = 0; y < 3; ++y)
        for (long x = 0; x < 4; ++x) rect.push_back({x, y});
    CHECK(path_pair_set(droplet_of(rect)).empty());

    // horseshoe: both paths between the arm tips leave and re-enter
    std::vector<std::pair<long, long>> u;
    for (long y = 0; y < 3; ++y) {
        u.push_back({0, y});
        u.push_back({2, y});
    }
    u.push_back({1, 0});
    auto pp = path_pair_set(droplet_of(u));
    bool tips = false;
    for (auto& [a, b] : pp)
        if ((a == std::pair<long, long>{0, 2} && b == std::pair<long, long>{2, 2}) ||
            (b == std::pair<long, long>{0, 2} && a == std::pair<long, long>{2, 2}))
            tips = true;
    CHECK(tips);

    // independent tracer: enumerate contour bonds, count crossed dual edges
    std::mt19937 rng(99);
    for (int t = 0; t < 30; ++t) {
        // random connected polyomino with <= 12 cells
        std::set<std::pair<long, long>> cells{{0, 0}};
        while (cells.size() < 12) {
            auto it = cells.begin();
            std::advance(it, long(rng() % cells.size()));
            long dx[4] = {-1, 1, 0, 0}, dy[4] = {0, 0, -1, 1};
            int k = int(rng() % 4);
            cells.insert({it->first + dx[k], it->second + dy[k]});
        }
        Droplet d;
        d.cells.assign(cells.begin(), cells.end());
        auto got = path_pair_set(d);

        std::set<std::tuple<long, long, long, long>> gamma;  // dual edge between cells
        auto edge_key = [](std::pair<long, long> a, std::pair<long, long> b) {
            if (b < a) std::swap(a, b);
            return std::make_tuple(a.first, a.second, b.first, b.second);
        };
        long dx4[4] = {-1, 1, 0, 0}, dy4[4] = {0, 0, -1, 1};
        for (auto& cl : cells)
            for (int k = 0; k < 4; ++k) {
                std::pair<long, long> nb{cl.first + dx4[k], cl.second + dy4[k]};
                if (!cells.count(nb)) gamma.insert(edge_key(cl, nb));
            }
        auto crossings = [&](std::pair<long, long> a, std::pair<long, long> b, bool hfirst) {
            long cnt = 0;
            long x = a.first, y = a.second;
            auto step = [&](long nx2, long ny2) {
                if (gamma.count(edge_key({x, y}, {nx2, ny2}))) ++cnt;
                x = nx2;
                y = ny2;
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
        std::vector<std::pair<std::pair<long, long>, std::pair<long, long>>> want;
        for (size_t i = 0; i < d.cells.size(); ++i)
            for (size_t j = i + 1; j < d.cells.size(); ++j)
                if (crossings(d.cells[i], d.cells[j], true) >= 2 &&
                    crossings(d.cells[i], d.cells[j], false) >= 2)
                    want.push_back({d.cells[i], d.cells[j]});
        CHECK(got == want);
    }
}

TEST_CASE("decomposition reports are well formed") {
    SpinConfig c = plus_box(0, 0, 12, 12);
    c.set(4, 4, -1);
    c.set(5, 4, -1);
    TilePartition p = tile_partition(c, 6);
    std::string js = decomposition_json(p);
    CHECK(js.find("\"nc2\":8") != std::string::npos);
    std::string svg = decomposition_svg(c, p);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
}
