#pragma once

#include <map>
#include <utility>
#include <vector>

#include "islr/config.hpp"
#include "islr/core.hpp"
#include "islr/stripes.hpp"

namespace islr {

// Dual bond separating a minus cell from a plus cell.  Uniquely keyed by
// the minus-side cell and the side the bond sits on.
struct Bond {
    long mx = 0, my = 0;  // the minus cell
    int side = 0;         // 0 = west, 1 = east, 2 = south, 3 = north
    bool vertical() const { return side < 2; }
    bool operator<(const Bond& o) const {
        if (my != o.my) return my < o.my;
        if (mx != o.mx) return mx < o.mx;
        return side < o.side;
    }
    bool operator==(const Bond& o) const {
        return mx == o.mx && my == o.my && side == o.side;
    }
};

struct ContourSet {
    std::vector<std::vector<Bond>> contours;  // closed cyclic traversals
    std::vector<long> corners;                // N_c per contour
    long total_bonds = 0;
    long total_corners = 0;  // N_c of the whole minus set
};

// Closed contours of the minus set under plus boundary, with the 4-valent
// dual vertices resolved so the two minus quadrants disconnect.
ContourSet extract_contours(const SpinConfig& cfg);

struct Tile {
    long tx = 0, ty = 0;  // tile indices (cell range [ox+tx*l, ox+(tx+1)*l))
    long nc2 = 0;         // doubled corner count
    bool hole = false;
    bool bad = false;
};

struct GoodRegion {
    std::vector<size_t> tiles;        // indices into TilePartition::tiles
    int orientation = -1;             // 0 = vertical stripes, 1 = horizontal, -1 = none
    long area = 0;
    std::map<long, long> stripe_area; // A_h per stripe width
    long boundary = 0;                // |dG| in lattice units
};

struct TilePartition {
    long ell = 0, ox = 0, oy = 0;
    long tx0 = 0, ty0 = 0, ntx = 0, nty = 0;  // covered tile range
    std::vector<Tile> tiles;                  // row-major over the range
    std::vector<GoodRegion> regions;
    long total_nc2 = 0;
    long hole_tiles = 0;

    const Tile& tile_at(long tx, long ty) const {
        return tiles[size_t((ty - ty0) * ntx + (tx - tx0))];
    }
    std::pair<long, long> tile_of_cell(long x, long y) const;
};

// Pave the window around the configuration box with ell-tiles, count
// corners per tile, flag holes and bad tiles, and collect good regions
// with their stripe inventories.
TilePartition tile_partition(const SpinConfig& cfg, long ell,
                             long ox = 0, long oy = 0, long margin_tiles = 2);

struct Bubble {
    std::vector<std::pair<long, long>> cells;  // component of droplet ∩ Q
    std::vector<Bond> contour;                 // bonds with minus cell in the bubble
    std::vector<long> facing;                  // d_b per contour bond, kInfSpacing = faces dQ
    long droplet_id = -1;                      // component id in the full minus set
};

struct BubbleConfig {
    std::vector<Bubble> bubbles;
};

// Region id: bad tiles get their tile index, good regions ntiles+region index.
struct Localization {
    TilePartition part;
    std::vector<BubbleConfig> tile_bubbles;    // per tile (empty for good tiles)
    std::vector<BubbleConfig> region_bubbles;  // per good region
};

Localization localize_bubbles(const SpinConfig& cfg, const TilePartition& part);

struct RectBubble {
    long x1 = 0, x2 = 0, y1 = 0, y2 = 0;  // half-open cell ranges
    long width() const { return x2 - x1; }
};

struct DeformedRegion {
    bool transposed = false;  // horizontal regions are handled transposed
    long ell = 0;
    std::vector<std::pair<long, long>> cells;  // sorted row-major
    std::vector<RectBubble> bubbles;
    long old_boundary = 0;
    long new_boundary = 0;
};

struct Slice {
    long y1 = 0, y2 = 0;       // row band
    StripeSequence seq;        // widths/spacings of bubbles crossing the slice
};

struct BoundarySegment {
    long x1 = 0, x2 = 0, y = 0;  // horizontal dual segment [x1,x2) at height y
    bool top = false;            // top side of its bubble
    size_t bubble = 0;
    long w1 = kInfSpacing, w2 = kInfSpacing;
};

struct SlicedRegion {
    DeformedRegion region;
    std::vector<Slice> slices;
    std::vector<BoundarySegment> segments;
};

// Move every vertical boundary segment of the good region inward onto the
// nearest full-height contour line (within 2*ell/5), making all bubbles
// rectangular.
DeformedRegion deform_good_region(const SpinConfig& cfg, const TilePartition& part,
                                  size_t region_index);

// Slice the deformed region into ell-height bands with stripe sequences and
// walk the boundary to assign per-segment spacings.
SlicedRegion slice_good_region(const SpinConfig& cfg, const DeformedRegion& g);

// Unordered pairs {x,y} in the droplet whose two axis-aligned lattice paths
// both cross the droplet contour at least twice.
std::vector<std::pair<std::pair<long, long>, std::pair<long, long>>>
path_pair_set(const Droplet& d);

// Transposed copy of a configuration (x and y swapped everywhere).
SpinConfig transpose_config(const SpinConfig& c);

// Corner records (the two contour bonds wrapping each corner) over an
// inclusive range of dual vertices.
std::vector<std::pair<Bond, Bond>> corner_records(const SpinConfig& cfg, long vx0, long vy0,
                                                  long vx1, long vy1);

// Bubbles of the minus set restricted to an arbitrary cell set, with contour
// portions and facing distances relative to that set (droplet ids unset).
BubbleConfig bubbles_within(const SpinConfig& cfg,
                            const std::vector<std::pair<long, long>>& cells);

// JSON report of a partition (tiles, corner counts, regions).
std::string decomposition_json(const TilePartition& part);
// SVG picture of the minus set, contour bonds, and tile grid.
std::string decomposition_svg(const SpinConfig& cfg, const TilePartition& part);

}  // namespace islr
