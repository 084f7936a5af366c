#include "islr/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "islr/stripes.hpp"

namespace islr {

static long floor_mod(long a, long m) {
    long r = a % m;
    return r < 0 ? r + m : r;
}

int Boundary::background_at(long x, long y) const {
    switch (kind) {
        case BoundaryKind::Plus:
            return 1;
        case BoundaryKind::OptimalStriped: {
            long c = vertical ? x : y;
            return floor_mod(c - phase, 2 * h) < h ? 1 : -1;
        }
        case BoundaryKind::Periodic:
            throw std::domain_error("periodic boundary has no infinite background");
    }
    return 1;
}

void SpinConfig::validate() const {
    if (nx < 1 || ny < 1) throw std::domain_error("empty box");
    if (spins.size() != size_t(nx) * size_t(ny)) throw std::domain_error("spin array size mismatch");
    for (int8_t v : spins)
        if (v != 1 && v != -1) throw std::domain_error("spins must be +-1");
    if (bc.kind == BoundaryKind::OptimalStriped && bc.h < 1)
        throw std::domain_error("stripe width must be >= 1");
}

SpinConfig SpinConfig::filled(long x0, long y0, long nx, long ny, int v, Boundary bc) {
    SpinConfig c;
    c.x0 = x0; c.y0 = y0; c.nx = nx; c.ny = ny;
    c.bc = bc;
    c.spins.assign(size_t(nx) * size_t(ny), int8_t(v));
    return c;
}

SpinConfig SpinConfig::background_patch(long x0, long y0, long nx, long ny, Boundary bc) {
    SpinConfig c = filled(x0, y0, nx, ny, 1, bc);
    for (long y = y0; y < y0 + ny; ++y)
        for (long x = x0; x < x0 + nx; ++x)
            c.set(x, y, bc.background_at(x, y));
    return c;
}

// ---------------------------------------------------------------- file I/O

SpinConfig SpinConfig::parse(std::istream& in) {
    SpinConfig c;
    std::string line;
    bool have_box = false;
    long row = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok == "box") {
            ls >> c.x0 >> c.y0 >> c.nx >> c.ny;
            if (!ls) throw std::runtime_error("bad box header");
            c.spins.assign(size_t(c.nx) * size_t(c.ny), 1);
            have_box = true;
        } else if (tok == "boundary") {
            std::string kind;
            ls >> kind;
            if (kind == "plus") c.bc.kind = BoundaryKind::Plus;
            else if (kind == "periodic") c.bc.kind = BoundaryKind::Periodic;
            else if (kind == "striped") {
                c.bc.kind = BoundaryKind::OptimalStriped;
                std::string kv;
                while (ls >> kv) {
                    auto eq = kv.find('=');
                    if (eq == std::string::npos) throw std::runtime_error("bad boundary attr: " + kv);
                    std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
                    if (k == "h") c.bc.h = std::stol(v);
                    else if (k == "phase") c.bc.phase = std::stol(v);
                    else if (k == "orient") c.bc.vertical = (v == "v");
                    else throw std::runtime_error("bad boundary attr: " + k);
                }
            } else throw std::runtime_error("unknown boundary kind: " + kind);
        } else {
            if (!have_box) throw std::runtime_error("grid row before box header");
            if (row >= c.ny) throw std::runtime_error("too many grid rows");
            if (long(line.size()) < c.nx) throw std::runtime_error("grid row too short");
            for (long i = 0; i < c.nx; ++i) {
                char ch = line[size_t(i)];
                if (ch != '+' && ch != '-') throw std::runtime_error("grid cells must be + or -");
                c.spins[size_t(row * c.nx + i)] = (ch == '+') ? 1 : -1;
            }
            ++row;
        }
    }
    if (!have_box) throw std::runtime_error("missing box header");
    if (row != c.ny) throw std::runtime_error("wrong number of grid rows");
    c.validate();
    return c;
}

SpinConfig SpinConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
        std::stringstream ss;
        ss << in.rdbuf();
        return from_json(ss.str());
    }
    return parse(in);
}

void SpinConfig::write(std::ostream& out) const {
    out << "box " << x0 << ' ' << y0 << ' ' << nx << ' ' << ny << '\n';
    switch (bc.kind) {
        case BoundaryKind::Plus: out << "boundary plus\n"; break;
        case BoundaryKind::Periodic: out << "boundary periodic\n"; break;
        case BoundaryKind::OptimalStriped:
            out << "boundary striped h=" << bc.h << " orient=" << (bc.vertical ? 'v' : 'h')
                << " phase=" << bc.phase << '\n';
            break;
    }
    for (long r = 0; r < ny; ++r) {
        for (long i = 0; i < nx; ++i) out << (spins[size_t(r * nx + i)] > 0 ? '+' : '-');
        out << '\n';
    }
}

std::string SpinConfig::to_json() const {
    nlohmann::json j;
    j["box"] = {x0, y0, nx, ny};
    switch (bc.kind) {
        case BoundaryKind::Plus: j["boundary"] = {{"kind", "plus"}}; break;
        case BoundaryKind::Periodic: j["boundary"] = {{"kind", "periodic"}}; break;
        case BoundaryKind::OptimalStriped:
            j["boundary"] = {{"kind", "striped"}, {"h", bc.h},
                             {"orient", bc.vertical ? "v" : "h"}, {"phase", bc.phase}};
            break;
    }
    std::vector<std::string> rows;
    for (long r = 0; r < ny; ++r) {
        std::string s(size_t(nx), '+');
        for (long i = 0; i < nx; ++i)
            if (spins[size_t(r * nx + i)] < 0) s[size_t(i)] = '-';
        rows.push_back(s);
    }
    j["rows"] = rows;
    return j.dump(2);
}

SpinConfig SpinConfig::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    SpinConfig c;
    auto box = j.at("box");
    c.x0 = box.at(0); c.y0 = box.at(1); c.nx = box.at(2); c.ny = box.at(3);
    auto b = j.at("boundary");
    std::string kind = b.at("kind");
    if (kind == "plus") c.bc.kind = BoundaryKind::Plus;
    else if (kind == "periodic") c.bc.kind = BoundaryKind::Periodic;
    else if (kind == "striped") {
        c.bc.kind = BoundaryKind::OptimalStriped;
        c.bc.h = b.at("h");
        c.bc.phase = b.value("phase", 0);
        c.bc.vertical = b.value("orient", std::string("v")) == "v";
    } else throw std::runtime_error("unknown boundary kind: " + kind);
    c.spins.assign(size_t(c.nx) * size_t(c.ny), 1);
    auto rows = j.at("rows");
    if (long(rows.size()) != c.ny) throw std::runtime_error("wrong number of rows");
    for (long r = 0; r < c.ny; ++r) {
        std::string s = rows.at(size_t(r));
        if (long(s.size()) != c.nx) throw std::runtime_error("row length mismatch");
        for (long i = 0; i < c.nx; ++i)
            c.spins[size_t(r * c.nx + i)] = (s[size_t(i)] == '+') ? 1 : -1;
    }
    c.validate();
    return c;
}

// ------------------------------------------------------------- energetics

// Sites of the box where the configuration differs from the background.
static std::vector<std::pair<long, long>> flipped_sites(const SpinConfig& cfg) {
    std::vector<std::pair<long, long>> f;
    for (long y = cfg.y0; y < cfg.y0 + cfg.ny; ++y)
        for (long x = cfg.x0; x < cfg.x0 + cfg.nx; ++x)
            if (cfg.box_at(x, y) != cfg.bc.background_at(x, y)) f.emplace_back(x, y);
    return f;
}

// Truncation radius keeping the ball scan around all flipped sites near a
// fixed work budget.
static long auto_radius(size_t nflip, int d) {
    if (nflip == 0) return 100;
    double budget = 5e8;
    double r = (d == 2) ? std::sqrt(budget / (3.2 * double(nflip)))
                        : std::cbrt(budget / (4.2 * double(nflip)));
    long R = lround(r);
    return std::clamp(R, 100L, 2000L);
}

SumResult relative_energy(const SpinConfig& cfg, const ModelParams& mp, long R) {
    cfg.validate();
    if (cfg.bc.kind == BoundaryKind::Periodic)
        throw std::domain_error("relative_energy needs an infinite background");
    const Kernel& K = mp.kernel();
    auto F = flipped_sites(cfg);
    if (F.empty()) return SumResult{0.0, 0.0, 0};
    if (R == 0) R = auto_radius(F.size(), mp.d);

    // fast flipped-site lookup for the pair-overcount correction
    std::vector<int8_t> isf(size_t(cfg.nx) * size_t(cfg.ny), 0);
    for (auto& [x, y] : F) isf[size_t((y - cfg.y0) * cfg.nx + (x - cfg.x0))] = 1;
    auto in_f = [&](long x, long y) {
        return cfg.inside(x, y) && isf[size_t((y - cfg.y0) * cfg.nx + (x - cfg.x0))];
    };

    Kahan lr;
    double nn = 0.0;
    const long R2 = R * R;

    if (mp.d == 2) {
        // Factorize the far field: sigma = b + delta with delta supported on
        // the flipped sites, so
        //   sum_{x<y} (sigma_x sigma_y - b_x b_y) K
        //     = sum_f delta_f B(f) + (1/2) sum_{f != g} delta_f delta_g K(f-g)
        // with B(f) = sum_{y != f} b_y K(f-y).  For a uniform background B is
        // the full-plane lattice sum; for a striped one it is a periodic
        // column sum built from the transverse kernel.
        const bool striped = (cfg.bc.kind == BoundaryKind::OptimalStriped);
        const long U = 4000;
        SumResult zs, suffix;
        if (striped)
            suffix = K.g_suffix(U + 1);
        else
            zs = K.lattice_sum();
        auto bval = [&](long u) {
            return double(cfg.bc.vertical ? cfg.bc.background_at(u, 0)
                                          : cfg.bc.background_at(0, u));
        };
        std::map<long, SumResult> bcol;  // per residue mod the stripe period
        auto column_sum = [&](long u) {
            long per = 2 * cfg.bc.h;
            long key = ((u % per) + per) % per;
            auto it = bcol.find(key);
            if (it != bcol.end()) return it->second;
            Kahan s;
            double tl = 0.0;
            SumResult t0 = K.transverse0();
            s.add(bval(u) * t0.value);
            tl += t0.tail;
            for (long m = 1; m <= U; ++m) {
                SumResult t = K.transverse(m);
                s.add((bval(u + m) + bval(u - m)) * t.value);
                tl += 2.0 * t.tail;
            }
            tl += 2.0 * (suffix.value + suffix.tail);
            SumResult r{s.sum(), tl, U};
            bcol.emplace(key, r);
            return r;
        };

        double tail = 0.0;
        for (auto& [fx, fy] : F) {
            double bf = double(cfg.bc.background_at(fx, fy));
            double df = double(cfg.box_at(fx, fy)) - bf;
            SumResult B = striped ? column_sum(cfg.bc.vertical ? fx : fy) : zs;
            lr.add(df * B.value);
            tail += std::abs(df) * B.tail;

            const long nbr[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
            double sx = double(cfg.box_at(fx, fy));
            for (auto& nb : nbr) {
                long x = fx + nb[0], y = fy + nb[1];
                double diff = sx * double(cfg.at(x, y)) -
                              bf * double(cfg.bc.background_at(x, y));
                if (diff == 0.0) continue;
                double w = in_f(x, y) ? 0.5 : 1.0;  // bond seen from both ends
                nn += -mp.J * w * diff;
            }
        }
        for (size_t i = 0; i < F.size(); ++i) {
            double di = double(cfg.box_at(F[i].first, F[i].second)) -
                        double(cfg.bc.background_at(F[i].first, F[i].second));
            for (size_t j = i + 1; j < F.size(); ++j) {
                double dj = double(cfg.box_at(F[j].first, F[j].second)) -
                            double(cfg.bc.background_at(F[j].first, F[j].second));
                double ddx = double(F[i].first - F[j].first);
                double ddy = double(F[i].second - F[j].second);
                lr.add(di * dj * K.pair(ddx * ddx + ddy * ddy));
            }
        }
        return SumResult{nn + lr.sum(), tail, striped ? U : zs.radius};
    }

    for (auto& [fx, fy] : F) {
        const double sx = double(cfg.box_at(fx, fy));
        const double bx = double(cfg.bc.background_at(fx, fy));
        {
            for (long dz = -R; dz <= R; ++dz)
                for (long dy = -R; dy <= R; ++dy) {
                    long rem = R2 - dz * dz - dy * dy;
                    if (rem < 0) continue;
                    long xr = long(std::sqrt(double(rem)));
                    while ((xr + 1) * (xr + 1) <= rem) ++xr;
                    while (xr * xr > rem) --xr;
                    for (long dx = -xr; dx <= xr; ++dx) {
                        if (dx == 0 && dy == 0 && dz == 0) continue;
                        // 3D boxes live in the plane z=0; off-plane sites are background
                        long x = fx + dx, y = fy + dy;
                        double sy = (dz == 0) ? double(cfg.at(x, y)) : 1.0;
                        double by = (dz == 0) ? double(cfg.bc.background_at(x, y)) : 1.0;
                        if (cfg.bc.kind == BoundaryKind::OptimalStriped && dz != 0) {
                            sy = by = double(cfg.bc.background_at(x, y));
                        }
                        double diff = sx * sy - bx * by;
                        if (diff == 0.0) continue;
                        double w = (dz == 0 && in_f(x, y)) ? 0.5 : 1.0;
                        lr.add(w * diff * K.pair(double(dx * dx + dy * dy + dz * dz)));
                    }
                }
        }
        // nearest-neighbour exchange term
        const long nbr[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (auto& nb : nbr) {
            long x = fx + nb[0], y = fy + nb[1];
            double diff = sx * double(cfg.at(x, y)) - bx * double(cfg.bc.background_at(x, y));
            if (diff == 0.0) continue;
            double w = in_f(x, y) ? 0.5 : 1.0;
            nn += -mp.J * w * diff;
        }
        if (mp.d == 3) {  // out-of-plane neighbours carry the background value
            double nbv = (cfg.bc.kind == BoundaryKind::Plus)
                             ? 1.0
                             : double(cfg.bc.background_at(fx, fy));
            nn += -mp.J * 2.0 * (sx - bx) * nbv;
        }
    }
    double tail = 2.0 * double(F.size()) * Kernel::ball_tail(double(R), mp.p, mp.d);
    return SumResult{nn + lr.sum(), tail, R};
}

SumResult stability_gap(const SpinConfig& cfg, const ModelParams& mp, long R) {
    return relative_energy(cfg, mp, R);
}

// ---- periodic boxes

SumResult periodic_energy(const SpinConfig& cfg, const ModelParams& mp) {
    cfg.validate();
    if (cfg.bc.kind != BoundaryKind::Periodic)
        throw std::domain_error("periodic_energy needs a periodic box");
    if (mp.d != 2) throw std::domain_error("periodic_energy: d=2 only");
    const Kernel& K = mp.kernel();

    if (cfg.ny == 1 || cfg.nx == 1) {
        // quasi-1D ring: reduce to the column model with the periodized chain kernel
        long L = std::max(cfg.nx, cfg.ny);
        std::vector<int> s(size_t(L), 0);
        for (long i = 0; i < L; ++i)
            s[size_t(i)] = (cfg.ny == 1) ? cfg.box_at(cfg.x0 + i, cfg.y0) : cfg.box_at(cfg.x0, cfg.y0 + i);
        return ring_energy(s, mp);
    }

    const long Lx = cfg.nx, Ly = cfg.ny;
    const long Lmin = std::min(Lx, Ly);
    const long N = std::max(2L, (1200 + Lmin - 1) / Lmin);  // image layers
    // doubly periodized pair kernel on offsets [0,Lx) x [0,Ly)
    std::vector<double> V(size_t(Lx) * size_t(Ly), 0.0);
    for (long dy = 0; dy < Ly; ++dy)
        for (long dx = 0; dx < Lx; ++dx) {
            double v = 0.0;
            for (long n2 = -N; n2 <= N; ++n2)
                for (long n1 = -N; n1 <= N; ++n1) {
                    double ax = double(dx + n1 * Lx), ay = double(dy + n2 * Ly);
                    double r2 = ax * ax + ay * ay;
                    if (r2 == 0.0) continue;
                    v += K.pair(r2);
                }
            V[size_t(dy * Lx + dx)] = v;
        }
    double vtail = Kernel::ball_tail(double((N - 1) * Lmin), mp.p, 2);

    const long Ns = Lx * Ly;
    Kahan lr;
    double nn = 0.0;
    const int8_t* s = cfg.spins.data();
    for (long i = 0; i < Ns; ++i) {
        long xi = i % Lx, yi = i / Lx;
        for (long j = i + 1; j < Ns; ++j) {
            long dx = (j % Lx) - xi, dy = j / Lx - yi;
            if (dx < 0) dx += Lx;
            if (dy < 0) dy += Ly;
            lr.add(double(s[i] * s[j] - 1) * V[size_t(dy * Lx + dx)]);
        }
        // wrapped nearest-neighbour bonds (+x and +y from each site)
        long xr = (xi + 1) % Lx, yu = (yi + 1) % Ly;
        nn += -mp.J * double(s[i] * s[size_t(yi * Lx + xr)] - 1);
        nn += -mp.J * double(s[i] * s[size_t(yu * Lx + xi)] - 1);
    }
    double tail = 2.0 * vtail * double(Ns) * double(Ns - 1) / 2.0;
    return SumResult{nn + lr.sum(), tail, N * Lmin};
}

// ---- droplets

std::vector<Droplet> droplet_decompose(const SpinConfig& cfg) {
    cfg.validate();
    if (cfg.bc.kind != BoundaryKind::Plus)
        throw std::domain_error("droplet decomposition needs plus boundary");
    std::vector<int8_t> seen(size_t(cfg.nx) * size_t(cfg.ny), 0);
    auto idx = [&](long x, long y) { return size_t((y - cfg.y0) * cfg.nx + (x - cfg.x0)); };
    std::vector<Droplet> out;
    for (long y = cfg.y0; y < cfg.y0 + cfg.ny; ++y)
        for (long x = cfg.x0; x < cfg.x0 + cfg.nx; ++x) {
            if (cfg.box_at(x, y) != -1 || seen[idx(x, y)]) continue;
            Droplet d;
            std::vector<std::pair<long, long>> stack{{x, y}};
            seen[idx(x, y)] = 1;
            while (!stack.empty()) {
                auto [cx, cy] = stack.back();
                stack.pop_back();
                d.cells.emplace_back(cx, cy);
                const long nbr[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
                for (auto& nb : nbr) {
                    long px = cx + nb[0], py = cy + nb[1];
                    if (cfg.at(px, py) != -1)
                        ++d.perimeter;
                    else if (cfg.inside(px, py) && !seen[idx(px, py)]) {
                        seen[idx(px, py)] = 1;
                        stack.emplace_back(px, py);
                    }
                }
            }
            std::sort(d.cells.begin(), d.cells.end(), [](auto& a, auto& b) {
                return a.second != b.second ? a.second < b.second : a.first < b.first;
            });
            out.push_back(std::move(d));
        }
    return out;
}

SumResult droplet_self_energy(const Droplet& d, const ModelParams& mp) {
    const Kernel& K = mp.kernel();
    SumResult zp = K.lattice_sum();
    Kahan inner;
    for (size_t i = 0; i < d.cells.size(); ++i)
        for (size_t j = i + 1; j < d.cells.size(); ++j) {
            double dx = double(d.cells[i].first - d.cells[j].first);
            double dy = double(d.cells[i].second - d.cells[j].second);
            inner.add(K.pair(dx * dx + dy * dy));
        }
    double n = double(d.cells.size());
    return SumResult{-2.0 * n * zp.value + 4.0 * inner.sum(), 2.0 * n * zp.tail, zp.radius};
}

SumResult droplet_interaction(const Droplet& a, const Droplet& b, const ModelParams& mp) {
    const Kernel& K = mp.kernel();
    for (auto& c : a.cells)
        if (std::binary_search(b.cells.begin(), b.cells.end(), c, [](auto& u, auto& v) {
                return u.second != v.second ? u.second < v.second : u.first < v.first;
            }))
            throw std::domain_error("droplets overlap");
    Kahan w;
    for (auto& ca : a.cells)
        for (auto& cb : b.cells) {
            double dx = double(ca.first - cb.first), dy = double(ca.second - cb.second);
            w.add(K.pair(dx * dx + dy * dy));
        }
    return SumResult{4.0 * w.sum(), 0.0, 0};
}

Certificate droplet_identity_check(const SpinConfig& cfg, const ModelParams& mp) {
    SumResult lhs = relative_energy(cfg, mp);  // H^+ (plus background)
    auto drops = droplet_decompose(cfg);
    SumResult rhs{0.0, 0.0, 0};
    for (auto& d : drops) {
        rhs.value += 2.0 * mp.J * double(d.perimeter);
        rhs += droplet_self_energy(d, mp);
    }
    for (size_t i = 0; i < drops.size(); ++i)
        for (size_t j = i + 1; j < drops.size(); ++j)
            rhs += droplet_interaction(drops[i], drops[j], mp);
    return make_certificate(lhs, rhs, "droplet identity");
}

// ---- boundary-condition reduction

ReductionReport boundary_reduction_check(const SpinConfig& pert, const ModelParams& mp,
                                         const std::vector<long>& Ls,
                                         const std::vector<long>& Ms) {
    if (pert.bc.kind != BoundaryKind::OptimalStriped)
        throw std::domain_error("perturbation must carry the striped background");
    const long h = pert.bc.h;
    SumResult lhs = relative_energy(pert, mp);

    ReductionReport rep;
    long Lref = 0;
    auto embed = [&](long L) {
        if (L % (2 * h) != 0) throw std::domain_error("box side not divisible by stripe period");
        if (pert.x0 < 0 || pert.y0 < 0 || pert.x0 + pert.nx > L || pert.y0 + pert.ny > L)
            throw std::domain_error("perturbation outside the box");
        SpinConfig box = SpinConfig::filled(0, 0, L, L, 1, Boundary{BoundaryKind::Periodic});
        for (long y = 0; y < L; ++y)
            for (long x = 0; x < L; ++x)
                box.set(x, y, pert.at(x, y));
        return box;
    };
    double per_diff_ref = 0.0;
    for (long L : Ls) {
        SpinConfig box = embed(L);
        SpinConfig ref = SpinConfig::filled(0, 0, L, L, 1, Boundary{BoundaryKind::Periodic});
        for (long y = 0; y < L; ++y)
            for (long x = 0; x < L; ++x)
                ref.set(x, y, pert.bc.background_at(x, y));
        double per_diff = periodic_energy(box, mp).value - periodic_energy(ref, mp).value;
        rep.window_gap.push_back(std::abs(lhs.value - per_diff));
        per_diff_ref = per_diff;
        Lref = L;
    }
    rep.shrinking = true;
    for (size_t i = 1; i < rep.window_gap.size(); ++i)
        if (rep.window_gap[i] > rep.window_gap[i - 1] + 1e-9) rep.shrinking = false;

    if (!Ms.empty() && !Ls.empty()) {
        SpinConfig cell = embed(Ls.back());
        double per_ref = periodic_energy(cell, mp).value;
        std::vector<double> err;
        for (long M : Ms) {
            long big = Lref * M;
            SpinConfig jux = SpinConfig::filled(0, 0, big, big, 1, Boundary{BoundaryKind::Plus});
            for (long y = 0; y < big; ++y)
                for (long x = 0; x < big; ++x)
                    jux.set(x, y, cell.box_at(x % Lref, y % Lref));
            double hp = relative_energy(jux, mp).value;
            rep.per_copy.push_back(hp / double(M * M));
            err.push_back(std::abs(hp / double(M * M) - per_ref));
        }
        rep.converging = true;
        for (size_t i = 1; i < err.size(); ++i)
            if (err[i] > err[i - 1] + 1e-9) rep.converging = false;
    }
    return rep;
}

}  // namespace islr
