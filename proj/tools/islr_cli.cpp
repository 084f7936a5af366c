// Command-line surface for the striped-ground-state toolkit: energy curves,
// geometric decompositions, certificate suites, brute-force search, scans.

#include "CLI11.hpp"
#include "json.hpp"

#include "islr/bounds.hpp"
#include "islr/oracle.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

using json = nlohmann::json;
using namespace islr;

namespace {

constexpr const char* kVersion = "islr 1.0.0";

int thread_count() {
    if (const char* env = std::getenv("ISLR_THREADS")) {
        long n = std::strtol(env, nullptr, 10);
        if (n >= 1 && n <= 256) return int(n);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? int(hw) : 1;
}

json sum_json(const SumResult& s) {
    return json{{"value", s.value}, {"tail", s.tail}, {"radius", s.radius}};
}

json cert_json(const Certificate& c) {
    return json{{"lhs", sum_json(c.lhs)},     {"rhs", sum_json(c.rhs)},
                {"slack", c.slack},           {"verdict", to_string(c.verdict)},
                {"context", c.context}};
}

void write_manifest(const std::string& path, const std::string& command, const json& params,
                    const std::vector<std::string>& outputs) {
    if (path.empty()) return;
    json m{{"tool", kVersion},
           {"command", command},
           {"params", params},
           {"outputs", outputs}};
    std::ofstream f(path);
    f << m.dump(2) << "\n";
}

ModelParams params_for(double p, int d, double J, double tol) {
    ModelParams mp = make_params(p, d, 0.0, tol);
    mp.J = J;
    return mp;
}

// deterministic order-preserving parallel map over [0, n)
template <typename F>
std::vector<json> parallel_cases(long n, F&& run) {
    int nt = std::min<long>(thread_count(), std::max(1L, n));
    std::vector<json> results;
    results.resize(size_t(n));
    std::vector<std::thread> pool;
    std::atomic<long> cursor{0};
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&] {
            for (long i = cursor.fetch_add(1); i < n; i = cursor.fetch_add(1))
                results[size_t(i)] = run(i);
        });
    for (auto& th : pool) th.join();
    return results;
}

SpinConfig random_plus_box(std::mt19937& rng, long n, double pminus) {
    SpinConfig c = SpinConfig::filled(0, 0, n, n, 1, Boundary{BoundaryKind::Plus, 0, true, 0});
    std::bernoulli_distribution flip(pminus);
    for (long y = 0; y < n; ++y)
        for (long x = 0; x < n; ++x)
            if (flip(rng)) c.set(x, y, -1);
    return c;
}

SpinConfig perturbed_striped(std::mt19937& rng, long h, long box, long nflip,
                             long lo, long hi) {
    Boundary bc{BoundaryKind::OptimalStriped, h, true, 0};
    SpinConfig c = SpinConfig::background_patch(0, 0, box, box, bc);
    std::uniform_int_distribution<long> pos(lo, hi - 1);
    for (long i = 0; i < nflip; ++i) {
        long x = pos(rng), y = pos(rng);
        c.set(x, y, c.box_at(x, y) == 1 ? -1 : 1);
    }
    return c;
}

Droplet random_polyomino(std::mt19937& rng, size_t maxc) {
    std::set<std::pair<long, long>> cells{{0, 0}};
    size_t target = 1 + rng() % maxc;
    while (cells.size() < target) {
        auto it = cells.begin();
        std::advance(it, long(rng() % cells.size()));
        long dx[4] = {-1, 1, 0, 0}, dy[4] = {0, 0, -1, 1};
        int k = int(rng() % 4);
        cells.insert({it->first + dx[k], it->second + dy[k]});
    }
    SpinConfig c = SpinConfig::filled(-16, -16, 32, 32, 1, Boundary{BoundaryKind::Plus});
    for (auto& cl : cells) c.set(cl.first, cl.second, -1);
    return droplet_decompose(c).at(0);
}

StripeSequence random_sequence(std::mt19937& rng, long L) {
    StripeSequence seq;
    std::uniform_int_distribution<long> blk(1, 6);
    long used = 0;
    while (true) {
        long h = blk(rng);
        if (used + h + 1 > L) break;
        if (!seq.widths.empty()) {
            long w = blk(rng);
            if (used + w + h + 1 > L) break;
            seq.spacings.push_back(w);
            used += w;
        }
        seq.widths.push_back(h);
        used += h;
        if (rng() % 3 == 0) break;
    }
    if (seq.widths.empty()) seq.widths.push_back(1);
    return seq;
}

// one JSON line per certificate; returns the number of violations
int run_suite(const std::string& suite, const ModelParams& mp, long count,
              std::uint64_t seed, long ell_opt, double c0, double c1, double C0,
              double C1, std::ostream& os) {
    auto finish = [&](std::vector<json> lines) {
        int bad = 0;
        for (auto& l : lines) {
            if (l.value("verdict", "") == std::string("violated")) ++bad;
            os << l.dump() << "\n";
        }
        return bad;
    };
    auto from_cert = [&](long i, const Certificate& c) {
        json j = cert_json(c);
        j["case"] = i;
        return j;
    };

    if (suite == "identity") {
        return finish(parallel_cases(count, [&](long i) {
            std::mt19937 rng(unsigned(seed + std::uint64_t(i)));
            SpinConfig c = random_plus_box(rng, 10, 0.35);
            return from_cert(i, droplet_identity_check(c, mp));
        }));
    }
    if (suite == "selfenergy") {
        return finish(parallel_cases(count, [&](long i) {
            std::mt19937 rng(unsigned(seed + std::uint64_t(i)));
            return from_cert(i, self_energy_lower_bound_check(random_polyomino(rng, 12), mp));
        }));
    }
    if (suite == "chessboard") {
        return finish(parallel_cases(count, [&](long i) {
            std::mt19937 rng(unsigned(seed + std::uint64_t(i)));
            long L = 16 + long(rng() % 49);  // up to 64
            StripeSequence seq = random_sequence(rng, L);
            return from_cert(i, chessboard_check(seq, L, mp));
        }));
    }
    if (suite == "localization") {
        auto [h, tie] = optimal_width(mp);
        (void)tie;
        long ell = ell_opt > 0 ? ell_opt : 8 * h;
        return finish(parallel_cases(count, [&](long i) {
            std::mt19937 rng(unsigned(seed + std::uint64_t(i)));
            SpinConfig c = random_plus_box(rng, 3 * ell, 0.3);
            TilePartition part = tile_partition(c, ell);
            return from_cert(i, localization_check(c, part, mp));
        }));
    }
    if (suite == "goodregion" || suite == "slicedregion") {
        auto [h, tie] = optimal_width(mp);
        (void)tie;
        long ell = ell_opt > 0 ? ell_opt : 5 * (h + 1);
        return finish(parallel_cases(count, [&](long i) {
            std::mt19937 rng(unsigned(seed + std::uint64_t(i)));
            SpinConfig c = perturbed_striped(rng, h, 2 * ell, 1 + long(rng() % 3),
                                            ell / 4, 2 * ell - ell / 4);
            TilePartition part = tile_partition(c, ell);
            json j;
            j["case"] = i;
            j["verdict"] = "holds";
            for (size_t r = 0; r < part.regions.size(); ++r) {
                Certificate cert;
                if (suite == "goodregion") {
                    cert = good_region_bound_check(c, part, r, mp, c1).cert;
                } else {
                    DeformedRegion g = deform_good_region(c, part, r);
                    SlicedRegion sl = slice_good_region(c, g);
                    cert = sliced_region_bound_check(c, sl, mp);
                }
                j["certs"].push_back(cert_json(cert));
                if (cert.verdict == Verdict::Violated) j["verdict"] = "violated";
            }
            return j;
        }));
    }
    if (suite == "badtile") {
        auto [h, tie] = optimal_width(mp);
        (void)tie;
        long ell = ell_opt > 0 ? ell_opt : 5 * (h + 1);
        return finish(parallel_cases(count, [&](long i) {
            std::mt19937 rng(unsigned(seed + std::uint64_t(i)));
            // keep the defect well inside one tile
            SpinConfig c = perturbed_striped(rng, h, 2 * ell, 1 + long(rng() % 3),
                                            ell + ell / 4, 2 * ell - ell / 4);
            TilePartition part = tile_partition(c, ell);
            Localization loc = localize_bubbles(c, part);
            json j;
            j["case"] = i;
            j["verdict"] = "holds";
            for (size_t t = 0; t < part.tiles.size(); ++t) {
                if (!part.tiles[t].bad) continue;
                BadTileReport r = bad_tile_bound_check(c, part, t, loc, mp, 0.05, c0);
                json cj = cert_json(r.cert);
                cj["fitted_c2"] = r.fitted_c2;
                j["certs"].push_back(cj);
                if (r.cert.verdict == Verdict::Violated) j["verdict"] = "violated";
            }
            return j;
        }));
    }
    if (suite == "stability") {
        auto [h, tie] = optimal_width(mp);
        (void)tie;
        long ell = ell_opt > 0 ? ell_opt : 8 * h;
        return finish(parallel_cases(count, [&](long i) {
            std::mt19937 rng(unsigned(seed + std::uint64_t(i)));
            SpinConfig c = perturbed_striped(rng, h, 2 * ell, 1 + long(rng() % 4),
                                            ell / 2, 2 * ell - ell / 2);
            StabilityReport r = stability_certificate(c, mp, ell, C1, C0);
            json j = from_cert(i, r.ground_state);
            j["quantitative"] = cert_json(r.quantitative);
            j["nc2"] = r.nc2;
            j["strict_ok"] = r.strict_ok;
            if (r.strict_expected && !r.strict_ok) j["verdict"] = "violated";
            return j;
        }));
    }
    throw CLI::ValidationError("unknown suite: " + suite);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"striped-ground-state energy and certificate toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();

    std::string manifest_path;
    app.add_option("--manifest", manifest_path, "write a run manifest JSON to this path");

    double p = 5.0, J = 0.0, tol = 1e-11;
    int d = 2;

    // ---- jc
    auto* cmd_jc = app.add_subcommand("jc", "critical coupling with tail bound");
    cmd_jc->add_option("--p", p)->required();
    cmd_jc->add_option("--d", d);
    cmd_jc->add_option("--tol", tol);

    // ---- es
    auto* cmd_es = app.add_subcommand("es", "striped energy-per-site curve");
    long hmax = 100;
    std::string out_path;
    cmd_es->add_option("--p", p)->required();
    cmd_es->add_option("--d", d);
    cmd_es->add_option("--J", J)->required();
    cmd_es->add_option("--hmax", hmax);
    cmd_es->add_option("--out", out_path, "CSV output path (default stdout)");

    // ---- einf
    auto* cmd_einf = app.add_subcommand("einf", "energy of an infinite stripe sequence");
    std::string seq_str;
    cmd_einf->add_option("--p", p)->required();
    cmd_einf->add_option("--J", J)->required();
    cmd_einf->add_option("--seq", seq_str, "h1,w1,h2,...,hn alternating widths/spacings")
        ->required();

    // ---- decompose
    auto* cmd_dec = app.add_subcommand("decompose", "tile/region decomposition report");
    std::string cfg_path, svg_path, origin_str = "0,0";
    long ell = 0;
    cmd_dec->add_option("--config", cfg_path)->required()->check(CLI::ExistingFile);
    cmd_dec->add_option("--ell", ell)->required();
    cmd_dec->add_option("--origin", origin_str, "tiling origin x,y");
    cmd_dec->add_option("--svg", svg_path, "also write an SVG rendering");

    // ---- verify
    auto* cmd_ver = app.add_subcommand("verify", "run a certificate suite (JSON lines)");
    std::string suite;
    long count = 20, ell_opt = 0;
    std::uint64_t seed = 1;
    double c0 = 0.3, c1 = 1.0, C0 = 0.4, C1 = 0.05;
    cmd_ver->add_option("--suite", suite)
        ->required()
        ->check(CLI::IsMember({"identity", "chessboard", "localization", "goodregion",
                               "slicedregion", "badtile", "stability", "selfenergy"}));
    cmd_ver->add_option("--p", p);
    cmd_ver->add_option("--d", d);
    cmd_ver->add_option("--J", J)->required();
    cmd_ver->add_option("--seed", seed);
    cmd_ver->add_option("--count", count);
    cmd_ver->add_option("--ell", ell_opt, "tile side (default derived from h*)");
    cmd_ver->add_option("--c0", c0, "window constant for the bad-tile bound");
    cmd_ver->add_option("--c1", c1, "boundary constant for the good-region bound");
    cmd_ver->add_option("--C0", C0, "window constant for the stability bound");
    cmd_ver->add_option("--C1", C1, "gain constant for the stability bound");

    // ---- bruteforce
    auto* cmd_bf = app.add_subcommand("bruteforce", "exhaustive or annealed ground-state search");
    std::string dims;
    bool use_anneal = false;
    long sweeps = 4000;
    cmd_bf->add_option("--dims", dims, "L or LxL torus size")->required();
    cmd_bf->add_option("--p", p)->required();
    cmd_bf->add_option("--J", J)->required();
    cmd_bf->add_flag("--anneal", use_anneal);
    cmd_bf->add_option("--seed", seed);
    cmd_bf->add_option("--sweeps", sweeps);

    // ---- scan
    auto* cmd_scan = app.add_subcommand("scan", "parameter scans for log-log fits");
    std::string what = "hstar", grid;
    cmd_scan->add_option("--what", what)->check(CLI::IsMember({"hstar"}));
    cmd_scan->add_option("--p", p)->required();
    cmd_scan->add_option("--d", d);
    cmd_scan->add_option("--tau-grid", grid, "a:b:n geometric grid of |tau|")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_jc) {
            ModelParams mp = make_params(p, d, 0.0, tol);
            json j{{"p", p}, {"d", d}, {"tol", tol}, {"jc", sum_json(mp.jc)}};
            std::cout << j.dump(2) << "\n";
            write_manifest(manifest_path, "jc", j, {});
            return 0;
        }
        if (*cmd_es) {
            ModelParams mp = params_for(p, d, J, tol);
            EnergyCurve curve = build_energy_curve(mp, hmax);
            std::ostringstream csv;
            csv << "h,es,tail\n";
            for (long h = 1; h <= curve.hmax; ++h)
                csv << h << "," << std::setprecision(17) << curve.at(h).value << ","
                    << curve.at(h).tail << "\n";
            json summary{{"p", p},         {"d", d},   {"J", J},
                         {"hmax", hmax},   {"h_star", curve.h_star},
                         {"tie", curve.tie}};
            if (out_path.empty()) {
                std::cout << csv.str();
                std::cout << "# " << summary.dump() << "\n";
            } else {
                std::ofstream f(out_path);
                f << csv.str();
                std::cout << summary.dump(2) << "\n";
            }
            write_manifest(manifest_path, "es", summary, {out_path});
            return 0;
        }
        if (*cmd_einf) {
            ModelParams mp = params_for(p, 2, J, tol);
            StripeSequence seq;
            std::stringstream ss(seq_str);
            std::string tok;
            bool width = true;
            while (std::getline(ss, tok, ',')) {
                long v = std::stol(tok);
                (width ? seq.widths : seq.spacings).push_back(v);
                width = !width;
            }
            SumResult e = e_infinity(seq, mp);
            json j{{"p", p}, {"J", J}, {"seq", seq_str}, {"e_inf", sum_json(e)}};
            std::cout << j.dump(2) << "\n";
            write_manifest(manifest_path, "einf", j, {});
            return 0;
        }
        if (*cmd_dec) {
            SpinConfig c = SpinConfig::load(cfg_path);
            long ox = 0, oy = 0;
            if (std::sscanf(origin_str.c_str(), "%ld,%ld", &ox, &oy) != 2)
                throw CLI::ValidationError("--origin must be x,y");
            TilePartition part = tile_partition(c, ell, ox, oy);
            std::cout << decomposition_json(part) << "\n";
            if (!svg_path.empty()) {
                std::ofstream f(svg_path);
                f << decomposition_svg(c, part);
            }
            write_manifest(manifest_path, "decompose",
                           json{{"config", cfg_path}, {"ell", ell}, {"origin", origin_str}},
                           {svg_path});
            return 0;
        }
        if (*cmd_ver) {
            ModelParams mp = params_for(p, d, J, tol);
            mp.kernel();  // warm the shared table before worker threads start
            int bad = run_suite(suite, mp, count, seed, ell_opt, c0, c1, C0, C1, std::cout);
            write_manifest(manifest_path, "verify",
                           json{{"suite", suite}, {"p", p}, {"d", d},
                                {"J", J}, {"seed", seed}, {"count", count},
                                {"ell", ell_opt}, {"violations", bad}},
                           {});
            return bad == 0 ? 0 : 1;
        }
        if (*cmd_bf) {
            ModelParams mp = params_for(p, 2, J, tol);
            long Lx = 0, Ly = 0;
            if (std::sscanf(dims.c_str(), "%ldx%ld", &Lx, &Ly) == 2) {
            } else if (std::sscanf(dims.c_str(), "%ld", &Lx) == 1) {
                Ly = 1;
            } else {
                throw CLI::ValidationError("--dims must be L or LxL");
            }
            SearchReport rep;
            if (use_anneal)
                rep = anneal(Lx, Ly, mp, AnnealSchedule{6.0, 0.05, sweeps}, seed);
            else if (Ly == 1)
                rep = exhaustive_1d(Lx, mp);
            else
                rep = exhaustive_2d(Lx, Ly, mp);
            json j{{"dims", dims},
                   {"p", p},
                   {"J", J},
                   {"anneal", use_anneal},
                   {"seed", seed},
                   {"min_energy", sum_json(rep.min_energy)},
                   {"enumerated", rep.enumerated},
                   {"represented", rep.represented},
                   {"sym_factor", rep.sym_factor},
                   {"striped", rep.striped},
                   {"wall_seconds", rep.wall_seconds}};
            for (auto& c : rep.minimizers) {
                std::string rows;
                for (long y = 0; y < c.ny; ++y) {
                    for (long x = 0; x < c.nx; ++x)
                        rows += c.box_at(x, y) > 0 ? '+' : '-';
                    if (y + 1 < c.ny) rows += '/';
                }
                j["minimizers"].push_back(rows);
            }
            std::cout << j.dump(2) << "\n";
            write_manifest(manifest_path, "bruteforce", j, {});
            return 0;
        }
        if (*cmd_scan) {
            double a = 0, b = 0;
            long n = 0;
            if (std::sscanf(grid.c_str(), "%lf:%lf:%ld", &a, &b, &n) != 3 || n < 2 ||
                a <= 0 || b <= a)
                throw CLI::ValidationError("--tau-grid must be a:b:n with 0 < a < b");
            std::cout << "tau,h_star,es_hstar\n";
            for (long i = 0; i < n; ++i) {
                double t = a * std::pow(b / a, double(i) / double(n - 1));
                ModelParams mp = make_params(p, d, 0.0, tol);
                mp.J = mp.jc.value - t / 2.0;  // tau = -t
                auto [h, tie] = optimal_width(mp);
                (void)tie;
                std::cout << std::setprecision(17) << -t << "," << h << ","
                          << striped_energy_per_site(h, mp).value << "\n";
            }
            write_manifest(manifest_path, "scan",
                           json{{"what", what}, {"p", p}, {"d", d}, {"tau_grid", grid}}, {});
            return 0;
        }
    } catch (const BudgetError& e) {
        std::cerr << "budget error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
