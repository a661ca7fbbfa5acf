#pragma once

// Collective shooting and opinion games on a 2D square lattice. Agents carry a
// group label (A/B/C); each micro-step one agent either fights a local game
// with up to two occupied von-Neumann neighbors, duels a lone neighbor, or —
// when no opposing agent is adjacent — diffuses to a free neighbor site.
// (Diffusion cannot be restricted to fully isolated agents: same-group
// clusters would then never move and two surviving clusters of different
// groups could deadlock forever; letting anyone without an adjacent opponent
// drift gives the observed two-regime dynamics, an early melee followed by a
// diffusion-and-duel phase, and guarantees runs end.) Lethal variants (random
// and sequential shooting order) remove losers; the opinion variant converts
// them. A run ends when every surviving agent belongs to one group. Also
// provides the initial-proportion simplex sweep of win frequencies.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "truelkit/core.hpp"
#include "truelkit/parallel.hpp"
#include "truelkit/rng.hpp"

namespace truelkit {

enum class SpatialVariant { Random, Sequential, Opinion };
enum class Boundary { Periodic, Bounded };
enum class LatticeInit { IidDraw, ExactProportions };

inline std::string spatial_variant_name(SpatialVariant v) {
    switch (v) {
        case SpatialVariant::Random: return "random";
        case SpatialVariant::Sequential: return "sequential";
        default: return "opinion";
    }
}

inline std::string boundary_name(Boundary b) {
    return b == Boundary::Periodic ? "periodic" : "bounded";
}

struct LatticeConfig {
    int side = 50;
    std::array<double, 3> proportions{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    MarksTriple marks{Marksmanship(1.0), Marksmanship(0.8), Marksmanship(0.5)};
    SpatialVariant variant = SpatialVariant::Random;
    double occupancy = 1.0;  // probability (or exact fraction) of a site holding an agent
    Boundary boundary = Boundary::Periodic;
    LatticeInit init = LatticeInit::IidDraw;
    std::uint64_t step_cap = kDefaultStepCap;
    std::uint64_t snapshot_interval = 0;  // 0 = no snapshots

    void validate() const {
        if (side < 1) throw std::invalid_argument("lattice side must be at least 1");
        double sum = 0.0;
        for (double p : proportions) {
            if (!(p >= 0.0)) throw std::invalid_argument("group proportions must be non-negative");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("group proportions must sum to 1");
        if (!(occupancy >= 0.0 && occupancy <= 1.0))
            throw std::invalid_argument("occupancy must lie in [0, 1]");
        if (step_cap == 0) throw std::invalid_argument("step cap must be positive");
    }
};

// Square grid of group-labeled agents. Sites are indexed row-major
// (site = y * side + x); cell value is the group id or -1 for empty. An
// unordered agent list with a site->slot index gives O(1) uniform agent picks
// and O(1) removal, and the per-group census is maintained incrementally so
// the termination check never scans the grid.
class Lattice {
public:
    Lattice(int side, Boundary boundary)
        : side_(side),
          boundary_(boundary),
          cell_(static_cast<std::size_t>(side) * side, -1),
          slot_(static_cast<std::size_t>(side) * side, -1) {
        if (side < 1) throw std::invalid_argument("lattice side must be at least 1");
    }

    int side() const { return side_; }
    int sites() const { return side_ * side_; }
    Boundary boundary() const { return boundary_; }

    bool occupied(int site) const { return cell_[check(site)] >= 0; }
    int group_at(int site) const { return cell_[check(site)]; }  // -1 = empty

    int agent_count() const { return static_cast<int>(agents_.size()); }
    int agent_site(int index) const { return agents_[static_cast<std::size_t>(index)]; }
    const std::array<int, 3>& census() const { return census_; }

    int groups_remaining() const {
        return (census_[0] > 0) + (census_[1] > 0) + (census_[2] > 0);
    }

    void place(int site, int group) {
        require_group(group);
        if (occupied(site)) throw std::logic_error("site is already occupied");
        cell_[static_cast<std::size_t>(site)] = static_cast<std::int8_t>(group);
        slot_[static_cast<std::size_t>(site)] = agent_count();
        agents_.push_back(site);
        ++census_[static_cast<std::size_t>(group)];
    }

    void remove(int site) {
        const int g = group_at(site);
        if (g < 0) throw std::logic_error("cannot remove from an empty site");
        const int slot = slot_[static_cast<std::size_t>(site)];
        const int last_site = agents_.back();
        agents_[static_cast<std::size_t>(slot)] = last_site;
        slot_[static_cast<std::size_t>(last_site)] = slot;
        agents_.pop_back();
        cell_[static_cast<std::size_t>(site)] = -1;
        slot_[static_cast<std::size_t>(site)] = -1;
        --census_[static_cast<std::size_t>(g)];
    }

    void convert(int site, int group) {
        require_group(group);
        const int old = group_at(site);
        if (old < 0) throw std::logic_error("cannot convert an empty site");
        cell_[static_cast<std::size_t>(site)] = static_cast<std::int8_t>(group);
        --census_[static_cast<std::size_t>(old)];
        ++census_[static_cast<std::size_t>(group)];
    }

    void move(int from, int to) {
        const int g = group_at(from);
        if (g < 0) throw std::logic_error("cannot move from an empty site");
        if (occupied(to)) throw std::logic_error("cannot move onto an occupied site");
        const int slot = slot_[static_cast<std::size_t>(from)];
        cell_[static_cast<std::size_t>(to)] = static_cast<std::int8_t>(g);
        cell_[static_cast<std::size_t>(from)] = -1;
        slot_[static_cast<std::size_t>(to)] = slot;
        slot_[static_cast<std::size_t>(from)] = -1;
        agents_[static_cast<std::size_t>(slot)] = to;
    }

    // Distinct in-bounds von-Neumann neighbor sites of `site` (self excluded,
    // which matters on periodic grids of side 1 or 2). Returns the count.
    int neighbors(int site, std::array<int, 4>& out) const {
        check(site);
        const int x = site % side_;
        const int y = site / side_;
        const std::array<std::array<int, 2>, 4> offsets{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
        int n = 0;
        for (const auto& d : offsets) {
            int nx = x + d[0];
            int ny = y + d[1];
            if (boundary_ == Boundary::Periodic) {
                nx = (nx + side_) % side_;
                ny = (ny + side_) % side_;
            } else if (nx < 0 || nx >= side_ || ny < 0 || ny >= side_) {
                continue;
            }
            const int ns = ny * side_ + nx;
            if (ns == site) continue;
            bool dup = false;
            for (int i = 0; i < n; ++i) dup = dup || out[static_cast<std::size_t>(i)] == ns;
            if (!dup) out[static_cast<std::size_t>(n++)] = ns;
        }
        return n;
    }

private:
    std::size_t check(int site) const {
        if (site < 0 || site >= sites()) throw std::out_of_range("site index out of range");
        return static_cast<std::size_t>(site);
    }
    static void require_group(int group) {
        if (group < 0 || group > 2) throw std::invalid_argument("group id must be 0, 1, or 2");
    }

    int side_;
    Boundary boundary_;
    std::vector<std::int8_t> cell_;
    std::vector<int> agents_;  // site of each live agent, unordered
    std::vector<int> slot_;    // site -> index into agents_, -1 if empty
    std::array<int, 3> census_{0, 0, 0};
};

// Fresh lattice drawn from the config: either an i.i.d. per-site draw (each
// site empty with probability 1-occupancy, otherwise a group sampled from the
// proportions) or exact counts via largest-remainder rounding over the four
// site kinds (A, B, C, empty) followed by a full-grid shuffle.
inline Lattice make_lattice(const LatticeConfig& cfg, std::mt19937_64& rng) {
    cfg.validate();
    Lattice lat(cfg.side, cfg.boundary);
    const int n = lat.sites();

    if (cfg.init == LatticeInit::IidDraw) {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const double pa = cfg.proportions[0];
        const double pab = pa + cfg.proportions[1];
        for (int s = 0; s < n; ++s) {
            if (unit(rng) >= cfg.occupancy) continue;
            const double r = unit(rng);
            lat.place(s, r < pa ? 0 : (r < pab ? 1 : 2));
        }
        return lat;
    }

    // Exact counts: kind 3 is the empty site.
    std::array<double, 4> weight{cfg.occupancy * cfg.proportions[0],
                                 cfg.occupancy * cfg.proportions[1],
                                 cfg.occupancy * cfg.proportions[2], 1.0 - cfg.occupancy};
    std::array<int, 4> count{};
    std::array<double, 4> frac{};
    int assigned = 0;
    for (std::size_t k = 0; k < 4; ++k) {
        const double exact = weight[k] * n;
        count[k] = static_cast<int>(std::floor(exact));
        frac[k] = exact - count[k];
        assigned += count[k];
    }
    std::array<std::size_t, 4> order{0, 1, 2, 3};
    std::sort(order.begin(), order.end(), [&](std::size_t lhs, std::size_t rhs) {
        return frac[lhs] > frac[rhs] || (frac[lhs] == frac[rhs] && lhs < rhs);
    });
    for (int left = n - assigned, k = 0; left > 0; --left, ++k) ++count[order[static_cast<std::size_t>(k)]];

    std::vector<std::int8_t> kind;
    kind.reserve(static_cast<std::size_t>(n));
    for (std::int8_t k = 0; k < 4; ++k)
        kind.insert(kind.end(), static_cast<std::size_t>(count[static_cast<std::size_t>(k)]), k);
    std::shuffle(kind.begin(), kind.end(), rng);
    for (int s = 0; s < n; ++s)
        if (kind[static_cast<std::size_t>(s)] < 3) lat.place(s, kind[static_cast<std::size_t>(s)]);
    return lat;
}

namespace detail {

// Resolve one local encounter among the 2 or 3 agents sitting on `sites`.
// Nobody ever acts against their own group; each actor aims at the opposing
// group with the highest marksmanship among the remaining participants (group
// ties to the lower id) and at a uniformly chosen member of that group.
// Shooter order is uniform per shot (Random), a fixed cycle in ascending
// (marksmanship, site) order (Sequential — also covers the two-player duel,
// where the weaker shoots first), or a uniform speaker whose hit converts the
// victim to the speaker's group (Opinion). Lethal games run until the
// remaining participants share one group; the opinion game runs until all
// participants do. Encounters where no live participant can ever hit (every
// remaining mark is zero) cannot progress and resolve as no-ops. Returns the
// number of eliminations.
inline int inner_game(Lattice& lat, const LatticeConfig& cfg, std::span<const int> sites,
                      std::mt19937_64& rng) {
    const int n = static_cast<int>(sites.size());
    std::array<int, 3> part{};  // participant sites
    std::array<bool, 3> dead{};
    for (int i = 0; i < n; ++i) part[static_cast<std::size_t>(i)] = sites[static_cast<std::size_t>(i)];

    const bool lethal = cfg.variant != SpatialVariant::Opinion;
    auto group_of = [&](int i) { return lat.group_at(part[static_cast<std::size_t>(i)]); };
    auto mark_of = [&](int i) { return static_cast<double>(cfg.marks[static_cast<std::size_t>(group_of(i))]); };

    // Fixed shooting order for the sequential variant; group marks never
    // change mid-game in a lethal encounter, so it is computed once.
    std::array<int, 3> order{0, 1, 2};
    int cursor = 0;
    if (cfg.variant == SpatialVariant::Sequential) {
        std::sort(order.begin(), order.begin() + n, [&](int lhs, int rhs) {
            const double ml = mark_of(lhs), mr = mark_of(rhs);
            return ml < mr || (ml == mr && part[static_cast<std::size_t>(lhs)] < part[static_cast<std::size_t>(rhs)]);
        });
    }

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int eliminated = 0;
    std::uint64_t attempts = 0;
    for (;;) {
        // Termination: one group left among the living, or a frozen stalemate.
        int first_group = -1;
        bool consensus = true;
        double max_mark = 0.0;
        for (int i = 0; i < n; ++i) {
            if (dead[static_cast<std::size_t>(i)]) continue;
            const int g = group_of(i);
            if (first_group < 0) first_group = g;
            consensus = consensus && g == first_group;
            max_mark = std::max(max_mark, mark_of(i));
        }
        if (consensus || max_mark == 0.0) return eliminated;
        if (++attempts > cfg.step_cap)
            throw TimeoutError("local encounter exceeded " + std::to_string(cfg.step_cap) +
                               " shot attempts");

        int shooter;
        if (cfg.variant == SpatialVariant::Sequential) {
            while (dead[static_cast<std::size_t>(order[static_cast<std::size_t>(cursor)])])
                cursor = (cursor + 1) % n;
            shooter = order[static_cast<std::size_t>(cursor)];
            cursor = (cursor + 1) % n;
        } else {
            int alive_n = 0;
            std::array<int, 3> alive{};
            for (int i = 0; i < n; ++i)
                if (!dead[static_cast<std::size_t>(i)]) alive[static_cast<std::size_t>(alive_n++)] = i;
            shooter = alive[std::uniform_int_distribution<int>(0, alive_n - 1)(rng)];
        }
        const int sg = group_of(shooter);

        // Strongest opposing group present, then a uniform member of it.
        int tg = -1;
        double tmark = -1.0;
        for (int i = 0; i < n; ++i) {
            if (dead[static_cast<std::size_t>(i)] || group_of(i) == sg) continue;
            const int g = group_of(i);
            const double m = static_cast<double>(cfg.marks[static_cast<std::size_t>(g)]);
            if (m > tmark || (m == tmark && g < tg)) {
                tg = g;
                tmark = m;
            }
        }
        std::array<int, 3> victims{};
        int vn = 0;
        for (int i = 0; i < n; ++i)
            if (!dead[static_cast<std::size_t>(i)] && group_of(i) == tg)
                victims[static_cast<std::size_t>(vn++)] = i;
        const int victim = victims[vn == 1 ? 0 : std::uniform_int_distribution<int>(0, vn - 1)(rng)];

        if (unit(rng) < mark_of(shooter)) {
            if (lethal) {
                lat.remove(part[static_cast<std::size_t>(victim)]);
                dead[static_cast<std::size_t>(victim)] = true;
                ++eliminated;
            } else {
                lat.convert(part[static_cast<std::size_t>(victim)], sg);
            }
        }
    }
}

}  // namespace detail

// One lattice micro-step: pick a live agent uniformly. With an opponent
// somewhere in the neighborhood, two or more occupied neighbor sites mean two
// of them are picked uniformly (allies included, as in the two-against-one
// example) and the three agents play a local game, while exactly one occupied
// site means a duel with that neighbor. With no adjacent opponent the agent
// walks to a uniformly chosen empty neighbor site, staying put when boxed in
// by its own group. Returns the number of agents eliminated during the step.
inline int spatial_step(Lattice& lat, const LatticeConfig& cfg, std::mt19937_64& rng) {
    if (lat.agent_count() == 0) throw std::logic_error("no agents left on the lattice");
    const int site =
        lat.agent_site(std::uniform_int_distribution<int>(0, lat.agent_count() - 1)(rng));
    const int my_group = lat.group_at(site);

    std::array<int, 4> nb{};
    const int nn = lat.neighbors(site, nb);
    std::array<int, 4> occ{};
    std::array<int, 4> open{};
    int no = 0;
    int nf = 0;
    int opposing = 0;
    for (int i = 0; i < nn; ++i) {
        const int ns = nb[static_cast<std::size_t>(i)];
        const int g = lat.group_at(ns);
        if (g < 0) {
            open[static_cast<std::size_t>(nf++)] = ns;
        } else {
            occ[static_cast<std::size_t>(no++)] = ns;
            if (g != my_group) ++opposing;
        }
    }

    if (opposing == 0) {
        if (nf > 0)
            lat.move(site, open[static_cast<std::size_t>(
                               nf == 1 ? 0 : std::uniform_int_distribution<int>(0, nf - 1)(rng))]);
        return 0;
    }
    if (no >= 2) {
        const int i = std::uniform_int_distribution<int>(0, no - 1)(rng);
        int j = std::uniform_int_distribution<int>(0, no - 2)(rng);
        if (j >= i) ++j;
        const std::array<int, 3> trio{site, occ[static_cast<std::size_t>(i)], occ[static_cast<std::size_t>(j)]};
        return detail::inner_game(lat, cfg, trio, rng);
    }
    const std::array<int, 2> pair{site, occ[0]};
    return detail::inner_game(lat, cfg, pair, rng);
}

struct SpatialRunResult {
    int winner = -1;  // group every survivor belongs to
    std::uint64_t steps = 0;
    std::array<int, 3> census{0, 0, 0};
    // Step index (1-based) at which each elimination happened; lethal variants
    // only. The pace of this series separates the early melee from the late
    // mopping-up phase.
    std::vector<std::uint64_t> elimination_steps;
};

using SnapshotSink = std::function<void(const Lattice&, std::uint64_t step)>;

// Draw a lattice from the config and iterate micro-steps until one group
// remains (lethal variants: among survivors; opinion: everyone converted).
// When cfg.snapshot_interval > 0 and a sink is given, the sink sees the
// initial grid, the grid after every interval-th step, and the final grid.
// Throws TimeoutError (with the census so far) once cfg.step_cap steps pass.
inline SpatialRunResult spatial_run(const LatticeConfig& cfg, std::mt19937_64& rng,
                                    const SnapshotSink& snapshot = {}) {
    Lattice lat = make_lattice(cfg, rng);
    if (lat.agent_count() == 0)
        throw std::invalid_argument("lattice was initialized with no agents");

    const bool snap = snapshot && cfg.snapshot_interval > 0;
    if (snap) snapshot(lat, 0);

    SpatialRunResult out;
    while (lat.groups_remaining() > 1) {
        if (out.steps >= cfg.step_cap) {
            const auto& c = lat.census();
            throw TimeoutError("spatial run hit the step cap at " + std::to_string(out.steps) +
                               " steps (census " + std::to_string(c[0]) + "/" +
                               std::to_string(c[1]) + "/" + std::to_string(c[2]) + ")");
        }
        const int killed = spatial_step(lat, cfg, rng);
        ++out.steps;
        for (int k = 0; k < killed; ++k) out.elimination_steps.push_back(out.steps);
        if (snap && out.steps % cfg.snapshot_interval == 0) snapshot(lat, out.steps);
    }
    if (snap && out.steps % cfg.snapshot_interval != 0) snapshot(lat, out.steps);

    out.census = lat.census();
    for (int g = 0; g < 3; ++g)
        if (out.census[static_cast<std::size_t>(g)] > 0) out.winner = g;
    return out;
}

struct SimplexPoint {
    std::array<double, 3> proportions;
    std::array<double, 3> frequency;  // wins / runs; timed-out runs leave mass unassigned
    int favorite;                     // highest frequency, ties to the lower group id
    int timeouts;
};

struct SimplexDiagram {
    double step = 0.0;
    int runs = 0;
    std::vector<SimplexPoint> points;
};

// Win frequencies over the grid of initial proportions (i*s, j*s, 1-(i+j)*s),
// i and j ascending with the third coordinate non-negative, with `runs`
// independent runs per point. Run r of point p draws from seed.stream(p*runs
// + r), so results are reproducible and independent of the thread count.
inline SimplexDiagram simplex_diagram(const LatticeConfig& base, double step, int runs,
                                      SeedSpec seed, int threads = default_thread_count()) {
    if (!(step > 0.0 && step < 1.0))
        throw std::invalid_argument("simplex step must lie strictly between 0 and 1");
    if (runs < 1) throw std::invalid_argument("need at least one run per simplex point");
    base.validate();

    SimplexDiagram diagram;
    diagram.step = step;
    diagram.runs = runs;
    for (int i = 0; static_cast<double>(i) * step <= 1.0 + 1e-9; ++i) {
        for (int j = 0; static_cast<double>(i + j) * step <= 1.0 + 1e-9; ++j) {
            const double xa = static_cast<double>(i) * step;
            const double xb = static_cast<double>(j) * step;
            SimplexPoint pt;
            pt.proportions = {xa, xb, std::max(0.0, 1.0 - xa - xb)};
            pt.frequency = {0.0, 0.0, 0.0};
            pt.favorite = 0;
            pt.timeouts = 0;
            diagram.points.push_back(pt);
        }
    }

    const std::size_t total = diagram.points.size() * static_cast<std::size_t>(runs);
    std::vector<std::int8_t> outcome(total, -1);  // group id, or 3 for a timed-out run
    parallel_for(total, threads, [&](std::size_t slot) {
        const std::size_t p = slot / static_cast<std::size_t>(runs);
        LatticeConfig cfg = base;
        cfg.proportions = diagram.points[p].proportions;
        cfg.snapshot_interval = 0;
        std::mt19937_64 rng = seed.stream(static_cast<std::uint64_t>(slot));
        try {
            outcome[slot] = static_cast<std::int8_t>(spatial_run(cfg, rng).winner);
        } catch (const TimeoutError&) {
            outcome[slot] = 3;
        }
    });

    for (std::size_t p = 0; p < diagram.points.size(); ++p) {
        SimplexPoint& pt = diagram.points[p];
        for (int r = 0; r < runs; ++r) {
            const std::int8_t w = outcome[p * static_cast<std::size_t>(runs) + static_cast<std::size_t>(r)];
            if (w == 3)
                ++pt.timeouts;
            else
                pt.frequency[static_cast<std::size_t>(w)] += 1.0;
        }
        for (double& f : pt.frequency) f /= runs;
        for (int g = 1; g < 3; ++g)
            if (pt.frequency[static_cast<std::size_t>(g)] > pt.frequency[static_cast<std::size_t>(pt.favorite)])
                pt.favorite = g;
    }
    return diagram;
}

}  // namespace truelkit
