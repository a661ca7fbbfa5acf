#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "truelkit/rng.hpp"
#include "truelkit/spatial.hpp"

using namespace truelkit;

namespace {

LatticeConfig base_config() {
    LatticeConfig cfg;
    cfg.side = 4;
    cfg.proportions = {0.3, 0.3, 0.4};
    cfg.marks = {Marksmanship(1.0), Marksmanship(0.8), Marksmanship(0.5)};
    return cfg;
}

// Census recomputed by brute-force grid scan, to cross-check the bookkeeping.
std::array<int, 3> scan_census(const Lattice& lat) {
    std::array<int, 3> c{0, 0, 0};
    for (int s = 0; s < lat.sites(); ++s) {
        const int g = lat.group_at(s);
        if (g >= 0) ++c[static_cast<std::size_t>(g)];
    }
    return c;
}

}  // namespace

TEST_CASE("lattice config validation rejects bad fields") {
    CHECK_THROWS_AS(([] { auto c = base_config(); c.side = 0; c.validate(); }()),
                    std::invalid_argument);
    CHECK_THROWS_AS(([] {
                        auto c = base_config();
                        c.proportions = {0.5, 0.6, -0.1};
                        c.validate();
                    }()),
                    std::invalid_argument);
    CHECK_THROWS_AS(([] {
                        auto c = base_config();
                        c.proportions = {0.5, 0.4, 0.2};
                        c.validate();
                    }()),
                    std::invalid_argument);
    CHECK_THROWS_AS(([] { auto c = base_config(); c.occupancy = 1.5; c.validate(); }()),
                    std::invalid_argument);
    CHECK_THROWS_AS(([] { auto c = base_config(); c.step_cap = 0; c.validate(); }()),
                    std::invalid_argument);
    CHECK_NOTHROW(base_config().validate());
}

TEST_CASE("lattice bookkeeping matches a grid scan through place, remove, convert, move") {
    Lattice lat(3, Boundary::Bounded);
    lat.place(0, 0);
    lat.place(4, 1);
    lat.place(8, 2);
    CHECK(lat.agent_count() == 3);
    CHECK(lat.census() == scan_census(lat));

    lat.convert(4, 2);
    CHECK(lat.census() == std::array<int, 3>{1, 0, 2});
    CHECK(lat.census() == scan_census(lat));

    lat.move(8, 7);
    CHECK_FALSE(lat.occupied(8));
    CHECK(lat.group_at(7) == 2);
    CHECK(lat.census() == scan_census(lat));

    lat.remove(0);
    CHECK(lat.agent_count() == 2);
    CHECK(lat.census() == std::array<int, 3>{0, 0, 2});
    CHECK(lat.census() == scan_census(lat));

    // The agent list still reaches exactly the occupied sites.
    std::set<int> listed;
    for (int i = 0; i < lat.agent_count(); ++i) listed.insert(lat.agent_site(i));
    CHECK(listed == std::set<int>{4, 7});

    CHECK(lat.groups_remaining() == 1);
    CHECK_THROWS_AS(lat.place(4, 0), std::logic_error);
    CHECK_THROWS_AS(lat.remove(0), std::logic_error);
    CHECK_THROWS_AS(lat.move(4, 7), std::logic_error);
    CHECK_THROWS_AS(lat.convert(0, 1), std::logic_error);
    CHECK_THROWS_AS(lat.place(2, 5), std::invalid_argument);
}

TEST_CASE("neighbor sets respect boundary mode and never contain duplicates or self") {
    std::array<int, 4> nb{};

    Lattice periodic(3, Boundary::Periodic);
    CHECK(periodic.neighbors(4, nb) == 4);  // center
    int n = periodic.neighbors(0, nb);      // corner wraps to 4 distinct sites
    CHECK(n == 4);
    std::set<int> wrapped(nb.begin(), nb.begin() + n);
    CHECK(wrapped == std::set<int>{1, 2, 3, 6});

    Lattice bounded(3, Boundary::Bounded);
    n = bounded.neighbors(0, nb);
    std::set<int> corner(nb.begin(), nb.begin() + n);
    CHECK(corner == std::set<int>{1, 3});
    n = bounded.neighbors(1, nb);
    CHECK(n == 3);

    // Small periodic grids: wraparound duplicates collapse, self is excluded.
    Lattice two(2, Boundary::Periodic);
    n = two.neighbors(0, nb);
    std::set<int> tiny(nb.begin(), nb.begin() + n);
    CHECK(tiny == std::set<int>{1, 2});

    Lattice one(1, Boundary::Periodic);
    CHECK(one.neighbors(0, nb) == 0);
}

TEST_CASE("iid initialization fills per the occupancy and proportions") {
    SeedSpec seed{411};

    auto pure = base_config();
    pure.proportions = {1.0, 0.0, 0.0};
    auto rng = seed.stream(0);
    Lattice all_a = make_lattice(pure, rng);
    CHECK(all_a.agent_count() == all_a.sites());
    CHECK(all_a.census()[0] == all_a.sites());

    auto empty = base_config();
    empty.occupancy = 0.0;
    rng = seed.stream(1);
    CHECK(make_lattice(empty, rng).agent_count() == 0);

    // Statistical: counts land near side^2 * proportion (within ~4 sigma).
    auto big = base_config();
    big.side = 50;
    rng = seed.stream(2);
    Lattice lat = make_lattice(big, rng);
    CHECK(lat.agent_count() == 2500);
    CHECK(std::abs(lat.census()[0] - 750) < 100);
    CHECK(std::abs(lat.census()[1] - 750) < 100);
    CHECK(std::abs(lat.census()[2] - 1000) < 100);
}

TEST_CASE("exact-proportion initialization hits the rounded counts exactly") {
    SeedSpec seed{412};

    auto cfg = base_config();
    cfg.side = 20;
    cfg.init = LatticeInit::ExactProportions;
    auto rng = seed.stream(0);
    Lattice lat = make_lattice(cfg, rng);
    CHECK(lat.census() == std::array<int, 3>{120, 120, 160});
    CHECK(lat.census() == scan_census(lat));

    auto half = base_config();
    half.side = 4;
    half.occupancy = 0.5;
    half.proportions = {0.25, 0.25, 0.5};
    half.init = LatticeInit::ExactProportions;
    rng = seed.stream(1);
    Lattice sparse = make_lattice(half, rng);
    CHECK(sparse.census() == std::array<int, 3>{2, 2, 4});
    CHECK(sparse.agent_count() == 8);
}

TEST_CASE("three-agent encounter with two allies covers exactly the reachable outcomes") {
    // Groups (A, A, B), marks a=1, b=0.8: both A's aim at B, B picks an A.
    // Possible ends: B dies with both A's alive, B dies after killing one A,
    // or B kills both A's.
    auto cfg = base_config();
    cfg.marks = {Marksmanship(1.0), Marksmanship(0.8), Marksmanship(0.5)};
    SeedSpec seed{413};
    auto rng = seed.stream(0);

    std::set<std::array<int, 3>> outcomes;
    for (int trial = 0; trial < 500; ++trial) {
        Lattice lat(3, Boundary::Bounded);
        lat.place(0, 0);
        lat.place(1, 0);
        lat.place(2, 1);
        const std::array<int, 3> trio{0, 1, 2};
        const int killed = detail::inner_game(lat, cfg, trio, rng);
        CHECK(killed == 3 - lat.agent_count());
        CHECK(lat.census() == scan_census(lat));
        CHECK(lat.groups_remaining() == 1);
        outcomes.insert(lat.census());
    }
    const std::set<std::array<int, 3>> reachable{{2, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    CHECK(outcomes == reachable);
}

TEST_CASE("same-group duel is a no-op") {
    auto cfg = base_config();
    SeedSpec seed{414};
    auto rng = seed.stream(0);
    Lattice lat(2, Boundary::Bounded);
    lat.place(0, 2);
    lat.place(1, 2);
    const std::array<int, 2> pair{0, 1};
    CHECK(detail::inner_game(lat, cfg, pair, rng) == 0);
    CHECK(lat.census() == std::array<int, 3>{0, 0, 2});
}

TEST_CASE("encounter where nobody can hit resolves as a frozen no-op") {
    auto cfg = base_config();
    cfg.marks = {Marksmanship(0.0), Marksmanship(0.0), Marksmanship(0.5)};
    SeedSpec seed{415};
    auto rng = seed.stream(0);
    Lattice lat(2, Boundary::Bounded);
    lat.place(0, 0);
    lat.place(1, 1);
    const std::array<int, 2> pair{0, 1};
    CHECK(detail::inner_game(lat, cfg, pair, rng) == 0);
    CHECK(lat.agent_count() == 2);
}

TEST_CASE("sequential duel fires in ascending marksmanship order, site order on ties") {
    SeedSpec seed{416};

    // Equal marks: the lower site shoots first and, with mark 1, always wins.
    auto cfg = base_config();
    cfg.variant = SpatialVariant::Sequential;
    cfg.marks = {Marksmanship(1.0), Marksmanship(1.0), Marksmanship(0.5)};
    auto rng = seed.stream(0);
    for (int trial = 0; trial < 20; ++trial) {
        Lattice lat(2, Boundary::Bounded);
        lat.place(0, 1);  // B on the lower site
        lat.place(1, 0);
        const std::array<int, 2> pair{0, 1};
        detail::inner_game(lat, cfg, pair, rng);
        CHECK(lat.census() == std::array<int, 3>{0, 1, 0});
    }

    // Unequal marks: the weaker side shoots first, so its win rate is the
    // first-shooter closed form b/(a+b-ab) = 0.9 for a=1, b=0.9.
    cfg.marks = {Marksmanship(1.0), Marksmanship(0.9), Marksmanship(0.5)};
    rng = seed.stream(1);
    const int trials = 20000;
    int b_wins = 0;
    for (int trial = 0; trial < trials; ++trial) {
        Lattice lat(2, Boundary::Bounded);
        lat.place(0, 0);
        lat.place(1, 1);
        const std::array<int, 2> pair{0, 1};
        detail::inner_game(lat, cfg, pair, rng);
        b_wins += lat.census()[1];
    }
    const double freq = static_cast<double>(b_wins) / trials;
    CHECK(std::abs(freq - 0.9) < 3.0 * std::sqrt(0.9 * 0.1 / trials));
}

TEST_CASE("opinion encounter converts instead of eliminating") {
    auto cfg = base_config();
    cfg.variant = SpatialVariant::Opinion;
    cfg.marks = {Marksmanship(1.0), Marksmanship(0.0), Marksmanship(0.5)};
    SeedSpec seed{417};
    auto rng = seed.stream(0);
    for (int trial = 0; trial < 50; ++trial) {
        Lattice lat(2, Boundary::Bounded);
        lat.place(0, 0);
        lat.place(1, 1);
        const std::array<int, 2> pair{0, 1};
        CHECK(detail::inner_game(lat, cfg, pair, rng) == 0);
        // B can never convert anyone, so consensus is always all-A.
        CHECK(lat.census() == std::array<int, 3>{2, 0, 0});
        CHECK(lat.agent_count() == 2);
    }
}

TEST_CASE("isolated agents walk to a neighbor site") {
    auto cfg = base_config();
    SeedSpec seed{418};
    auto rng = seed.stream(0);

    Lattice lat(3, Boundary::Bounded);
    lat.place(4, 1);  // center, all four neighbors empty
    CHECK(spatial_step(lat, cfg, rng) == 0);
    CHECK(lat.agent_count() == 1);
    const int where = lat.agent_site(0);
    CHECK((where == 1 || where == 3 || where == 5 || where == 7));

    // Side-1 grid: nowhere to go, the step is a no-op.
    Lattice stuck(1, Boundary::Periodic);
    stuck.place(0, 0);
    CHECK(spatial_step(stuck, cfg, rng) == 0);
    CHECK(stuck.agent_site(0) == 0);
}

TEST_CASE("agents with only same-group neighbors drift instead of freezing") {
    auto cfg = base_config();
    SeedSpec seed{430};
    auto rng = seed.stream(0);

    // Two adjacent allies: whichever is picked has no opponent and at least
    // one empty neighbor, so every step moves somebody and the pair
    // eventually separates; census never changes.
    Lattice lat(3, Boundary::Bounded);
    lat.place(0, 0);
    lat.place(1, 0);
    const std::set<int> before{0, 1};
    CHECK(spatial_step(lat, cfg, rng) == 0);
    std::set<int> after{lat.agent_site(0), lat.agent_site(1)};
    CHECK(after != before);
    CHECK(lat.census() == std::array<int, 3>{2, 0, 0});

    // All-ally cross: the boxed-in center can only stay put, the arms drift;
    // either way steps are harmless walks.
    Lattice boxed(3, Boundary::Bounded);
    boxed.place(4, 1);
    boxed.place(1, 1);
    boxed.place(3, 1);
    boxed.place(5, 1);
    boxed.place(7, 1);
    for (int i = 0; i < 20; ++i) {
        CHECK(spatial_step(boxed, cfg, rng) == 0);
        CHECK(boxed.census()[1] == 5);
    }
}

TEST_CASE("a lone neighbor triggers the duel fallback") {
    auto cfg = base_config();
    cfg.marks = {Marksmanship(1.0), Marksmanship(0.0), Marksmanship(0.5)};
    SeedSpec seed{419};
    auto rng = seed.stream(0);

    // A and B adjacent on a bounded grid; B can never hit, so however many
    // steps it takes, A ends up the sole survivor.
    Lattice lat(3, Boundary::Bounded);
    lat.place(0, 0);
    lat.place(1, 1);
    int guard = 0;
    while (lat.groups_remaining() > 1) {
        REQUIRE(++guard < 1000);
        spatial_step(lat, cfg, rng);
    }
    CHECK(lat.census() == std::array<int, 3>{1, 0, 0});
}

TEST_CASE("runs on single-group lattices end at step zero") {
    SeedSpec seed{420};

    auto cfg = base_config();
    cfg.proportions = {1.0, 0.0, 0.0};
    cfg.side = 5;
    auto rng = seed.stream(0);
    SpatialRunResult res = spatial_run(cfg, rng);
    CHECK(res.winner == 0);
    CHECK(res.steps == 0);
    CHECK(res.census == std::array<int, 3>{25, 0, 0});

    auto solo = base_config();
    solo.side = 1;
    solo.proportions = {0.0, 1.0, 0.0};
    rng = seed.stream(1);
    res = spatial_run(solo, rng);
    CHECK(res.winner == 1);
    CHECK(res.steps == 0);

    auto nobody = base_config();
    nobody.occupancy = 0.0;
    rng = seed.stream(2);
    CHECK_THROWS_AS(spatial_run(nobody, rng), std::invalid_argument);
}

TEST_CASE("lethal runs conserve census through eliminations; opinion runs keep everyone") {
    SeedSpec seed{421};

    auto cfg = base_config();
    cfg.side = 8;
    auto rng = seed.stream(0);
    SpatialRunResult res = spatial_run(cfg, rng);
    CHECK(res.winner >= 0);
    const int survivors = res.census[static_cast<std::size_t>(res.winner)];
    CHECK(survivors >= 1);
    CHECK(res.census[0] + res.census[1] + res.census[2] == survivors);
    CHECK(static_cast<int>(res.elimination_steps.size()) == 64 - survivors);
    CHECK(std::is_sorted(res.elimination_steps.begin(), res.elimination_steps.end()));
    if (!res.elimination_steps.empty()) CHECK(res.elimination_steps.back() <= res.steps);

    auto op = base_config();
    op.side = 8;
    op.variant = SpatialVariant::Opinion;
    rng = seed.stream(1);
    res = spatial_run(op, rng);
    CHECK(res.census[static_cast<std::size_t>(res.winner)] == 64);
    CHECK(res.elimination_steps.empty());
}

TEST_CASE("spatial runs are reproducible from the seed") {
    auto cfg = base_config();
    cfg.side = 8;
    SeedSpec seed{422};

    auto rng1 = seed.stream(7);
    auto rng2 = seed.stream(7);
    SpatialRunResult a = spatial_run(cfg, rng1);
    SpatialRunResult b = spatial_run(cfg, rng2);
    CHECK(a.winner == b.winner);
    CHECK(a.steps == b.steps);
    CHECK(a.census == b.census);
    CHECK(a.elimination_steps == b.elimination_steps);

    auto rng3 = seed.stream(8);
    SpatialRunResult c = spatial_run(cfg, rng3);
    CHECK((c.steps != a.steps || c.census != a.census));
}

TEST_CASE("snapshots arrive at step zero, every interval, and at the end") {
    auto cfg = base_config();
    cfg.side = 8;
    cfg.snapshot_interval = 50;
    SeedSpec seed{423};
    auto rng = seed.stream(0);

    std::vector<std::uint64_t> seen;
    std::array<int, 3> last_census{};
    SpatialRunResult res = spatial_run(cfg, rng, [&](const Lattice& lat, std::uint64_t step) {
        seen.push_back(step);
        last_census = lat.census();
    });

    REQUIRE(!seen.empty());
    CHECK(seen.front() == 0);
    CHECK(seen.back() == res.steps);
    for (std::size_t i = 0; i + 1 < seen.size(); ++i) CHECK(seen[i] % 50 == 0);
    CHECK(last_census == res.census);

    // No sink, or interval zero, runs fine without snapshots.
    auto rng2 = seed.stream(0);
    cfg.snapshot_interval = 0;
    int calls = 0;
    SpatialRunResult res2 =
        spatial_run(cfg, rng2, [&](const Lattice&, std::uint64_t) { ++calls; });
    CHECK(calls == 0);
    CHECK(res2.steps == res.steps);
}

TEST_CASE("step cap aborts a run with the census in the message") {
    auto cfg = base_config();
    cfg.side = 20;
    cfg.step_cap = 5;
    SeedSpec seed{424};
    auto rng = seed.stream(0);
    CHECK_THROWS_MATCHES(spatial_run(cfg, rng), TimeoutError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("census")));
}

TEST_CASE("eliminations concentrate early: melee first, mopping-up later") {
    auto cfg = base_config();
    cfg.side = 10;
    cfg.proportions = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    SeedSpec seed{425};

    const int runs = 100;
    double early_rate = 0.0;
    double late_rate = 0.0;
    for (int r = 0; r < runs; ++r) {
        auto rng = seed.stream(static_cast<std::uint64_t>(r));
        SpatialRunResult res = spatial_run(cfg, rng);
        REQUIRE(res.steps > 0);
        const double window = std::max(1.0, 0.1 * static_cast<double>(res.steps));
        const double early_cut = window;
        const double late_cut = static_cast<double>(res.steps) - window;
        int early = 0;
        int late = 0;
        for (std::uint64_t t : res.elimination_steps) {
            if (static_cast<double>(t) <= early_cut) ++early;
            if (static_cast<double>(t) > late_cut) ++late;
        }
        early_rate += early / window;
        late_rate += late / window;
    }
    early_rate /= runs;
    late_rate /= runs;
    CHECK(early_rate > 2.0 * late_rate);
}

TEST_CASE("group A is the modal winner from proportions (0.3, 0.3, 0.4)") {
    auto cfg = base_config();
    cfg.side = 20;
    cfg.init = LatticeInit::ExactProportions;
    SeedSpec seed{426};

    std::array<int, 3> wins{0, 0, 0};
    const int runs = 50;
    for (int r = 0; r < runs; ++r) {
        auto rng = seed.stream(static_cast<std::uint64_t>(r));
        ++wins[static_cast<std::size_t>(spatial_run(cfg, rng).winner)];
    }
    CHECK(wins[0] > wins[1]);
    CHECK(wins[0] > wins[2]);
}

TEST_CASE("simplex diagram covers the proportion grid and nails the corners") {
    auto cfg = base_config();
    cfg.side = 4;
    SeedSpec seed{427};

    SimplexDiagram coarse = simplex_diagram(cfg, 0.5, 4, seed, 2);
    REQUIRE(coarse.points.size() == 6);
    // i-major, j-minor ordering of (x_A, x_B).
    CHECK(coarse.points[0].proportions == std::array<double, 3>{0.0, 0.0, 1.0});
    CHECK(coarse.points[1].proportions == std::array<double, 3>{0.0, 0.5, 0.5});
    CHECK(coarse.points[2].proportions == std::array<double, 3>{0.0, 1.0, 0.0});
    CHECK(coarse.points[5].proportions[0] == 1.0);

    for (const SimplexPoint& pt : coarse.points) {
        double mass = pt.frequency[0] + pt.frequency[1] + pt.frequency[2];
        CHECK(mass == Catch::Approx(1.0).margin(1e-12));  // tiny lattices never stall
        CHECK(pt.timeouts == 0);
    }
    // Corner (1, 0, 0) is point (i=2, j=0): everyone starts in group A.
    CHECK(coarse.points[5].frequency[0] == 1.0);
    CHECK(coarse.points[5].favorite == 0);
    CHECK(coarse.points[2].frequency[1] == 1.0);
    CHECK(coarse.points[2].favorite == 1);
    CHECK(coarse.points[0].favorite == 2);

    SimplexDiagram fine = simplex_diagram(cfg, 0.1, 1, seed, 4);
    CHECK(fine.points.size() == 66);

    CHECK_THROWS_AS(simplex_diagram(cfg, 0.0, 4, seed), std::invalid_argument);
    CHECK_THROWS_AS(simplex_diagram(cfg, 1.0, 4, seed), std::invalid_argument);
    CHECK_THROWS_AS(simplex_diagram(cfg, 0.5, 0, seed), std::invalid_argument);
}

TEST_CASE("simplex diagram is identical across thread counts") {
    auto cfg = base_config();
    cfg.side = 4;
    SeedSpec seed{428};

    SimplexDiagram one = simplex_diagram(cfg, 0.5, 4, seed, 1);
    SimplexDiagram four = simplex_diagram(cfg, 0.5, 4, seed, 4);
    REQUIRE(one.points.size() == four.points.size());
    for (std::size_t i = 0; i < one.points.size(); ++i) {
        CHECK(one.points[i].frequency == four.points[i].frequency);
        CHECK(one.points[i].favorite == four.points[i].favorite);
        CHECK(one.points[i].timeouts == four.points[i].timeouts);
    }
}
