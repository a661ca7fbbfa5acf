// Runs one lattice collective game and writes a filmstrip of PPM frames
// (black/red/green = groups A/B/C, white = empty), then reports the winner.
// Watch the early melee thin the board, then domains coarsen until a single
// group remains.
//
// usage: lattice_frames [side] [frame-interval] [seed]

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "truelkit/truelkit.hpp"

using namespace truelkit;

int main(int argc, char** argv) {
    LatticeConfig cfg;
    cfg.side = argc > 1 ? std::atoi(argv[1]) : 50;
    cfg.marks = {1.0, 0.8, 0.5};
    cfg.proportions = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    cfg.snapshot_interval = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 2000;
    const SeedSpec seed{argc > 3 ? std::strtoull(argv[3], nullptr, 10) : 1};

    int frame = 0;
    SnapshotSink sink = [&](const Lattice& lat, std::uint64_t step) {
        char name[64];
        std::snprintf(name, sizeof name, "frame_%03d.ppm", frame++);
        std::ofstream out(name);
        write_ppm(out, lat);
        const auto census = lat.census();
        std::printf("%s  step %8llu  alive A=%d B=%d C=%d\n", name,
                    static_cast<unsigned long long>(step), census[0], census[1], census[2]);
    };

    auto rng = seed.stream(0);
    const SpatialRunResult res = spatial_run(cfg, rng, sink);
    std::printf("group %c wins after %llu steps with %d survivors\n",
                player_letter(static_cast<PlayerId>(res.winner)),
                static_cast<unsigned long long>(res.steps),
                res.census[static_cast<std::size_t>(res.winner)]);
    return 0;
}
