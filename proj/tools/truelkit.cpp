// Command-line surface for the library: exact duel/truel/opinion solvers,
// equilibrium scans and best-response paths, (b,c) region sweeps, league and
// n-player tournaments, and the lattice collective with its simplex diagram.
// Tabular commands write a `# key: value` metadata header followed by a CSV
// or NDJSON data section that is byte-identical across reruns with the same
// flags and seed. Exit codes: 0 success, 2 usage, 3 non-absorbing game or
// timed-out run.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "truelkit/truelkit.hpp"

namespace {

using namespace truelkit;

std::string join_argv(int argc, char** argv) {
    std::string out;
    for (int i = 0; i < argc; ++i) {
        if (i) out += ' ';
        out += argv[i];
    }
    return out;
}

// Data goes to --out when given, stdout otherwise; summaries go to stderr so
// redirected output stays machine-readable.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (path.empty()) return;
        file_.open(path);
        if (!file_) throw std::invalid_argument("cannot open output file: " + path);
        use_file_ = true;
    }
    std::ostream& out() { return use_file_ ? file_ : std::cout; }

private:
    std::ofstream file_;
    bool use_file_ = false;
};

MarksTriple to_marks(const std::vector<double>& v) {
    return {Marksmanship(v.at(0)), Marksmanship(v.at(1)), Marksmanship(v.at(2))};
}

void print_win(const WinDistribution& w) {
    std::cout << "P = (";
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) std::cout << ", ";
        std::cout << format_sig(w[i]);
    }
    std::cout << ")\n";
}

// Everything the subcommands share. Seed precedence: --seed flag, then the
// TRUELKIT_SEED environment variable, then 12345.
struct Common {
    std::uint64_t seed = 12345;
    int threads = default_thread_count();
    std::string out_path;
    std::string format = "csv";

    TableFormat table_format() const {
        return format == "ndjson" ? TableFormat::Ndjson : TableFormat::Csv;
    }
    OutputMeta meta(const std::string& command) const { return OutputMeta::now(command, seed); }
};

// Lattice flags shared by `spatial run` and `spatial diagram`.
struct SpatialFlags {
    LatticeConfig cfg;
    std::vector<double> proportions{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    std::vector<double> marks{1.0, 0.8, 0.5};

    LatticeConfig build() const {
        LatticeConfig out = cfg;
        out.proportions = {proportions.at(0), proportions.at(1), proportions.at(2)};
        out.marks = to_marks(marks);
        out.validate();
        return out;
    }
};

void add_spatial_options(CLI::App* cmd, SpatialFlags& flags, bool with_proportions) {
    static const std::map<std::string, SpatialVariant> kVariants{
        {"random", SpatialVariant::Random},
        {"sequential", SpatialVariant::Sequential},
        {"opinion", SpatialVariant::Opinion}};
    static const std::map<std::string, Boundary> kBoundaries{{"periodic", Boundary::Periodic},
                                                             {"bounded", Boundary::Bounded}};
    static const std::map<std::string, LatticeInit> kInits{
        {"iid", LatticeInit::IidDraw}, {"exact", LatticeInit::ExactProportions}};

    cmd->add_option("--side", flags.cfg.side, "lattice side length")->capture_default_str();
    cmd->add_option("--marks", flags.marks, "group hit probabilities a,b,c")
        ->delimiter(',')
        ->expected(3)
        ->capture_default_str();
    if (with_proportions)
        cmd->add_option("--proportions", flags.proportions, "initial group fractions x_A,x_B,x_C")
            ->delimiter(',')
            ->expected(3)
            ->capture_default_str();
    cmd->add_option("--variant", flags.cfg.variant, "encounter rules")
        ->transform(CLI::CheckedTransformer(kVariants, CLI::ignore_case))
        ->default_str("random");
    cmd->add_option("--occupancy", flags.cfg.occupancy, "fraction of sites holding an agent")
        ->capture_default_str();
    cmd->add_option("--boundary", flags.cfg.boundary, "edge handling")
        ->transform(CLI::CheckedTransformer(kBoundaries, CLI::ignore_case))
        ->default_str("periodic");
    cmd->add_option("--init", flags.cfg.init, "iid per-site draw or exact rounded counts")
        ->transform(CLI::CheckedTransformer(kInits, CLI::ignore_case));
    cmd->add_option("--step-cap", flags.cfg.step_cap, "abort a run after this many steps")
        ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    const std::string command_line = join_argv(argc, argv);

    CLI::App app{
        "Exact solvers and seeded simulators for two- and three-player shootouts and "
        "opinion games, their N-player and league generalizations, and lattice collectives."};
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key=value config file; flags override it");

    Common common;
    app.add_option("--seed", common.seed, "master seed for stochastic commands")
        ->envname("TRUELKIT_SEED")
        ->capture_default_str();
    app.add_option("--threads", common.threads, "worker cap (results never depend on it)")
        ->capture_default_str();
    app.add_option("--out", common.out_path, "write the data section to this file");
    app.add_option("--format", common.format, "tabular output format")
        ->transform(CLI::IsMember({"csv", "ndjson"}))
        ->capture_default_str();

    static const std::map<std::string, TurnOrder> kOrders{
        {"random", TurnOrder::Random}, {"sequential", TurnOrder::Sequential}};
    static const std::map<std::string, GameVariant> kGameVariants{
        {"truel", GameVariant::Truel}, {"opinion", GameVariant::Opinion}};

    // ---- duel ------------------------------------------------------------
    auto* duel = app.add_subcommand("duel", "exact survival odds of a two-player shootout");
    duel->fallthrough();
    std::vector<double> duel_marks;
    TurnOrder duel_order = TurnOrder::Random;
    duel->add_option("--marks", duel_marks, "hit probabilities a,b")
        ->required()
        ->delimiter(',')
        ->expected(2);
    duel->add_option("--order", duel_order,
                     "random: fair coin per shot; sequential: the second player fires first")
        ->transform(CLI::CheckedTransformer(kOrders, CLI::ignore_case))
        ->default_str("random");
    duel->callback([&] {
        const Marksmanship a(duel_marks.at(0));
        const Marksmanship b(duel_marks.at(1));
        print_win(duel_order == TurnOrder::Random ? duel_random(a, b) : duel_sequential(a, b));
    });

    // ---- truel solve / truel table ----------------------------------------
    auto* truel = app.add_subcommand("truel", "three-player shootout solvers");
    truel->require_subcommand(1);
    truel->fallthrough();

    auto* solve = truel->add_subcommand("solve", "survival odds of one strategy profile");
    solve->fallthrough();
    std::vector<double> truel_marks;
    TurnOrder truel_order = TurnOrder::Random;
    std::string truel_profile;
    solve->add_option("--marks", truel_marks, "hit probabilities a,b,c")
        ->required()
        ->delimiter(',')
        ->expected(3);
    solve->add_option("--order", truel_order, "shot order: random draw or weakest-first cycle")
        ->transform(CLI::CheckedTransformer(kOrders, CLI::ignore_case))
        ->default_str("random");
    solve->add_option("--profile", truel_profile,
                      "three target letters, 0 = air (default: strongest opponent)");
    solve->callback([&] {
        const MarksTriple marks = to_marks(truel_marks);
        const StrategyProfile profile = truel_profile.empty()
                                            ? StrategyProfile::strongest(marks)
                                            : StrategyProfile::parse(truel_profile);
        print_win(truel_win(TruelSpec{marks, truel_order, profile}));
    });

    auto* table = truel->add_subcommand("table", "survival odds of all 27 strategy profiles");
    table->fallthrough();
    std::vector<double> table_marks;
    TurnOrder table_order = TurnOrder::Random;
    table->add_option("--marks", table_marks, "hit probabilities a,b,c")
        ->required()
        ->delimiter(',')
        ->expected(3);
    table->add_option("--order", table_order, "shot order: random draw or weakest-first cycle")
        ->transform(CLI::CheckedTransformer(kOrders, CLI::ignore_case))
        ->default_str("random");
    table->callback([&] {
        const PayoffTable payoffs =
            PayoffTable::compute(to_marks(table_marks), table_order, GameVariant::Truel);
        Sink sink(common.out_path);
        OutputMeta meta = common.meta(command_line);
        meta.extra.emplace_back("order", turn_order_name(table_order));
        write_metadata(sink.out(), meta);

        int absorbing = 0;
        const TableFormat format = common.table_format();
        if (format == TableFormat::Csv) sink.out() << "profile,P_A,P_B,P_C,status\n";
        for (const StrategyProfile& p : StrategyProfile::all()) {
            const WinDistribution* w = payoffs.win(p);
            absorbing += w != nullptr;
            if (format == TableFormat::Csv) {
                sink.out() << p.name() << ',';
                if (w)
                    sink.out() << format_sig((*w)[0]) << ',' << format_sig((*w)[1]) << ','
                               << format_sig((*w)[2]) << ",absorbing\n";
                else
                    sink.out() << ",,,nonabsorbing\n";
            } else {
                nlohmann::ordered_json row;
                row["profile"] = p.name();
                row["P_A"] = w ? detail::sig_number((*w)[0]) : nlohmann::ordered_json();
                row["P_B"] = w ? detail::sig_number((*w)[1]) : nlohmann::ordered_json();
                row["P_C"] = w ? detail::sig_number((*w)[2]) : nlohmann::ordered_json();
                row["status"] = w ? "absorbing" : "nonabsorbing";
                sink.out() << row.dump() << "\n";
            }
        }
        std::cerr << "27 profiles, " << absorbing << " absorbing\n";
    });

    // ---- nash --------------------------------------------------------------
    auto* nash = app.add_subcommand("nash", "pure-strategy equilibria of one game");
    nash->fallthrough();
    std::vector<double> nash_marks;
    TurnOrder nash_order = TurnOrder::Random;
    GameVariant nash_variant = GameVariant::Truel;
    nash->add_option("--marks", nash_marks, "hit probabilities a,b,c")
        ->required()
        ->delimiter(',')
        ->expected(3);
    nash->add_option("--order", nash_order, "shot order (lethal variant only)")
        ->transform(CLI::CheckedTransformer(kOrders, CLI::ignore_case))
        ->default_str("random");
    nash->add_option("--variant", nash_variant, "lethal shootout or opinion conversion")
        ->transform(CLI::CheckedTransformer(kGameVariants, CLI::ignore_case))
        ->default_str("truel");
    nash->callback([&] {
        const PayoffTable payoffs =
            PayoffTable::compute(to_marks(nash_marks), nash_order, nash_variant);
        const std::vector<StrategyProfile> eqs = nash_equilibria(payoffs);
        if (eqs.empty()) {
            std::cout << "no pure equilibrium\n";
            return;
        }
        for (const StrategyProfile& p : eqs) std::cout << p.name() << "\n";
    });

    // ---- brd ---------------------------------------------------------------
    auto* brd = app.add_subcommand("brd", "best-response path from a starting profile");
    brd->fallthrough();
    std::vector<double> brd_marks;
    TurnOrder brd_order = TurnOrder::Random;
    GameVariant brd_variant = GameVariant::Truel;
    std::string brd_start;
    brd->add_option("--marks", brd_marks, "hit probabilities a,b,c")
        ->required()
        ->delimiter(',')
        ->expected(3);
    brd->add_option("--order", brd_order, "shot order (lethal variant only)")
        ->transform(CLI::CheckedTransformer(kOrders, CLI::ignore_case))
        ->default_str("random");
    brd->add_option("--variant", brd_variant, "lethal shootout or opinion conversion")
        ->transform(CLI::CheckedTransformer(kGameVariants, CLI::ignore_case))
        ->default_str("truel");
    brd->add_option("--start", brd_start, "starting profile, e.g. CCB or BA0")->required();
    brd->callback([&] {
        const PayoffTable payoffs =
            PayoffTable::compute(to_marks(brd_marks), brd_order, brd_variant);
        const BestResponsePath path =
            best_response_path(payoffs, StrategyProfile::parse(brd_start));
        for (std::size_t i = 0; i < path.profiles.size(); ++i) {
            if (i) std::cout << " -> ";
            std::cout << path.profiles[i].name();
        }
        std::cout << (path.cycled ? " [cycle]\n" : "\n");
    });

    // ---- opinion -----------------------------------------------------------
    auto* opinion = app.add_subcommand(
        "opinion", "odds of each opinion prevailing from one holder per opinion");
    opinion->fallthrough();
    std::vector<double> opinion_marks;
    std::string opinion_profile;
    opinion->add_option("--marks", opinion_marks, "conviction strengths a,b,c")
        ->required()
        ->delimiter(',')
        ->expected(3);
    opinion->add_option("--profile", opinion_profile,
                        "three-letter per-person targeting override, 0 = air");
    opinion->callback([&] {
        const MarksTriple marks = to_marks(opinion_marks);
        print_win(opinion_profile.empty()
                      ? opinion_win(marks)
                      : opinion_profile_win(marks, StrategyProfile::parse(opinion_profile)));
    });

    // ---- regions -----------------------------------------------------------
    auto* regions = app.add_subcommand(
        "regions", "sweep the (b,c) square at a=1 and report the selected equilibrium");
    regions->fallthrough();
    TurnOrder regions_order = TurnOrder::Random;
    GameVariant regions_variant = GameVariant::Truel;
    double regions_step = 0.01;
    regions->add_option("--order", regions_order, "shot order (lethal variant only)")
        ->transform(CLI::CheckedTransformer(kOrders, CLI::ignore_case))
        ->default_str("random");
    regions->add_option("--variant", regions_variant, "lethal shootout or opinion conversion")
        ->transform(CLI::CheckedTransformer(kGameVariants, CLI::ignore_case))
        ->default_str("truel");
    regions->add_option("--step", regions_step, "grid spacing in (0,1)")->capture_default_str();
    regions->callback([&] {
        const RegionMap map = region_map(regions_order, regions_variant, regions_step,
                                         common.threads);
        Sink sink(common.out_path);
        OutputMeta meta = common.meta(command_line);
        meta.extra.emplace_back("order", turn_order_name(regions_order));
        meta.extra.emplace_back("variant", game_variant_name(regions_variant));
        meta.extra.emplace_back("step", format_sig(regions_step));
        write_metadata(sink.out(), meta);
        write_region_map(sink.out(), map, common.table_format());
        int disagree = 0;
        for (const RegionPoint& pt : map.points) disagree += pt.equilibria_disagree;
        std::cerr << map.points.size() << " points, " << disagree
                  << " with disagreeing equilibria\n";
    });

    // ---- league ------------------------------------------------------------
    auto* lg = app.add_subcommand(
        "league", "round-robin of all marksmanship triples drawn from a population");
    lg->fallthrough();
    static const std::map<std::string, LeagueVariant> kLeagueVariants{
        {"random", LeagueVariant::Random},
        {"sequential", LeagueVariant::Sequential},
        {"opinion", LeagueVariant::Opinion}};
    static const std::map<std::string, LeagueMode> kLeagueModes{
        {"expected", LeagueMode::Expected}, {"sampled", LeagueMode::Sampled}};
    static const std::map<std::string, PopulationDraw> kDraws{
        {"grid", PopulationDraw::EvenGrid}, {"uniform", PopulationDraw::UniformRandom}};
    LeagueVariant lg_variant = LeagueVariant::Random;
    LeagueMode lg_mode = LeagueMode::Expected;
    PopulationDraw lg_draw = PopulationDraw::EvenGrid;
    int lg_players = 100;
    int lg_bins = 20;
    lg->add_option("--variant", lg_variant, "game played by each triple")
        ->transform(CLI::CheckedTransformer(kLeagueVariants, CLI::ignore_case))
        ->default_str("random");
    lg->add_option("--mode", lg_mode, "exact expected wins or one sampled game per triple")
        ->transform(CLI::CheckedTransformer(kLeagueModes, CLI::ignore_case))
        ->default_str("expected");
    lg->add_option("--draw", lg_draw, "population marksmanships: even grid or uniform draws")
        ->transform(CLI::CheckedTransformer(kDraws, CLI::ignore_case))
        ->default_str("grid");
    lg->add_option("--players", lg_players, "population size")->capture_default_str();
    lg->add_option("--bins", lg_bins, "marksmanship bins")->capture_default_str();
    lg->callback([&] {
        const LeagueResult result = league(lg_players, lg_variant, lg_mode, lg_bins, lg_draw,
                                           SeedSpec{common.seed}, common.threads);
        Sink sink(common.out_path);
        OutputMeta meta = common.meta(command_line);
        meta.extra.emplace_back("variant", league_variant_name(lg_variant));
        meta.extra.emplace_back("players", std::to_string(lg_players));
        meta.extra.emplace_back("bins", std::to_string(lg_bins));
        write_metadata(sink.out(), meta);
        write_league(sink.out(), result, common.table_format());
        const int peak = result.peak_bin();
        std::cerr << "peak bin [" << format_sig(result.bin_lo(peak)) << ","
                  << format_sig(result.bin_hi(peak)) << ")\n";
    });

    // ---- nuel --------------------------------------------------------------
    auto* nuel = app.add_subcommand(
        "nuel", "marksmanship-by-rank histogram over simulated N-player shootouts");
    nuel->fallthrough();
    int nuel_players = 4;
    std::uint64_t nuel_games = 1000000;
    int nuel_bins = 20;
    nuel->add_option("--players", nuel_players, "players per game")->capture_default_str();
    nuel->add_option("--games", nuel_games, "games to simulate")->capture_default_str();
    nuel->add_option("--bins", nuel_bins, "marksmanship bins")->capture_default_str();
    nuel->callback([&] {
        const RankHistogram hist = nuel_tournament(nuel_players, nuel_games, nuel_bins,
                                                   SeedSpec{common.seed}, common.threads);
        Sink sink(common.out_path);
        OutputMeta meta = common.meta(command_line);
        meta.extra.emplace_back("players", std::to_string(nuel_players));
        meta.extra.emplace_back("games", std::to_string(nuel_games));
        meta.extra.emplace_back("bins", std::to_string(nuel_bins));
        write_metadata(sink.out(), meta);
        write_rank_histogram(sink.out(), hist, common.table_format());
        std::cerr << "winner-mark mode bin center "
                  << format_sig(hist.bin_center(hist.mode_bin(1))) << "\n";
    });

    // ---- spatial run / spatial diagram --------------------------------------
    auto* spatial = app.add_subcommand("spatial", "lattice collectives");
    spatial->require_subcommand(1);
    spatial->fallthrough();

    auto* srun = spatial->add_subcommand("run", "simulate lattice runs to a single-group end");
    srun->fallthrough();
    SpatialFlags srun_flags;
    int srun_runs = 1;
    std::uint64_t srun_snapshot_every = 0;
    std::string srun_snapshot_prefix;
    add_spatial_options(srun, srun_flags, true);
    srun->add_option("--runs", srun_runs, "independent runs (substream per run)")
        ->capture_default_str();
    srun->add_option("--snapshot-every", srun_snapshot_every,
                     "write a pixmap every this many steps (0 = never)");
    srun->add_option("--snapshot-prefix", srun_snapshot_prefix,
                     "path prefix for <prefix>_r<run>_<step>.ppm snapshot files");
    srun->callback([&] {
        if (srun_runs < 1) throw std::invalid_argument("--runs must be at least 1");
        LatticeConfig cfg = srun_flags.build();
        cfg.snapshot_interval = srun_snapshot_prefix.empty() ? 0 : srun_snapshot_every;

        Sink sink(common.out_path);
        OutputMeta meta = common.meta(command_line);
        meta.extra.emplace_back("variant", spatial_variant_name(cfg.variant));
        meta.extra.emplace_back("side", std::to_string(cfg.side));
        meta.extra.emplace_back("runs", std::to_string(srun_runs));
        write_metadata(sink.out(), meta);

        const TableFormat format = common.table_format();
        if (format == TableFormat::Csv)
            sink.out() << "run,winner,steps,survivors_A,survivors_B,survivors_C\n";
        std::array<int, 3> tally{0, 0, 0};
        const SeedSpec seed{common.seed};
        for (int r = 0; r < srun_runs; ++r) {
            SnapshotSink snapshot;
            if (!srun_snapshot_prefix.empty() && cfg.snapshot_interval > 0) {
                snapshot = [&, r](const Lattice& lat, std::uint64_t step) {
                    char name[512];
                    std::snprintf(name, sizeof name, "%s_r%03d_%09llu.ppm",
                                  srun_snapshot_prefix.c_str(), r,
                                  static_cast<unsigned long long>(step));
                    std::ofstream frame(name);
                    if (!frame)
                        throw std::invalid_argument(std::string("cannot open snapshot file: ") +
                                                    name);
                    write_ppm(frame, lat);
                };
            }
            auto rng = seed.stream(static_cast<std::uint64_t>(r));
            const SpatialRunResult res = spatial_run(cfg, rng, snapshot);
            ++tally[static_cast<std::size_t>(res.winner)];
            if (format == TableFormat::Csv) {
                sink.out() << r << ',' << player_letter(static_cast<PlayerId>(res.winner)) << ','
                           << res.steps << ',' << res.census[0] << ',' << res.census[1] << ','
                           << res.census[2] << "\n";
            } else {
                nlohmann::ordered_json row;
                row["run"] = r;
                row["winner"] = std::string(1, player_letter(static_cast<PlayerId>(res.winner)));
                row["steps"] = res.steps;
                row["survivors_A"] = res.census[0];
                row["survivors_B"] = res.census[1];
                row["survivors_C"] = res.census[2];
                sink.out() << row.dump() << "\n";
            }
        }
        std::cerr << "wins A=" << tally[0] << " B=" << tally[1] << " C=" << tally[2] << "\n";
    });

    auto* sdia = spatial->add_subcommand(
        "diagram", "win frequencies over the grid of initial proportions");
    sdia->fallthrough();
    SpatialFlags sdia_flags;
    sdia_flags.cfg.init = LatticeInit::ExactProportions;  // small lattices need exact counts
    double sdia_step = 0.1;
    int sdia_runs = 200;
    add_spatial_options(sdia, sdia_flags, false);
    sdia->add_option("--step", sdia_step, "simplex grid spacing in (0,1)")->capture_default_str();
    sdia->add_option("--runs", sdia_runs, "runs per proportion point")->capture_default_str();
    sdia->callback([&] {
        const SimplexDiagram diagram = simplex_diagram(sdia_flags.build(), sdia_step, sdia_runs,
                                                       SeedSpec{common.seed}, common.threads);
        Sink sink(common.out_path);
        OutputMeta meta = common.meta(command_line);
        meta.extra.emplace_back("variant", spatial_variant_name(sdia_flags.cfg.variant));
        meta.extra.emplace_back("side", std::to_string(sdia_flags.cfg.side));
        meta.extra.emplace_back("step", format_sig(sdia_step));
        meta.extra.emplace_back("runs", std::to_string(sdia_runs));
        write_metadata(sink.out(), meta);
        write_simplex(sink.out(), diagram, common.table_format());

        std::array<int, 3> favorites{0, 0, 0};
        int timeouts = 0;
        for (const SimplexPoint& pt : diagram.points) {
            ++favorites[static_cast<std::size_t>(pt.favorite)];
            timeouts += pt.timeouts;
        }
        std::cerr << diagram.points.size() << " points, favorites A=" << favorites[0]
                  << " B=" << favorites[1] << " C=" << favorites[2] << ", " << timeouts
                  << " timed-out runs\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const NonAbsorbingError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const TimeoutError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
