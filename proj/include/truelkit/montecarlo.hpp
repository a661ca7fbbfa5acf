#pragma once

// Stochastic play of every game the library solves exactly, plus the two
// population studies built on top: the all-triplets league and the N-player
// free-for-all with uniformly drawn marksmanships.
//
// Determinism policy: every driver chops its games into fixed-size blocks and
// gives block i the rng substream i of the caller's SeedSpec, so results are
// identical for every thread count. Integer tallies merge exactly; real
// tallies are reduced in block order.

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <numeric>
#include <span>
#include <unordered_map>
#include <vector>

#include "truelkit/core.hpp"
#include "truelkit/equilibrium.hpp"
#include "truelkit/games.hpp"
#include "truelkit/parallel.hpp"
#include "truelkit/rng.hpp"

namespace truelkit {

// One shot opportunity: `target` is -1 for a deliberate air shot; `success`
// means the target died (lethal games) or switched opinion (opinion games).
struct GameEvent {
    PlayerId actor;
    int target;
    bool success;
};

// Full record of one simulated game.
struct GameTrace {
    std::vector<GameEvent> events;
    std::size_t winner = 0;
};

namespace detail {

struct NullSink {
    void operator()(PlayerId, int, bool) const {}
};

inline bool bernoulli(std::mt19937_64& rng, double p) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

[[noreturn]] inline void throw_step_cap(std::uint64_t cap) {
    throw TimeoutError("game exceeded the step cap of " + std::to_string(cap));
}

// Duel: only two players, each always aiming at the other.
template <typename Sink>
std::size_t run_duel(const DuelSpec& spec, std::mt19937_64& rng, std::uint64_t cap,
                     Sink&& sink) {
    const std::array<double, 2> marks{spec.a, spec.b};
    int turn = 1; // sequential convention: B first
    for (std::uint64_t step = 0; step < cap; ++step) {
        const int shooter = spec.order == TurnOrder::Random
                                ? static_cast<int>(std::uniform_int_distribution<int>(0, 1)(rng))
                                : turn;
        const int target = 1 - shooter;
        const bool hit = bernoulli(rng, marks[static_cast<std::size_t>(shooter)]);
        sink(shooter, target, hit);
        if (hit) return static_cast<std::size_t>(shooter);
        turn = target;
    }
    throw_step_cap(cap);
}

// Truel: random or sequential shooting order, profile at the 3-alive stage,
// forced targeting at the 2-alive stage.
template <typename Sink>
std::size_t run_truel(const TruelSpec& spec, std::mt19937_64& rng, std::uint64_t cap,
                      Sink&& sink) {
    std::array<bool, 3> alive{true, true, true};
    int alive_count = 3;
    PlayerId turn = 2; // sequential cycle starts at C
    auto nth_alive = [&](int n) {
        for (PlayerId p = 0;; ++p)
            if (alive[static_cast<std::size_t>(p)] && n-- == 0) return p;
    };
    for (std::uint64_t step = 0; step < cap; ++step) {
        PlayerId shooter;
        if (spec.order == TurnOrder::Random) {
            shooter = nth_alive(std::uniform_int_distribution<int>(0, alive_count - 1)(rng));
        } else {
            while (!alive[static_cast<std::size_t>(turn)]) turn = detail::cycle_next(turn);
            shooter = turn;
            turn = detail::cycle_next(turn);
        }

        int target = -1;
        if (alive_count == 3) {
            const Strategy s = spec.profile.of(shooter);
            if (!s.is_air()) target = s.target_id();
        } else {
            for (PlayerId p = 0; p < 3; ++p)
                if (alive[static_cast<std::size_t>(p)] && p != shooter) target = p;
        }
        if (target < 0) {
            sink(shooter, -1, false);
            continue;
        }
        const bool hit = bernoulli(rng, spec.marks[static_cast<std::size_t>(shooter)]);
        sink(shooter, target, hit);
        if (hit) {
            alive[static_cast<std::size_t>(target)] = false;
            if (--alive_count == 1) return static_cast<std::size_t>(nth_alive(0));
        }
    }
    throw_step_cap(cap);
}

// Opinion game over named persons; the profile binds only while all three
// opinions are distinct, afterwards speakers aim at the strongest opposing
// opinion and convert a uniformly chosen holder.
template <typename Sink>
std::size_t run_opinion(const MarksTriple& marks, const StrategyProfile& profile,
                        std::mt19937_64& rng, std::uint64_t cap, Sink&& sink) {
    std::array<int, 3> opinion{0, 1, 2};
    for (std::uint64_t step = 0; step < cap; ++step) {
        if (opinion[0] == opinion[1] && opinion[1] == opinion[2])
            return static_cast<std::size_t>(opinion[0]);
        const PlayerId person = std::uniform_int_distribution<int>(0, 2)(rng);
        const int mine = opinion[static_cast<std::size_t>(person)];
        std::array<int, 3> counts{0, 0, 0};
        for (int o : opinion) ++counts[static_cast<std::size_t>(o)];

        int target = -1;
        if (counts[0] == 1 && counts[1] == 1 && counts[2] == 1) {
            const Strategy s = profile.of(person);
            if (!s.is_air()) target = s.target_id();
        } else {
            const int opp = strongest_opposing_opinion(mine, counts, marks);
            int holders = 0;
            for (PlayerId q = 0; q < 3; ++q)
                if (opinion[static_cast<std::size_t>(q)] == opp) ++holders;
            int pick = std::uniform_int_distribution<int>(0, holders - 1)(rng);
            for (PlayerId q = 0; q < 3; ++q)
                if (opinion[static_cast<std::size_t>(q)] == opp && pick-- == 0) target = q;
        }
        if (target < 0) {
            sink(person, -1, false);
            continue;
        }
        const bool converted = bernoulli(rng, marks[static_cast<std::size_t>(mine)]);
        sink(person, target, converted);
        if (converted) opinion[static_cast<std::size_t>(target)] = mine;
    }
    throw_step_cap(cap);
}

// N-player free-for-all: a uniformly chosen live player shoots the best live
// opponent each step. Tracking the two best live players keeps each shot
// O(1); a kill advances the cached leaders along the sorted order.
template <typename Sink>
std::size_t run_nuel(std::span<const double> marks, std::mt19937_64& rng, std::uint64_t cap,
                     Sink&& sink, std::vector<PlayerId>* elimination_order = nullptr) {
    const int n = static_cast<int>(marks.size());
    if (n < 2) throw std::invalid_argument("an n-uel needs at least 2 players");
    std::vector<PlayerId> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](PlayerId l, PlayerId r) {
        const double ml = marks[static_cast<std::size_t>(l)];
        const double mr = marks[static_cast<std::size_t>(r)];
        return ml != mr ? ml > mr : l < r;
    });
    std::vector<bool> alive(static_cast<std::size_t>(n), true);
    std::vector<PlayerId> pool(order.begin(), order.end()); // uniform-pick bag
    int top1 = 0, top2 = 1;                                 // indices into `order`
    auto advance = [&](int from) {
        while (!alive[static_cast<std::size_t>(order[static_cast<std::size_t>(from)])]) ++from;
        return from;
    };

    for (std::uint64_t step = 0; step < cap; ++step) {
        const std::size_t slot = static_cast<std::size_t>(
            std::uniform_int_distribution<int>(0, static_cast<int>(pool.size()) - 1)(rng));
        const PlayerId shooter = pool[slot];
        const PlayerId target = shooter == order[static_cast<std::size_t>(top1)]
                                    ? order[static_cast<std::size_t>(top2)]
                                    : order[static_cast<std::size_t>(top1)];
        const bool hit = bernoulli(rng, marks[static_cast<std::size_t>(shooter)]);
        sink(shooter, target, hit);
        if (!hit) continue;

        alive[static_cast<std::size_t>(target)] = false;
        if (elimination_order) elimination_order->push_back(target);
        for (std::size_t i = 0; i < pool.size(); ++i)
            if (pool[i] == target) {
                pool[i] = pool.back();
                pool.pop_back();
                break;
            }
        if (pool.size() == 1) {
            if (elimination_order) elimination_order->push_back(pool[0]);
            return static_cast<std::size_t>(pool[0]);
        }
        top1 = advance(top1);
        top2 = advance(std::max(top2, top1 + 1));
    }
    throw_step_cap(cap);
}

// Deterministic block tally: play `games` games, counting winners, with one
// substream per fixed block of games.
template <typename PlayOne>
std::vector<std::uint64_t> outcome_counts(PlayOne&& play_one, std::size_t outcomes,
                                          std::uint64_t games, SeedSpec seed, int threads,
                                          std::uint64_t block = std::uint64_t{1} << 16) {
    const std::uint64_t blocks = (games + block - 1) / block;
    std::vector<std::atomic<std::uint64_t>> tally(outcomes);
    parallel_for(static_cast<std::size_t>(blocks), threads, [&](std::size_t bi) {
        std::mt19937_64 rng = seed.stream(bi);
        const std::uint64_t begin = bi * block;
        const std::uint64_t end = std::min(games, begin + block);
        std::vector<std::uint64_t> local(outcomes, 0);
        for (std::uint64_t g = begin; g < end; ++g) ++local[play_one(rng)];
        for (std::size_t i = 0; i < outcomes; ++i)
            tally[i].fetch_add(local[i], std::memory_order_relaxed);
    });
    std::vector<std::uint64_t> out(outcomes);
    for (std::size_t i = 0; i < outcomes; ++i) out[i] = tally[i].load();
    return out;
}

inline WinDistribution counts_to_frequencies(const std::vector<std::uint64_t>& counts,
                                             std::uint64_t games) {
    std::vector<double> p;
    p.reserve(counts.size());
    for (std::uint64_t c : counts) p.push_back(static_cast<double>(c) / static_cast<double>(games));
    return WinDistribution(std::move(p), 1e-9);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Single-game traces

inline GameTrace simulate_duel(const DuelSpec& spec, std::mt19937_64& rng,
                               std::uint64_t cap = kDefaultStepCap) {
    GameTrace trace;
    auto sink = [&](PlayerId a, int t, bool s) { trace.events.push_back({a, t, s}); };
    trace.winner = detail::run_duel(spec, rng, cap, sink);
    return trace;
}

inline GameTrace simulate_truel(const TruelSpec& spec, std::mt19937_64& rng,
                                std::uint64_t cap = kDefaultStepCap) {
    GameTrace trace;
    auto sink = [&](PlayerId a, int t, bool s) { trace.events.push_back({a, t, s}); };
    trace.winner = detail::run_truel(spec, rng, cap, sink);
    return trace;
}

inline GameTrace simulate_opinion(const MarksTriple& marks, const StrategyProfile& profile,
                                  std::mt19937_64& rng, std::uint64_t cap = kDefaultStepCap) {
    GameTrace trace;
    auto sink = [&](PlayerId a, int t, bool s) { trace.events.push_back({a, t, s}); };
    trace.winner = detail::run_opinion(marks, profile, rng, cap, sink);
    return trace;
}

inline GameTrace simulate_nuel(std::span<const double> marks, std::mt19937_64& rng,
                               std::uint64_t cap = kDefaultStepCap,
                               std::vector<PlayerId>* elimination_order = nullptr) {
    GameTrace trace;
    auto sink = [&](PlayerId a, int t, bool s) { trace.events.push_back({a, t, s}); };
    trace.winner = detail::run_nuel(marks, rng, cap, sink, elimination_order);
    return trace;
}

// ---------------------------------------------------------------------------
// Empirical win frequencies

inline WinDistribution mc_duel_wins(const DuelSpec& spec, std::uint64_t games, SeedSpec seed,
                                    int threads = 1, std::uint64_t cap = kDefaultStepCap) {
    auto play = [&](std::mt19937_64& rng) {
        return detail::run_duel(spec, rng, cap, detail::NullSink{});
    };
    return detail::counts_to_frequencies(detail::outcome_counts(play, 2, games, seed, threads),
                                         games);
}

inline WinDistribution mc_truel_wins(const TruelSpec& spec, std::uint64_t games, SeedSpec seed,
                                     int threads = 1, std::uint64_t cap = kDefaultStepCap) {
    auto play = [&](std::mt19937_64& rng) {
        return detail::run_truel(spec, rng, cap, detail::NullSink{});
    };
    return detail::counts_to_frequencies(detail::outcome_counts(play, 3, games, seed, threads),
                                         games);
}

inline WinDistribution mc_opinion_wins(const MarksTriple& marks, const StrategyProfile& profile,
                                       std::uint64_t games, SeedSpec seed, int threads = 1,
                                       std::uint64_t cap = kDefaultStepCap) {
    auto play = [&](std::mt19937_64& rng) {
        return detail::run_opinion(marks, profile, rng, cap, detail::NullSink{});
    };
    return detail::counts_to_frequencies(detail::outcome_counts(play, 3, games, seed, threads),
                                         games);
}

// ---------------------------------------------------------------------------
// N-uel: exact solve and marksmanship-by-rank tournaments

// Exact win probabilities under best-live-opponent targeting and uniform
// shooter choice. Recursion over alive sets; only the best or second-best
// live player can die, so just O(N^2) sets are reachable and sizes well past
// the three-player case stay cheap.
inline std::vector<double> nuel_exact_win(std::span<const double> marks) {
    const int n = static_cast<int>(marks.size());
    if (n < 1 || n > 63) throw std::invalid_argument("n-uel solve supports 1..63 players");
    for (double m : marks)
        if (!(m >= 0.0 && m <= 1.0))
            throw std::invalid_argument("marksmanship must lie in [0,1]");
    if (n == 1) return {1.0};

    std::vector<PlayerId> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](PlayerId l, PlayerId r) {
        const double ml = marks[static_cast<std::size_t>(l)];
        const double mr = marks[static_cast<std::size_t>(r)];
        return ml != mr ? ml > mr : l < r;
    });

    std::unordered_map<std::uint64_t, std::vector<double>> memo;
    auto solve = [&](auto&& self, std::uint64_t mask) -> const std::vector<double>& {
        auto hit = memo.find(mask);
        if (hit != memo.end()) return hit->second;

        std::vector<double> p(static_cast<std::size_t>(n), 0.0);
        std::vector<PlayerId> alive;
        for (PlayerId x : order)
            if (mask & (std::uint64_t{1} << x)) alive.push_back(x); // sorted by mark
        if (alive.size() == 1) {
            p[static_cast<std::size_t>(alive[0])] = 1.0;
            return memo.emplace(mask, std::move(p)).first->second;
        }

        const double pick = 1.0 / static_cast<double>(alive.size());
        double exit_mass = 0.0;
        for (PlayerId shooter : alive) {
            const double m = marks[static_cast<std::size_t>(shooter)];
            if (m == 0.0) continue;
            const PlayerId target = shooter == alive[0] ? alive[1] : alive[0];
            const std::vector<double>& rest =
                self(self, mask & ~(std::uint64_t{1} << target));
            for (int x = 0; x < n; ++x) p[static_cast<std::size_t>(x)] += pick * m * rest[static_cast<std::size_t>(x)];
            exit_mass += pick * m;
        }
        if (exit_mass <= 0.0) {
            std::string who;
            for (PlayerId x : alive) who += std::to_string(x) + " ";
            throw NonAbsorbingError("no live player can hit; alive set { " + who +
                                    "} never shrinks");
        }
        for (double& x : p) x /= exit_mass;
        return memo.emplace(mask, std::move(p)).first->second;
    };

    const std::uint64_t full =
        n == 63 ? ~std::uint64_t{0} >> 1 : (std::uint64_t{1} << n) - 1;
    return solve(solve, full);
}

// Histogram of marksmanship by final rank (1 = winner, `players` = first
// eliminated) over equal-width bins of [0, 1].
class RankHistogram {
public:
    RankHistogram(int players, int bins) : players_(players), bins_(bins) {
        if (players < 2 || bins < 1)
            throw std::invalid_argument("rank histogram needs >=2 players and >=1 bin");
        counts_.assign(static_cast<std::size_t>(players) * static_cast<std::size_t>(bins), 0);
    }

    int players() const { return players_; }
    int bins() const { return bins_; }

    int bin_of(double mark) const {
        const int b = static_cast<int>(mark * bins_);
        return std::min(bins_ - 1, std::max(0, b));
    }
    double bin_lo(int bin) const { return static_cast<double>(bin) / bins_; }
    double bin_hi(int bin) const { return static_cast<double>(bin + 1) / bins_; }
    double bin_center(int bin) const { return (bin + 0.5) / bins_; }

    void add(int rank, double mark) { ++counts_[index(rank, bin_of(mark))]; }
    void add_count(int rank, int bin, std::uint64_t count) { counts_[index(rank, bin)] += count; }
    std::uint64_t count(int rank, int bin) const { return counts_[index(rank, bin)]; }

    std::uint64_t total(int rank) const {
        std::uint64_t out = 0;
        for (int b = 0; b < bins_; ++b) out += count(rank, b);
        return out;
    }

    // Fullest bin for a rank; ties to the lowest bin.
    int mode_bin(int rank) const {
        int best = 0;
        for (int b = 1; b < bins_; ++b)
            if (count(rank, b) > count(rank, best)) best = b;
        return best;
    }

private:
    std::size_t index(int rank, int bin) const {
        if (rank < 1 || rank > players_ || bin < 0 || bin >= bins_)
            throw std::invalid_argument("rank or bin out of range");
        return static_cast<std::size_t>(rank - 1) * static_cast<std::size_t>(bins_) +
               static_cast<std::size_t>(bin);
    }

    int players_;
    int bins_;
    std::vector<std::uint64_t> counts_;
};

// Plays `games` n-uels with fresh uniform marksmanships each game and records
// which marksmanship reached which final rank.
inline RankHistogram nuel_tournament(int players, std::uint64_t games, int bins, SeedSpec seed,
                                     int threads = 1, std::uint64_t cap = kDefaultStepCap) {
    RankHistogram hist(players, bins);
    const std::uint64_t block = std::uint64_t{1} << 12;
    const std::uint64_t blocks = (games + block - 1) / block;
    std::vector<std::atomic<std::uint64_t>> tally(
        static_cast<std::size_t>(players) * static_cast<std::size_t>(bins));

    parallel_for(static_cast<std::size_t>(blocks), threads, [&](std::size_t bi) {
        std::mt19937_64 rng = seed.stream(bi);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const std::uint64_t begin = bi * block;
        const std::uint64_t end = std::min(games, begin + block);
        std::vector<std::uint64_t> local(tally.size(), 0);
        std::vector<double> marks(static_cast<std::size_t>(players));
        std::vector<PlayerId> elim;
        for (std::uint64_t g = begin; g < end; ++g) {
            for (double& m : marks) m = u(rng);
            elim.clear();
            detail::run_nuel(std::span<const double>(marks), rng, cap, detail::NullSink{},
                             &elim);
            // elim lists deaths in order, winner appended last.
            for (std::size_t k = 0; k < elim.size(); ++k) {
                const int rank = players - static_cast<int>(k);
                const int bin = hist.bin_of(marks[static_cast<std::size_t>(elim[k])]);
                ++local[static_cast<std::size_t>(rank - 1) * static_cast<std::size_t>(bins) +
                        static_cast<std::size_t>(bin)];
            }
        }
        for (std::size_t i = 0; i < tally.size(); ++i)
            tally[i].fetch_add(local[i], std::memory_order_relaxed);
    });

    for (int rank = 1; rank <= players; ++rank)
        for (int b = 0; b < bins; ++b)
            hist.add_count(rank, b,
                           tally[static_cast<std::size_t>(rank - 1) *
                                     static_cast<std::size_t>(bins) +
                                 static_cast<std::size_t>(b)]
                               .load());
    return hist;
}

// ---------------------------------------------------------------------------
// Leagues: every triplet from a population of marksmanships plays a truel

enum class LeagueVariant { Random, Sequential, Opinion };
enum class LeagueMode { Expected, Sampled };
enum class PopulationDraw { EvenGrid, UniformRandom };

inline const char* league_variant_name(LeagueVariant v) {
    switch (v) {
        case LeagueVariant::Random: return "random";
        case LeagueVariant::Sequential: return "sequential";
        default: return "opinion";
    }
}

struct LeagueResult {
    LeagueVariant variant;
    LeagueMode mode;
    std::vector<double> marks;              // per player
    std::vector<double> wins;               // per player (integers when sampled)
    std::uint64_t triplets;
    int bins;
    std::vector<double> bin_mean_wins;      // mean wins per marksmanship bin
    std::vector<std::uint64_t> bin_population;

    double bin_lo(int bin) const { return static_cast<double>(bin) / bins; }
    double bin_hi(int bin) const { return static_cast<double>(bin + 1) / bins; }

    // Fullest-scoring bin; ties to the lowest.
    int peak_bin() const {
        int best = 0;
        for (int b = 1; b < bins; ++b)
            if (bin_mean_wins[static_cast<std::size_t>(b)] >
                bin_mean_wins[static_cast<std::size_t>(best)])
                best = b;
        return best;
    }
};

namespace detail {

// Map a triplet onto labels A >= B >= C by marksmanship and play it. Every
// player uses the best-opponent strategy; sequential order then means the
// weakest shoots first.
inline WinDistribution league_triplet_expected(LeagueVariant variant,
                                               const std::array<double, 3>& m) {
    const MarksTriple marks{m[0], m[1], m[2]};
    if (variant == LeagueVariant::Opinion) return opinion_win(marks);
    const TurnOrder order =
        variant == LeagueVariant::Random ? TurnOrder::Random : TurnOrder::Sequential;
    return truel_win(TruelSpec{marks, order, StrategyProfile::strongest(marks)});
}

inline std::size_t league_triplet_sampled(LeagueVariant variant, const std::array<double, 3>& m,
                                          std::mt19937_64& rng, std::uint64_t cap) {
    const MarksTriple marks{m[0], m[1], m[2]};
    if (variant == LeagueVariant::Opinion)
        return run_opinion(marks, StrategyProfile::strongest(marks), rng, cap, NullSink{});
    const TurnOrder order =
        variant == LeagueVariant::Random ? TurnOrder::Random : TurnOrder::Sequential;
    return run_truel(TruelSpec{marks, order, StrategyProfile::strongest(marks)}, rng, cap,
                     NullSink{});
}

} // namespace detail

// Runs the full round-robin of triplets from a population of `population`
// marksmanships: the even grid (i + 0.5) / population, or fresh uniform
// draws. Expected mode credits each member with exact win probabilities;
// sampled mode plays each triplet once.
inline LeagueResult league(int population, LeagueVariant variant, LeagueMode mode, int bins,
                           PopulationDraw draw, SeedSpec seed, int threads = 1,
                           std::uint64_t cap = kDefaultStepCap) {
    if (population < 3) throw std::invalid_argument("a league needs at least 3 players");
    if (bins < 1) throw std::invalid_argument("a league needs at least 1 bin");
    const std::size_t m = static_cast<std::size_t>(population);

    std::vector<double> marks(m);
    if (draw == PopulationDraw::EvenGrid) {
        for (std::size_t i = 0; i < m; ++i)
            marks[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(population);
    } else {
        // A substream far outside the block range keeps the draw independent
        // of the per-block game streams.
        std::mt19937_64 rng = seed.stream(std::uint64_t{1} << 63);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (double& x : marks) x = u(rng);
    }

    std::vector<std::array<int, 3>> triplets;
    triplets.reserve(m * (m - 1) * (m - 2) / 6);
    for (int i = 0; i < population; ++i)
        for (int j = i + 1; j < population; ++j)
            for (int k = j + 1; k < population; ++k) triplets.push_back({i, j, k});

    const std::size_t block = 4096;
    const std::size_t blocks = (triplets.size() + block - 1) / block;
    std::vector<std::vector<double>> partial(blocks);

    parallel_for(blocks, threads, [&](std::size_t bi) {
        std::mt19937_64 rng = seed.stream(bi);
        std::vector<double> wins(m, 0.0);
        const std::size_t begin = bi * block;
        const std::size_t end = std::min(triplets.size(), begin + block);
        for (std::size_t t = begin; t < end; ++t) {
            std::array<int, 3> ids = triplets[t];
            // Descending marksmanship maps onto labels A, B, C.
            std::sort(ids.begin(), ids.end(), [&](int l, int r) {
                const double ml = marks[static_cast<std::size_t>(l)];
                const double mr = marks[static_cast<std::size_t>(r)];
                return ml != mr ? ml > mr : l < r;
            });
            const std::array<double, 3> ms{marks[static_cast<std::size_t>(ids[0])],
                                           marks[static_cast<std::size_t>(ids[1])],
                                           marks[static_cast<std::size_t>(ids[2])]};
            if (mode == LeagueMode::Expected) {
                const WinDistribution w = detail::league_triplet_expected(variant, ms);
                for (int x = 0; x < 3; ++x)
                    wins[static_cast<std::size_t>(ids[static_cast<std::size_t>(x)])] +=
                        w[static_cast<std::size_t>(x)];
            } else {
                const std::size_t winner = detail::league_triplet_sampled(variant, ms, rng, cap);
                wins[static_cast<std::size_t>(ids[winner])] += 1.0;
            }
        }
        partial[bi] = std::move(wins);
    });

    LeagueResult out{variant, mode, std::move(marks), std::vector<double>(m, 0.0),
                     triplets.size(), bins, std::vector<double>(static_cast<std::size_t>(bins), 0.0),
                     std::vector<std::uint64_t>(static_cast<std::size_t>(bins), 0)};
    for (const std::vector<double>& p : partial)
        for (std::size_t i = 0; i < m; ++i) out.wins[i] += p[i];

    for (std::size_t i = 0; i < m; ++i) {
        const int b = std::min(bins - 1, std::max(0, static_cast<int>(out.marks[i] * bins)));
        out.bin_mean_wins[static_cast<std::size_t>(b)] += out.wins[i];
        ++out.bin_population[static_cast<std::size_t>(b)];
    }
    for (int b = 0; b < bins; ++b)
        if (out.bin_population[static_cast<std::size_t>(b)] > 0)
            out.bin_mean_wins[static_cast<std::size_t>(b)] /=
                static_cast<double>(out.bin_population[static_cast<std::size_t>(b)]);
    return out;
}

} // namespace truelkit
