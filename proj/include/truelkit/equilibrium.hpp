#pragma once

// Strategic analysis of the three-alive stage: payoff tables over the 27
// profiles, pure Nash equilibria, best-response dynamics, and (b, c)
// parameter-plane region maps with a = 1.

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "truelkit/core.hpp"
#include "truelkit/games.hpp"
#include "truelkit/parallel.hpp"

namespace truelkit {

// Payoff comparisons treat differences within this tolerance as ties, so
// floating-point noise cannot invent deviations.
inline constexpr double kPayoffTolerance = 1e-12;

// Which game the strategy profiles parameterize. Turn order is meaningless
// for the opinion game and ignored there.
enum class GameVariant { Truel, Opinion };

inline const char* game_variant_name(GameVariant v) {
    return v == GameVariant::Truel ? "truel" : "opinion";
}

inline WinDistribution profile_win(const MarksTriple& marks, TurnOrder order,
                                   GameVariant variant, const StrategyProfile& profile) {
    if (variant == GameVariant::Truel) return truel_win(TruelSpec{marks, order, profile});
    return opinion_profile_win(marks, profile);
}

// Win distributions for all 27 profiles of one game. Profiles whose game
// never ends (air-heavy combinations) are kept but marked non-absorbing; they
// pay 0 to every player, which keeps them comparable as deviations and usable
// as starting points for best-response dynamics.
class PayoffTable {
public:
    static PayoffTable compute(const MarksTriple& marks, TurnOrder order,
                               GameVariant variant = GameVariant::Truel) {
        PayoffTable out(marks, order, variant);
        for (const StrategyProfile& p : StrategyProfile::all()) {
            try {
                out.wins_[p.ordinal()].emplace(profile_win(marks, order, variant, p));
            } catch (const NonAbsorbingError&) {
                out.wins_[p.ordinal()].reset();
            }
        }
        return out;
    }

    bool absorbing(const StrategyProfile& p) const { return wins_[p.ordinal()].has_value(); }

    // Null for non-absorbing profiles.
    const WinDistribution* win(const StrategyProfile& p) const {
        const auto& w = wins_[p.ordinal()];
        return w ? &*w : nullptr;
    }

    double payoff(const StrategyProfile& p, PlayerId x) const {
        const auto& w = wins_[p.ordinal()];
        return w ? (*w)[static_cast<std::size_t>(x)] : 0.0;
    }

    const MarksTriple& marks() const { return marks_; }
    TurnOrder order() const { return order_; }
    GameVariant variant() const { return variant_; }

private:
    PayoffTable(const MarksTriple& marks, TurnOrder order, GameVariant variant)
        : marks_(marks), order_(order), variant_(variant) {}

    MarksTriple marks_;
    TurnOrder order_;
    GameVariant variant_;
    std::array<std::optional<WinDistribution>, 27> wins_;
};

// Pure-strategy Nash equilibria in ordinal order: profiles from which no
// single player gains more than kPayoffTolerance by deviating alone.
// Non-absorbing profiles are never equilibria.
inline std::vector<StrategyProfile> nash_equilibria(const PayoffTable& table) {
    std::vector<StrategyProfile> out;
    for (const StrategyProfile& p : StrategyProfile::all()) {
        if (!table.absorbing(p)) continue;
        bool stable = true;
        for (PlayerId x = 0; x < 3 && stable; ++x) {
            const double base = table.payoff(p, x);
            for (const Strategy& alt : StrategyProfile::choices(x)) {
                if (alt == p.of(x)) continue;
                if (table.payoff(p.with(x, alt), x) > base + kPayoffTolerance) {
                    stable = false;
                    break;
                }
            }
        }
        if (stable) out.push_back(p);
    }
    return out;
}

struct BestResponsePath {
    std::vector<StrategyProfile> profiles; // start first; endpoint last
    bool cycled = false;                   // stopped by revisiting a profile
};

// Iterated best response with the fixed scan order A, B, C: each step, the
// first player holding a strictly improving deviation (by more than
// kPayoffTolerance) switches to their best one, ties broken toward the
// canonically smallest strategy. Stops at an equilibrium, or when a profile
// repeats (cycled is then set and the repeated profile closes the path).
inline BestResponsePath best_response_path(const PayoffTable& table, StrategyProfile start) {
    BestResponsePath out;
    out.profiles.push_back(start);
    std::array<bool, 27> seen{};
    seen[start.ordinal()] = true;
    for (;;) {
        const StrategyProfile here = out.profiles.back();
        std::optional<StrategyProfile> next;
        for (PlayerId x = 0; x < 3 && !next; ++x) {
            double best = table.payoff(here, x) + kPayoffTolerance;
            std::optional<Strategy> pick;
            for (const Strategy& alt : StrategyProfile::choices(x)) {
                if (alt == here.of(x)) continue;
                const double gain = table.payoff(here.with(x, alt), x);
                if (gain > best) {
                    best = gain;
                    pick = alt;
                }
            }
            if (pick) next = here.with(x, *pick);
        }
        if (!next) return out; // nobody can improve: endpoint is an equilibrium
        out.profiles.push_back(*next);
        if (seen[next->ordinal()]) {
            out.cycled = true;
            return out;
        }
        seen[next->ordinal()] = true;
    }
}

// One node of a (b, c) sweep at a = 1.
struct RegionPoint {
    double b;
    double c;
    StrategyProfile selected;                 // best-response endpoint
    std::vector<StrategyProfile> equilibria;  // all pure equilibria at this node
    std::vector<double> win;                  // outcome under `selected`
    std::size_t favorite;                     // argmax of `win`, ties to A
    bool equilibria_disagree;                 // some equilibrium favors someone else
};

struct RegionMap {
    TurnOrder order;
    GameVariant variant;
    double step;
    std::vector<RegionPoint> points; // row-major: b ascending outer, c inner
};

// Sweeps the open unit square: b, c = k * step for k = 1 .. ceil(1/step)-1,
// a = 1. At each node best-response dynamics started from everyone-at-the-
// strongest-opponent select the profile actually played; the disagree flag
// records nodes where other equilibria would crown a different favorite.
inline RegionMap region_map(TurnOrder order, GameVariant variant, double step,
                            int threads = 1) {
    if (!(step > 0.0 && step < 1.0))
        throw std::invalid_argument("region step must lie in (0,1)");
    const std::size_t n = static_cast<std::size_t>(std::ceil(1.0 / step)) - 1;

    std::vector<std::optional<RegionPoint>> slots(n * n);
    parallel_for(n * n, threads, [&](std::size_t idx) {
        const double b = static_cast<double>(idx / n + 1) * step;
        const double c = static_cast<double>(idx % n + 1) * step;
        const MarksTriple marks{1.0, b, c};
        const PayoffTable table = PayoffTable::compute(marks, order, variant);

        const BestResponsePath path =
            best_response_path(table, StrategyProfile::strongest(marks));
        const StrategyProfile selected = path.profiles.back();
        const std::vector<StrategyProfile> equilibria = nash_equilibria(table);

        std::vector<double> win(3, 0.0);
        if (const WinDistribution* w = table.win(selected)) win = w->probs();
        std::size_t favorite = 0;
        for (std::size_t i = 1; i < 3; ++i)
            if (win[i] > win[favorite]) favorite = i;

        bool disagree = false;
        for (const StrategyProfile& eq : equilibria)
            if (table.win(eq)->favorite() != favorite) disagree = true;

        slots[idx].emplace(RegionPoint{b, c, selected, equilibria, std::move(win),
                                       favorite, disagree});
    });

    RegionMap out{order, variant, step, {}};
    out.points.reserve(n * n);
    for (auto& s : slots) out.points.push_back(std::move(*s));
    return out;
}

} // namespace truelkit
