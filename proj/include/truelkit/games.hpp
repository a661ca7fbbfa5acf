#pragma once

// Exact game definitions: duels, three-player truels (random or sequential
// shooting order), and the opinion variant where a hit converts instead of
// eliminating. Each game is expressed as an absorbing Markov chain over its
// full documented state space; the *_win operations solve the sub-chain
// reachable from the game's start, so strategies that strand part of the
// state space (someone who can never hit, say) still yield exact answers.

#include <array>
#include <string>
#include <vector>

#include "truelkit/chain.hpp"
#include "truelkit/core.hpp"

namespace truelkit {

// Who shoots when. Random: every step picks a live player uniformly.
// Sequential: the fixed cycle C, B, A repeats, skipping dead players.
enum class TurnOrder { Random, Sequential };

inline const char* turn_order_name(TurnOrder o) {
    return o == TurnOrder::Random ? "random" : "sequential";
}

// ---------------------------------------------------------------------------
// Duels

struct DuelSpec {
    Marksmanship a;
    Marksmanship b;
    TurnOrder order = TurnOrder::Random;
};

namespace detail {
inline void require_absorbing_duel(double a, double b) {
    if (a == 0.0 && b == 0.0)
        throw NonAbsorbingError("duel with two zero marksmanships never ends");
}
} // namespace detail

// Random order: conditioned on a hit, the shooter is A with probability
// a / (a + b), so that is A's win probability.
inline WinDistribution duel_random(Marksmanship a, Marksmanship b) {
    detail::require_absorbing_duel(a, b);
    return WinDistribution({a / (a + b), b / (a + b)});
}

// Alternating shots with B (by convention the weaker player) first:
// P_B = b + (1-b)(1-a) P_B  =>  P_B = b / (a + b - a b).
inline WinDistribution duel_sequential(Marksmanship a, Marksmanship b) {
    detail::require_absorbing_duel(a, b);
    const double pb = b / (a + b - a * b);
    return WinDistribution({1.0 - pb, pb});
}

// The duel as an explicit chain. Random: states AB, A, B. Sequential: the
// pending shooter joins the state (AB|B is the start, B shooting first).
inline AbsorbingChain build_duel_chain(const DuelSpec& spec) {
    ChainBuilder cb;
    if (spec.order == TurnOrder::Random) {
        const std::size_t ab = cb.add_state("AB");
        const std::size_t a = cb.add_state("A", true);
        const std::size_t b = cb.add_state("B", true);
        cb.add_prob(ab, a, 0.5 * spec.a);   // A shoots and hits
        cb.add_prob(ab, b, 0.5 * spec.b);
        cb.add_prob(ab, ab, 0.5 * (1.0 - spec.a) + 0.5 * (1.0 - spec.b));
    } else {
        const std::size_t ab_b = cb.add_state("AB|B");
        const std::size_t ab_a = cb.add_state("AB|A");
        const std::size_t a = cb.add_state("A", true);
        const std::size_t b = cb.add_state("B", true);
        cb.add_prob(ab_b, b, spec.b);
        cb.add_prob(ab_b, ab_a, 1.0 - spec.b);
        cb.add_prob(ab_a, a, spec.a);
        cb.add_prob(ab_a, ab_b, 1.0 - spec.a);
    }
    return cb.build();
}

// ---------------------------------------------------------------------------
// Truels

struct TruelSpec {
    MarksTriple marks;
    TurnOrder order;
    StrategyProfile profile;
};

// Label of the state a fresh game starts in: all alive, and in sequential
// play the weakest-by-convention player C about to shoot.
inline std::string truel_start_label(TurnOrder order) {
    return order == TurnOrder::Random ? "ABC" : "ABC|C";
}

namespace detail {

inline std::string alive_label(const std::vector<PlayerId>& alive) {
    std::string out;
    for (PlayerId p : alive) out += player_letter(p);
    return out;
}

inline std::vector<PlayerId> without(const std::vector<PlayerId>& alive, PlayerId t) {
    std::vector<PlayerId> out;
    for (PlayerId p : alive)
        if (p != t) out.push_back(p);
    return out;
}

// Target of `shooter` in `alive` under the game's stage rules: the profile
// choice while all three stand (possibly air), the lone opponent afterwards.
inline int stage_target(PlayerId shooter, const std::vector<PlayerId>& alive,
                        const StrategyProfile& profile) {
    if (alive.size() == 3) {
        const Strategy s = profile.of(shooter);
        return s.is_air() ? -1 : s.target_id();
    }
    for (PlayerId p : alive)
        if (p != shooter) return p;
    throw NoOpponentError(std::string("player ") + player_letter(shooter) +
                          " has no live opponent");
}

// Successor in the fixed sequential cycle C -> B -> A -> C.
inline PlayerId cycle_next(PlayerId p) { return p == 0 ? 2 : p - 1; }

} // namespace detail

// Full truel chain. Random order walks the 7 alive-set states (ABC, three
// pairs, three singletons). Sequential order pairs every non-final alive set
// with every nominal turn holder ("AB|C" simply passes to "AB|B"), giving 12
// transient states plus the 3 singletons.
inline AbsorbingChain build_truel_chain(const TruelSpec& spec) {
    const std::vector<std::vector<PlayerId>> sets{{0, 1, 2}, {0, 1}, {0, 2}, {1, 2}};
    ChainBuilder cb;

    if (spec.order == TurnOrder::Random) {
        for (const auto& s : sets) cb.add_state(detail::alive_label(s));
        for (PlayerId p = 0; p < 3; ++p) cb.add_state(std::string(1, player_letter(p)), true);

        for (std::size_t i = 0; i < sets.size(); ++i) {
            const auto& alive = sets[i];
            const double pick = 1.0 / static_cast<double>(alive.size());
            double stay = 0.0;
            for (PlayerId shooter : alive) {
                const int t = detail::stage_target(shooter, alive, spec.profile);
                if (t < 0) {
                    stay += pick; // deliberate miss
                    continue;
                }
                const double m = spec.marks[static_cast<std::size_t>(shooter)];
                const auto rest = detail::without(alive, t);
                // hit: survivors shrink; miss: nothing changes.
                stay += pick * (1.0 - m);
                std::size_t to;
                if (rest.size() == 1)
                    to = 4 + static_cast<std::size_t>(rest[0]);
                else
                    to = 1 + (rest == std::vector<PlayerId>{0, 1}   ? 0
                              : rest == std::vector<PlayerId>{0, 2} ? 1
                                                                    : 2);
                cb.add_prob(i, to, pick * m);
            }
            cb.add_prob(i, i, stay);
        }
        return cb.build();
    }

    // Sequential: enumerate (alive set, nominal turn) states first, then the
    // singleton outcomes.
    std::vector<std::pair<std::vector<PlayerId>, PlayerId>> states;
    for (const auto& s : sets)
        for (PlayerId turn = 0; turn < 3; ++turn) states.emplace_back(s, turn);

    ChainBuilder cb2;
    auto seq_label = [](const std::vector<PlayerId>& alive, PlayerId turn) {
        return detail::alive_label(alive) + "|" + player_letter(turn);
    };
    for (const auto& [alive, turn] : states) cb2.add_state(seq_label(alive, turn));
    for (PlayerId p = 0; p < 3; ++p) cb2.add_state(std::string(1, player_letter(p)), true);

    auto state_index = [&](const std::vector<PlayerId>& alive, PlayerId turn) -> std::size_t {
        for (std::size_t i = 0; i < states.size(); ++i)
            if (states[i].first == alive && states[i].second == turn) return i;
        throw std::logic_error("sequential truel state lookup failed");
    };

    for (std::size_t i = 0; i < states.size(); ++i) {
        const auto& [alive, turn] = states[i];
        const bool dead_turn =
            std::find(alive.begin(), alive.end(), turn) == alive.end();
        const PlayerId succ = detail::cycle_next(turn);
        if (dead_turn) {
            cb2.add_prob(i, state_index(alive, succ), 1.0);
            continue;
        }
        const int t = detail::stage_target(turn, alive, spec.profile);
        if (t < 0) {
            cb2.add_prob(i, state_index(alive, succ), 1.0);
            continue;
        }
        const double m = spec.marks[static_cast<std::size_t>(turn)];
        const auto rest = detail::without(alive, t);
        if (rest.size() == 1)
            cb2.add_prob(i, states.size() + static_cast<std::size_t>(rest[0]), m);
        else
            cb2.add_prob(i, state_index(rest, succ), m);
        cb2.add_prob(i, state_index(alive, succ), 1.0 - m);
    }
    return cb2.build();
}

// Exact win distribution of the truel from its start state.
inline WinDistribution truel_win(const TruelSpec& spec) {
    const AbsorbingChain full = build_truel_chain(spec);
    const AbsorbingChain sub =
        reachable_subchain(full, full.index_of(truel_start_label(spec.order)));
    const AbsorptionResult r = solve_absorption(sub);
    const std::size_t start = sub.index_of(truel_start_label(spec.order));
    std::vector<double> p(3, 0.0);
    for (std::size_t j : r.absorbing_states) {
        const std::string& label = sub.label(j);
        p[static_cast<std::size_t>(label[0] - 'A')] = r.prob(start, j);
    }
    return WinDistribution(std::move(p));
}

// ---------------------------------------------------------------------------
// Opinion games

namespace detail {

// Strongest opposing opinion present: among opinions other than `mine` with
// at least one holder, the one whose conviction probability is largest (ties
// to the lower opinion index). Returns -1 when no opposing opinion remains.
inline int strongest_opposing_opinion(int mine, const std::array<int, 3>& counts,
                                      const MarksTriple& marks) {
    int best = -1;
    for (int o = 0; o < 3; ++o) {
        if (o == mine || counts[static_cast<std::size_t>(o)] == 0) continue;
        if (best < 0 || static_cast<double>(marks[static_cast<std::size_t>(o)]) >
                            static_cast<double>(marks[static_cast<std::size_t>(best)]))
            best = o;
    }
    return best;
}

} // namespace detail

// Opinion dynamics over anonymous counts: a state is how many of the three
// persons hold each opinion. Each step one person speaks (uniformly), aims at
// the strongest opposing opinion still held, and converts one of its holders
// with the speaking opinion's conviction probability. 10 states: (1,1,1), six
// of the (2,1,0) family, and three unanimous absorbing states.
inline AbsorbingChain build_opinion_chain(const MarksTriple& marks) {
    std::vector<std::array<int, 3>> counts;
    for (int na = 3; na >= 0; --na)
        for (int nb = 3 - na; nb >= 0; --nb) counts.push_back({na, nb, 3 - na - nb});

    ChainBuilder cb;
    auto label_of = [](const std::array<int, 3>& c) {
        return std::to_string(c[0]) + std::to_string(c[1]) + std::to_string(c[2]);
    };
    auto index_of = [&](const std::array<int, 3>& c) -> std::size_t {
        for (std::size_t i = 0; i < counts.size(); ++i)
            if (counts[i] == c) return i;
        throw std::logic_error("opinion state lookup failed");
    };
    for (const auto& c : counts)
        cb.add_state(label_of(c), c[0] == 3 || c[1] == 3 || c[2] == 3);

    for (std::size_t i = 0; i < counts.size(); ++i) {
        const auto& c = counts[i];
        if (c[0] == 3 || c[1] == 3 || c[2] == 3) continue;
        double stay = 0.0;
        for (int o = 0; o < 3; ++o) {
            const int holders = c[static_cast<std::size_t>(o)];
            if (holders == 0) continue;
            const double pick = holders / 3.0;
            const int victim = detail::strongest_opposing_opinion(o, c, marks);
            const double m = marks[static_cast<std::size_t>(o)];
            std::array<int, 3> converted = c;
            ++converted[static_cast<std::size_t>(o)];
            --converted[static_cast<std::size_t>(victim)];
            cb.add_prob(i, index_of(converted), pick * m);
            stay += pick * (1.0 - m);
        }
        cb.add_prob(i, i, stay);
    }
    return cb.build();
}

// Exact probability of each opinion ending unanimous, starting from one
// holder of each.
inline WinDistribution opinion_win(const MarksTriple& marks) {
    const AbsorbingChain full = build_opinion_chain(marks);
    const AbsorbingChain sub = reachable_subchain(full, full.index_of("111"));
    const AbsorptionResult r = solve_absorption(sub);
    const std::size_t start = sub.index_of("111");
    const std::array<std::string, 3> outcomes{"300", "030", "003"};
    std::vector<double> p(3, 0.0);
    for (std::size_t j : r.absorbing_states)
        for (std::size_t o = 0; o < 3; ++o)
            if (sub.label(j) == outcomes[o]) p[o] = r.prob(start, j);
    return WinDistribution(std::move(p));
}

// Opinion dynamics with named persons, so a strategy profile can be applied:
// a state lists the opinion each of persons 1..3 currently holds (27 states,
// "ABC" is the start). The profile only ever binds in all-distinct states —
// after the first conversion only two opinions remain and the speaker must
// aim at the strongest opposing one, choosing uniformly among its holders.
inline AbsorbingChain build_opinion_profile_chain(const MarksTriple& marks,
                                                  const StrategyProfile& profile) {
    std::vector<std::array<int, 3>> states;
    for (int o1 = 0; o1 < 3; ++o1)
        for (int o2 = 0; o2 < 3; ++o2)
            for (int o3 = 0; o3 < 3; ++o3) states.push_back({o1, o2, o3});

    ChainBuilder cb;
    auto label_of = [](const std::array<int, 3>& s) {
        std::string out;
        for (int o : s) out += player_letter(o);
        return out;
    };
    auto index_of = [&](const std::array<int, 3>& s) {
        return static_cast<std::size_t>(s[0] * 9 + s[1] * 3 + s[2]);
    };
    for (const auto& s : states)
        cb.add_state(label_of(s), s[0] == s[1] && s[1] == s[2]);

    for (std::size_t i = 0; i < states.size(); ++i) {
        const auto& s = states[i];
        if (s[0] == s[1] && s[1] == s[2]) continue;
        std::array<int, 3> counts{0, 0, 0};
        for (int o : s) ++counts[static_cast<std::size_t>(o)];
        const bool all_distinct = counts[0] == 1 && counts[1] == 1 && counts[2] == 1;

        double stay = 0.0;
        for (PlayerId person = 0; person < 3; ++person) {
            const double pick = 1.0 / 3.0;
            const int mine = s[static_cast<std::size_t>(person)];
            std::vector<PlayerId> victims;
            if (all_distinct) {
                const Strategy choice = profile.of(person);
                if (choice.is_air()) {
                    stay += pick;
                    continue;
                }
                victims.push_back(choice.target_id());
            } else {
                const int opp = detail::strongest_opposing_opinion(mine, counts, marks);
                for (PlayerId q = 0; q < 3; ++q)
                    if (s[static_cast<std::size_t>(q)] == opp) victims.push_back(q);
            }
            const double m = marks[static_cast<std::size_t>(mine)];
            for (PlayerId victim : victims) {
                std::array<int, 3> converted = s;
                converted[static_cast<std::size_t>(victim)] = mine;
                cb.add_prob(i, index_of(converted),
                            pick * m / static_cast<double>(victims.size()));
            }
            stay += pick * (1.0 - m);
        }
        cb.add_prob(i, i, stay);
    }
    return cb.build();
}

// Win distribution of the opinion game under an arbitrary profile, starting
// from persons 1..3 holding A, B, C.
inline WinDistribution opinion_profile_win(const MarksTriple& marks,
                                           const StrategyProfile& profile) {
    const AbsorbingChain full = build_opinion_profile_chain(marks, profile);
    const AbsorbingChain sub = reachable_subchain(full, full.index_of("ABC"));
    const AbsorptionResult r = solve_absorption(sub);
    const std::size_t start = sub.index_of("ABC");
    const std::array<std::string, 3> outcomes{"AAA", "BBB", "CCC"};
    std::vector<double> p(3, 0.0);
    for (std::size_t j : r.absorbing_states)
        for (std::size_t o = 0; o < 3; ++o)
            if (sub.label(j) == outcomes[o]) p[o] = r.prob(start, j);
    return WinDistribution(std::move(p));
}

} // namespace truelkit
