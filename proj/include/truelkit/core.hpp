#pragma once

// Shared vocabulary for multi-player shooting and opinion games: player ids,
// validated marksmanship values, three-player strategy profiles, win
// distributions, and the error taxonomy used across the library.

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace truelkit {

// Shot opportunities (or speaking turns, or lattice micro-steps) a stochastic
// run may consume before it is declared stuck.
inline constexpr std::uint64_t kDefaultStepCap = 10'000'000;

// ---------------------------------------------------------------------------
// Errors

// A game or chain cannot reach an absorbing outcome from its start state
// (e.g. everyone shoots into the air forever).
class NonAbsorbingError : public std::runtime_error {
public:
    explicit NonAbsorbingError(const std::string& what) : std::runtime_error(what) {}
};

// A stochastic run exceeded its step cap before terminating.
class TimeoutError : public std::runtime_error {
public:
    explicit TimeoutError(const std::string& what) : std::runtime_error(what) {}
};

// A target was requested for a player with no live opponents.
class NoOpponentError : public std::logic_error {
public:
    explicit NoOpponentError(const std::string& what) : std::logic_error(what) {}
};

// ---------------------------------------------------------------------------
// Players

// Index of a player, opinion, or group. Three-player games use 0=A, 1=B, 2=C;
// the index order doubles as the canonical tie-breaking order.
using PlayerId = int;

inline char player_letter(PlayerId p) { return static_cast<char>('A' + p); }

// ---------------------------------------------------------------------------
// Marksmanship

// Hit probability (or convincing probability, in opinion games). Validates
// once on construction so downstream code can treat it as a plain double.
class Marksmanship {
public:
    Marksmanship(double value) : value_(value) {
        if (!(value >= 0.0 && value <= 1.0))
            throw std::invalid_argument("marksmanship must lie in [0,1], got " +
                                        std::to_string(value));
    }
    operator double() const { return value_; }
    double value() const { return value_; }

private:
    double value_;
};

using MarksTriple = std::array<Marksmanship, 3>;

// Best live opponent of `self`: the alive player (other than `self`) with the
// highest marksmanship, ties to the lowest id. `alive` is any range of
// PlayerId; `marks` is indexable by PlayerId. Throws NoOpponentError when no
// opponent is alive.
template <typename AliveRange, typename MarksRange>
PlayerId strongest_opponent(PlayerId self, const AliveRange& alive, const MarksRange& marks) {
    PlayerId best = -1;
    double best_mark = -1.0;
    for (PlayerId p : alive) {
        if (p == self) continue;
        double m = static_cast<double>(marks[static_cast<std::size_t>(p)]);
        if (m > best_mark || (m == best_mark && p < best)) {
            best = p;
            best_mark = m;
        }
    }
    if (best < 0)
        throw NoOpponentError(std::string("player ") + player_letter(self) +
                              " has no live opponent");
    return best;
}

// ---------------------------------------------------------------------------
// Strategies

// One player's choice while all three players stand: aim at a specific player
// or deliberately shoot into the air. Two-player stages have no choice (the
// remaining opponent is the only legal target), so a Strategy only describes
// the three-alive stage.
class Strategy {
public:
    static Strategy target(PlayerId p) {
        if (p < 0 || p > 2) throw std::invalid_argument("target player out of range");
        return Strategy(p);
    }
    static Strategy air() { return Strategy(kAirCode); }

    bool is_air() const { return code_ == kAirCode; }
    PlayerId target_id() const {
        if (is_air()) throw std::logic_error("air strategy has no target");
        return code_;
    }

    // 'A','B','C' for targets, '0' for air.
    char letter() const { return is_air() ? '0' : player_letter(code_); }

    static Strategy parse(char ch) {
        if (ch == '0') return air();
        if (ch >= 'A' && ch <= 'C') return target(ch - 'A');
        throw std::invalid_argument(std::string("bad strategy letter '") + ch + "'");
    }

    // Canonical order: Target(A) < Target(B) < Target(C) < Air.
    friend auto operator<=>(const Strategy&, const Strategy&) = default;

private:
    static constexpr int kAirCode = 3;
    explicit Strategy(int code) : code_(code) {}
    int code_;
};

// A strategy for each of the three players. Printed as three letters in
// player order, e.g. "BAA" (A aims at B, B aims at A, C aims at A) or "BA0"
// (C shoots into the air). Self-targets are rejected.
class StrategyProfile {
public:
    StrategyProfile(Strategy a, Strategy b, Strategy c) : s_{a, b, c} {
        for (PlayerId p = 0; p < 3; ++p)
            if (!s_[p].is_air() && s_[p].target_id() == p)
                throw std::invalid_argument(std::string("player ") + player_letter(p) +
                                            " cannot target itself");
    }

    const Strategy& of(PlayerId p) const { return s_.at(static_cast<std::size_t>(p)); }

    StrategyProfile with(PlayerId p, Strategy s) const {
        StrategyProfile out = *this;
        out.s_.at(static_cast<std::size_t>(p)) = s;
        if (!s.is_air() && s.target_id() == p)
            throw std::invalid_argument(std::string("player ") + player_letter(p) +
                                        " cannot target itself");
        return out;
    }

    std::string name() const {
        std::string out;
        for (const Strategy& s : s_) out += s.letter();
        return out;
    }

    static StrategyProfile parse(std::string_view text) {
        if (text.size() != 3)
            throw std::invalid_argument("strategy profile must be 3 letters, got \"" +
                                        std::string(text) + "\"");
        return StrategyProfile(Strategy::parse(text[0]), Strategy::parse(text[1]),
                               Strategy::parse(text[2]));
    }

    // The legal strategies of one player in canonical order: both opponents
    // ascending, then air.
    static std::array<Strategy, 3> choices(PlayerId self) {
        std::array<Strategy, 3> out{Strategy::air(), Strategy::air(), Strategy::air()};
        std::size_t n = 0;
        for (PlayerId p = 0; p < 3; ++p)
            if (p != self) out[n++] = Strategy::target(p);
        out[n] = Strategy::air();
        return out;
    }

    // All 27 profiles, ordered with A's choice varying slowest and each
    // player's choices in canonical order. ordinal() is the index here.
    static const std::vector<StrategyProfile>& all() {
        static const std::vector<StrategyProfile> table = [] {
            std::vector<StrategyProfile> out;
            out.reserve(27);
            for (const Strategy& a : choices(0))
                for (const Strategy& b : choices(1))
                    for (const Strategy& c : choices(2))
                        out.emplace_back(a, b, c);
            return out;
        }();
        return table;
    }

    std::size_t ordinal() const {
        std::size_t out = 0;
        for (PlayerId p = 0; p < 3; ++p) {
            const std::array<Strategy, 3> c = choices(p);
            std::size_t i = 0;
            while (c[i] != s_[static_cast<std::size_t>(p)]) ++i;
            out = out * 3 + i;
        }
        return out;
    }

    // Everyone aims at their strongest live opponent.
    static StrategyProfile strongest(const MarksTriple& marks) {
        const std::array<PlayerId, 3> everyone{0, 1, 2};
        return StrategyProfile(Strategy::target(strongest_opponent(0, everyone, marks)),
                               Strategy::target(strongest_opponent(1, everyone, marks)),
                               Strategy::target(strongest_opponent(2, everyone, marks)));
    }

    friend auto operator<=>(const StrategyProfile&, const StrategyProfile&) = default;

private:
    std::array<Strategy, 3> s_;
};

// ---------------------------------------------------------------------------
// Win distributions

// Probability of each outcome (player, opinion, or group) winning. Validates
// that entries are probabilities and that the total is 1 within `tol`.
class WinDistribution {
public:
    explicit WinDistribution(std::vector<double> probs, double tol = 1e-9) : p_(std::move(probs)) {
        double sum = 0.0;
        for (double x : p_) {
            if (!(x >= -tol && x <= 1.0 + tol))
                throw std::invalid_argument("win probability out of [0,1]: " + std::to_string(x));
            sum += x;
        }
        if (!(sum >= 1.0 - tol && sum <= 1.0 + tol))
            throw std::invalid_argument("win probabilities sum to " + std::to_string(sum) +
                                        ", expected 1");
    }

    double operator[](std::size_t i) const { return p_.at(i); }
    std::size_t size() const { return p_.size(); }
    const std::vector<double>& probs() const { return p_; }

    // Outcome with the highest probability; ties to the lowest index.
    std::size_t favorite() const {
        std::size_t best = 0;
        for (std::size_t i = 1; i < p_.size(); ++i)
            if (p_[i] > p_[best]) best = i;
        return best;
    }

private:
    std::vector<double> p_;
};

} // namespace truelkit
