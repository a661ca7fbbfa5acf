// The headline paradox, end to end: three shooters with marksmanships
// 1.0, 0.8 and 0.5 play rationally, and the worst shooter is the likeliest
// survivor. Shows the payoff scan, the equilibrium, a best-response path,
// and what changes when shots go in a fixed worst-first order (the weakest
// player's best opening move becomes shooting into the air).

#include <cstdio>

#include "truelkit/truelkit.hpp"

using namespace truelkit;

namespace {

void show(const char* tag, const StrategyProfile& profile, const WinDistribution& w) {
    std::printf("  %-28s %s   P = (%.3f, %.3f, %.3f)\n", tag, profile.name().c_str(), w[0], w[1],
                w[2]);
}

} // namespace

int main() {
    const MarksTriple marks{1.0, 0.8, 0.5};

    std::printf("marksmanships: A=%.1f  B=%.1f  C=%.1f\n\n", marks[0].value(), marks[1].value(),
                marks[2].value());

    std::printf("random shooting order\n");
    const PayoffTable random_table =
        PayoffTable::compute(marks, TurnOrder::Random, GameVariant::Truel);
    const StrategyProfile naive = StrategyProfile::parse("CCB");  // everyone at the weakest foe
    show("naive (shoot the weakest):", naive, *random_table.win(naive));

    const BestResponsePath path = best_response_path(random_table, naive);
    std::printf("  best-response path:        ");
    for (std::size_t i = 0; i < path.profiles.size(); ++i)
        std::printf("%s%s", i ? " -> " : "", path.profiles[i].name().c_str());
    std::printf("\n");

    for (const StrategyProfile& eq : nash_equilibria(random_table))
        show("equilibrium:", eq, *random_table.win(eq));
    std::printf("  ...and the weakest shooter, C, is the favorite.\n\n");

    std::printf("fixed worst-first shooting order\n");
    const PayoffTable seq_table =
        PayoffTable::compute(marks, TurnOrder::Sequential, GameVariant::Truel);
    for (const StrategyProfile& eq : nash_equilibria(seq_table))
        show("equilibrium:", eq, *seq_table.win(eq));
    std::printf("  C's equilibrium move while all three stand: shoot into the air.\n");
    return 0;
}
