#pragma once

// Output plumbing for the CLI and demo programs: a `# key: value` metadata
// header (command, seed, version, timestamp) so every file regenerates
// itself, 6-significant-digit decimal formatting, CSV and NDJSON writers for
// the pinned tabular schemas, and a P3 pixmap writer for lattice snapshots.

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "truelkit/core.hpp"
#include "truelkit/equilibrium.hpp"
#include "truelkit/montecarlo.hpp"
#include "truelkit/spatial.hpp"

#ifndef TRUELKIT_VERSION
#define TRUELKIT_VERSION "0.0.0"
#endif

namespace truelkit {

enum class TableFormat { Csv, Ndjson };

// `x` rendered with at most `significant` significant decimal digits
// (trailing zeros dropped, exponent notation only outside %g's decimal
// range). Data sections use this everywhere so reruns are byte-identical.
inline std::string format_sig(double x, int significant = 6) {
    if (x == 0.0) x = 0.0;  // flushes negative zero
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", significant, x);
    return buf;
}

inline std::string iso8601_utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buf;
}

struct OutputMeta {
    std::string command;
    std::uint64_t seed = 0;
    std::string version = TRUELKIT_VERSION;
    std::string timestamp;  // filled by now(); left empty it is omitted
    std::vector<std::pair<std::string, std::string>> extra;

    static OutputMeta now(std::string command, std::uint64_t seed) {
        OutputMeta meta;
        meta.command = std::move(command);
        meta.seed = seed;
        meta.timestamp = iso8601_utc_now();
        return meta;
    }
};

// The header block above every output file. Consumers treat '#' lines as
// comments; everything after them is the data section.
inline void write_metadata(std::ostream& os, const OutputMeta& meta) {
    os << "# command: " << meta.command << "\n";
    os << "# seed: " << meta.seed << "\n";
    os << "# version: " << meta.version << "\n";
    if (!meta.timestamp.empty()) os << "# timestamp: " << meta.timestamp << "\n";
    for (const auto& [key, value] : meta.extra) os << "# " << key << ": " << value << "\n";
}

namespace detail {

// A json number carrying format_sig's rounding, so NDJSON and CSV agree on
// the printed precision.
inline nlohmann::ordered_json sig_number(double x) {
    return nlohmann::ordered_json::parse(format_sig(x));
}

}  // namespace detail

// b,c,equilibrium,favorite,P_A,P_B,P_C,multi_eq_flag
inline void write_region_map(std::ostream& os, const RegionMap& map, TableFormat format) {
    if (format == TableFormat::Csv)
        os << "b,c,equilibrium,favorite,P_A,P_B,P_C,multi_eq_flag\n";
    for (const RegionPoint& pt : map.points) {
        const std::string favorite(1, player_letter(static_cast<PlayerId>(pt.favorite)));
        if (format == TableFormat::Csv) {
            os << format_sig(pt.b) << ',' << format_sig(pt.c) << ',' << pt.selected.name() << ','
               << favorite << ',' << format_sig(pt.win[0]) << ',' << format_sig(pt.win[1]) << ','
               << format_sig(pt.win[2]) << ',' << (pt.equilibria_disagree ? 1 : 0) << "\n";
        } else {
            nlohmann::ordered_json row;
            row["b"] = detail::sig_number(pt.b);
            row["c"] = detail::sig_number(pt.c);
            row["equilibrium"] = pt.selected.name();
            row["favorite"] = favorite;
            row["P_A"] = detail::sig_number(pt.win[0]);
            row["P_B"] = detail::sig_number(pt.win[1]);
            row["P_C"] = detail::sig_number(pt.win[2]);
            row["multi_eq_flag"] = pt.equilibria_disagree;
            os << row.dump() << "\n";
        }
    }
}

// bin_lo,bin_hi,mean_wins
inline void write_league(std::ostream& os, const LeagueResult& league, TableFormat format) {
    if (format == TableFormat::Csv) os << "bin_lo,bin_hi,mean_wins\n";
    for (int b = 0; b < league.bins; ++b) {
        const double mean = league.bin_mean_wins[static_cast<std::size_t>(b)];
        if (format == TableFormat::Csv) {
            os << format_sig(league.bin_lo(b)) << ',' << format_sig(league.bin_hi(b)) << ','
               << format_sig(mean) << "\n";
        } else {
            nlohmann::ordered_json row;
            row["bin_lo"] = detail::sig_number(league.bin_lo(b));
            row["bin_hi"] = detail::sig_number(league.bin_hi(b));
            row["mean_wins"] = detail::sig_number(mean);
            os << row.dump() << "\n";
        }
    }
}

// rank,bin_lo,bin_hi,count — ranks outer, bins inner
inline void write_rank_histogram(std::ostream& os, const RankHistogram& hist,
                                 TableFormat format) {
    if (format == TableFormat::Csv) os << "rank,bin_lo,bin_hi,count\n";
    for (int rank = 1; rank <= hist.players(); ++rank) {
        for (int b = 0; b < hist.bins(); ++b) {
            if (format == TableFormat::Csv) {
                os << rank << ',' << format_sig(hist.bin_lo(b)) << ',' << format_sig(hist.bin_hi(b))
                   << ',' << hist.count(rank, b) << "\n";
            } else {
                nlohmann::ordered_json row;
                row["rank"] = rank;
                row["bin_lo"] = detail::sig_number(hist.bin_lo(b));
                row["bin_hi"] = detail::sig_number(hist.bin_hi(b));
                row["count"] = hist.count(rank, b);
                os << row.dump() << "\n";
            }
        }
    }
}

// x_A,x_B,x_C,f_A,f_B,f_C,favorite
inline void write_simplex(std::ostream& os, const SimplexDiagram& diagram, TableFormat format) {
    if (format == TableFormat::Csv) os << "x_A,x_B,x_C,f_A,f_B,f_C,favorite\n";
    for (const SimplexPoint& pt : diagram.points) {
        const std::string favorite(1, player_letter(static_cast<PlayerId>(pt.favorite)));
        if (format == TableFormat::Csv) {
            os << format_sig(pt.proportions[0]) << ',' << format_sig(pt.proportions[1]) << ','
               << format_sig(pt.proportions[2]) << ',' << format_sig(pt.frequency[0]) << ','
               << format_sig(pt.frequency[1]) << ',' << format_sig(pt.frequency[2]) << ','
               << favorite << "\n";
        } else {
            nlohmann::ordered_json row;
            row["x_A"] = detail::sig_number(pt.proportions[0]);
            row["x_B"] = detail::sig_number(pt.proportions[1]);
            row["x_C"] = detail::sig_number(pt.proportions[2]);
            row["f_A"] = detail::sig_number(pt.frequency[0]);
            row["f_B"] = detail::sig_number(pt.frequency[1]);
            row["f_C"] = detail::sig_number(pt.frequency[2]);
            row["favorite"] = favorite;
            os << row.dump() << "\n";
        }
    }
}

// Plain-text P3 pixmap, one pixel per site, grid row 0 at the top.
// A = black, B = red, C = green, empty = white.
inline void write_ppm(std::ostream& os, const Lattice& lat) {
    os << "P3\n" << lat.side() << ' ' << lat.side() << "\n255\n";
    for (int y = 0; y < lat.side(); ++y) {
        for (int x = 0; x < lat.side(); ++x) {
            if (x > 0) os << ' ';
            switch (lat.group_at(y * lat.side() + x)) {
                case 0: os << "0 0 0"; break;
                case 1: os << "255 0 0"; break;
                case 2: os << "0 255 0"; break;
                default: os << "255 255 255"; break;
            }
        }
        os << "\n";
    }
}

}  // namespace truelkit
