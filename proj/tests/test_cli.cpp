// End-to-end checks of the command-line binary: exact scalar outputs, exit
// codes, metadata headers, rerun determinism, and the seed plumbing
// (flag / environment / config file). Each check execs the real executable.

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace {

struct CliResult {
    int code = -1;
    std::string out;
};

// `prefix` lets a check prepend environment assignments (sh syntax).
CliResult run_cli(const std::string& args, const std::string& prefix = "") {
    const std::string cmd = prefix + TRUELKIT_CLI_PATH " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult result;
    char buf[4096];
    std::size_t n = 0;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) result.out.append(buf, n);
    const int status = pclose(pipe);
    result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

// Everything below the `# key: value` header.
std::string data_section(const std::string& text) {
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line))
        if (line.empty() || line[0] != '#') out += line + "\n";
    return out;
}

std::string meta_value(const std::string& text, const std::string& key) {
    std::istringstream in(text);
    std::string line;
    const std::string want = "# " + key + ": ";
    while (std::getline(in, line))
        if (line.rfind(want, 0) == 0) return line.substr(want.size());
    return "";
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("scalar solvers print exact six-digit results") {
    CliResult duel = run_cli("duel --marks 1,0.8");
    CHECK(duel.code == 0);
    CHECK(duel.out == "P = (0.555556, 0.444444)\n");

    CliResult seq = run_cli("duel --marks 1,0.8 --order sequential");
    CHECK(seq.out == "P = (0.2, 0.8)\n");

    CliResult truel = run_cli("truel solve --marks 1,0.8,0.5 --profile BAA");
    CHECK(truel.code == 0);
    CHECK(truel.out == "P = (0.289855, 0.347826, 0.362319)\n");

    // Default profile is everyone-at-strongest-opponent, i.e. BAA here.
    CHECK(run_cli("truel solve --marks 1,0.8,0.5").out == truel.out);

    CliResult opinion = run_cli("opinion --marks 0.5,0.5,0.5");
    CHECK(opinion.out == "P = (0.25, 0.333333, 0.416667)\n");
}

TEST_CASE("equilibrium commands") {
    CHECK(run_cli("nash --marks 1,0.8,0.5").out == "BAA\n");
    CHECK(run_cli("nash --marks 1,0.8,0.5 --order sequential").out == "BA0\n");

    CliResult path = run_cli("brd --marks 1,0.8,0.5 --start CCB");
    CHECK(path.code == 0);
    CHECK(path.out == "CCB -> BCB -> BAB -> BAA\n");
}

TEST_CASE("exit codes separate usage errors from degenerate games") {
    CHECK(run_cli("").code == 2);                                // no subcommand
    CHECK(run_cli("duel --marks 1,0.8 --order sideways").code == 2);
    CHECK(run_cli("duel --marks 1,1.5").code == 2);              // out-of-range mark
    CHECK(run_cli("truel solve --marks 1,0.8,0.5 --profile AXZ").code == 2);
    CHECK(run_cli("--help").code == 0);
    CHECK(run_cli("spatial run --help").code == 0);

    // All-miss sequential game never absorbs; a capped lattice run times out.
    CHECK(run_cli("truel solve --marks 0,0,0 --order sequential").code == 3);
    CHECK(run_cli("spatial run --side 10 --step-cap 5").code == 3);
}

TEST_CASE("truel table reports per-profile status instead of failing") {
    CliResult table = run_cli("truel table --marks 0,0,0 --order sequential");
    CHECK(table.code == 0);
    const std::string data = data_section(table.out);
    CHECK(data.find("profile,P_A,P_B,P_C,status") != std::string::npos);
    CHECK(data.find("000,,,,nonabsorbing") != std::string::npos);

    CliResult ndjson = run_cli("truel table --marks 1,0.8,0.5 --format ndjson");
    CHECK(ndjson.out.find("{\"profile\":\"BAA\",\"P_A\":0.289855") != std::string::npos);
}

TEST_CASE("stochastic commands are seed-deterministic") {
    const std::string cmd = "nuel --players 3 --games 2000 --bins 10 --seed 9";
    CliResult first = run_cli(cmd);
    CliResult second = run_cli(cmd);
    CHECK(first.code == 0);
    CHECK(data_section(first.out) == data_section(second.out));
    CHECK(meta_value(first.out, "seed") == "9");

    CliResult other = run_cli("nuel --players 3 --games 2000 --bins 10 --seed 10");
    CHECK(data_section(other.out) != data_section(first.out));
}

TEST_CASE("seed precedence: flag over environment over default") {
    const std::string cmd = "nuel --players 3 --games 200 --bins 5";
    CHECK(meta_value(run_cli(cmd).out, "seed") == "12345");
    CHECK(meta_value(run_cli(cmd, "TRUELKIT_SEED=7 ").out, "seed") == "7");
    CHECK(meta_value(run_cli(cmd + " --seed 5", "TRUELKIT_SEED=7 ").out, "seed") == "5");
}

TEST_CASE("config file supplies defaults that flags override") {
    const auto conf = temp_file("truelkit_cli_test.conf");
    std::ofstream(conf) << "seed=42\n";
    const std::string base = "--config " + conf.string() + " nuel --players 3 --games 200 --bins 5";
    CHECK(meta_value(run_cli(base).out, "seed") == "42");
    CHECK(meta_value(run_cli(base + " --seed 6").out, "seed") == "6");
    std::filesystem::remove(conf);
}

TEST_CASE("--out writes metadata plus data to a file") {
    const auto out = temp_file("truelkit_cli_test.csv");
    std::filesystem::remove(out);
    CliResult res = run_cli("league --players 40 --bins 8 --mode sampled --seed 4 --out " +
                            out.string());
    CHECK(res.code == 0);
    CHECK(res.out.empty());  // data went to the file, summary to stderr

    std::ifstream in(out);
    REQUIRE(in.good());
    std::stringstream text;
    text << in.rdbuf();
    CHECK(meta_value(text.str(), "seed") == "4");
    CHECK(data_section(text.str()).rfind("bin_lo,bin_hi,mean_wins\n", 0) == 0);
    std::filesystem::remove(out);
}

TEST_CASE("spatial run emits per-run rows and pixmap snapshots") {
    const auto prefix = temp_file("truelkit_cli_snap");
    CliResult res = run_cli("spatial run --side 10 --runs 2 --seed 3 --snapshot-every 500 "
                            "--snapshot-prefix " + prefix.string());
    CHECK(res.code == 0);
    const std::string data = data_section(res.out);
    CHECK(data.rfind("run,winner,steps,survivors_A,survivors_B,survivors_C\n", 0) == 0);
    CHECK(data.find("\n0,") != std::string::npos);
    CHECK(data.find("\n1,") != std::string::npos);

    const auto first_frame = prefix.string() + "_r000_000000000.ppm";
    std::ifstream frame(first_frame);
    REQUIRE(frame.good());
    std::string magic, dims;
    std::getline(frame, magic);
    std::getline(frame, dims);
    CHECK(magic == "P3");
    CHECK(dims == "10 10");

    for (const auto& entry :
         std::filesystem::directory_iterator(std::filesystem::temp_directory_path()))
        if (entry.path().filename().string().rfind("truelkit_cli_snap", 0) == 0)
            std::filesystem::remove(entry.path());
}
