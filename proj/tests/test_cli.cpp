// Drives the installed command-line binary end to end: output values,
// exit-code discipline, and byte-level reproducibility of CSV emission.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run(const std::string& args) {
    std::string cmd = std::string(CLI_BINARY) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf;
    while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
    int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string data(const char* name) { return std::string(TEST_DATA_DIR) + "/" + name; }

std::filesystem::path fresh_dir(const char* name) {
    auto dir = std::filesystem::temp_directory_path() / "plab_cli_tests" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("analyze prints exact fractions") {
    auto r = run("analyze " + data("example1.json"));
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("commitment (persuasion) value: 5/3") != std::string::npos);
    CHECK(r.output.find("cheap-talk (quasi-concave) value: 1") != std::string::npos);
    CHECK(r.output.find("best-response breakpoints: 1/4 3/4") != std::string::npos);

    auto r2 = run("analyze " + data("example2.json"));
    CHECK(r2.exit_code == 0);
    CHECK(r2.output.find("w1=1/2 w2=1/2") != std::string::npos);
    CHECK(r2.output.find("alpha=1/3") != std::string::npos);
    CHECK(r2.output.find("breakpoints: 1/4 1/2 3/4") != std::string::npos);
}

TEST_CASE("solve-static emits the sweep curve") {
    auto dir = fresh_dir("sweep");
    auto r = run("solve-static " + data("example1.json") + " --grid 6 --out " + dir.string());
    CHECK(r.exit_code == 0);
    std::string sweep = slurp(dir / "sweep.csv");
    CHECK(sweep == "lambda,e_star\n0,0\n1/6,1/3\n1/3,5/3\n1/2,3/2\n2/3,5/3\n5/6,1/3\n1,0\n");
    std::string eq = slurp(dir / "equilibria.csv");
    CHECK(eq.find("1/2,m1->a1 m2->a2,3/2,3,4") != std::string::npos);
    CHECK(std::filesystem::exists(dir / "manifest.json"));
}

TEST_CASE("hull caps the sender payoff at the commitment value") {
    auto dir = fresh_dir("hull");
    auto r = run("hull " + data("example1.json") + " --grid 12 --out " + dir.string());
    CHECK(r.exit_code == 0);
    CHECK(slurp(dir / "hull.csv").find("5/3,10/3") != std::string::npos);
    std::string vh = slurp(dir / "sweep_hull.csv");
    CHECK(vh.find("1/3,5/3") != std::string::npos);
    CHECK(vh.find("2/3,5/3") != std::string::npos);
}

TEST_CASE("simulate reproduces byte-identical CSVs under a fixed seed") {
    auto dir1 = fresh_dir("sim1");
    auto dir2 = fresh_dir("sim2");
    std::string args = "simulate " + data("example1.json") +
                       " --profile canonical --lambda 1/3 --N 60 --delta 0.99 --horizon 600"
                       " --reps 20 --seed 11 --out ";
    CHECK(run(args + dir1.string()).exit_code == 0);
    CHECK(run(args + dir2.string()).exit_code == 0);
    for (const char* f : {"payoffs.csv", "frequencies.csv", "outcome.csv"})
        CHECK(slurp(dir1 / f) == slurp(dir2 / f));
}

TEST_CASE("check-deviations flags the profitable static deviation") {
    auto dir = fresh_dir("dev");
    std::ofstream(dir / "family.json")
        << R"({"lambda": ["1/4", "3/4"],
               "posteriors": [["1", "0"], ["1/3", "2/3"]],
               "kappa": ["a1", "a3"]})";
    auto r = run("check-deviations " + data("example2.json") + " --family " +
                 (dir / "family.json").string() + " --deviations obedience,copula,marginal --out " +
                 dir.string());
    CHECK(r.exit_code == 1);  // a profitable deviation exists
    std::string csv = slurp(dir / "deviations.csv");
    CHECK(csv.find("copula,0,3/4,3/4") != std::string::npos);
    CHECK(csv.find("marginal_preserving,0,3/4,3/4") != std::string::npos);
    CHECK(csv.find("obedience,,,0") != std::string::npos);
}

TEST_CASE("check-deviations accepts a simulated outcome via its manifest") {
    auto dir = fresh_dir("devsim");
    std::string sim = "simulate " + data("example2.json") +
                      " --profile scripted:example2 --delta 0.999 --horizon 10000 --reps 200"
                      " --seed 13 --out " +
                      dir.string();
    CHECK(run(sim).exit_code == 0);
    auto r = run("check-deviations " + data("example2.json") + " --from-sim " +
                 (dir / "manifest.json").string() + " --deviations obedience,copula --out " +
                 dir.string());
    CHECK(r.exit_code == 0);  // within Monte Carlo tolerance
}

TEST_CASE("input errors exit with code 2") {
    CHECK(run("analyze /definitely/not/there.json").exit_code == 2);
    auto dir = fresh_dir("badgrid");
    CHECK(run("solve-static " + data("example2.json") + " --lambda 7/6 --out " + dir.string())
              .exit_code == 2);
    CHECK(run("simulate " + data("example1.json") +
              " --profile canonical --lambda 1/3 --horizon 10 --out " + dir.string())
              .exit_code == 2);  // discounted tail bound refusal
}
