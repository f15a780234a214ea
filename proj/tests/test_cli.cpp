// End-to-end tests of the parmc binary: exit codes, stats files, bench CSV.

#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    std::string cmd = std::string(PARMC_BIN) + " " + args + " 2>&1";
    std::array<char, 4096> buf{};
    std::string output;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (fgets(buf.data(), buf.size(), pipe)) output += buf.data();
    int status = pclose(pipe);
    int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return {code, output};
}

fs::path temp_file(const std::string& name, const std::string& contents) {
    fs::path p = fs::temp_directory_path() / name;
    std::ofstream out(p);
    out << contents;
    return p;
}

}   // namespace

TEST_CASE("cli: holds and violated exit codes") {
    RunResult r = run_cli("--gen token-ring:2 --formula \"E<>(cs_0)\" --algo rg --threads 2");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("HOLDS") != std::string::npos);

    r = run_cli("--gen philosophers:2 --formula \"A<>(eat_0)\" --algo rpg");
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("VIOLATED") != std::string::npos);
}

TEST_CASE("cli: model syntax errors exit 2 with a line number") {
    fs::path bad = temp_file("parmc_bad.ksg", "init 0\nstate 0 []\nedge 0 zz\n");
    RunResult r = run_cli("--model " + bad.string() + " --formula \"E<>(p)\"");
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("line 3") != std::string::npos);
    fs::remove(bad);
}

TEST_CASE("cli: formula errors exit 2") {
    RunResult r = run_cli("--gen token-ring:2 --formula \"E(p U\"");
    CHECK(r.exit_code == 2);
}

TEST_CASE("cli: oracle algo on an explicit model") {
    fs::path model = temp_file("parmc_ok.ksg",
                               "init 0\nstate 0 [p]\nstate 1 [q]\nedge 0 1\nedge 1 0\n");
    RunResult r = run_cli("--model " + model.string() + " --formula \"E<>(q)\" --algo oracle");
    CHECK(r.exit_code == 0);
    // oracle requires an explicit model
    RunResult r2 = run_cli("--gen token-ring:2 --formula \"E<>(cs_0)\" --algo oracle");
    CHECK(r2.exit_code == 2);
    fs::remove(model);
}

TEST_CASE("cli: stats file carries the full schema") {
    fs::path stats = fs::temp_directory_path() / "parmc_stats.json";
    RunResult r = run_cli("--gen token-ring:3 --formula \"A[](-(cs_0 and cs_1))\" --algo rpg "
                          "--threads 2 --table-bits 14 --stats " +
                          stats.string());
    CHECK(r.exit_code == 0);
    std::ifstream in(stats);
    REQUIRE(in.good());
    std::string json((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    for (const char* key : {"states", "forward_edges", "reverse_edges_stored",
                            "parent_links_stored", "suc_decrements", "collect_rounds", "steals",
                            "forward_seconds", "backward_seconds", "peak_memory_estimate"}) {
        CAPTURE(key);
        CHECK(json.find("\"" + std::string(key) + "\":") != std::string::npos);
    }
    fs::remove(stats);
}

TEST_CASE("cli: formula file input") {
    fs::path f = temp_file("parmc_formula.txt", "E<>(cs_0)\n");
    RunResult r = run_cli("--gen token-ring:2 --formula-file " + f.string());
    CHECK(r.exit_code == 0);
    fs::remove(f);
}

TEST_CASE("cli: witness printing") {
    RunResult r = run_cli("--gen philosophers:2 --formula \"A<>(eat_0)\" --witness");
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("witness path") != std::string::npos);
}

TEST_CASE("cli: bench CSV has stable verdicts and the speedup column") {
    RunResult r = run_cli("bench --gen token-ring:3 --formula \"E[](-cs_0)\" --algo rg "
                          "--threads-list 1,2 --repeat 2 --table-bits 14");
    CHECK(r.exit_code == 0);
    // Header plus 4 rows.
    std::size_t lines = 0, holds_count = 0;
    std::istringstream ss(r.output);
    std::string line;
    std::getline(ss, line);
    CHECK(line.find("threads,repeat,holds") == 0);
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        ++lines;
        // verdict column is the third field
        auto p1 = line.find(',');
        auto p2 = line.find(',', p1 + 1);
        auto p3 = line.find(',', p2 + 1);
        if (line.substr(p2 + 1, p3 - p2 - 1) == "1") ++holds_count;
    }
    CHECK(lines == 4);
    CHECK(holds_count == 4);   // E[](-cs_0) holds on every row
}

TEST_CASE("cli: bench speedup is exactly 1.0 for a threads-list of 1") {
    RunResult r = run_cli("bench --gen token-ring:2 --formula \"E<>(cs_0)\" --algo rg "
                          "--threads-list 1 --repeat 3 --table-bits 10");
    CHECK(r.exit_code == 0);
    std::istringstream ss(r.output);
    std::string line;
    std::getline(ss, line);   // header
    int rows = 0;
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        ++rows;
        // speedup is field 7
        std::istringstream ls(line);
        std::string field;
        for (int i = 0; i < 7; ++i) std::getline(ls, field, ',');
        CHECK(field == "1");
    }
    CHECK(rows == 3);
}

TEST_CASE("cli: state-table exhaustion exits 3 with a resize hint") {
    RunResult r = run_cli("--gen token-ring:12 --formula \"E<>(cs_0 and cs_1)\" --table-bits 10");
    CHECK(r.exit_code == 3);
    CHECK(r.output.find("state table full") != std::string::npos);
    CHECK(r.output.find("--table-bits") != std::string::npos);
}

TEST_CASE("cli: usage errors exit 2") {
    RunResult r = run_cli("--formula \"E<>(p)\"");   // no model source
    CHECK(r.exit_code == 2);
    r = run_cli("--gen token-ring:2 --formula \"E<>(cs_0)\" --algo bogus");
    CHECK(r.exit_code == 2);
    r = run_cli("--gen nosuch:3 --formula \"E<>(p)\"");
    CHECK(r.exit_code == 2);
}
