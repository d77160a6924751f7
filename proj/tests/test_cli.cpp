// Drives the installed CLI binary end to end. The test runner provides
// JAMDOF_CLI (binary path) and JAMDOF_GOLDEN (reference output directory).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

using nlohmann::json;

namespace {

std::string cli_path() {
    const char* p = std::getenv("JAMDOF_CLI");
    REQUIRE(p != nullptr);
    return p;
}

std::string golden_dir() {
    const char* p = std::getenv("JAMDOF_GOLDEN");
    REQUIRE(p != nullptr);
    return p;
}

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

CliResult run_cli(const std::string& args) {
    std::string cmd = cli_path() + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult result;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) result.output.append(buf.data(), n);
    int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const char* kSquare = "\"00:0.3,01:0.3,10:0.3,11:0.1\"";

}  // namespace

TEST_CASE("states matches its golden output") {
    CliResult r = run_cli("states");
    CHECK(r.exit_code == 0);
    CHECK(r.output == read_file(golden_dir() + "/states_k2.txt"));
}

TEST_CASE("region output is stable and carries the DD corner") {
    CliResult r = run_cli(std::string("region --config dd --dist ") + kSquare);
    CHECK(r.exit_code == 0);
    CHECK(r.output == read_file(golden_dir() + "/region_dd.json"));

    json j = json::parse(r.output);
    CHECK(j["meta"]["version"] == "0.1.0");
    CHECK(j["meta"]["config"] == "DD");
    CHECK(j["region"]["sum_dof"].get<double>() == doctest::Approx(0.8));
    CHECK(j["special_points"]["corner"][0].get<double>() == doctest::Approx(0.4));
    // distribution echoed with both the state table and the class form
    CHECK(j["distribution"]["states"]["11"].get<double>() == doctest::Approx(0.1));
    CHECK(j["distribution"]["eta"][1].get<double>() == doctest::Approx(0.6));
}

TEST_CASE("compare lists all nine configurations against the golden file") {
    CliResult r = run_cli(std::string("compare --dist ") + kSquare);
    CHECK(r.exit_code == 0);
    CHECK(r.output == read_file(golden_dir() + "/compare_square.csv"));
    // first data row is the perfect-knowledge box
    CHECK(r.output.find("PP,1.2") != std::string::npos);
    CHECK(r.output.find("NN,0.6") != std::string::npos);
}

TEST_CASE("simulate reports means inside the region and is reproducible") {
    std::string args = std::string("simulate --config dd --dist ") + kSquare +
                       " --budgets 2000 --trials 6 --seed 11";
    CliResult a = run_cli(args);
    CliResult b = run_cli(args);
    CHECK(a.exit_code == 0);
    CHECK(a.output == b.output);

    json j = json::parse(a.output);
    CHECK(j["region_check"]["verdict"] != "outside");
    double sum = j["sum"]["mean"].get<double>();
    CHECK(sum == doctest::Approx(0.8).epsilon(0.05));
    CHECK(j["mean_slots"].get<double>() > 0);

    // the budgets shorthand expanded to both receivers
    CHECK(j["per_receiver"]["mean"].size() == 2);
}

TEST_CASE("simulate honors policy selection") {
    std::string args = std::string("simulate --config np --dist ") + kSquare +
                       " --budgets 4000,2000 --trials 4 --seed 5 --policy corner-1";
    CliResult r = run_cli(args);
    CHECK(r.exit_code == 0);
    json j = json::parse(r.output);
    CHECK(j["per_receiver"]["mean"][0].get<double>() == doctest::Approx(0.6).epsilon(0.05));
    CHECK(j["per_receiver"]["mean"][1].get<double>() == doctest::Approx(0.3).epsilon(0.05));
}

TEST_CASE("simulate writes a slot trace on request") {
    std::string trace = "/tmp/jamdof_test_trace.csv";
    std::remove(trace.c_str());
    std::string args = std::string("simulate --config dd --dist ") + kSquare +
                       " --budgets 300 --trials 2 --seed 3 --trace " + trace;
    CliResult r = run_cli(args);
    CHECK(r.exit_code == 0);
    std::string content = read_file(trace);
    CHECK(content.rfind("slot,state,stage,action,receiver,lc_tag", 0) == 0);
    CHECK(content.find("stage3") != std::string::npos);
    std::remove(trace.c_str());
}

TEST_CASE("exit codes distinguish the failure modes") {
    // probabilities sum to 1.1
    CliResult bad = run_cli("region --config dd --dist \"00:0.5,11:0.6\"");
    CHECK(bad.exit_code == 2);

    // receiver 2 never clean but carries demand
    CliResult degenerate =
        run_cli("simulate --config pp --dist \"01:0.6,11:0.4\" --budgets 10,10 --trials 2");
    CHECK(degenerate.exit_code == 3);

    // a tolerance below zero forces the verdict outside
    CliResult outside = run_cli(std::string("simulate --config pp --dist ") + kSquare +
                                " --budgets 500 --trials 2 --seed 1 --tol -1");
    CHECK(outside.exit_code == 4);

    // corner-1 starves receiver 2 when receiver 1 is never jammed alone
    CliResult starve = run_cli(
        "simulate --config np --dist \"00:0.5,01:0.3,11:0.2\" --budgets 100,100 --trials 2");
    CHECK(starve.exit_code == 5);

    CliResult unknown = run_cli("region --config zz --dist \"00:1.0\"");
    CHECK(unknown.exit_code == 2);

    CliResult no_dist = run_cli("region --config dd");
    CHECK(no_dist.exit_code == 2);
}

TEST_CASE("eta shorthand builds symmetric distributions") {
    CliResult r = run_cli("region --config dd --eta 0.25,0.5,0.25");
    CHECK(r.exit_code == 0);
    json j = json::parse(r.output);
    CHECK(j["distribution"]["marginals"][0].get<double>() == doctest::Approx(0.5));
    CHECK(j["region"]["sum_dof"].get<double>() == doctest::Approx(2.0 / 3.0));

    CliResult both = run_cli(std::string("region --config dd --eta 0.25,0.5,0.25 --dist ") + kSquare);
    CHECK(both.exit_code == 2);
}

TEST_CASE("distribution files load through the at-prefix") {
    std::string path = "/tmp/jamdof_test_dist.txt";
    {
        std::ofstream out(path);
        out << "# test distribution\nK: 2\n00: 0.3\n01: 0.3\n10: 0.3\n11: 0.1\n";
    }
    CliResult r = run_cli("region --config nn --dist @" + path);
    CHECK(r.exit_code == 0);
    json j = json::parse(r.output);
    CHECK(j["region"]["kind"] == "simplex");
    std::remove(path.c_str());

    CliResult missing = run_cli("region --config nn --dist @/tmp/jamdof_no_such_file");
    CHECK(missing.exit_code == 2);
}

TEST_CASE("sweep kinds produce well-formed CSV") {
    CliResult k = run_cli("sweep --kind k --max-k 4");
    CHECK(k.exit_code == 0);
    CHECK(k.output.rfind("K,dof_mat,sum_dp,sum_dd,gap_dp_dd,bound_dp_dd,gap_mat_dp,bound_mat_dp",
                         0) == 0);
    std::size_t lines = 0;
    for (char c : k.output)
        if (c == '\n') ++lines;
    CHECK(lines == 5);  // header + K = 1..4

    CliResult dn = run_cli("sweep --kind dn --points 8");
    CHECK(dn.exit_code == 0);
    CHECK(dn.output.rfind("lambda1,lambda2,dn_sum,nn_sum,condition,dominates", 0) == 0);
    lines = 0;
    for (char c : dn.output)
        if (c == '\n') ++lines;
    CHECK(lines == 65);  // header + 8x8 grid

    CliResult bad = run_cli("sweep --kind nope");
    CHECK(bad.exit_code == 2);
}

TEST_CASE("slope command fits rate against log SNR") {
    std::string args = std::string("slope --config pp --dist ") + kSquare +
                       " --slots 1200 --seed 4 --grid 30,40,50,60";
    CliResult r = run_cli(args);
    CHECK(r.exit_code == 0);
    json j = json::parse(r.output);
    CHECK(j["slope"][0].get<double>() == doctest::Approx(0.6).epsilon(0.12));
    CHECK(j["r_squared"][0].get<double>() > 0.99);
    CHECK(j["grid_db"].size() == 4);
    CHECK(j["mean_rates"].size() == 4);

    CliResult short_grid = run_cli(std::string("slope --config pp --dist ") + kSquare +
                                   " --grid 30,40,50 --slots 100");
    CHECK(short_grid.exit_code == 2);
}

TEST_CASE("serial flag reproduces the parallel results") {
    std::string base = std::string("simulate --config dd --dist ") + kSquare +
                       " --budgets 800 --trials 4 --seed 9";
    CliResult parallel = run_cli(base);
    CliResult serial = run_cli(base + " --serial");
    CHECK(parallel.exit_code == 0);
    CHECK(serial.exit_code == 0);
    json jp = json::parse(parallel.output);
    json js = json::parse(serial.output);
    CHECK(jp["per_receiver"] == js["per_receiver"]);
    CHECK(jp["sum"] == js["sum"]);
}
