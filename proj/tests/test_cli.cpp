#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#ifndef FRACHO_CLI_PATH
#error "FRACHO_CLI_PATH must point at the fracho executable"
#endif

namespace {

struct Run {
    int status = -1;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string("\"") + FRACHO_CLI_PATH + "\" " + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    const int st = pclose(p);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::vector<std::vector<double>> rows(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "x,t,value");
    std::vector<std::vector<double>> out;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        out.push_back(row);
    }
    return out;
}

} // namespace

TEST_CASE("tabulate l on an inclusive range") {
    const Run r = run("tabulate --kernel l --nu 0.5 --x 0:5:0.5 --t 1");
    REQUIRE(r.status == 0);
    const auto v = rows(r.out);
    REQUIRE(v.size() == 11);
    CHECK(v[0][2] == doctest::Approx(1.0 / std::sqrt(M_PI)).epsilon(1e-13));
    CHECK(v[10][0] == 5.0);
}

TEST_CASE("tabulate u3 and the pseudo kernel") {
    const auto u3 = rows(run("tabulate --kernel u3 --x 1 --t 1").out);
    REQUIRE(u3.size() == 1);
    CHECK(u3[0][2] == doctest::Approx(0.040841).epsilon(1e-5));
    const auto v3 = rows(run("tabulate --kernel pseudo --n 3 --kappa +1 --x -3:3:0.1 --t 1").out);
    CHECK(v3.size() == 61);
}

TEST_CASE("rows are ordered by t, then x") {
    const auto v = rows(run("tabulate --kernel h --nu 0.5 --x 1:2:1 --t 1:3:1").out);
    REQUIRE(v.size() == 6);
    CHECK(v[0][1] == 1.0);
    CHECK(v[1][0] == 2.0);
    CHECK(v[2][1] == 2.0);
}

TEST_CASE("invalid invocations exit with 2") {
    CHECK(run("").status == 2);
    CHECK(run("tabulate --kernel nope").status == 2);
    CHECK(run("tabulate --kernel l --nu 1.5 --x 1 --t 1").status == 2);
    CHECK(run("tabulate --kernel l --x 3:1:0.5 --t 1").status == 2);
    CHECK(run("tabulate --kernel l --x 1:a:1 --t 1").status == 2);
    CHECK(run("verify --suite nothing").status == 2);
    CHECK(run("verify --suite thm-l --n 1").status == 2);
    CHECK(run("--help").status == 0);
}

TEST_CASE("verify exit status follows the reports") {
    const Run ok = run("verify --suite lemma0 --nu 0.5");
    CHECK(ok.status == 0);
    CHECK(ok.out.rfind("LEMMA0(0.5) ", 0) == 0);
    CHECK(ok.out.find("PASS") != std::string::npos);
    // An impossible tolerance must turn into a failure, not an error.
    CHECK(run("verify --suite coro-l --n 2 --tol 1e-12").status == 1);
}

TEST_CASE("config file, with flags taking precedence") {
    const char* path = "cli_test_config.ini";
    FILE* f = std::fopen(path, "w");
    REQUIRE(f != nullptr);
    std::fputs("[tabulate]\nkernel=h\nnu=0.5\nx=1\nt=1\n", f);
    std::fclose(f);
    const auto from_file = rows(run(std::string("--config ") + path + " tabulate").out);
    REQUIRE(from_file.size() == 1);
    CHECK(from_file[0][2] == doctest::Approx(0.219695644733861).epsilon(1e-12));
    const auto overridden = rows(run(std::string("--config ") + path + " tabulate --kernel l").out);
    REQUIRE(overridden.size() == 1);
    CHECK(overridden[0][2] == doctest::Approx(std::exp(-0.25) / std::sqrt(M_PI)).epsilon(1e-12));
}
