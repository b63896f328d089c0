#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stqp/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = stqp::cli::dispatch(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch() {
    const auto d = fs::temp_directory_path() / "stqp_unit_cli";
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("gen then solve") {
    const auto d = scratch();
    const auto m = (d / "m.txt").string();
    const auto s = (d / "s.json").string();
    CHECK(run({"gen", "--model", "sym", "--dist", "uniform", "--n", "10", "--seed", "7", "--out", m}).code == 0);
    const std::string first = slurp(m);
    CHECK(run({"gen", "--model", "sym", "--dist", "uniform", "--n", "10", "--seed", "7", "--out", m}).code == 0);
    CHECK(slurp(m) == first);

    CHECK(run({"solve", "--in", m, "--kmax", "8", "--json", s}).code == 0);
    const auto j = nlohmann::json::parse(slurp(s));
    CHECK(j.contains("support"));
    CHECK(j.contains("lambda_star"));
    fs::remove_all(d);
}

TEST_CASE("oracle-compare") {
    const auto r = run({"oracle-compare", "--n", "10", "--reps", "20", "--dist", "normal", "--seed", "1"});
    CHECK(r.code == 0);
    CHECK(r.out.find("agree 20/20") != std::string::npos);
}

TEST_CASE("bounds csv") {
    const auto r = run({"bounds", "--formula", "s_nk", "--n", "4", "--k", "4"});
    CHECK(r.code == 0);
    CHECK(r.out.find("s_nk,4,4,") != std::string::npos);
    CHECK(run({"bounds", "--formula", "list"}).out.find("thm_d") != std::string::npos);
}

TEST_CASE("errors map to exit codes") {
    CHECK(run({"gen", "--bogus"}).code == 1);
    CHECK(run({"solve", "--in", "/nonexistent/m.txt"}).code == 1);
    CHECK(run({"frobnicate"}).code == 1);
    CHECK(run({"bounds", "--formula", "gamma_alpha", "--alpha", "1"}).code == 1);
    CHECK(run({"--help"}).code == 0);
}
