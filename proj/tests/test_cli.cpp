#include <doctest.h>

#include "wlab/cli.hpp"
#include "wlab/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace wlab;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "whitney_lab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("wlab_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string write(const std::string& name, const std::string& text) {
    fs::path p = scratch() / name;
    std::ofstream(p) << text;
    return p.string();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        bool quoted = false;
        for (char ch : line) {
            if (ch == '"') quoted = !quoted;
            else if (ch == ',' && !quoted) {
                cells.push_back(cell);
                cell.clear();
            } else {
                cell += ch;
            }
        }
        cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

// Two strips of width 0.5 to the right of [0,2]x[0,1], shifted by (0.5, 0) with r = 2.
const char* kChain = R"({"r": 2, "provenance": "test",
  "pieces": [{"type": "box", "lo": [0, 0], "hi": [2, 1]},
             {"type": "box", "lo": [2, 0], "hi": [2.5, 1]},
             {"type": "box", "lo": [2.5, 0], "hi": [3, 1]}],
  "shifts": [[0.5, 0], [0.5, 0]]})";

}  // namespace

TEST_CASE("basis") {
    auto axes = write("axes.json", R"({"dirs": [[1, 0], [0, 1]]})");
    auto r = run({"basis", "--dim", "2", "--order", "2", "--dirs", axes});
    REQUIRE(r.code == 0);
    Json j = parse_json(r.out);
    CHECK(j["n_basis"] == 4);
    CHECK(j["tool_version"] == kToolVersion);
    CHECK(j["seed"] == 1);
    CHECK(j["config_hash"].get<std::string>().size() == 16);
    CHECK(j["exponents"].size() == 6);

    auto diag = write("diag.json", R"({"dirs": [[1, 0], [0, 1], [1, 1]]})");
    j = parse_json(run({"basis", "--order", "2", "--dirs", diag}).out);
    CHECK(j["n_basis"] == 3);
}

TEST_CASE("chain-bound") {
    auto chain = write("chain.json", kChain);
    auto r = run({"chain-bound", "--chain", chain, "--w0", "0", "--p", "inf"});
    REQUIRE(r.code == 0);
    Json j = parse_json(r.out);
    CHECK(j["bound"]["recursion"] == 5.0);
    CHECK(j["bound"]["closed_form"] == 5.0);
    CHECK(j["bound"]["m"] == 2);
    CHECK(j["verification"]["ok"] == true);
    CHECK(j["bound"]["w0_assumption"].get<std::string>().find("<= 0") != std::string::npos);

    r = run({"chain-bound", "--m", "1", "--order", "1", "--w0", "1", "--p", "1", "--format", "csv"});
    REQUIRE(r.code == 0);
    auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0][5] == "recursion");
    CHECK(rows[1][5] == "3");

    // a chain that does not verify
    Json bad = parse_json(kChain);
    bad["shifts"][0] = {0.25, 0};
    auto badf = write("bad_chain.json", bad.dump());
    CHECK(run({"chain-bound", "--chain", badf, "--w0", "0"}).code == 2);
    r = run({"verify-chain", "--chain", badf});
    CHECK(r.code == 2);
    CHECK(parse_json(r.out)["verification"]["ok"] == false);
    CHECK(run({"verify-chain", "--chain", chain}).code == 0);
}

TEST_CASE("counterexample") {
    auto r = run({"counterexample", "--dim", "2", "--order", "1", "--eps", "0.01", "--n", "1,4,16,64", "--density", "1024"});
    REQUIRE(r.code == 0);
    auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0][0] == "n");
    CHECK(rows[0][2] == "floor");
    for (std::size_t i = 2; i < rows.size(); ++i) CHECK(std::stod(rows[i][2]) > std::stod(rows[i - 1][2]));
    CHECK(std::stod(rows[1][2]) == doctest::Approx((1 - 4 * std::log(2.0)) / 4));
    // margin too small for this eps
    CHECK(run({"counterexample", "--dim", "2", "--eps", "0.5", "--n", "1"}).code == 2);
}

TEST_CASE("modulus, approx and estimates") {
    auto dom = write("interval.json", R"({"type": "box", "lo": [0], "hi": [1]})");
    auto fx = write("x2.json", R"({"kind": "polynomial", "exponents": [[2]], "coeffs": [1]})");
    auto r = run({"approx", "--domain", dom, "--function", fx, "--order", "2", "--p", "inf", "--grid", "2001"});
    REQUIRE(r.code == 0);
    Json j = parse_json(r.out);
    CHECK(j["approx"]["error"].get<double>() == doctest::Approx(0.125).epsilon(1e-6));
    CHECK(j["approx"]["status"] == "optimal");

    r = run({"modulus", "--domain", dom, "--function", fx, "--order", "2", "--p", "inf", "--grid", "101"});
    REQUIRE(r.code == 0);
    CHECK(parse_json(r.out)["modulus"]["value"].get<double>() == doctest::Approx(0.5).epsilon(1e-6));

    for (std::string p : {"1/2", "0.5", "2", "inf"}) {
        r = run({"modulus", "--domain", dom, "--function", fx, "--order", "1", "--p", p, "--grid", "51", "--format", "csv"});
        CHECK(r.code == 0);
    }
    // a capped iterative solver is a convergence failure
    auto x5 = write("x5.json", R"({"kind": "polynomial", "exponents": [[5]], "coeffs": [1]})");
    r = run({"approx", "--domain", dom, "--function", x5, "--order", "2", "--p", "1.5", "--max-iter", "1", "--grid", "101"});
    CHECK(r.code == 3);
    CHECK(parse_json(r.out)["approx"]["status"] == "max_iter");
    CHECK(run({"approx", "--domain", dom, "--function", x5, "--order", "2", "--p", "1.5", "--grid", "101"}).code == 0);

    CHECK(run({"modulus", "--domain", dom, "--function", fx, "--p", "-1"}).code == 1);
    CHECK(run({"modulus", "--domain", dom, "--function", fx, "--p", "abc"}).code == 1);

    r = run({"whitney-estimate", "--domain", dom, "--order", "2", "--p", "inf", "--family-size", "5", "--grid", "201",
             "--format", "csv"});
    REQUIRE(r.code == 0);
    auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0][4] == "lower_bound");
    CHECK(std::stod(rows[1][4]) > 0);
    CHECK(std::stod(rows[1][4]) <= 2 + std::exp(-2.0));

    auto sq = write("square.json", R"({"type": "box", "lo": [0, 0], "hi": [1, 1]})");
    r = run({"report", "--domain", sq, "--orders", "1,2", "--ps", "1,inf", "--family-size", "3", "--grid", "11"});
    REQUIRE(r.code == 0);
    rows = csv_rows(r.out);
    CHECK(rows.size() == 5);
    CHECK(rows[0].back() == "config_hash");
}

TEST_CASE("decompose and xray-check") {
    auto disk = write("disk.json", R"({"type": "ball", "center": [0, 0], "radius": 1.5})");
    auto out = (scratch() / "planar.json").string();
    auto r = run({"decompose", "--method", "planar", "--domain", disk, "--order", "2", "--samples", "2000", "--out", out});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    Json j = read_json_file(out);
    CHECK(j["provenance"] == "planar");
    CHECK(j["verification"]["ok"] == true);
    // the exported chain loads and verifies again
    CHECK(run({"verify-chain", "--chain", out, "--samples", "2000"}).code == 0);

    auto cube = write("cube.json", R"({"type": "box", "lo": [-1, -1, -1], "hi": [1, 1, 1]})");
    r = run({"decompose", "--method", "xray", "--domain", cube});
    CHECK(r.code == 2);
    CHECK(r.err.find("X-ray") != std::string::npos);
    r = run({"xray-check", "--domain", cube, "--samples", "200"});
    REQUIRE(r.code == 0);
    j = parse_json(r.out);
    CHECK(j["ok"] == false);
    CHECK(j["witnesses"].size() > 0);

    auto ball = write("ball.json", R"({"type": "ball", "center": [0, 0], "radius": 1})");
    r = run({"decompose", "--method", "slices", "--domain", ball, "--format", "csv"});
    CHECK(r.code == 0);
    CHECK(csv_rows(r.out).size() == 6);
}

TEST_CASE("config files and diagnostics") {
    auto cfg = write("cfg.json", R"({"dim": 2, "order": 3})");
    Json j = parse_json(run({"basis", "--config", cfg}).out);
    CHECK(j["n_basis"] == 9);
    // flags win over the file
    j = parse_json(run({"basis", "--config", cfg, "--order", "1"}).out);
    CHECK(j["n_basis"] == 1);

    auto broken = write("broken.json", "{\n  \"dim\": 2,\n  \"order\" 3\n}\n");
    auto r = run({"basis", "--config", broken});
    CHECK(r.code == 1);
    CHECK(r.err.find("broken.json:3:") != std::string::npos);

    auto baddom = write("baddom.json", R"({"type": "polytope", "A": [[1, 0], [0, 1]], "b": [1]})");
    r = run({"xray-check", "--domain", baddom});
    CHECK(r.code == 1);
    CHECK(r.err.find("baddom.json.b") != std::string::npos);

    CHECK(run({"bogus"}).code == 1);
    CHECK(run({"basis", "--dim", "x"}).code == 1);
    CHECK(run({"basis", "--dim", "2", "--format", "xml"}).code == 1);
}

TEST_CASE("identical runs give identical bytes") {
    auto sq = write("square2.json", R"({"type": "box", "lo": [0, 0], "hi": [1, 1]})");
    std::vector<std::string> args = {"whitney-estimate", "--domain", sq, "--order", "2", "--p", "2", "--family-size", "4",
                                     "--density", "300", "--seed", "9"};
    auto a = run(args), b = run(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    // the seed and the hash move with the config
    args[args.size() - 1] = "10";
    auto c = run(args);
    CHECK(parse_json(c.out)["config_hash"] != parse_json(a.out)["config_hash"]);
    CHECK(parse_json(c.out)["seed"] == 10);
}
