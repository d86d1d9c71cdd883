#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "pia/cli.hpp"

using namespace pia;

namespace {

struct Run {
    int code = 0;
    std::string out, err;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    Run r;
    r.code = run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> f;
    std::string cur;
    bool quoted = false;
    for (size_t k = 0; k < line.size(); ++k) {
        const char c = line[k];
        if (quoted) {
            if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
                cur += '"';
                ++k;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            f.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    f.push_back(cur);
    return f;
}

struct Csv {
    std::vector<std::string> header;
    std::vector<std::map<std::string, std::string>> rows;
    double num(size_t r, const std::string& col) const { return std::stod(rows.at(r).at(col)); }
};

// parses and checks the schema: header first, every row the same width, numbers lossless
Csv parse_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    Csv c;
    REQUIRE(std::getline(is, line));
    c.header = split_line(line);
    REQUIRE(c.header.front() == "x");
    while (std::getline(is, line)) {
        const auto f = split_line(line);
        REQUIRE(f.size() == c.header.size());
        std::map<std::string, std::string> row;
        for (size_t k = 0; k < f.size(); ++k) {
            const std::string& col = c.header[k];
            if (col == "warnings") {
                row[col] = f[k];
                continue;
            }
            size_t used = 0;
            const double v = std::stod(f[k], &used);
            CHECK(used == f[k].size());
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            CHECK((v == 0.0 ? f[k] == "0" : f[k] == buf));
            row[col] = f[k];
        }
        c.rows.push_back(row);
    }
    // complex quantities come as re_/im_ pairs
    for (const auto& h : c.header)
        if (h.rfind("re_", 0) == 0) CHECK(std::find(c.header.begin(), c.header.end(), "im_" + h.substr(3)) != c.header.end());
    return c;
}

}  // namespace

TEST_CASE("corrections table") {
    Run r = cli({"corrections", "--example", "fulling-pos", "--branch", "0", "--theory", "fulling", "--order", "2", "--at", "3"});
    REQUIRE(r.code == 0);
    Csv c = parse_csv(r.out);
    REQUIRE(c.rows.size() == 1);
    CHECK(std::abs(c.num(0, "re_Y_2") - 0.5) < 1e-12);
    CHECK(std::abs(c.num(0, "im_cperp_1") + 1.0) < 1e-12);
    CHECK(c.rows[0].at("warnings").empty());

    r = cli({"corrections", "--example", "fulling-pos", "--order", "0", "--at", "3", "--at", "4"});
    REQUIRE(r.code == 0);
    c = parse_csv(r.out);
    CHECK(c.header == std::vector<std::string>{"x", "re_Q2", "im_Q2", "re_eps0", "im_eps0", "warnings"});
    CHECK(c.rows.size() == 2);

    r = cli({"corrections", "--example", "bec-vortex", "--param", "k=0.04", "--param", "omega=0.002604", "--branch", "lower",
             "--theory", "simplified", "--gauge", "raw", "--order", "2", "--at", "55"});
    REQUIRE(r.code == 0);
    c = parse_csv(r.out);
    CHECK(std::abs(c.num(0, "re_Y_2") - 1.58104e-2) < 5e-7);
    CHECK(std::abs(c.num(0, "re_Y_1") - 2.83539e-4) < 5e-9);
    CHECK(std::abs(c.num(0, "re_cperp_1") - 5.16137e-7) < 5e-12);
    CHECK(std::abs(c.num(0, "re_cperp_2") + 3.15819e-7) < 5e-12);
}

TEST_CASE("wave output") {
    Run r = cli({"wave", "--example", "fulling-pos", "--branch", "1", "--range", "3:5:0.25", "--lambda", "0.5"});
    REQUIRE(r.code == 0);
    const Csv c = parse_csv(r.out);
    CHECK(c.rows.size() == 9);
    for (size_t k = 0; k < c.rows.size(); ++k)
        for (const char* j : {"0", "1"}) {
            CHECK(c.num(k, std::string("re_uminus_") + j) == c.num(k, std::string("re_uplus_") + j));
            CHECK(c.num(k, std::string("im_uminus_") + j) == -c.num(k, std::string("im_uplus_") + j));
        }

    // constant R: the amplitude column is constant
    const auto path = std::filesystem::temp_directory_path() / "pia_cli_const.json";
    std::ofstream(path) << R"({"name": "const", "n": 1, "R": [["4"]], "domain": [0, 10], "hermitian_hint": "real_symmetric"})";
    r = cli({"wave", "--problem", path.string(), "--range", "0:6:0.5", "--order", "2"});
    REQUIRE(r.code == 0);
    const Csv k = parse_csv(r.out);
    for (size_t i = 0; i < k.rows.size(); ++i) {
        CHECK(std::abs(k.num(i, "ampplus") - k.num(0, "ampplus")) < 1e-12);
        CHECK(std::abs(k.num(i, "ampminus") - k.num(0, "ampminus")) < 1e-12);
    }
    std::filesystem::remove(path);

    r = cli({"wave", "--example", "fulling-pos", "--at", "3", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    REQUIRE(j.is_array());
    CHECK(j[0].contains("re_uplus_0"));
}

TEST_CASE("verify reports") {
    Run r = cli({"verify", "--example", "fulling-pos", "--check", "crossings"});
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["crossings"] == nlohmann::json::parse(R"([{"x_cr": 1.0, "p": 1}])"));
    CHECK(j["pass"] == true);

    r = cli({"verify", "--example", "fulling-pos", "--theory", "fulling", "--order", "2", "--lambda", "0.1", "--check", "current"});
    CHECK(r.code == 0);
    j = nlohmann::json::parse(r.out);
    CHECK(j["metric"].get<double>() <= j["tolerance"].get<double>());

    r = cli({"verify", "--example", "scalar-quadratic", "--check", "order-scaling", "--order", "3"});
    CHECK(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["slope"].get<double>() >= 3.5);

    r = cli({"verify", "--example", "fulling-pos", "--check", "residual", "--order", "1", "--lambda", "0.2", "--tol", "1e-30"});
    CHECK(r.code == 4);
    CHECK(nlohmann::json::parse(r.out)["pass"] == false);
}

TEST_CASE("example subcommand") {
    Run r = cli({"example", "fulling-pos"});
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["R"][0][0] == "x*cos(x)^2 + sin(x)^2");
    r = cli({"example", "scalar-quadratic"});
    j = nlohmann::json::parse(r.out);
    CHECK(j["n"] == 1);
    CHECK(j["R"][0][0] == "x^2 + 1");
    r = cli({"example", "bec-vortex"});
    j = nlohmann::json::parse(r.out);
    CHECK(j["params"].contains("k"));
    CHECK(j["params"].contains("omega"));
}

TEST_CASE("exit codes") {
    CHECK(cli({"example", "nope"}).code == 2);
    CHECK(cli({"corrections", "--example", "fulling-pos", "--range", "3:2:0.1"}).code == 2);
    CHECK(cli({"corrections", "--example", "fulling-pos", "--range", "a:b"}).code == 2);
    CHECK(cli({"corrections", "--example", "fulling-pos", "--param", "k=)", "--at", "3"}).code == 2);
    CHECK(cli({"corrections", "--at", "3"}).code == 2);
    CHECK(cli({"corrections", "--example", "fulling-pos", "--bogus"}).code == 2);
    CHECK(cli({"corrections", "--example", "fulling-pos", "--at", "3", "--theory", "nope"}).code == 2);
    CHECK(cli({"corrections", "--problem", "/nonexistent/problem.json", "--at", "3"}).code == 2);
    const Run crossing = cli({"corrections", "--example", "fulling-pos", "--at", "1"});
    CHECK(crossing.code == 3);
    CHECK(crossing.err.find("CrossingPoint") != std::string::npos);
    CHECK(crossing.err.find("x=1") != std::string::npos);
    CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("output is deterministic") {
    const std::vector<std::vector<std::string>> cmds = {
        {"corrections", "--example", "nonhermitian", "--theory", "nonhermitian", "--order", "2", "--range", "2:4:0.5"},
        {"wave", "--example", "fulling-neg", "--branch", "1", "--theory", "wronskian", "--range", "3:5:0.5"},
        {"verify", "--example", "fulling-neg", "--branch", "1", "--theory", "wronskian", "--order", "3", "--check", "wronskian"},
        {"eigen", "--example", "bec-vortex", "--branch", "lower", "--at", "55", "--format", "json"},
        {"reduce", "--example", "bec-vortex"},
    };
    for (const auto& c : cmds) {
        const Run a = cli(c), b = cli(c);
        CHECK(a.code == b.code);
        CHECK(a.out == b.out);
        CHECK(!a.out.empty());
    }
}

TEST_CASE("--out writes the file") {
    const auto path = std::filesystem::temp_directory_path() / "pia_cli_out.csv";
    const Run r = cli({"--out", path.string(), "corrections", "--example", "fulling-pos", "--at", "3"});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream is(path);
    std::stringstream ss;
    ss << is.rdbuf();
    CHECK(parse_csv(ss.str()).rows.size() == 1);
    std::filesystem::remove(path);
}
