#include "tprsm/cli.hpp"

#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

using namespace tprsm;
using namespace tprsm::cli;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

struct Proc {
    int status = -1;
    std::string out;
};

// Runs the installed binary; stderr is folded into stdout.
Proc run_cli(const std::string& args) {
    const std::string cmd = std::string(TPRSM_CLI_PATH) + " " + args + " 2>&1";
    Proc p;
    FILE* f = popen(cmd.c_str(), "r");
    REQUIRE(f != nullptr);
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), f)) > 0) p.out.append(buf.data(), n);
    const int raw = pclose(f);
    p.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return p;
}

std::size_t column(const Output& o, const std::string& name) {
    for (std::size_t i = 0; i < o.columns.size(); ++i) {
        if (o.columns[i] == name) return i;
    }
    FAIL("missing column " << name);
    return 0;
}

double num(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return *d;
    return static_cast<double>(std::get<long long>(c));
}

std::string data_section(const std::string& csv) {
    std::istringstream in(csv);
    std::string line, data;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '#') data += line + '\n';
    }
    return data;
}

RunConfig config(const std::string& command) {
    RunConfig c;
    c.command = command;
    return c;
}

}  // namespace

TEST_CASE("config json round trip", "[cli]") {
    RunConfig c = config("spectrum");
    c.delta = 0.3;
    c.stark = -0.2;
    c.g_min = 0.1;
    c.g_max = 0.2;
    c.steps = 3;
    c.seed = 99;
    const json j = c;
    CHECK(j.at("u") == -0.2);
    const auto back = config_from_json(j);
    CHECK(json(back) == j);
    CHECK(json(config_from_json(json{{"config", j}, {"rows", json::array()}})) == j);
    CHECK_THROWS(config_from_json(json{{"command", "spectrum"}, {"delta", "oops"}}));
}

TEST_CASE("derived command", "[cli]") {
    auto c = config("derived");
    c.delta = 0.5;
    c.stark = 0.1;
    c.g = 0.4;
    const auto o = run(c);
    REQUIRE(o.rows.size() == 1);
    CHECK_THAT(num(o.rows[0][column(o, "beta")]), WithinAbs(0.594588390010563135, 1e-14));
    CHECK_THAT(num(o.rows[0][column(o, "g_crit")]), WithinAbs(0.497493718553309977, 1e-15));
    CHECK(o.ok());
}

TEST_CASE("spectrum command", "[cli]") {
    auto c = config("spectrum");
    c.g_min = 0.1;
    c.g_max = 0.3;
    c.steps = 3;
    c.levels = 4;
    const auto o = run(c, 2);
    CHECK(o.ok());
    const std::vector<std::string> lead = {"g", "x", "sector_q", "parity", "level_index", "energy", "energy_scaled",
                                           "method"};
    REQUIRE(o.columns.size() >= lead.size());
    for (std::size_t i = 0; i < lead.size(); ++i) CHECK(o.columns[i] == lead[i]);

    const auto im = column(o, "method"), ie = column(o, "energy"), ir = column(o, "residual");
    const auto ig = column(o, "g"), iq = column(o, "sector_q"), ip = column(o, "parity"), il = column(o, "level_index");
    std::map<std::tuple<double, double, long long, long long>, std::map<std::string, double>> by_level;
    for (const auto& r : o.rows) {
        const auto method = std::get<std::string>(r[im]);
        if (method == "ed") CHECK(std::isfinite(num(r[ir])));
        if (method == "pole") continue;
        by_level[{num(r[ig]), num(r[iq]), std::get<long long>(r[ip]), std::get<long long>(r[il])}][method] = num(r[ie]);
    }
    CHECK(by_level.size() == 3 * 4 * 4);
    for (const auto& [key, m] : by_level) {
        REQUIRE(m.count("ed"));
        REQUIRE(m.count("gfunction"));
        CHECK_THAT(m.at("gfunction"), WithinAbs(m.at("ed"), 1e-8));
    }
    // rows are ordered by g first
    for (std::size_t i = 1; i < o.rows.size(); ++i) CHECK(num(o.rows[i][ig]) >= num(o.rows[i - 1][ig]));
}

TEST_CASE("remaining commands produce rows", "[cli]") {
    SECTION("gzeros") {
        auto c = config("gzeros");
        c.g = 0.3;
        c.levels = 3;
        const auto o = run(c);
        CHECK(o.ok());
        CHECK(o.rows.size() >= 3);
    }
    SECTION("special-points") {
        auto c = config("special-points");
        c.delta = 5.0;
        c.stark = 0.25;
        c.q = "0.25";
        c.x_min = 0.5;
        c.x_max = 3.0;
        c.points = 120;
        const auto o = run(c, 2);
        CHECK(o.rows.size() >= 2);
    }
    SECTION("collapse") {
        auto c = config("collapse");
        c.delta = 0.2;
        c.stark = 0.2;
        c.samples = 50;
        const auto o = run(c);
        CHECK(std::get<std::string>(o.rows[0][column(o, "kind")]) == "FullCollapse");
        CHECK(num(o.rows[0][column(o, "witness_min_eigenvalue")]) >= -1e-10);
        c.delta = 5.0;
        c.stark = 0.25;
        const auto b = run(c);
        CHECK(std::get<std::string>(b.rows[0][column(b, "kind")]) == "InfiniteBoundStates");
        CHECK_THAT(num(b.rows[0][column(b, "nu2")]), WithinAbs(-5.390625, 1e-12));
    }
    SECTION("ladder") {
        auto c = config("ladder");
        c.delta = 5.0;
        c.stark = 0.25;
        c.levels = 9;
        const auto o = run(c);
        CHECK(o.rows.size() == 9);
        CHECK_THAT(o.summary.at("fd_slope_n_ge_3").get<double>(), WithinAbs(-1.3531, 0.135));
    }
    SECTION("gap") {
        auto c = config("gap");
        c.g = 0.0;
        const auto o = run(c);
        CHECK_THAT(num(o.rows[0][column(o, "gap")]), WithinAbs(0.5, 1e-12));
    }
    SECTION("gap-exponent") {
        auto c = config("gap-exponent");
        c.stark = 0.2;
        const auto o = run(c);
        CHECK_THAT(o.summary.at("z_nu").get<double>(), WithinAbs(0.75, 0.02));
    }
    SECTION("gap-vs-delta") {
        auto c = config("gap-vs-delta");
        c.stark = 0.25;
        c.delta_min = 0.2;
        c.delta_max = 0.3;
        c.delta_steps = 5;
        const auto o = run(c);
        CHECK(o.rows.size() == 5);
        CHECK(o.summary.at("coupling_substitution").get<std::string>() == "g = g_c (1 - 9.9999999999999995e-07)");
    }
}

TEST_CASE("validation", "[cli]") {
    auto c = config("derived");
    c.g = 0.6;
    c.stark = 0.1;
    CHECK_THROWS_WITH(run(c), ContainsSubstring("coupling exceeds critical value g_c"));
    CHECK_THROWS_AS(run(config("nonsense")), std::invalid_argument);
    auto f = config("derived");
    f.format = "xml";
    CHECK_THROWS_AS(run(f), std::invalid_argument);
    auto s = config("spectrum");
    s.g_min = 0.1;
    CHECK_THROWS_AS(run(s), std::invalid_argument);
    CHECK_THAT(error_record("invalid_parameter", "bad", "gap"), ContainsSubstring("\"invalid_parameter\""));
}

TEST_CASE("csv and json writers", "[cli]") {
    auto c = config("spectrum");
    c.g = 0.2;
    c.levels = 2;
    c.method = "ed";
    const auto o = run(c);
    std::ostringstream csv;
    write_csv(csv, c, o);
    const auto text = csv.str();
    CHECK(text.rfind("# tprsm spectrum\n# config: ", 0) == 0);
    CHECK_THAT(text, ContainsSubstring("# versions: "));
    CHECK_THAT(text, ContainsSubstring("# convergence: "));
    CHECK_THAT(data_section(text), ContainsSubstring("g,x,sector_q,parity,level_index,energy,energy_scaled,method"));

    const auto doc = to_json_document(c, o);
    CHECK(doc.at("rows").size() == o.rows.size());
    CHECK(doc.at("columns") == json(o.columns));
    CHECK(json(config_from_json(doc)) == json(c));

    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_double(std::nan("")) == "nan");
    CHECK(std::stod(format_double(0.1)) == 0.1);
}

TEST_CASE("binary: round trip and exit codes", "[cli][process]") {
    const auto dir = std::filesystem::temp_directory_path() / "tprsm_cli_test";
    std::filesystem::create_directories(dir);
    const auto first = (dir / "a.json").string();
    const auto second = (dir / "b.json").string();

    auto r = run_cli("spectrum --delta 0.5 --u 0.1 --g-min 0.1 --g-max 0.2 --steps 2 --levels 3 --format json --out " +
                     first);
    REQUIRE(r.status == 0);
    r = run_cli("--config " + first + " --out " + second);
    REQUIRE(r.status == 0);
    std::ifstream a(first), b(second);
    const auto ja = json::parse(a), jb = json::parse(b);
    CHECK(ja.at("rows") == jb.at("rows"));
    CHECK(ja.at("columns") == jb.at("columns"));

    const auto csv1 = run_cli("gap --delta 0.5 --u 0.1 --g 0.2");
    const auto csv2 = run_cli("gap --delta 0.5 --u 0.1 --g 0.2 --threads 3");
    REQUIRE(csv1.status == 0);
    CHECK(data_section(csv1.out) == data_section(csv2.out));

    const auto bad = run_cli("derived --g 0.6 --u 0.1");
    CHECK(bad.status == 1);
    CHECK_THAT(bad.out, ContainsSubstring("coupling exceeds critical value g_c"));
    CHECK_THAT(bad.out, ContainsSubstring("\"kind\""));

    CHECK(run_cli("derived --no-such-flag 3").status == 2);
    CHECK(run_cli("--config /nonexistent/cfg.json").status == 2);
    CHECK(run_cli("").status == 2);
    CHECK(run_cli("--help").status == 0);

    std::filesystem::remove_all(dir);
}
