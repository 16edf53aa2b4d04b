#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "support.hpp"
#include "wft/config.hpp"
#include "wft/driver.hpp"
#include "wft/errors.hpp"
#include "wft/io.hpp"

using namespace wft;
namespace fs = std::filesystem;

namespace {

RunConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

const char* kModel = "[model]\nfamily = linear\nW_c = 0.125\nW_max = 0.13333333333333333\n";

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::vector<std::string> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(cell);
        if (!line.empty() && line.back() == ',') row.emplace_back();
        rows.push_back(row);
    }
    return rows;
}

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("wft_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(WFT_CLI) + " " + args + " >/dev/null 2>&1";
    int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

TEST_CASE("config parsing") {
    RunConfig c = parse(std::string(kModel) +
                        "[datum]\nbreaks = -0.5 0.5\nrho = 0.1 0.33 0.35\nv = 0.045 0.02 0.005\n"
                        "phase = free congested c\n[run]\nn = 4\nT_end = 3\nsnapshots = 0 1 3\nrounding = floor\n");
    CHECK(c.datum == DatumKind::Inline);
    CHECK(c.breaks == std::vector<double>{-0.5, 0.5});
    CHECK(c.phase == std::vector<Phase>{Phase::Free, Phase::Congested, Phase::Congested});
    CHECK(c.n == 4);
    CHECK(*c.T_end == 3.0);
    CHECK(c.rounding == Rounding::Floor);
    Problem p = build_problem(c);
    CHECK(p.datum.values.size() == 3);
    CHECK(p.snapshots == std::vector<double>{0, 1, 3});

    RunConfig s = parse("[scenario]\nname = traffic_light\nx1 = -12\n[run]\nn = 5\n");
    CHECK(s.datum == DatumKind::Scenario);
    CHECK(s.light.x1 == -12.0);
    Problem sp = build_problem(s);
    CHECK(sp.T_end == 400.0);
    CHECK(sp.datum.breaks.front() == -12.0);

    CHECK_THROWS_AS(parse(std::string(kModel) + "[run]\nbogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[nowhere]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse(std::string(kModel) + "[run]\nn = six\n"), ConfigError);
    CHECK_THROWS_AS(parse(std::string(kModel) + "[datum]\nphase = solid\n"), ConfigError);
    CHECK_THROWS_AS(parse(std::string(kModel) + "[run]\nrounding = ceil\n"), ConfigError);

    // inconsistent data surfaces when the problem is built
    CHECK_THROWS_AS(build_problem(parse(std::string(kModel) + "[datum]\nbreaks = 0\nrho = 0.1\n")), ConfigError);
    CHECK_THROWS_AS(build_problem(parse(std::string(kModel) + "[datum]\nrho = 0.9\nv = 0.01\nphase = c\n")),
                    OutOfDomain);
    CHECK_THROWS(build_problem(parse("[model]\nfamily = linear\nW_c = 0.13333333333333333\nW_max = 0.125\n"
                                     "[datum]\nrho = 0.1\n")));
    CHECK_THROWS_AS(build_problem(parse(std::string(kModel) + "[datum]\nrho = 0.1\n[run]\nT_end = 1\nsnapshots = 2\n")),
                    ConfigError);

    RunConfig r = parse(std::string(kModel) + "[datum]\nkind = random\njumps = 12\n");
    Problem r1 = build_problem(r, 7), r2 = build_problem(r, 7), r3 = build_problem(r, 8);
    CHECK(r1.datum.breaks == r2.datum.breaks);
    CHECK(r1.datum.breaks != r3.datum.breaks);
}

TEST_CASE("csv formatting") {
    CHECK(io::format_number(0.1) == "0.10000000000000001");
    CHECK(io::format_number(-0.0) == "0");
    CHECK(io::format_number(std::nan("")) == "nan");
    CHECK(std::stod(io::format_number(1.0 / 3)) == 1.0 / 3);
    CHECK(io::quote("plain") == "plain");
    CHECK(io::quote("a,b") == "\"a,b\"");
    CHECK(io::quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(io::quote("two\nlines") == "\"two\nlines\"");

    std::ostringstream o;
    io::CsvWriter w(o, {"a", "b"});
    w << 1 << "x,y";
    w.end_row();
    CHECK(o.str() == "a,b\r\n1,\"x,y\"\r\n");
    w << 2.5;
    CHECK_THROWS_AS(w.end_row(), Error);
}

TEST_CASE("run outputs") {
    fs::path dir = scratch("constant");
    REQUIRE(run_cli("--out " + dir.string() + " run " + WFT_CONFIGS + "/constant.ini") == 0);
    auto fronts = read_csv(dir / "fronts.csv");
    REQUIRE(fronts.size() == 1);
    CHECK(fronts[0][0] == "id");
    auto fun = read_csv(dir / "functionals.csv");
    CHECK(fun.size() == 2);
    CHECK(fs::exists(dir / "metadata.json"));
    CHECK(read_csv(dir / "entropy.csv").size() == 1);

    dir = scratch("light");
    REQUIRE(run_cli("--out " + dir.string() + " run " + WFT_CONFIGS + "/traffic_light.ini") == 0);
    fun = read_csv(dir / "functionals.csv");
    REQUIRE(fun.size() > 10);
    std::size_t tv = 0;
    while (fun[0][tv] != "tv") ++tv;
    for (std::size_t i = 2; i < fun.size(); ++i) CHECK(std::stod(fun[i][tv]) <= std::stod(fun[i - 1][tv]) + 1e-12);
    for (const auto& row : read_csv(dir / "fronts.csv")) CHECK(row.size() == 13);
    auto prof = read_csv(dir / "profiles.csv");
    CHECK(prof.size() == 1 + 5 * 401);
    auto ent = read_csv(dir / "entropy.csv");
    CHECK(ent[0] == std::vector<std::string>{"front", "t0", "t1", "kind", "k", "family", "value"});
    CHECK((ent.size() - 1) % (read_csv(dir / "fronts.csv").size() - 1) == 0);
    std::ifstream meta(dir / "metadata.json");
    std::string text((std::istreambuf_iterator<char>(meta)), {});
    CHECK(text.find("W_max=4/30") != std::string::npos);
    CHECK(text.find("\"ok\": true") != std::string::npos);
}

TEST_CASE("ladder") {
    TrafficLightConfig cfg;
    LadderOptions lo;
    lo.n_min = 4;
    lo.n_max = 7;
    lo.jobs = 2;
    auto rows = run_ladder(cfg, lo);
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].n == 4 + static_cast<int>(i));
        CHECK(rows[i].t_d1_closed == rows[0].t_d1_closed);
        CHECK(rows[i].error_closed < 0.02);
        CHECK(rows[i].error_exact < 1e-9);
        if (i > 0) {
            CHECK(rows[i].l1_probe < rows[i - 1].l1_probe);
            CHECK(rows[i].negative_entropy >= rows[i - 1].negative_entropy);
        }
    }

    fs::path dir = scratch("ladder");
    REQUIRE(run_cli("--out " + dir.string() + " ladder " + WFT_CONFIGS + "/traffic_light.ini --n-min 4 --n-max 5") == 0);
    auto csv = read_csv(dir / "ladder.csv");
    CHECK(csv.size() == 3);
}

TEST_CASE("exit codes") {
    fs::path dir = scratch("codes");
    auto write = [&](const std::string& name, const std::string& text) {
        std::ofstream(dir / name) << text;
        return (dir / name).string();
    };
    std::string out = "--out " + (dir / "out").string() + " ";
    CHECK(run_cli(out + "run " + write("bad.ini", "[model]\nfamily = linear\nW_c = zero\n")) == 2);
    CHECK(run_cli(out + "run " + (dir / "missing.ini").string()) == 2);
    CHECK(run_cli(out + "run " + write("swap.ini", "[model]\nfamily = linear\nW_c = 0.13333333333333333\n"
                                                   "W_max = 0.125\n[datum]\nrho = 0.1\n")) == 2);
    CHECK(run_cli(out + "ladder " + std::string(WFT_CONFIGS) + "/traffic_light.ini --n-min 6 --n-max 5") == 2);
    CHECK(run_cli(out + "ladder " + std::string(WFT_CONFIGS) + "/riemann.ini") == 2);
    CHECK(run_cli(out + "frobnicate") == 2);
    CHECK(run_cli(out + "--seed 3 run " + write("cap.ini", std::string(kModel) +
                                                             "[datum]\nkind = random\njumps = 40\n"
                                                             "[run]\nn = 5\nT_end = 20\nmax_events = 3\n")) == 3);
    CHECK(run_cli(out + "--seed 3 run " + std::string(WFT_CONFIGS) + "/random.ini") == 0);
}
