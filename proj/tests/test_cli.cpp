// test_cli.cpp — Command surface, output contracts and sweeps

#include <doctest.h>

#include "cli.hpp"
#include "sweep.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace memkernel;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int status;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int status = cli::run_cli(args, out, err);
    return {status, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> v;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) v.push_back(l);
    return v;
}

std::vector<std::string> fields(const std::string& line) {
    std::vector<std::string> v;
    std::istringstream in(line);
    for (std::string f; std::getline(in, f, ',');) v.push_back(f);
    return v;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("memkernel_test_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

const fs::path kConfigs = fs::path(MEMKERNEL_SOURCE_DIR) / "configs";

// Minimal structural check against the shipped schema: required keys and primitive types.
bool type_matches(const json& v, const std::string& type) {
    if (type == "object") return v.is_object();
    if (type == "array") return v.is_array();
    if (type == "string") return v.is_string();
    if (type == "number") return v.is_number();
    if (type == "integer") return v.is_number_integer();
    if (type == "boolean") return v.is_boolean();
    return false;
}

void check_schema(const json& value, const json& schema, const std::string& where) {
    if (schema.contains("type")) {
        INFO(where);
        CHECK(type_matches(value, schema["type"].get<std::string>()));
    }
    if (schema.contains("enum")) {
        INFO(where);
        CHECK(std::find(schema["enum"].begin(), schema["enum"].end(), value) != schema["enum"].end());
    }
    if (schema.contains("required") && value.is_object()) {
        for (const auto& key : schema["required"]) {
            INFO(where << "." << key.get<std::string>());
            CHECK(value.contains(key.get<std::string>()));
        }
    }
    if (schema.contains("properties") && value.is_object()) {
        for (const auto& [key, sub] : schema["properties"].items()) {
            if (value.contains(key)) check_schema(value[key], sub, where + "." + key);
        }
    }
    if (schema.contains("items") && value.is_array()) {
        for (std::size_t i = 0; i < value.size(); ++i) {
            check_schema(value[i], schema["items"], where + "[" + std::to_string(i) + "]");
        }
    }
}

} // namespace

TEST_CASE("xi table") {
    const auto r = run({"xi", "--kind", "mem", "--r", "0.1", "--tau-end", "5", "--points", "6"});
    CHECK(r.status == 0);
    const auto ls = lines(r.out);
    REQUIRE(ls.size() == 7);
    CHECK(ls[0] == "tau,xi,dxi");
    CHECK(ls[1] == "0,1,0");
    const auto row = fields(ls[2]);
    CHECK(std::stod(row[0]) == 1.0);
    CHECK(std::stod(row[1]) == doctest::Approx(0.96349596128041).epsilon(1e-12));
    CHECK(r.err.empty());
}

TEST_CASE("xi warns about the trigonometric regime on the error stream") {
    const auto r = run({"xi", "--kind", "mem", "--r", "0.5", "--points", "3"});
    CHECK(r.status == 0);
    CHECK(r.err.find("regime: trigonometric (4R>1), positivity not guaranteed") != std::string::npos);
    CHECK(r.out.find("regime") == std::string::npos);
}

TEST_CASE("xi through the post-Markovian branch point") {
    const auto r = run({"xi", "--kind", "post", "--r", "1.0", "--points", "11"});
    CHECK(r.status == 0);
    for (std::size_t i = 1; i < lines(r.out).size(); ++i) {
        for (const auto& f : fields(lines(r.out)[i])) CHECK(std::isfinite(std::stod(f)));
    }
}

TEST_CASE("numbers are printed with 17 significant digits") {
    const auto r = run({"xi", "--r", "0.1", "--tau-end", "1", "--points", "2"});
    CHECK(fields(lines(r.out)[2])[1] == "0.96349596128041004");
}

TEST_CASE("parameter flags") {
    SUBCASE("mixing R with physical rates is rejected") {
        const auto r = run({"xi", "--r", "0.1", "--gamma0", "0.1"});
        CHECK(r.status != 0);
        CHECK(r.err.find("not both") != std::string::npos);
        CHECK(r.out.empty());
    }
    SUBCASE("physical rates give the same table as the ratio") {
        // γ₀ = 0.1, γ = 2, N = 0.5 → R = 0.1
        const auto a = run({"xi", "--gamma0", "0.1", "--gamma", "2", "--n", "0.5", "--points", "5"});
        const auto b = run({"xi", "--r", "0.1", "--n", "0.5", "--points", "5"});
        CHECK(a.status == 0);
        CHECK(a.out == b.out);
    }
    SUBCASE("missing coupling") {
        CHECK(run({"xi"}).status != 0);
    }
    SUBCASE("malformed flag prints usage hint and fails") {
        const auto r = run({"measure", "--bogus"});
        CHECK(r.status != 0);
        CHECK(r.err.find("--help") != std::string::npos);
    }
    SUBCASE("no subcommand") {
        CHECK(run({}).status != 0);
    }
    SUBCASE("bad kind") {
        CHECK(run({"xi", "--kind", "lindblad", "--r", "0.1"}).status != 0);
    }
}

TEST_CASE("measure") {
    SUBCASE("physical regime gives zero and exit 0") {
        const auto r = run({"measure", "--kind", "mem", "--r", "0.1", "--n", "1"});
        CHECK(r.status == 0);
        const auto ls = lines(r.out);
        REQUIRE(ls.size() == 2);
        const auto head = fields(ls[0]);
        const auto row = fields(ls[1]);
        const auto col = [&](const std::string& name) {
            return row[std::find(head.begin(), head.end(), name) - head.begin()];
        };
        CHECK(std::stod(col("value")) <= 1e-8);
        CHECK(col("method") == "analytic-sigma");
    }
    SUBCASE("oscillatory regime is positive and classified Unphysical") {
        const auto r = run({"measure", "--kind", "mem", "--r", "0.5", "--n", "10", "--format", "json"});
        CHECK(r.status == 0);
        const auto doc = json::parse(r.out);
        CHECK(doc["value"].get<double>() > 0.0);
        CHECK(doc["regime"] == "Unphysical");
        CHECK(doc["argmax_pair"].size() == 2);
        CHECK(doc["evaluations"].get<int>() <= 1000);
    }
    SUBCASE("budget below the floor is a flag error") {
        CHECK(run({"measure", "--r", "0.1", "--budget", "10"}).status != 0);
    }
}

TEST_CASE("oracle") {
    SUBCASE("standard point passes") {
        const auto r = run({"oracle", "--kind", "mem", "--r", "0.1", "--n", "1"});
        CHECK(r.status == 0);
        CHECK(r.err.find("max|Δ| ≤ 1e−6: PASS") != std::string::npos);
        CHECK(lines(r.out)[0] == "t,tau,pe,re_b,im_b,pe_exact,re_b_exact,im_b_exact");
    }
    SUBCASE("every method agrees") {
        for (const std::string m : {"augmented", "quadrature", "tcl"}) {
            const auto r = run({"oracle", "--kind", "post", "--r", "0.2", "--n", "1", "--state", "plus", "--method", m,
                                "--format", "json"});
            CHECK(r.status == 0);
            CHECK(json::parse(r.out)["pass"] == true);
        }
    }
    SUBCASE("zero coupling is flat") {
        const auto r = run({"oracle", "--gamma0", "0", "--n", "1", "--points", "5", "--state", "plus"});
        CHECK(r.status == 0);
        for (std::size_t i = 1; i < lines(r.out).size(); ++i) {
            const auto row = fields(lines(r.out)[i]);
            CHECK(row[2] == "0.5");
            CHECK(row[3] == "0.5");
        }
    }
    SUBCASE("tolerance out of range is a flag error") {
        const auto r = run({"oracle", "--r", "0.1", "--tol", "1e-3"});
        CHECK(r.status != 0);
        CHECK(r.out.empty());
    }
    SUBCASE("time-local integration past a zero of xi is reported") {
        const auto r = run({"oracle", "--r", "1.0", "--method", "tcl", "--tau-end", "20"});
        CHECK(r.status != 0);
        CHECK(r.err.find("singular") != std::string::npos);
    }
}

TEST_CASE("column contracts of the table commands") {
    const std::vector<std::pair<std::vector<std::string>, std::string>> cases{
        {{"solve", "--r", "0.1", "--points", "3"}, "t,tau,pe,re_b,im_b,x,y,z,valid"},
        {{"trace-distance", "--r", "0.1", "--points", "3"}, "t,tau,distance"},
        {{"sigma", "--r", "0.1", "--points", "100"}, "t,tau,distance,sigma,sigma_fd"},
        {{"tcl-rates", "--r", "0.1", "--points", "3"}, "t,tau,gamma1,gamma2,gamma3"},
        {{"choi", "--r", "0.1", "--points", "3"}, "tau,lambda1,lambda3,t3,eig0,eig1,eig2,eig3,completely_positive"},
        {{"divisibility", "--r", "0.2", "--n", "1", "--points", "40"}, "min_eigenvalue,tau1,tau2,divisible"},
        {{"positivity", "--r", "0.1", "--points", "3"}, "tau,max_bloch_norm,positive,witness_x,witness_y,witness_z"},
        {{"classify", "--r", "0.1", "--budget", "100"},
         "kind,R,N,regime,physical_flag,positive,max_bloch_norm,completely_positive,cp_min_eigenvalue,divisible,"
         "divisibility_min_eigenvalue,measure,backflow_intervals"},
    };
    for (const auto& [args, header] : cases) {
        const auto r = run(args);
        INFO(args[0]);
        CHECK(r.status == 0);
        CHECK(lines(r.out)[0] == header);
    }
}

TEST_CASE("trace distance of orthogonal states starts at one") {
    const auto r = run({"trace-distance", "--r", "0.1", "--points", "3", "--format", "json"});
    const auto doc = json::parse(r.out);
    CHECK(doc["initial_distance"] == 1.0);
    CHECK(doc["rows"][0]["distance"] == 1.0);
}

TEST_CASE("tcl-rates stop at the first zero of xi") {
    const auto r = run({"tcl-rates", "--r", "1.0", "--tau-end", "20", "--points", "201"});
    CHECK(r.status == 0);
    CHECK(r.err.find("singular") != std::string::npos);
    CHECK(lines(r.out).size() < 202);
}

TEST_CASE("solve flags unphysical images") {
    const auto r = run({"solve", "--r", "1.0", "--n", "0", "--tau-end", "20", "--points", "41"});
    CHECK(r.status == 0);
    CHECK(r.out.find("false") != std::string::npos);
    CHECK(r.err.find("not valid") != std::string::npos);
}

TEST_CASE("bloch vector input") {
    CHECK(run({"solve", "--r", "0.1", "--bloch", "0.6,0,0.8", "--points", "3"}).status == 0);
    CHECK(run({"solve", "--r", "0.1", "--bloch", "1,1,0", "--points", "3"}).status != 0);
}

TEST_CASE("--out writes to a file") {
    const auto dir = scratch("out");
    const auto path = dir / "xi.csv";
    const auto r = run({"xi", "--r", "0.1", "--points", "4", "--out", path.string()});
    CHECK(r.status == 0);
    CHECK(r.out.empty());
    CHECK(lines(slurp(path)).size() == 5);
}

TEST_CASE("sweep config grammar") {
    SUBCASE("lists, ranges and comments") {
        const auto cfg = cli::parse_sweep_config(
            "# comment\nkind = mem, post\nr = logspace(-2, 2, 5)  # trailing\nn = linspace(0, 1, 3)\n"
            "analyses = measure\n");
        CHECK(cfg.kinds.size() == 2);
        REQUIRE(cfg.r.size() == 5);
        CHECK(cfg.r.front() == doctest::Approx(0.01));
        CHECK(cfg.r[2] == doctest::Approx(1.0));
        CHECK(cfg.n == std::vector<double>{0.0, 0.5, 1.0});
        CHECK(cli::expand(cfg).size() == 30);
    }
    SUBCASE("JSON is equivalent") {
        const auto a = cli::parse_sweep_config("kind = post\nr = 0.1, 0.2\nn = 1\nanalyses = measure, rates\nseed = 9\n");
        const auto b = cli::parse_sweep_config(
            R"({"kind": "post", "r": [0.1, 0.2], "n": 1, "analyses": ["measure", "rates"], "seed": 9})");
        CHECK(a.echo() == b.echo());
    }
    SUBCASE("empty analysis set is a config error") {
        CHECK_THROWS_AS(cli::parse_sweep_config("kind = mem\nr = 0.1\nanalyses =\n"), std::invalid_argument);
        CHECK_THROWS_AS(cli::parse_sweep_config("kind = mem\nr = 0.1\n"), std::invalid_argument);
    }
    SUBCASE("invariants") {
        CHECK_THROWS_AS(cli::parse_sweep_config("r = 0\nanalyses = measure\n"), std::invalid_argument);
        CHECK_THROWS_AS(cli::parse_sweep_config("r = 0.1\nn = -1\nanalyses = measure\n"), std::invalid_argument);
        CHECK_THROWS_AS(cli::parse_sweep_config("r = 0.1\ntau_end = 0\nanalyses = measure\n"), std::invalid_argument);
        CHECK_THROWS_AS(cli::parse_sweep_config("r = 0.1\nformat = xml\nanalyses = measure\n"), std::invalid_argument);
        CHECK_THROWS_AS(cli::parse_sweep_config("r = 0.1\ngamma0 = 0.1\ngamma = 1\nanalyses = measure\n"),
                        std::invalid_argument);
        CHECK_THROWS_AS(cli::parse_sweep_config("r = 0.1\nanalyses = measure, entropy\n"), std::invalid_argument);
        CHECK_THROWS_AS(cli::parse_sweep_config("r = 0.1\nr = 0.2\nanalyses = measure\n"), std::invalid_argument);
        CHECK_THROWS_AS(cli::parse_sweep_config("r = 0.1\nfoo = 1\nanalyses = measure\n"), std::invalid_argument);
        CHECK_THROWS_AS(cli::parse_sweep_config("r 0.1\n"), std::invalid_argument);
    }
}

TEST_CASE("sweep subcommand reports config errors") {
    const auto dir = scratch("bad");
    std::ofstream(dir / "empty.conf") << "kind = mem\nr = 0.1\nanalyses =\n";
    const auto r = run({"sweep", (dir / "empty.conf").string(), "--out", (dir / "out").string()});
    CHECK(r.status != 0);
    CHECK(r.err.find("empty analysis set") != std::string::npos);
    CHECK(run({"sweep", (dir / "missing.conf").string()}).status != 0);
}

TEST_CASE("smoke sweep") {
    const auto dir = scratch("smoke");
    const auto start = std::chrono::steady_clock::now();
    const auto r = run({"sweep", (kConfigs / "smoke.conf").string(), "--out", (dir / "a").string()});
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(r.status == 0);
    CHECK(elapsed < 1.0);
    for (const std::string a : {"measure", "rates", "choi", "divisibility", "positivity"}) {
        CHECK(fs::exists(dir / "a" / (a + ".csv")));
    }

    const auto record = json::parse(slurp(dir / "a" / "run_record.json"));
    check_schema(record, json::parse(slurp(kConfigs / "run_record.schema.json")), "record");
    REQUIRE(record["points"].size() == 2);
    CHECK(record["points"][0]["index"] == 0);
    CHECK(record["points"][0]["regime"] == "TimeDependentMarkovian-Nondivisible");
    CHECK(record["points"][1]["regime"] == "TimeDependentMarkovian-Divisible");
    CHECK(record["failures"].empty());

    SUBCASE("reruns are byte-identical") {
        CHECK(run({"sweep", (kConfigs / "smoke.conf").string(), "--out", (dir / "b").string()}).status == 0);
        for (const std::string a : {"measure", "rates", "choi", "divisibility", "positivity"}) {
            CHECK(slurp(dir / "a" / (a + ".csv")) == slurp(dir / "b" / (a + ".csv")));
        }
        auto ra = json::parse(slurp(dir / "b" / "run_record.json"));
        ra.erase("wall_time_seconds");
        auto rb = record;
        rb.erase("wall_time_seconds");
        CHECK(ra == rb);
    }
    SUBCASE("JSON output") {
        CHECK(run({"sweep", (kConfigs / "smoke.conf").string(), "--out", (dir / "j").string(), "--format", "json"})
                  .status == 0);
        const auto measure = json::parse(slurp(dir / "j" / "measure.json"));
        REQUIRE(measure.size() == 2);
        CHECK(measure[1]["kind"] == "post-markovian");
    }
}

TEST_CASE("sweep is order-stable across worker counts") {
    const auto dir = scratch("workers");
    auto cfg = cli::parse_sweep_config(
        "kind = mem, post\nr = 0.1, 0.3\nn = 0, 1\npoints = 20\nbudget = 100\ndivisibility_grid = 20\n"
        "analyses = measure, divisibility\n");
    cfg.workers = 1;
    cli::run_sweep(cfg, dir / "one", "test");
    cfg.workers = 4;
    cli::run_sweep(cfg, dir / "four", "test");
    CHECK(slurp(dir / "one" / "measure.csv") == slurp(dir / "four" / "measure.csv"));
    CHECK(slurp(dir / "one" / "divisibility.csv") == slurp(dir / "four" / "divisibility.csv"));
}

TEST_CASE("version flag") {
    const auto r = run({"--version"});
    CHECK(r.status == 0);
    CHECK_FALSE(r.out.empty());
}
