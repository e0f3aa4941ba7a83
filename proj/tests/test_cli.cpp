#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "perfhom/cli.hpp"
#include "perfhom/report_io.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <vector>

using namespace perfhom;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("perfhom_test_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run(std::vector<std::string> args) {
    args.insert(args.begin(), "perfhom");
    return cli::run(args);
}

json read_json(const fs::path& p) { return json::parse(io::read_file(p)); }

bool has_tmp_files(const fs::path& dir) {
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.path().extension() == ".tmp") return true;
    return false;
}

} // namespace

TEST_CASE("solve-homogenized") {
    const fs::path dir = scratch("homog");
    SUBCASE("table preset") {
        REQUIRE(run({"solve-homogenized", "--n", "16", "--c0", "0.5", "--f-const", "1", "--t", "10", "--out-dir",
                     dir.string()}) == cli::kExitOk);
        const ScalarField table = io::parse_field_csv(io::read_file(dir / "table.csv"));
        for (int k = 0; k <= 16; ++k) {
            CHECK(table(k, 0) == 10.0);
            CHECK(table(k, 16) == 10.0);
            CHECK(table(0, k) == 10.0);
            CHECK(table(16, k) == 10.0);
        }
        CHECK(table(8, 8) > 10.0);
        const json meta = read_json(dir / "metadata.json");
        CHECK(meta["trace"]["converged"] == true);
        CHECK_FALSE(meta.contains("runtime_seconds"));
        CHECK(fs::exists(dir / "trace.csv"));
        CHECK(fs::exists(dir / "field.csv"));
        CHECK_FALSE(has_tmp_files(dir));
    }
    SUBCASE("f = 0 gives U = T and one trace row") {
        REQUIRE(run({"solve-homogenized", "--f-const", "0", "--out-dir", dir.string()}) == cli::kExitOk);
        const ScalarField u = io::read_field_csv(dir / "field.csv");
        for (double v : u.values()) CHECK(v == 10.0);
        CHECK(io::read_file(dir / "trace.csv") == "iteration,delta\n1,0\n");
    }
    SUBCASE("source from a field file") {
        const ScalarField f(Grid2D(8), 1.0);
        io::write_file_atomic(dir / "f.csv", io::field_csv_full(f));
        REQUIRE(run({"solve-homogenized", "--n", "8", "--f-file", (dir / "f.csv").string(), "--out-dir",
                     (dir / "a").string()}) == cli::kExitOk);
        REQUIRE(run({"solve-homogenized", "--n", "8", "--out-dir", (dir / "b").string()}) == cli::kExitOk);
        CHECK(io::read_file(dir / "a" / "field.csv") == io::read_file(dir / "b" / "field.csv"));
        CHECK(run({"solve-homogenized", "--n", "16", "--f-file", (dir / "f.csv").string(), "--out-dir",
                   dir.string()}) == cli::kExitInvalidConfig);
    }
    SUBCASE("invalid configurations exit 2") {
        CHECK(run({"solve-homogenized", "--n", "17", "--out-dir", dir.string()}) == cli::kExitInvalidConfig);
        CHECK(run({"solve-homogenized", "--c0", "0", "--out-dir", dir.string()}) == cli::kExitInvalidConfig);
        CHECK(run({"solve-homogenized", "--c0", "-1", "--out-dir", dir.string()}) == cli::kExitInvalidConfig);
        CHECK(run({"solve-homogenized", "--n", "abc"}) == cli::kExitInvalidConfig);
        CHECK(run({"solve-homogenized", "--bogus"}) == cli::kExitInvalidConfig);
        CHECK(run({}) == cli::kExitInvalidConfig);
        CHECK(run({"no-such-command"}) == cli::kExitInvalidConfig);
    }
    SUBCASE("iteration cap exits 4") {
        CHECK(run({"solve-homogenized", "--max-iter", "1", "--out-dir", dir.string()}) == cli::kExitNonConvergence);
        CHECK(run({"solve-homogenized", "--max-cycles", "1", "--mg-tol", "1e-30", "--out-dir", dir.string()}) ==
              cli::kExitNonConvergence);
    }
    SUBCASE("timings only on request") {
        REQUIRE(run({"solve-homogenized", "--timings", "--out-dir", dir.string()}) == cli::kExitOk);
        CHECK(read_json(dir / "metadata.json").contains("runtime_seconds"));
    }
    fs::remove_all(dir);
}

TEST_CASE("help exits 0") {
    CHECK(run({"--help"}) == cli::kExitOk);
    CHECK(run({"compare", "--help"}) == cli::kExitOk);
}

TEST_CASE("config file") {
    const fs::path dir = scratch("config");
    io::write_file_atomic(dir / "run.toml", "[solve-homogenized]\nn = 8\nt = 5\nout-dir = \"" +
                                                (dir / "out").generic_string() + "\"\n");
    SUBCASE("values come from the file") {
        REQUIRE(run({"--config", (dir / "run.toml").string(), "solve-homogenized"}) == cli::kExitOk);
        const json meta = read_json(dir / "out" / "metadata.json");
        CHECK(meta["config"]["n"] == 8);
        CHECK(meta["config"]["t_boundary"] == 5.0);
    }
    SUBCASE("flags win on conflict") {
        REQUIRE(run({"--config", (dir / "run.toml").string(), "solve-homogenized", "--t", "7"}) == cli::kExitOk);
        const json meta = read_json(dir / "out" / "metadata.json");
        CHECK(meta["config"]["n"] == 8);
        CHECK(meta["config"]["t_boundary"] == 7.0);
    }
    SUBCASE("missing file exits 2") {
        CHECK(run({"--config", (dir / "nope.toml").string(), "solve-homogenized"}) == cli::kExitInvalidConfig);
    }
    fs::remove_all(dir);
}

TEST_CASE("solve-perforated") {
    const fs::path dir = scratch("perf");
    SUBCASE("eps 1/2 at n = 256") {
        REQUIRE(run({"solve-perforated", "--eps", "1/2", "--c0", "0.5", "--n", "256", "--f-const", "1", "--t", "10",
                     "--out-dir", dir.string()}) == cli::kExitOk);
        const json meta = read_json(dir / "metadata.json");
        CHECK(meta["hole_count"] == 4);
        const ScalarField u = io::read_field_csv(dir / "solution.csv");
        CHECK(u.grid().n() == 256);
        CHECK_FALSE(has_tmp_files(dir));
    }
    SUBCASE("under-resolved eps exits 3") {
        CHECK(run({"solve-perforated", "--eps", "1/4", "--c0", "0.5", "--n", "256", "--out-dir", dir.string()}) ==
              cli::kExitGeometry);
        CHECK_FALSE(fs::exists(dir / "solution.csv"));
    }
    SUBCASE("overlapping holes exit 3") {
        CHECK(run({"solve-perforated", "--eps", "1/2", "--c0", "0.01", "--n", "64", "--out-dir", dir.string()}) ==
                  cli::kExitGeometry);
    }
    SUBCASE("eps 1/3 at n = 1024") {
        REQUIRE(run({"solve-perforated", "--eps", "1/3", "--c0", "0.5", "--n", "1024", "--out-dir", dir.string()}) ==
                cli::kExitOk);
        CHECK(read_json(dir / "metadata.json")["hole_count"] == 9);
    }
    SUBCASE("eps must be a reciprocal-integer fraction") {
        for (const char* bad : {"0.5", "2/3", "1/1", "1/0", "abc", ""})
            CHECK(run({"solve-perforated", "--eps", bad, "--n", "64", "--out-dir", dir.string()}) ==
                  cli::kExitInvalidConfig);
        CHECK(run({"solve-perforated", "--n", "64"}) == cli::kExitInvalidConfig);
    }
    fs::remove_all(dir);
}

TEST_CASE("compare") {
    const fs::path dir = scratch("compare");
    SUBCASE("baseline flag adds mu = 0 discrepancies") {
        REQUIRE(run({"compare", "--eps-list", "1/2", "--baseline-mu0", "--n", "128", "--out-dir", dir.string()}) ==
                cli::kExitOk);
        const json j = read_json(dir / "sweep.json");
        REQUIRE(j["records"].size() == 1);
        const json& rec = j["records"][0];
        CHECK(rec.contains("discrepancy_l2h"));
        CHECK(rec["baseline_mu0"].contains("discrepancy_l2h"));
        CHECK(fs::exists(dir / "baseline_mu0.csv"));
        CHECK(fs::exists(dir / "homogenized.csv"));
        CHECK(fs::exists(dir / "perforated_eps_1_2.csv"));
        CHECK_FALSE(has_tmp_files(dir));
    }
    SUBCASE("invalid lists exit 2") {
        CHECK(run({"compare", "--eps-list", "", "--n", "64", "--out-dir", dir.string()}) == cli::kExitInvalidConfig);
        CHECK(run({"compare", "--eps-list", "0.5", "--n", "64", "--out-dir", dir.string()}) ==
              cli::kExitInvalidConfig);
        CHECK(run({"compare", "--eps-list", "1/2,", "--n", "64", "--out-dir", dir.string()}) ==
              cli::kExitInvalidConfig);
        CHECK(run({"compare", "--eps-list", "1/2", "--n", "100", "--out-dir", dir.string()}) ==
              cli::kExitInvalidConfig);
        CHECK(run({"compare", "--eps-list", "1/2", "--jobs", "0", "--n", "64", "--out-dir", dir.string()}) ==
              cli::kExitInvalidConfig);
    }
    SUBCASE("every eps under-resolved exits 3") {
        CHECK(run({"compare", "--eps-list", "1/4", "--n", "64", "--out-dir", dir.string()}) == cli::kExitGeometry);
    }
    fs::remove_all(dir);
}

TEST_CASE("reproduce-table1 and calibrate") {
    const fs::path dir = scratch("table");
    REQUIRE(run({"reproduce-table1", "--out-dir", dir.string()}) == cli::kExitOk);
    const json rep = read_json(dir / "table1_report.json");
    CHECK(rep["checks"]["all_passed"] == true);
    CHECK(fs::exists(dir / "table1.csv"));
    CHECK(fs::exists(dir / "table1_full.csv"));
    CHECK(fs::exists(dir / "trace.csv"));
    REQUIRE(run({"calibrate", "--out-dir", dir.string()}) == cli::kExitOk);
    const json cal = read_json(dir / "calibration.json");
    CHECK(cal["conventions"].size() >= 2);
    CHECK(cal["self_deviation"] == 0.0);
    fs::remove_all(dir);
}

TEST_CASE("byte-identical outputs across runs") {
    const fs::path a = scratch("det_a");
    const fs::path b = scratch("det_b");
    for (const fs::path& dir : {a, b}) {
        REQUIRE(run({"solve-homogenized", "--out-dir", (dir / "h").string()}) == cli::kExitOk);
        REQUIRE(run({"compare", "--eps-list", "1/2,1/3", "--c0", "0.4", "--n", "128", "--baseline-mu0", "--jobs",
                     "1", "--out-dir", (dir / "c").string()}) == cli::kExitOk);
        REQUIRE(run({"reproduce-table1", "--out-dir", (dir / "t").string()}) == cli::kExitOk);
    }
    int compared = 0;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (!e.is_regular_file()) continue;
        const fs::path rel = fs::relative(e.path(), a);
        REQUIRE(fs::exists(b / rel));
        CHECK_MESSAGE(io::read_file(e.path()) == io::read_file(b / rel), rel.string());
        ++compared;
    }
    CHECK(compared >= 12);
    fs::remove_all(a);
    fs::remove_all(b);
}
