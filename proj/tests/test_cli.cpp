#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(bool(f));
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

void spit(const fs::path& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    REQUIRE(bool(f));
    f << body;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() /
               ("gnssheight_cli_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

RunResult run_cli(const std::string& args, const fs::path& dir) {
    const fs::path out = dir / "stdout.txt";
    const fs::path errf = dir / "stderr.txt";
    const std::string cmd = std::string(GH_CLI_PATH) + " " + args + " > " +
                            out.string() + " 2> " + errf.string();
    const int rc = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(out);
    r.err = slurp(errf);
    return r;
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

size_t count_lines(const std::string& text) {
    size_t n = 0;
    for (char ch : text) {
        n += ch == '\n' ? 1 : 0;
    }
    return n;
}

size_t count_occurrences(const std::string& hay, const std::string& needle) {
    size_t n = 0;
    for (size_t pos = hay.find(needle); pos != std::string::npos;
         pos = hay.find(needle, pos + needle.size())) {
        ++n;
    }
    return n;
}

constexpr const char* kPlanarHeader =
    "timestamp,x,y,alt,azimuth,elevation,cn0,sat_id,truth_label\n";

std::string planar_row(long long ts, double az, double el, const std::string& cn0,
                       const std::string& sat, const std::string& truth) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%lld,-5,5,1,%.10g,%.10g,%s,%s,%s\n", ts, az, el,
                  cn0.c_str(), sat.c_str(), truth.c_str());
    return buf;
}

constexpr const char* kSquareFootprint =
    R"({"id": "sq", "crs": "local-metres", "ring": [[0,0],[10,0],[10,10],[0,10]]})";

std::string scene_json(std::uint64_t seed, int epochs, bool with_seed = true) {
    json cfg;
    cfg["scene"]["footprint"] = {
        {"id", "blk"},
        {"crs", "local-metres"},
        {"ring", json::array({{0, 0}, {30, 0}, {30, 30}, {0, 30}})}};
    cfg["scene"]["true_height"] = 20.0;
    cfg["scene"]["receiver_sites"] = json::array({{-25, 15}, {15, -40}});
    cfg["scene"]["epochs_per_site"] = epochs;
    cfg["scene"]["satellite_sampler"] = {
        {"min_elevation", 5}, {"max_elevation", 60}, {"count_per_epoch", 8}};
    if (with_seed) {
        cfg["scene"]["seed"] = seed;
    }
    cfg["signal"] = {{"open_mean", 40},         {"open_sd", 1.5},
                     {"closed_mean", 22},       {"closed_sd", 1.5},
                     {"blocked_prob_closed", 0.25}, {"receiver_floor", 5}};
    return cfg.dump(2);
}

struct SweepRow {
    double c0 = 0.0;
    std::string algo;
    bool converged = false;
    double point = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    int iterations = 0;
};

std::vector<SweepRow> parse_sweep_csv(const std::string& text) {
    std::vector<SweepRow> rows;
    std::istringstream is(text);
    std::string line;
    REQUIRE(std::getline(is, line));
    REQUIRE(line ==
            "init_c_dbhz,algorithm,converged,point_m,range_low_m,range_high_m,iterations");
    while (std::getline(is, line)) {
        std::vector<std::string> f;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) {
            f.push_back(cell);
        }
        REQUIRE(f.size() == 7);
        SweepRow r;
        r.c0 = std::stod(f[0]);
        r.algo = f[1];
        REQUIRE((f[2] == "true" || f[2] == "false"));
        r.converged = f[2] == "true";
        r.point = std::stod(f[3]);
        r.lo = std::stod(f[4]);
        r.hi = std::stod(f[5]);
        r.iterations = std::stoi(f[6]);
        rows.push_back(r);
    }
    return rows;
}

// Mirrors the sweep evaluation: converged rows only, widths sorted for the
// median, squared error against truth.
struct Recomputed {
    size_t runs = 0;
    size_t converged = 0;
    double rmse = 0.0;
    double min_point = std::numeric_limits<double>::infinity();
    double max_point = -std::numeric_limits<double>::infinity();
    double median_width = 0.0;
};

Recomputed recompute(const std::vector<SweepRow>& rows, const std::string& algo,
                     double truth) {
    Recomputed out;
    std::vector<double> widths;
    double sq = 0.0;
    for (const auto& r : rows) {
        if (r.algo != algo) {
            continue;
        }
        ++out.runs;
        if (!r.converged) {
            continue;
        }
        ++out.converged;
        out.min_point = std::min(out.min_point, r.point);
        out.max_point = std::max(out.max_point, r.point);
        widths.push_back(r.hi - r.lo);
        sq += (r.point - truth) * (r.point - truth);
    }
    REQUIRE(out.converged > 0);
    out.rmse = std::sqrt(sq / static_cast<double>(out.converged));
    std::sort(widths.begin(), widths.end());
    const size_t k = widths.size();
    out.median_width = k % 2 == 1 ? widths[k / 2] : 0.5 * (widths[k / 2 - 1] + widths[k / 2]);
    return out;
}

} // namespace

TEST_CASE("help and argument errors") {
    TempDir dir("args");
    REQUIRE(fs::exists(GH_CLI_PATH));

    CHECK(run_cli("--help", dir.path).exit_code == 0);
    CHECK(contains(run_cli("--help", dir.path).out, "estimate"));
    CHECK(run_cli("", dir.path).exit_code == 1);
    CHECK(run_cli("--nonsense", dir.path).exit_code == 1);
    CHECK(run_cli("frobnicate", dir.path).exit_code == 1);
    // estimate requires --obs and --footprint
    CHECK(run_cli("estimate", dir.path).exit_code == 1);
}

TEST_CASE("simulate writes deterministic scene outputs") {
    TempDir dir("simulate");
    const fs::path scene = dir.path / "scene.json";
    spit(scene, scene_json(4242, 400));

    const fs::path a = dir.path / "a";
    const fs::path b = dir.path / "b";
    const RunResult ra =
        run_cli("simulate --scene " + scene.string() + " --out " + a.string(), dir.path);
    CHECK(ra.exit_code == 0);
    CHECK(contains(ra.out, "simulated 6400 observations (seed 4242)"));
    const RunResult rb =
        run_cli("simulate --scene " + scene.string() + " --out " + b.string(), dir.path);
    CHECK(rb.exit_code == 0);

    const std::string csv = slurp(a / "obs.csv");
    CHECK(csv == slurp(b / "obs.csv"));
    CHECK(count_lines(csv) == 6401); // header + one line per record
    CHECK(csv.rfind(kPlanarHeader, 0) == 0);

    const json truth = json::parse(slurp(a / "truth.json"));
    CHECK(truth.at("height").get<double>() == 20.0);
    CHECK(truth.at("seed").get<std::uint64_t>() == 4242);
    CHECK(truth.at("records").get<size_t>() == 6400);

    const json fp = json::parse(slurp(a / "footprint.json"));
    CHECK(fp.at("id").get<std::string>() == "blk");
    CHECK(fp.at("crs").get<std::string>() == "local-metres");
    CHECK(fp.at("ring").size() == 4);
}

TEST_CASE("simulate seed precedence and entropy fallback") {
    TempDir dir("seed");
    const fs::path base = dir.path / "scene_4242.json";
    const fs::path other = dir.path / "scene_5.json";
    const fs::path noseed = dir.path / "scene_noseed.json";
    spit(base, scene_json(4242, 50));
    spit(other, scene_json(5, 50));
    spit(noseed, scene_json(0, 50, false));

    const fs::path a = dir.path / "a";
    const fs::path b = dir.path / "b";
    REQUIRE(run_cli("simulate --scene " + base.string() + " --out " + a.string(),
                    dir.path)
                .exit_code == 0);
    // --seed beats the scene's own seed.
    const RunResult rb = run_cli("simulate --scene " + other.string() +
                                     " --seed 4242 --out " + b.string(),
                                 dir.path);
    CHECK(rb.exit_code == 0);
    CHECK(contains(rb.out, "(seed 4242)"));
    CHECK(slurp(a / "obs.csv") == slurp(b / "obs.csv"));
    CHECK(json::parse(slurp(b / "truth.json")).at("seed").get<std::uint64_t>() == 4242);

    // No seed anywhere: one is drawn from entropy and reported.
    const fs::path c = dir.path / "c";
    const RunResult rc =
        run_cli("simulate --scene " + noseed.string() + " --out " + c.string(), dir.path);
    CHECK(rc.exit_code == 0);
    CHECK(contains(rc.out, "seed (from entropy): "));
}

TEST_CASE("simulate rejects missing or invalid scenes") {
    TempDir dir("simbad");
    CHECK(run_cli("simulate --scene " + (dir.path / "absent.json").string(), dir.path)
              .exit_code == 1);

    const fs::path bad = dir.path / "bad.json";
    json cfg = json::parse(scene_json(1, 10));
    cfg["scene"]["true_height"] = -1.0;
    spit(bad, cfg.dump(2));
    const RunResult r = run_cli(
        "simulate --scene " + bad.string() + " --out " + (dir.path / "o").string(),
        dir.path);
    CHECK(r.exit_code == 1);
    CHECK(contains(r.err, "true_height"));
}

TEST_CASE("estimate converges on a separated scene") {
    TempDir dir("estimate");
    const fs::path scene = dir.path / "scene.json";
    spit(scene, scene_json(4242, 400));
    const fs::path sim = dir.path / "sim";
    REQUIRE(run_cli("simulate --scene " + scene.string() + " --out " + sim.string(),
                    dir.path)
                .exit_code == 0);

    const std::string inputs = " --obs " + (sim / "obs.csv").string() + " --footprint " +
                               (sim / "footprint.json").string() + " --elev-min 5";
    const fs::path est = dir.path / "est";
    const RunResult r =
        run_cli("estimate" + inputs + " --out " + est.string(), dir.path);
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "dataset: 6400 rows"));
    CHECK(contains(r.out, "across 800 epochs"));
    CHECK(contains(r.out, "algorithm: 4plb"));
    CHECK(contains(r.out, "height point estimate: "));
    CHECK(contains(r.out, "uncertainty range: ["));
    CHECK(contains(r.out, "converged: yes"));

    const json ej = json::parse(slurp(est / "estimate.json"));
    CHECK(ej.at("algorithm").get<std::string>() == "4plb");
    CHECK(ej.at("converged").get<bool>());
    const double point = ej.at("point_m").get<double>();
    CHECK(point > 15.0);
    CHECK(point < 25.0);
    CHECK(point == ej.at("map_params").at("c").get<double>() +
                       1.5 / ej.at("map_params").at("b").get<double>());
    CHECK(ej.at("trace").size() == ej.at("iterations").get<size_t>());

    // Byte-identical on rerun, and --init-c is accepted.
    const fs::path est2 = dir.path / "est2";
    REQUIRE(run_cli("estimate" + inputs + " --init-c 32 --out " + est2.string(), dir.path)
                .exit_code == 0);
    const fs::path est3 = dir.path / "est3";
    REQUIRE(run_cli("estimate" + inputs + " --init-c 32 --out " + est3.string(), dir.path)
                .exit_code == 0);
    CHECK(slurp(est2 / "estimate.json") == slurp(est3 / "estimate.json"));

    // Baselines report no iteration line and collapse the range.
    const fs::path estb = dir.path / "estb";
    const RunResult rb =
        run_cli("estimate" + inputs + " --algo bayes --out " + estb.string(), dir.path);
    CHECK(rb.exit_code == 0);
    CHECK(contains(rb.out, "algorithm: bayes"));
    CHECK(!contains(rb.out, "uncertainty range"));
    const json bj = json::parse(slurp(estb / "estimate.json"));
    CHECK(bj.at("point_m").get<double>() == bj.at("range_low_m").get<double>());
    CHECK(bj.at("point_m").get<double>() == bj.at("range_high_m").get<double>());
    CHECK(bj.at("point_m").get<double>() > 15.0);
    CHECK(bj.at("point_m").get<double>() < 25.0);
}

TEST_CASE("estimate exits 2 when the fit does not converge") {
    TempDir dir("estdegen");
    std::string csv = kPlanarHeader;
    for (int k = 0; k < 20; ++k) {
        char sat[8];
        std::snprintf(sat, sizeof(sat), "S%02d", k + 1);
        csv += planar_row(300 + k, 90.0, 30.0 + k, "", sat, "closed");
    }
    const fs::path obs = dir.path / "blocked.csv";
    const fs::path fp = dir.path / "sq.json";
    spit(obs, csv);
    spit(fp, kSquareFootprint);

    const fs::path out = dir.path / "out";
    const RunResult r = run_cli("estimate --obs " + obs.string() + " --footprint " +
                                    fp.string() + " --out " + out.string(),
                                dir.path);
    CHECK(r.exit_code == 2);
    CHECK(contains(r.out, "converged: no"));
    CHECK(contains(r.out, "failure reason: map fit degenerated"));
    const json ej = json::parse(slurp(out / "estimate.json"));
    CHECK(!ej.at("converged").get<bool>());
    CHECK(ej.at("trace").empty());
}

TEST_CASE("estimate failures exit 1") {
    TempDir dir("estfail");
    const fs::path fp = dir.path / "sq.json";
    spit(fp, kSquareFootprint);

    RunResult r = run_cli("estimate --obs " + (dir.path / "absent.csv").string() +
                              " --footprint " + fp.string(),
                          dir.path);
    CHECK(r.exit_code == 1);
    CHECK(contains(r.err, "loading observations"));

    const fs::path bad = dir.path / "bad.csv";
    spit(bad, std::string(kPlanarHeader) + "oops\nworse\n");
    r = run_cli("estimate --obs " + bad.string() + " --footprint " + fp.string(),
                dir.path);
    CHECK(r.exit_code == 1);
    CHECK(contains(r.err, "rows malformed"));

    const fs::path obs = dir.path / "ok.csv";
    spit(obs, std::string(kPlanarHeader) +
                  planar_row(100, 90.0, 45.0, "40", "S01", "open"));
    r = run_cli("estimate --obs " + obs.string() + " --footprint " + fp.string() +
                    " --algo newton",
                dir.path);
    CHECK(r.exit_code == 1);
    CHECK(contains(r.err, "unknown algorithm"));
}

TEST_CASE("dem-alt override shifts intersection heights") {
    TempDir dir("demalt");
    std::string csv = kPlanarHeader;
    csv += planar_row(100, 90.0, 30.0, "", "S01", "closed");
    csv += planar_row(100, 90.0, 40.0, "", "S02", "closed");
    csv += planar_row(100, 90.0, 45.0, "", "S03", "closed");
    const fs::path obs = dir.path / "blocked.csv";
    const fs::path fp = dir.path / "sq.json";
    spit(obs, csv);
    spit(fp, kSquareFootprint);

    // All blocked: hinge returns the top height; at 45 degrees that is
    // receiver altitude + 5.
    const std::string base = "estimate --obs " + obs.string() + " --footprint " +
                             fp.string() + " --algo hinge --out ";
    const fs::path a = dir.path / "a";
    const RunResult ra = run_cli(base + a.string(), dir.path);
    CHECK(ra.exit_code == 0);
    CHECK(contains(ra.out, "warning: one label class was empty"));
    CHECK(json::parse(slurp(a / "estimate.json")).at("point_m").get<double>() == 6.0);

    const fs::path b = dir.path / "b";
    const RunResult rb = run_cli(base + b.string() + " --dem-alt 6.5", dir.path);
    CHECK(rb.exit_code == 0);
    CHECK(json::parse(slurp(b / "estimate.json")).at("point_m").get<double>() == 12.5);
}

TEST_CASE("sweep covers the default threshold grid") {
    TempDir dir("sweep");
    const fs::path scene = dir.path / "scene.json";
    spit(scene, scene_json(1313, 150));
    const fs::path sim = dir.path / "sim";
    REQUIRE(run_cli("simulate --scene " + scene.string() + " --out " + sim.string(),
                    dir.path)
                .exit_code == 0);

    const fs::path out = dir.path / "out";
    const RunResult r = run_cli("sweep --obs " + (sim / "obs.csv").string() +
                                    " --footprint " + (sim / "footprint.json").string() +
                                    " --elev-min 5 --truth-height 20 --out " +
                                    out.string(),
                                dir.path);
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "sweep: 20 thresholds x 4 algorithms = 80 runs"));

    const std::string csv = slurp(out / "sweep.csv");
    CHECK(count_lines(csv) == 81);
    const auto rows = parse_sweep_csv(csv);
    REQUIRE(rows.size() == 80);
    const std::vector<std::string> order = {"4plb", "4pl", "hinge", "bayes"};
    for (size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].algo == order[i % 4]);
        CHECK(rows[i].c0 == 20.0 + static_cast<double>(i / 4));
    }
    for (const auto& row : rows) {
        if (row.algo == "hinge" || row.algo == "bayes") {
            CHECK(row.converged);
            CHECK(row.point == row.lo);
            CHECK(row.point == row.hi);
            CHECK(row.iterations == 0);
        }
    }

    const json sj = json::parse(slurp(out / "sweep.json"));
    const auto& thresholds = sj.at("config").at("sweep").at("thresholds");
    REQUIRE(thresholds.size() == 20);
    CHECK(thresholds.at(0).get<double>() == 20.0);
    CHECK(thresholds.at(19).get<double>() == 39.0);
    CHECK(sj.at("config").at("truth_height").get<double>() == 20.0);
    CHECK(sj.at("dataset").at("total").get<size_t>() == 2400);

    // The evaluation block must match a recomputation from the CSV rows.
    for (const auto& algo : order) {
        const auto& je = sj.at("evaluation").at(algo);
        const Recomputed rc = recompute(rows, algo, 20.0);
        CHECK(je.at("runs").get<size_t>() == 20);
        CHECK(je.at("converged").get<size_t>() == rc.converged);
        CHECK(!je.at("no_result").get<bool>());
        CHECK(je.at("rmse").get<double>() == rc.rmse);
        CHECK(je.at("min_point").get<double>() == rc.min_point);
        CHECK(je.at("max_point").get<double>() == rc.max_point);
        CHECK(je.at("spread").get<double>() == rc.max_point - rc.min_point);
        CHECK(je.at("median_range_width").get<double>() == rc.median_width);
    }

    const std::string svg = slurp(out / "sweep.svg");
    CHECK(count_occurrences(svg, "data-algo=\"") == 4);
    CHECK(contains(svg, "data-algo=\"4plb\""));
    CHECK(contains(svg, "data-algo=\"bayes\""));
    CHECK(contains(svg, "data-role=\"truth\""));
    CHECK(contains(svg, "</svg>"));
}

TEST_CASE("sweep custom ranges, determinism and errors") {
    TempDir dir("sweep2");
    const fs::path scene = dir.path / "scene.json";
    spit(scene, scene_json(1313, 150));
    const fs::path sim = dir.path / "sim";
    REQUIRE(run_cli("simulate --scene " + scene.string() + " --out " + sim.string(),
                    dir.path)
                .exit_code == 0);
    const std::string inputs = " --obs " + (sim / "obs.csv").string() + " --footprint " +
                               (sim / "footprint.json").string() + " --elev-min 5";

    // [25, 31) step 2 -> {25, 27, 29}.
    const fs::path a = dir.path / "a";
    REQUIRE(run_cli("sweep" + inputs +
                        " --sweep-c-min 25 --sweep-c-max 31 --sweep-c-step 2 --out " +
                        a.string(),
                    dir.path)
                .exit_code == 0);
    CHECK(count_lines(slurp(a / "sweep.csv")) == 13);

    // The upper bound is exclusive: [20, 24) step 2 -> {20, 22}.
    const fs::path b = dir.path / "b";
    REQUIRE(run_cli("sweep" + inputs +
                        " --sweep-c-min 20 --sweep-c-max 24 --sweep-c-step 2 --out " +
                        b.string(),
                    dir.path)
                .exit_code == 0);
    const std::string bcsv = slurp(b / "sweep.csv");
    CHECK(count_lines(bcsv) == 9);
    const auto brows = parse_sweep_csv(bcsv);
    CHECK(brows.front().c0 == 20.0);
    CHECK(brows.back().c0 == 22.0);

    // Without truth the evaluation has no RMSE and the chart no truth line.
    const json bj = json::parse(slurp(b / "sweep.json"));
    CHECK(bj.at("config").at("truth_height").is_null());
    CHECK(bj.at("evaluation").at("hinge").at("rmse").is_null());
    CHECK(bj.at("evaluation").at("hinge").at("spread").is_number());
    CHECK(!contains(slurp(b / "sweep.svg"), "data-role=\"truth\""));

    // Byte-identical outputs on rerun.
    const fs::path c = dir.path / "c";
    REQUIRE(run_cli("sweep" + inputs +
                        " --sweep-c-min 25 --sweep-c-max 31 --sweep-c-step 2 --out " +
                        c.string(),
                    dir.path)
                .exit_code == 0);
    CHECK(slurp(a / "sweep.csv") == slurp(c / "sweep.csv"));
    CHECK(slurp(a / "sweep.json") == slurp(c / "sweep.json"));
    CHECK(slurp(a / "sweep.svg") == slurp(c / "sweep.svg"));

    CHECK(run_cli("sweep" + inputs + " --sweep-c-step 0", dir.path).exit_code == 1);
    const RunResult empty = run_cli(
        "sweep" + inputs + " --sweep-c-min 30 --sweep-c-max 30", dir.path);
    CHECK(empty.exit_code == 1);
    CHECK(contains(empty.err, "empty sweep range"));
}

TEST_CASE("fit-classifier writes a report") {
    TempDir dir("fitcls");
    const fs::path scene = dir.path / "scene.json";
    spit(scene, scene_json(4242, 150));
    const fs::path sim = dir.path / "sim";
    REQUIRE(run_cli("simulate --scene " + scene.string() + " --out " + sim.string(),
                    dir.path)
                .exit_code == 0);

    const fs::path out = dir.path / "out";
    const RunResult r = run_cli("fit-classifier --obs " + (sim / "obs.csv").string() +
                                    " --out " + out.string(),
                                dir.path);
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "signal classifier fit on "));
    CHECK(contains(r.out, "McFadden R2: "));

    const json cj = json::parse(slurp(out / "classifier.json"));
    CHECK(cj.at("fit").at("converged").get<bool>());
    CHECK(cj.at("fit").at("b").get<double>() > 0.0);
    const size_t fit_rows = cj.at("fit_rows").get<size_t>();
    CHECK(fit_rows > 0);
    CHECK(fit_rows < 2400); // blocked rows are excluded from the fit
    const auto& cm = cj.at("confusion");
    const size_t total = cm.at("true_open").get<size_t>() +
                         cm.at("false_open").get<size_t>() +
                         cm.at("false_closed").get<size_t>() +
                         cm.at("true_closed").get<size_t>();
    CHECK(total == 2400); // every truth-labelled row, including blocked
    CHECK(cj.at("mcfadden_r2").get<double>() > 0.0);
    CHECK(cj.at("mcfadden_r2").get<double>() < 1.0);

    // Truth-less logs cannot support the fit.
    const fs::path plain = dir.path / "plain.csv";
    spit(plain, std::string(kPlanarHeader) +
                    planar_row(100, 90.0, 45.0, "40", "S01", "") +
                    planar_row(101, 90.0, 45.0, "22", "S02", ""));
    const RunResult rf = run_cli("fit-classifier --obs " + plain.string(), dir.path);
    CHECK(rf.exit_code == 1);
    CHECK(contains(rf.err, "fitting signal classifier"));
}
