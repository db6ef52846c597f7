#include "gnssheight.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;

struct ObsDeleter {
    void operator()(gh_observations* p) const { gh_observations_free(p); }
};
struct FpDeleter {
    void operator()(gh_footprint* p) const { gh_footprint_free(p); }
};
struct DsDeleter {
    void operator()(gh_dataset* p) const { gh_dataset_free(p); }
};
struct EstDeleter {
    void operator()(gh_estimate* p) const { gh_estimate_free(p); }
};
using ObsPtr = std::unique_ptr<gh_observations, ObsDeleter>;
using FpPtr = std::unique_ptr<gh_footprint, FpDeleter>;
using DsPtr = std::unique_ptr<gh_dataset, DsDeleter>;
using EstPtr = std::unique_ptr<gh_estimate, EstDeleter>;

std::string take_string(char* s) {
    std::string out = s == nullptr ? "" : s;
    gh_string_free(s);
    return out;
}

/// Shortest round-trip text for doubles; integral values print as integers.
std::string fmt_number(double v) {
    if (v == std::floor(v) && std::fabs(v) < 9.007199254740992e15) {
        char buf[32];
        const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf),
                                           static_cast<long long>(v));
        return std::string(buf, p);
    }
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

std::string fmt_fixed(double v, int digits) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(digits);
    os << v;
    return os.str();
}

int fail_cmd(const std::string& context) {
    std::cerr << "gnssheight: " << context << ": " << gh_last_error() << "\n";
    return 1;
}

bool write_file(const fs::path& path, const std::string& body, std::string& err) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        err = "cannot open for writing: " + path.string();
        return false;
    }
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!f) {
        err = "write failed: " + path.string();
        return false;
    }
    return true;
}

bool read_file(const fs::path& path, std::string& body, std::string& err) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        err = "cannot open: " + path.string();
        return false;
    }
    std::ostringstream os;
    os << f.rdbuf();
    body = os.str();
    return true;
}

bool ensure_out_dir(const fs::path& dir, std::string& err) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        err = "cannot create output directory " + dir.string() + ": " + ec.message();
        return false;
    }
    return true;
}

struct DataOptions {
    std::string obs_path;
    std::string footprint_path;
    double elev_min = 10.0;
    double elev_max = 85.0;
    std::optional<double> dem_alt;
};

struct InitOptions {
    double a = 0.9;
    double b = 0.2;
    double c = 30.0;
    double d = 0.1;
};

struct ConvergenceOptions {
    int max_iterations = 10;
    double label_change_fraction = 0.01;
    double param_rel_tol = 1e-4;

    gh_convergence to_c() const { return {max_iterations, label_change_fraction,
                                          param_rel_tol}; }
};

int build_inputs(const DataOptions& opt, ObsPtr& obs, FpPtr& fp, DsPtr& ds) {
    gh_observations* raw_obs = nullptr;
    if (gh_observations_load(opt.obs_path.c_str(), &raw_obs) != GH_OK) {
        return fail_cmd("loading observations from " + opt.obs_path);
    }
    obs.reset(raw_obs);
    if (opt.dem_alt.has_value() &&
        gh_observations_override_altitude(obs.get(), *opt.dem_alt) != GH_OK) {
        return fail_cmd("applying --dem-alt");
    }
    gh_footprint* raw_fp = nullptr;
    if (gh_footprint_load(opt.footprint_path.c_str(), &raw_fp) != GH_OK) {
        return fail_cmd("loading footprint from " + opt.footprint_path);
    }
    fp.reset(raw_fp);
    gh_dataset* raw_ds = nullptr;
    if (gh_dataset_build(obs.get(), fp.get(), opt.elev_min, opt.elev_max, &raw_ds) !=
        GH_OK) {
        return fail_cmd("building dataset");
    }
    ds.reset(raw_ds);
    return 0;
}

void print_dataset_summary(const gh_dataset* ds) {
    gh_summary s{};
    gh_dataset_summary(ds, &s);
    std::cout << "dataset: " << s.total << " rows (" << s.recorded << " received, "
              << s.blocked << " blocked) across " << s.epochs << " epochs; "
              << s.intersecting << " rays intersect the footprint";
    if (s.inside_footprint > 0) {
        std::cout << "; " << s.inside_footprint << " discarded (receiver inside footprint)";
    }
    std::cout << "\n";
}

int cmd_estimate(const DataOptions& data, const InitOptions& init,
                 const ConvergenceOptions& conv, const std::string& algo,
                 const std::string& out_dir) {
    ObsPtr obs;
    FpPtr fp;
    DsPtr ds;
    if (int rc = build_inputs(data, obs, fp, ds); rc != 0) {
        return rc;
    }

    const gh_fourpl init_p{init.a, init.b, init.c, init.d};
    const gh_convergence cfg = conv.to_c();
    gh_estimate* raw_est = nullptr;
    if (gh_run_estimator(ds.get(), algo.c_str(), &init_p, &cfg, &raw_est) != GH_OK) {
        return fail_cmd("running estimator " + algo);
    }
    EstPtr est(raw_est);

    std::string err;
    if (!ensure_out_dir(out_dir, err)) {
        std::cerr << "gnssheight: " << err << "\n";
        return 1;
    }
    char* json_text = nullptr;
    if (gh_estimate_to_json(est.get(), &json_text) != GH_OK) {
        return fail_cmd("serializing estimate");
    }
    const fs::path out_path = fs::path(out_dir) / "estimate.json";
    if (!write_file(out_path, take_string(json_text) + "\n", err)) {
        std::cerr << "gnssheight: " << err << "\n";
        return 1;
    }

    double point = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    int converged = 0;
    int iterations = 0;
    gh_estimate_point(est.get(), &point);
    gh_estimate_range(est.get(), &lo, &hi);
    gh_estimate_converged(est.get(), &converged);
    gh_estimate_iterations(est.get(), &iterations);

    print_dataset_summary(ds.get());
    std::cout << "algorithm: " << algo << "\n";
    std::cout << "height point estimate: " << fmt_fixed(point, 2) << " m\n";
    if (algo == "4plb" || algo == "4pl") {
        std::cout << "uncertainty range: [" << fmt_fixed(lo, 2) << ", "
                  << fmt_fixed(hi, 2) << "] m\n";
        std::cout << "converged: " << (converged != 0 ? "yes" : "no") << " ("
                  << iterations << " iteration" << (iterations == 1 ? "" : "s")
                  << ")\n";
    }
    const std::string reason = gh_estimate_failure_reason(est.get());
    if (!reason.empty()) {
        std::cout << "failure reason: " << reason << "\n";
    }
    const std::string warning = gh_estimate_warning(est.get());
    if (!warning.empty()) {
        std::cout << "warning: " << warning << "\n";
    }
    std::cout << "wrote " << out_path.string() << "\n";
    return converged != 0 ? 0 : 2;
}

int cmd_simulate(const std::string& scene_path, std::optional<std::uint64_t> seed_flag,
                 const std::string& out_dir) {
    std::string scene_json;
    std::string err;
    if (!read_file(scene_path, scene_json, err)) {
        std::cerr << "gnssheight: " << err << "\n";
        return 1;
    }

    // Seed precedence: --seed flag, then the scene document, then entropy.
    std::uint64_t seed = 0;
    if (seed_flag.has_value()) {
        seed = *seed_flag;
    } else {
        bool from_scene = false;
        try {
            const auto doc = nlohmann::json::parse(scene_json);
            if (doc.contains("scene") && doc.at("scene").contains("seed")) {
                seed = doc.at("scene").at("seed").get<std::uint64_t>();
                from_scene = true;
            }
        } catch (const nlohmann::json::exception&) {
            // let the library produce the parse diagnostics below
        }
        if (!from_scene) {
            std::random_device rd;
            seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
            std::cout << "seed (from entropy): " << seed << "\n";
        }
    }

    char* csv = nullptr;
    char* truth = nullptr;
    char* fp_json = nullptr;
    if (gh_simulate(scene_json.c_str(), &seed, &csv, &truth, &fp_json) != GH_OK) {
        return fail_cmd("simulating scene " + scene_path);
    }
    const std::string csv_s = take_string(csv);
    const std::string truth_s = take_string(truth);
    const std::string fp_s = take_string(fp_json);

    if (!ensure_out_dir(out_dir, err)) {
        std::cerr << "gnssheight: " << err << "\n";
        return 1;
    }
    const fs::path base(out_dir);
    if (!write_file(base / "obs.csv", csv_s, err) ||
        !write_file(base / "truth.json", truth_s + "\n", err) ||
        !write_file(base / "footprint.json", fp_s + "\n", err)) {
        std::cerr << "gnssheight: " << err << "\n";
        return 1;
    }

    const std::size_t records = static_cast<std::size_t>(
        std::count(csv_s.begin(), csv_s.end(), '\n')) - 1;
    std::cout << "simulated " << records << " observations (seed " << seed << ")\n";
    std::cout << "wrote " << (base / "obs.csv").string() << ", "
              << (base / "truth.json").string() << ", "
              << (base / "footprint.json").string() << "\n";
    return 0;
}

struct SweepRow {
    double init_c = 0.0;
    std::string algo;
    bool converged = false;
    double point = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    int iterations = 0;
};

const std::vector<std::string> kSweepAlgos = {"4plb", "4pl", "hinge", "bayes"};

struct ThresholdResult {
    std::vector<SweepRow> rows;
    std::string error; // first failing call, if any
};

ThresholdResult run_threshold(const gh_dataset* ds, double c0, const InitOptions& init,
                              const gh_convergence& cfg) {
    ThresholdResult out;
    for (const auto& algo : kSweepAlgos) {
        const gh_fourpl p{init.a, init.b, c0, init.d};
        gh_estimate* raw = nullptr;
        if (gh_run_estimator(ds, algo.c_str(), &p, &cfg, &raw) != GH_OK) {
            out.error = "estimator " + algo + " at c0=" + fmt_number(c0) + ": " +
                        gh_last_error();
            return out;
        }
        EstPtr est(raw);
        SweepRow row;
        row.init_c = c0;
        row.algo = algo;
        int conv = 0;
        gh_estimate_converged(est.get(), &conv);
        row.converged = conv != 0;
        gh_estimate_point(est.get(), &row.point);
        gh_estimate_range(est.get(), &row.lo, &row.hi);
        gh_estimate_iterations(est.get(), &row.iterations);
        out.rows.push_back(std::move(row));
    }
    return out;
}

struct AlgoEvaluation {
    std::size_t runs = 0;
    std::size_t converged = 0;
    bool no_result = false;
    std::optional<double> rmse; // needs truth and >= 1 converged run
    double min_point = 0.0;
    double max_point = 0.0;
    double spread = 0.0;
    double median_range_width = 0.0;
};

AlgoEvaluation evaluate_rows(const std::vector<SweepRow>& rows, const std::string& algo,
                             std::optional<double> truth) {
    AlgoEvaluation ev;
    std::vector<double> widths;
    double sq = 0.0;
    double mn = std::numeric_limits<double>::infinity();
    double mx = -std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
        if (r.algo != algo) {
            continue;
        }
        ++ev.runs;
        if (!r.converged) {
            continue;
        }
        ++ev.converged;
        mn = std::min(mn, r.point);
        mx = std::max(mx, r.point);
        widths.push_back(r.hi - r.lo);
        if (truth.has_value()) {
            sq += (r.point - *truth) * (r.point - *truth);
        }
    }
    if (ev.converged == 0) {
        ev.no_result = true;
        return ev;
    }
    ev.min_point = mn;
    ev.max_point = mx;
    ev.spread = mx - mn;
    std::sort(widths.begin(), widths.end());
    const std::size_t k = widths.size();
    ev.median_range_width =
        k % 2 == 1 ? widths[k / 2] : 0.5 * (widths[k / 2 - 1] + widths[k / 2]);
    if (truth.has_value()) {
        ev.rmse = std::sqrt(sq / static_cast<double>(ev.converged));
    }
    return ev;
}

std::string render_sweep_svg(const std::vector<SweepRow>& rows,
                             std::optional<double> truth) {
    constexpr double kW = 800.0;
    constexpr double kH = 500.0;
    constexpr double kL = 70.0;
    constexpr double kR = 170.0; // room for the legend
    constexpr double kT = 20.0;
    constexpr double kB = 55.0;
    const double plot_w = kW - kL - kR;
    const double plot_h = kH - kT - kB;

    double cmin = std::numeric_limits<double>::infinity();
    double cmax = -std::numeric_limits<double>::infinity();
    double ymax = truth.value_or(0.0);
    for (const auto& r : rows) {
        cmin = std::min(cmin, r.init_c);
        cmax = std::max(cmax, r.init_c);
        if (r.converged) {
            ymax = std::max(ymax, r.point);
        }
    }
    if (!std::isfinite(cmin)) {
        cmin = 0.0;
        cmax = 1.0;
    }
    if (cmax <= cmin) {
        cmax = cmin + 1.0;
    }
    ymax = ymax > 0.0 ? ymax * 1.08 : 1.0;

    const auto px = [&](double c) { return kL + (c - cmin) / (cmax - cmin) * plot_w; };
    const auto py = [&](double v) { return kT + plot_h - v / ymax * plot_h; };

    const std::map<std::string, std::string> colors = {{"4plb", "#1b9e77"},
                                                       {"4pl", "#d95f02"},
                                                       {"hinge", "#7570b3"},
                                                       {"bayes", "#e7298a"}};

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" "
           "viewBox=\"0 0 800 500\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"500\" fill=\"white\"/>\n";

    // axes
    svg += "<line x1=\"" + fmt_number(kL) + "\" y1=\"" + fmt_number(kT + plot_h) +
           "\" x2=\"" + fmt_number(kL + plot_w) + "\" y2=\"" + fmt_number(kT + plot_h) +
           "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + fmt_number(kL) + "\" y1=\"" + fmt_number(kT) + "\" x2=\"" +
           fmt_number(kL) + "\" y2=\"" + fmt_number(kT + plot_h) +
           "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double c = cmin + (cmax - cmin) * i / 4.0;
        const double v = ymax * i / 4.0;
        svg += "<text x=\"" + fmt_number(px(c)) + "\" y=\"" +
               fmt_number(kT + plot_h + 20.0) +
               "\" font-size=\"12\" text-anchor=\"middle\">" + fmt_fixed(c, 1) +
               "</text>\n";
        svg += "<text x=\"" + fmt_number(kL - 8.0) + "\" y=\"" +
               fmt_number(py(v) + 4.0) +
               "\" font-size=\"12\" text-anchor=\"end\">" + fmt_fixed(v, 1) +
               "</text>\n";
    }
    svg += "<text x=\"" + fmt_number(kL + plot_w / 2.0) + "\" y=\"" +
           fmt_number(kH - 12.0) +
           "\" font-size=\"14\" text-anchor=\"middle\">initial classification threshold "
           "c0 (dB-Hz)</text>\n";
    svg += "<text x=\"18\" y=\"" + fmt_number(kT + plot_h / 2.0) +
           "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
           fmt_number(kT + plot_h / 2.0) + ")\">estimated height (m)</text>\n";

    if (truth.has_value()) {
        svg += "<line data-role=\"truth\" x1=\"" + fmt_number(kL) + "\" y1=\"" +
               fmt_number(py(*truth)) + "\" x2=\"" + fmt_number(kL + plot_w) +
               "\" y2=\"" + fmt_number(py(*truth)) +
               "\" stroke=\"#444444\" stroke-dasharray=\"6 4\"/>\n";
        svg += "<text x=\"" + fmt_number(kL + 4.0) + "\" y=\"" +
               fmt_number(py(*truth) - 5.0) +
               "\" font-size=\"12\" fill=\"#444444\">truth " + fmt_fixed(*truth, 1) +
               " m</text>\n";
    }

    double legend_y = kT + 12.0;
    for (const auto& algo : kSweepAlgos) {
        std::string points;
        for (const auto& r : rows) {
            if (r.algo != algo || !r.converged) {
                continue;
            }
            points += fmt_number(px(r.init_c)) + "," + fmt_number(py(r.point)) + " ";
        }
        if (!points.empty()) {
            points.pop_back();
        }
        svg += "<polyline data-algo=\"" + algo + "\" fill=\"none\" stroke=\"" +
               colors.at(algo) + "\" stroke-width=\"2\" points=\"" + points + "\"/>\n";
        const double lx = kL + plot_w + 16.0;
        svg += "<line x1=\"" + fmt_number(lx) + "\" y1=\"" + fmt_number(legend_y) +
               "\" x2=\"" + fmt_number(lx + 22.0) + "\" y2=\"" + fmt_number(legend_y) +
               "\" stroke=\"" + colors.at(algo) + "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + fmt_number(lx + 28.0) + "\" y=\"" +
               fmt_number(legend_y + 4.0) + "\" font-size=\"13\">" + algo + "</text>\n";
        legend_y += 20.0;
    }
    svg += "</svg>\n";
    return svg;
}

int cmd_sweep(const DataOptions& data, const InitOptions& init,
              const ConvergenceOptions& conv, double c_min, double c_max, double c_step,
              std::optional<double> truth, const std::string& out_dir) {
    if (!(c_step > 0.0)) {
        std::cerr << "gnssheight: --sweep-c-step must be positive\n";
        return 1;
    }
    std::vector<double> thresholds;
    for (std::size_t k = 0;; ++k) {
        const double c = c_min + static_cast<double>(k) * c_step;
        if (c >= c_max) {
            break;
        }
        thresholds.push_back(c);
    }
    if (thresholds.empty()) {
        std::cerr << "gnssheight: empty sweep range [" << fmt_number(c_min) << ", "
                  << fmt_number(c_max) << ")\n";
        return 1;
    }

    ObsPtr obs;
    FpPtr fp;
    DsPtr ds;
    if (int rc = build_inputs(data, obs, fp, ds); rc != 0) {
        return rc;
    }

    // Estimations are independent; fan out one task per threshold and gather
    // in threshold order so outputs stay deterministic.
    const gh_convergence cfg = conv.to_c();
    std::vector<std::future<ThresholdResult>> futures;
    futures.reserve(thresholds.size());
    for (const double c0 : thresholds) {
        futures.push_back(std::async(std::launch::async, run_threshold, ds.get(), c0,
                                     init, cfg));
    }
    std::vector<SweepRow> rows;
    for (auto& f : futures) {
        ThresholdResult r = f.get();
        if (!r.error.empty()) {
            std::cerr << "gnssheight: sweep: " << r.error << "\n";
            return 1;
        }
        rows.insert(rows.end(), r.rows.begin(), r.rows.end());
    }

    std::string csv = "init_c_dbhz,algorithm,converged,point_m,range_low_m,range_high_m,"
                      "iterations\n";
    for (const auto& r : rows) {
        csv += fmt_number(r.init_c) + "," + r.algo + "," +
               (r.converged ? "true" : "false") + "," + fmt_number(r.point) + "," +
               fmt_number(r.lo) + "," + fmt_number(r.hi) + "," +
               std::to_string(r.iterations) + "\n";
    }

    nlohmann::ordered_json envelope;
    envelope["config"]["obs"] = data.obs_path;
    envelope["config"]["footprint"] = data.footprint_path;
    envelope["config"]["elev_min"] = data.elev_min;
    envelope["config"]["elev_max"] = data.elev_max;
    if (data.dem_alt.has_value()) {
        envelope["config"]["dem_alt"] = *data.dem_alt;
    } else {
        envelope["config"]["dem_alt"] = nullptr;
    }
    envelope["config"]["init"] = {{"a", init.a}, {"b", init.b}, {"d", init.d}};
    envelope["config"]["sweep"] = {{"c_min", c_min},
                                   {"c_max", c_max},
                                   {"c_step", c_step},
                                   {"thresholds", thresholds}};
    envelope["config"]["convergence"] = {
        {"max_iterations", conv.max_iterations},
        {"label_change_fraction", conv.label_change_fraction},
        {"param_rel_tol", conv.param_rel_tol}};
    if (truth.has_value()) {
        envelope["config"]["truth_height"] = *truth;
    } else {
        envelope["config"]["truth_height"] = nullptr;
    }
    gh_summary s{};
    gh_dataset_summary(ds.get(), &s);
    envelope["dataset"] = {{"epochs", s.epochs},
                           {"recorded", s.recorded},
                           {"blocked", s.blocked},
                           {"total", s.total},
                           {"intersecting", s.intersecting},
                           {"inside_footprint", s.inside_footprint}};
    for (const auto& algo : kSweepAlgos) {
        const AlgoEvaluation ev = evaluate_rows(rows, algo, truth);
        nlohmann::ordered_json je;
        je["runs"] = ev.runs;
        je["converged"] = ev.converged;
        je["no_result"] = ev.no_result;
        if (ev.no_result) {
            je["rmse"] = nullptr;
            je["min_point"] = nullptr;
            je["max_point"] = nullptr;
            je["spread"] = nullptr;
            je["median_range_width"] = nullptr;
        } else {
            if (ev.rmse.has_value()) {
                je["rmse"] = *ev.rmse;
            } else {
                je["rmse"] = nullptr;
            }
            je["min_point"] = ev.min_point;
            je["max_point"] = ev.max_point;
            je["spread"] = ev.spread;
            je["median_range_width"] = ev.median_range_width;
        }
        envelope["evaluation"][algo] = je;
    }
    envelope["outputs"] = {{"csv", "sweep.csv"}, {"svg", "sweep.svg"}};

    std::string err;
    if (!ensure_out_dir(out_dir, err)) {
        std::cerr << "gnssheight: " << err << "\n";
        return 1;
    }
    const fs::path base(out_dir);
    if (!write_file(base / "sweep.csv", csv, err) ||
        !write_file(base / "sweep.json", envelope.dump(2) + "\n", err) ||
        !write_file(base / "sweep.svg", render_sweep_svg(rows, truth), err)) {
        std::cerr << "gnssheight: " << err << "\n";
        return 1;
    }

    print_dataset_summary(ds.get());
    std::cout << "sweep: " << thresholds.size() << " thresholds x " << kSweepAlgos.size()
              << " algorithms = " << rows.size() << " runs\n";
    for (const auto& algo : kSweepAlgos) {
        const AlgoEvaluation ev = evaluate_rows(rows, algo, truth);
        std::cout << "  " << algo << ": " << ev.converged << "/" << ev.runs
                  << " converged";
        if (ev.no_result) {
            std::cout << " (no result)";
        } else {
            if (ev.rmse.has_value()) {
                std::cout << ", rmse " << fmt_fixed(*ev.rmse, 2) << " m";
            }
            std::cout << ", spread " << fmt_fixed(ev.spread, 2) << " m";
        }
        std::cout << "\n";
    }
    std::cout << "wrote " << (base / "sweep.csv").string() << ", "
              << (base / "sweep.json").string() << ", " << (base / "sweep.svg").string()
              << "\n";
    return 0;
}

int cmd_fit_classifier(const std::string& obs_path, const InitOptions& init,
                       const std::string& out_dir) {
    gh_observations* raw_obs = nullptr;
    if (gh_observations_load(obs_path.c_str(), &raw_obs) != GH_OK) {
        return fail_cmd("loading observations from " + obs_path);
    }
    ObsPtr obs(raw_obs);

    const gh_fourpl init_p{init.a, init.b, init.c, init.d};
    gh_fit_report rep{};
    if (gh_fit_signal_classifier(obs.get(), &init_p, &rep) != GH_OK) {
        return fail_cmd("fitting signal classifier");
    }

    char* fit_json = nullptr;
    if (gh_fit_report_to_json(&rep, &fit_json) != GH_OK) {
        return fail_cmd("serializing fit");
    }
    nlohmann::ordered_json doc;
    doc["fit"] = nlohmann::ordered_json::parse(take_string(fit_json));
    doc["mcfadden_r2"] = rep.mcfadden_r2;
    doc["confusion"] = {{"true_open", rep.true_open},
                        {"false_open", rep.false_open},
                        {"false_closed", rep.false_closed},
                        {"true_closed", rep.true_closed}};
    doc["fit_rows"] = rep.fit_rows;

    std::string err;
    if (!ensure_out_dir(out_dir, err)) {
        std::cerr << "gnssheight: " << err << "\n";
        return 1;
    }
    const fs::path out_path = fs::path(out_dir) / "classifier.json";
    if (!write_file(out_path, doc.dump(2) + "\n", err)) {
        std::cerr << "gnssheight: " << err << "\n";
        return 1;
    }

    std::cout << "signal classifier fit on " << rep.fit_rows << " received rows\n";
    std::cout << "  a=" << fmt_fixed(rep.params.a, 4) << " b=" << fmt_fixed(rep.params.b, 4)
              << " c=" << fmt_fixed(rep.params.c, 4) << " d=" << fmt_fixed(rep.params.d, 4)
              << "\n";
    std::cout << "  log-likelihood " << fmt_fixed(rep.log_likelihood, 3) << ", "
              << (rep.converged != 0 ? "converged" : "not converged") << " after "
              << rep.iterations << " iterations\n";
    std::cout << "  McFadden R2: " << fmt_fixed(rep.mcfadden_r2, 4) << "\n";
    std::cout << "  confusion at 0.5 threshold (rows incl. blocked):\n";
    std::cout << "                 classified open   classified closed\n";
    std::cout << "    truth open   " << rep.true_open << "   " << rep.false_closed
              << "\n";
    std::cout << "    truth closed " << rep.false_open << "   " << rep.true_closed
              << "\n";
    std::cout << "wrote " << out_path.string() << "\n";
    return rep.converged != 0 ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"LOD-1 building height estimation from GNSS observation logs"};
    app.require_subcommand(1);

    DataOptions data;
    InitOptions init;
    ConvergenceOptions conv;
    std::string algo = "4plb";
    std::string out_dir = ".";
    std::string scene_path;
    std::optional<std::uint64_t> seed_flag;
    double c_min = 20.0;
    double c_max = 40.0;
    double c_step = 1.0;
    std::optional<double> truth_height;
    std::optional<double> dem_alt;

    const auto add_data_flags = [&](CLI::App* cmd) {
        cmd->add_option("--obs", data.obs_path, "observation CSV path")->required();
        cmd->add_option("--footprint", data.footprint_path, "footprint JSON path")
            ->required();
        cmd->add_option("--elev-min", data.elev_min,
                        "elevation filter lower bound, degrees (default 10)");
        cmd->add_option("--elev-max", data.elev_max,
                        "elevation filter upper bound, degrees (default 85)");
        cmd->add_option("--dem-alt", dem_alt,
                        "terrain altitude override; receivers sit 1 m above it");
    };
    const auto add_init_flags = [&](CLI::App* cmd, bool with_c) {
        cmd->add_option("--init-a", init.a, "initial signal 4PL a (default 0.9)");
        cmd->add_option("--init-b", init.b, "initial signal 4PL b (default 0.2)");
        if (with_c) {
            cmd->add_option("--init-c", init.c, "initial signal 4PL c (default 30)");
        }
        cmd->add_option("--init-d", init.d, "initial signal 4PL d (default 0.1)");
    };
    const auto add_conv_flags = [&](CLI::App* cmd) {
        cmd->add_option("--max-iterations", conv.max_iterations,
                        "4plb iteration cap (default 10)");
        cmd->add_option("--label-change-fraction", conv.label_change_fraction,
                        "4plb label-stability stop fraction (default 0.01)");
        cmd->add_option("--param-rel-tol", conv.param_rel_tol,
                        "4plb parameter-stability stop tolerance (default 1e-4)");
    };

    CLI::App* est = app.add_subcommand("estimate", "estimate one building's height");
    add_data_flags(est);
    add_init_flags(est, true);
    add_conv_flags(est);
    est->add_option("--algo", algo, "4plb | 4pl | hinge | bayes (default 4plb)");
    est->add_option("--out", out_dir, "output directory (default .)");

    CLI::App* sim = app.add_subcommand("simulate", "generate a synthetic scene");
    sim->add_option("--scene", scene_path, "scene config JSON path")->required();
    sim->add_option("--seed", seed_flag, "RNG seed override");
    sim->add_option("--out", out_dir, "output directory (default .)");

    CLI::App* swp = app.add_subcommand("sweep",
                                       "run all algorithms across initial thresholds");
    add_data_flags(swp);
    add_init_flags(swp, false);
    add_conv_flags(swp);
    swp->add_option("--sweep-c-min", c_min, "first threshold, dB-Hz (default 20)");
    swp->add_option("--sweep-c-max", c_max,
                    "exclusive upper bound, dB-Hz (default 40; defaults give 20 thresholds)");
    swp->add_option("--sweep-c-step", c_step, "threshold step, dB-Hz (default 1)");
    swp->add_option("--truth-height", truth_height,
                    "true height for RMSE and the chart's truth line");
    swp->add_option("--out", out_dir, "output directory (default .)");

    CLI::App* fit = app.add_subcommand("fit-classifier",
                                       "fit the signal 4PL against truth labels");
    fit->add_option("--obs", data.obs_path, "observation CSV path (needs truth_label)")
        ->required();
    add_init_flags(fit, true);
    fit->add_option("--out", out_dir, "output directory (default .)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    data.dem_alt = dem_alt;
    if (est->parsed()) {
        return cmd_estimate(data, init, conv, algo, out_dir);
    }
    if (sim->parsed()) {
        return cmd_simulate(scene_path, seed_flag, out_dir);
    }
    if (swp->parsed()) {
        return cmd_sweep(data, init, conv, c_min, c_max, c_step, truth_height, out_dir);
    }
    if (fit->parsed()) {
        return cmd_fit_classifier(data.obs_path, init, out_dir);
    }
    return 1;
}
