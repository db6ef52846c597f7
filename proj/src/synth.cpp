#include "synth.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "json.hpp"
#include "rng.hpp"

namespace gnssheight::synth {

namespace {

constexpr double kCn0Ceiling = 80.0; // matches the ingest validity range

double draw_cn0(Rng& rng, double mean, double sd, double floor) {
    for (int attempt = 0; attempt < 10000; ++attempt) {
        const double v = rng.normal(mean, sd);
        if (v > 0.0 && v >= floor && v < kCn0Ceiling) {
            return v;
        }
    }
    throw NumericalError("C/N0 sampler rejected 10000 draws; check distribution vs "
                         "receiver_floor");
}

std::string sat_name(int k) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "S%02d", k + 1);
    return buf;
}

/// Integral doubles print as integers; everything else in shortest
/// round-trip form.
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

} // namespace

void SceneSpec::validate() const {
    footprint.validate();
    if (!(true_height > 0.0) || !std::isfinite(true_height)) {
        throw ConfigError("scene true_height must be positive");
    }
    if (receiver_sites.empty()) {
        throw ConfigError("scene needs at least one receiver site");
    }
    for (const auto& s : receiver_sites) {
        s.validate();
        if (geo::point_in_polygon(s, footprint.ring)) {
            throw ConfigError("receiver sites must lie outside the footprint");
        }
    }
    if (epochs_per_site < 1) {
        throw ConfigError("epochs_per_site must be at least 1");
    }
    const auto& ss = satellite_sampler;
    if (!(ss.min_elevation >= 0.0 && ss.min_elevation <= ss.max_elevation &&
          ss.max_elevation <= 90.0)) {
        throw ConfigError("satellite sampler elevations need 0 <= min <= max <= 90");
    }
    if (ss.count_per_epoch < 1) {
        throw ConfigError("count_per_epoch must be at least 1");
    }
}

void SignalDistributionSpec::validate() const {
    if (!(open_sd > 0.0) || !(closed_sd > 0.0)) {
        throw ConfigError("signal sds must be positive");
    }
    if (!(open_mean > closed_mean)) {
        throw ConfigError("open_mean must exceed closed_mean");
    }
    if (!(open_mean > 0.0 && open_mean < kCn0Ceiling) ||
        !(closed_mean > 0.0 && closed_mean < kCn0Ceiling)) {
        throw ConfigError("signal means must lie inside (0, 80) dB-Hz");
    }
    if (!(blocked_prob_closed >= 0.0 && blocked_prob_closed <= 1.0) ||
        !(diffraction_boost >= 0.0 && diffraction_boost <= 1.0)) {
        throw ConfigError("probabilities must lie in [0, 1]");
    }
    if (!(receiver_floor >= 0.0 && receiver_floor < kCn0Ceiling)) {
        throw ConfigError("receiver_floor must lie in [0, 80)");
    }
    if (!(location_noise_sd >= 0.0) || !(diffraction_band >= 0.0)) {
        throw ConfigError("location_noise_sd and diffraction_band must be non-negative");
    }
}

SyntheticDataset generate(const SceneSpec& scene, const SignalDistributionSpec& dist) {
    scene.validate();
    dist.validate();

    Rng rng(scene.seed);
    SyntheticDataset out;
    out.truth_height = scene.true_height;
    const auto& ss = scene.satellite_sampler;
    out.records.reserve(scene.receiver_sites.size() *
                        static_cast<std::size_t>(scene.epochs_per_site) *
                        static_cast<std::size_t>(ss.count_per_epoch));

    for (std::size_t site_idx = 0; site_idx < scene.receiver_sites.size(); ++site_idx) {
        const geo::PlanarPoint& site = scene.receiver_sites[site_idx];
        for (int epoch = 0; epoch < scene.epochs_per_site; ++epoch) {
            const double ts = 1600000000.0 +
                              static_cast<double>(site_idx) * 100000.0 +
                              static_cast<double>(epoch);
            for (int k = 0; k < ss.count_per_epoch; ++k) {
                const double az = rng.uniform(0.0, 360.0);
                const double el = rng.uniform(ss.min_elevation, ss.max_elevation);

                bool open = true;
                double entry_height = std::numeric_limits<double>::quiet_NaN();
                if (el < 90.0) { // a zenith ray cannot meet the prism walls
                    const geo::RayPath ray{site, az, el};
                    if (const auto hit = geo::ray_entry(ray, scene.footprint)) {
                        entry_height = hit->intersection_height;
                        open = entry_height > scene.true_height;
                    }
                }

                std::optional<double> cn0;
                if (open) {
                    cn0 = draw_cn0(rng, dist.open_mean, dist.open_sd, dist.receiver_floor);
                } else {
                    bool diffracted = false;
                    if (dist.diffraction_band > 0.0 &&
                        entry_height >= scene.true_height - dist.diffraction_band) {
                        diffracted = rng.uniform() < dist.diffraction_boost;
                    }
                    if (diffracted) {
                        cn0 = draw_cn0(rng, dist.open_mean, dist.open_sd,
                                       dist.receiver_floor);
                    } else if (rng.uniform() < dist.blocked_prob_closed) {
                        cn0 = std::nullopt;
                    } else {
                        cn0 = draw_cn0(rng, dist.closed_mean, dist.closed_sd,
                                       dist.receiver_floor);
                    }
                }

                geo::PlanarPoint recorded = site;
                if (dist.location_noise_sd > 0.0) {
                    recorded.x += rng.normal(0.0, dist.location_noise_sd);
                    recorded.y += rng.normal(0.0, dist.location_noise_sd);
                }

                ingest::ObservationRecord r;
                r.timestamp = ts;
                r.receiver = recorded;
                r.sat_azimuth = az;
                r.sat_elevation = el;
                r.cn0 = cn0;
                r.sat_id = sat_name(k);
                r.truth_open = open;
                out.records.push_back(std::move(r));
            }
        }
    }
    return out;
}

std::string to_csv(const SyntheticDataset& ds) {
    std::string out = "timestamp,x,y,alt,azimuth,elevation,cn0,sat_id,truth_label\n";
    for (const auto& r : ds.records) {
        const auto& p = std::get<geo::PlanarPoint>(r.receiver);
        out += fmt_number(r.timestamp);
        out += ',';
        out += fmt_number(p.x);
        out += ',';
        out += fmt_number(p.y);
        out += ',';
        out += fmt_number(p.alt);
        out += ',';
        out += fmt_number(r.sat_azimuth);
        out += ',';
        out += fmt_number(r.sat_elevation);
        out += ',';
        if (r.cn0.has_value()) {
            out += fmt_number(*r.cn0);
        }
        out += ',';
        out += r.sat_id;
        out += ',';
        out += r.truth_open.value_or(false) ? "open" : "closed";
        out += '\n';
    }
    return out;
}

void export_csv(const SyntheticDataset& ds, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw IoError("cannot open for writing: " + path);
    }
    const std::string body = to_csv(ds);
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!f) {
        throw IoError("write failed: " + path);
    }
}

namespace {

geo::PlanarPoint parse_site(const nlohmann::json& v) {
    if (!v.is_array() || v.size() < 2 || v.size() > 3) {
        throw ParseError("receiver_sites entries must be [x, y] or [x, y, alt]");
    }
    geo::PlanarPoint p;
    p.x = v.at(0).get<double>();
    p.y = v.at(1).get<double>();
    p.alt = v.size() == 3 ? v.at(2).get<double>() : 1.5;
    return p;
}

} // namespace

SceneConfig parse_scene_config(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("scene config: ") + e.what());
    }

    SceneConfig cfg;
    try {
        const auto& sc = doc.at("scene");
        cfg.scene.footprint = geo::parse_footprint(sc.at("footprint").dump());
        cfg.scene.true_height = sc.at("true_height").get<double>();
        for (const auto& v : sc.at("receiver_sites")) {
            cfg.scene.receiver_sites.push_back(parse_site(v));
        }
        cfg.scene.epochs_per_site = sc.value("epochs_per_site", 100);
        if (sc.contains("satellite_sampler")) {
            const auto& sm = sc.at("satellite_sampler");
            cfg.scene.satellite_sampler.min_elevation =
                sm.value("min_elevation", cfg.scene.satellite_sampler.min_elevation);
            cfg.scene.satellite_sampler.max_elevation =
                sm.value("max_elevation", cfg.scene.satellite_sampler.max_elevation);
            cfg.scene.satellite_sampler.count_per_epoch =
                sm.value("count_per_epoch", cfg.scene.satellite_sampler.count_per_epoch);
        }
        cfg.scene.seed = sc.value("seed", std::uint64_t{0});

        if (doc.contains("signal")) {
            const auto& sg = doc.at("signal");
            auto& d = cfg.signal;
            d.open_mean = sg.value("open_mean", d.open_mean);
            d.open_sd = sg.value("open_sd", d.open_sd);
            d.closed_mean = sg.value("closed_mean", d.closed_mean);
            d.closed_sd = sg.value("closed_sd", d.closed_sd);
            d.blocked_prob_closed = sg.value("blocked_prob_closed", d.blocked_prob_closed);
            d.receiver_floor = sg.value("receiver_floor", d.receiver_floor);
            d.location_noise_sd = sg.value("location_noise_sd", d.location_noise_sd);
            d.diffraction_band = sg.value("diffraction_band", d.diffraction_band);
            d.diffraction_boost = sg.value("diffraction_boost", d.diffraction_boost);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("scene config: ") + e.what());
    }
    cfg.scene.validate();
    cfg.signal.validate();
    return cfg;
}

SceneConfig load_scene_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw IoError("cannot open scene config: " + path);
    }
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return parse_scene_config(text);
}

} // namespace gnssheight::synth
