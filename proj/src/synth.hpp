#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"
#include "geo.hpp"
#include "ingest.hpp"

namespace gnssheight::synth {

struct SatelliteSampler {
    double min_elevation = 10.0; // degrees
    double max_elevation = 85.0; // degrees
    int count_per_epoch = 8;
};

struct SceneSpec {
    geo::Footprint footprint;
    double true_height = 0.0; // metres above the receivers' ground plane
    std::vector<geo::PlanarPoint> receiver_sites;
    int epochs_per_site = 100;
    SatelliteSampler satellite_sampler;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SignalDistributionSpec {
    double open_mean = 40.0; // dB-Hz
    double open_sd = 5.0;
    double closed_mean = 25.0;
    double closed_sd = 6.0;
    double blocked_prob_closed = 0.3;
    double receiver_floor = 10.0; // dB-Hz; draws below resample
    double location_noise_sd = 0.0; // metres, isotropic, recorded position only
    double diffraction_band = 0.0;  // metres below the roofline
    double diffraction_boost = 0.0; // probability an in-band closed signal reads open

    void validate() const;
};

struct SyntheticDataset {
    std::vector<ingest::ObservationRecord> records; // truth_open populated
    double truth_height = 0.0;
};

/// Samples one observation per site/epoch/satellite with uniform azimuth
/// [0, 360) and uniform elevation within the sampler bounds. The truth label
/// is geometric: open iff the ray misses the footprint or enters above
/// true_height (strictly). Closed signals in the diffraction band may read
/// open-class C/N0; other closed signals block with blocked_prob_closed.
/// Location noise perturbs only the recorded receiver position. Deterministic
/// given the scene seed.
SyntheticDataset generate(const SceneSpec& scene, const SignalDistributionSpec& dist);

/// Observation CSV (planar schema) with blocked rows as empty cn0 cells and
/// truth_label always populated. Numbers print in shortest round-trip form,
/// so export/load is value-exact.
std::string to_csv(const SyntheticDataset& ds);
void export_csv(const SyntheticDataset& ds, const std::string& path);

struct SceneConfig {
    SceneSpec scene;
    SignalDistributionSpec signal;
};

/// One JSON document: required "scene" section (footprint, true_height,
/// receiver_sites; optional epochs_per_site, satellite_sampler, seed) and
/// optional "signal" section overriding SignalDistributionSpec defaults.
SceneConfig parse_scene_config(const std::string& json_text);
SceneConfig load_scene_config(const std::string& path);

} // namespace gnssheight::synth
