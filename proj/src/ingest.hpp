#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "geo.hpp"

namespace gnssheight::ingest {

/// One received-or-blocked satellite signal. An absent cn0 means the signal
/// was expected (satellite above horizon) but not received.
struct ObservationRecord {
    double timestamp = 0.0; // seconds (epoch)
    std::variant<geo::GeoPoint, geo::PlanarPoint> receiver;
    double sat_azimuth = 0.0;   // degrees clockwise from north, [0, 360)
    double sat_elevation = 0.0; // degrees, [0, 90]
    std::optional<double> cn0;  // dB-Hz in (0, 80); absent = blocked
    std::string sat_id;
    std::optional<bool> truth_open; // evaluation only, never read by estimators
};

struct MalformedRow {
    std::size_t line;   // 1-based file line number (header is line 1)
    std::string reason;
};

struct LoadReport {
    std::size_t rows = 0; // data rows seen (valid + malformed)
    std::vector<MalformedRow> malformed;
    std::size_t duplicate_pairs = 0; // repeated (timestamp, sat_id) rows, kept
};

struct LoadResult {
    std::vector<ObservationRecord> records;
    LoadReport report;
};

/// One footprint-intersecting observation reduced for the estimators.
struct DataTuple {
    int label = -1;            // -1 unset, 0 closed, 1 open
    std::optional<double> cn0; // absent = blocked
    double height = 0.0;       // intersection height, metres
};

struct ProvenanceCounts {
    std::size_t recorded = 0;
    std::size_t blocked = 0;
    std::size_t intersecting = 0;
    std::size_t inside_footprint = 0; // discarded with a warning, not an abort
};

struct BuildingDataset {
    std::string building_id;
    std::vector<DataTuple> tuples;
    ProvenanceCounts provenance;
};

struct DatasetSummary {
    std::size_t epochs = 0;
    std::size_t recorded = 0;
    std::size_t blocked = 0;
    std::size_t total = 0; // recorded + blocked
    std::size_t intersecting = 0;
};

/// Parses the observation CSV. Header must be
///   timestamp,lat,lon,alt,azimuth,elevation,cn0,sat_id,truth_label
/// or the pre-projected planar variant with x,y,alt in place of lat,lon,alt.
/// Malformed rows are collected with their line numbers; more than 10% of
/// them aborts the load.
LoadResult load_observations(const std::string& path);
LoadResult parse_observations(std::string_view csv_text);

/// Elevation-filters the records, intersects each ray with the footprint and
/// keeps the crossing records as unlabeled tuples, in input order.
/// Geodetic records require a footprint loaded from a wgs84 document (shared
/// projection center). Rays starting inside the footprint are counted and
/// dropped.
BuildingDataset build_dataset(const std::vector<ObservationRecord>& records,
                              const geo::Footprint& fp,
                              double elev_lower = 10.0, double elev_upper = 85.0);

DatasetSummary summarize(const std::vector<ObservationRecord>& records,
                         const BuildingDataset& dataset);

/// Replaces every receiver altitude with ground_alt + 1 m (digital-elevation
/// substitution for logs with unreliable GNSS vertical solutions).
void override_receiver_altitude(std::vector<ObservationRecord>& records, double ground_alt);

} // namespace gnssheight::ingest
