#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"

namespace gnssheight::geo {

inline constexpr double kEarthMeanRadius = 6371008.8; // metres
inline constexpr double kWgs84SemiMajor = 6378137.0;  // metres
inline constexpr double kWgs84Flattening = 1.0 / 298.257223563;

inline constexpr double deg2rad(double d) { return d * M_PI / 180.0; }
inline constexpr double rad2deg(double r) { return r * 180.0 / M_PI; }

/// Geodetic position on the WGS84 ellipsoid.
struct GeoPoint {
    double lat = 0.0; // degrees, [-90, 90]
    double lon = 0.0; // degrees, [-180, 180]
    double alt = 0.0; // metres above the reference surface

    void validate() const;
};

/// Position in a local east/north metric frame.
struct PlanarPoint {
    double x = 0.0;   // metres east
    double y = 0.0;   // metres north
    double alt = 0.0; // metres

    void validate() const;
};

/// Simple polygon ring in local metres. Vertex altitudes are ignored.
struct Footprint {
    std::string id;
    std::vector<PlanarPoint> ring;
    /// Present when the source document was geodetic; geodetic observations
    /// are projected about this point so both datasets share one frame.
    std::optional<GeoPoint> projection_center;

    void validate() const;
};

/// Straight signal path leaving `origin` towards a satellite.
struct RayPath {
    PlanarPoint origin;
    double azimuth = 0.0;   // degrees clockwise from north, [0, 360)
    double elevation = 0.0; // degrees, [0, 90]

    void validate() const;
};

/// Entry crossing of a ray over a footprint boundary.
struct Intersection {
    PlanarPoint entry_point;
    double horizontal_distance = 0.0; // metres, >= 0
    double intersection_height = 0.0; // origin.alt + distance * tan(elevation)
};

/// Equirectangular projection about `center` with the mean Earth radius.
/// Errors when the horizontal separation reaches 10 km, where the planar
/// treatment no longer bounds the distortion.
PlanarPoint project_to_local(const GeoPoint& p, const GeoPoint& center);

/// Analytic inverse of project_to_local.
GeoPoint local_to_geo(const PlanarPoint& p, const GeoPoint& center);

/// Geodetic to Earth-centred Earth-fixed coordinates (WGS84).
std::array<double, 3> geodetic_to_ecef(const GeoPoint& p);

/// Azimuth/elevation of a satellite as seen from `receiver`, via the
/// ECEF->ENU rotation on the WGS84 tangential plane. Azimuth is returned in
/// [0, 360), elevation in [-90, 90].
struct LookAngles {
    double azimuth = 0.0;
    double elevation = 0.0;
};
LookAngles look_angles(const GeoPoint& receiver, const std::array<double, 3>& satellite_ecef);

/// Even-odd test; boundary points count as inside.
bool point_in_polygon(const PlanarPoint& p, const std::vector<PlanarPoint>& ring);

/// First (minimum-distance) crossing of the horizontal ray over the footprint
/// boundary, or nullopt when no edge is crossed. The ascending ray is lowest
/// over the footprint at this entry edge, so blockage is decided there.
/// The origin must lie strictly outside the polygon, and elevation must be
/// below 90 degrees.
std::optional<Intersection> ray_entry(const RayPath& ray, const Footprint& fp);

/// Keeps records with lower <= elevation <= upper (bounds inclusive).
template <class Record>
std::vector<Record> elevation_filter(const std::vector<Record>& records,
                                     double lower = 10.0, double upper = 85.0) {
    if (!(lower < upper))
        throw ConfigError("elevation filter: lower bound must be below upper bound");
    std::vector<Record> kept;
    kept.reserve(records.size());
    for (const auto& r : records)
        if (r.sat_elevation >= lower && r.sat_elevation <= upper)
            kept.push_back(r);
    return kept;
}

/// Reads a footprint document: {"id": text, "crs": "local-metres"|"wgs84",
/// "ring": [[x,y],...]}. A wgs84 ring is projected about its centroid and the
/// centroid retained as projection_center.
Footprint load_footprint(const std::string& path);
Footprint parse_footprint(const std::string& json_text);

} // namespace gnssheight::geo
