#include "geo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace gnssheight::geo {

namespace {

bool finite(double v) { return std::isfinite(v); }

// Proper segment-pair crossing, shared endpoints excluded by the caller's
// index arithmetic.
bool segments_intersect(const PlanarPoint& a, const PlanarPoint& b,
                        const PlanarPoint& c, const PlanarPoint& d) {
    auto cross = [](double ox, double oy, double ax, double ay, double bx, double by) {
        return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox);
    };
    const double d1 = cross(c.x, c.y, d.x, d.y, a.x, a.y);
    const double d2 = cross(c.x, c.y, d.x, d.y, b.x, b.y);
    const double d3 = cross(a.x, a.y, b.x, b.y, c.x, c.y);
    const double d4 = cross(a.x, a.y, b.x, b.y, d.x, d.y);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

double ring_area(const std::vector<PlanarPoint>& ring) {
    double s = 0.0;
    for (std::size_t i = 0; i < ring.size(); ++i) {
        const auto& p = ring[i];
        const auto& q = ring[(i + 1) % ring.size()];
        s += p.x * q.y - q.x * p.y;
    }
    return 0.5 * s;
}

} // namespace

void GeoPoint::validate() const {
    if (!finite(lat) || !finite(lon) || !finite(alt))
        throw ConfigError("GeoPoint: non-finite coordinate");
    if (lat < -90.0 || lat > 90.0)
        throw ConfigError("GeoPoint: latitude out of [-90, 90]");
    if (lon < -180.0 || lon > 180.0)
        throw ConfigError("GeoPoint: longitude out of [-180, 180]");
}

void PlanarPoint::validate() const {
    if (!finite(x) || !finite(y) || !finite(alt))
        throw ConfigError("PlanarPoint: non-finite coordinate");
}

void Footprint::validate() const {
    if (ring.size() < 3)
        throw ConfigError("footprint '" + id + "': ring needs at least 3 vertices");
    for (const auto& v : ring)
        v.validate();
    const auto& first = ring.front();
    const auto& last = ring.back();
    if (first.x == last.x && first.y == last.y)
        throw ConfigError("footprint '" + id + "': first vertex must not be repeated");
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            // skip edges sharing a vertex
            if (j == i || (j + 1) % n == i || (i + 1) % n == j)
                continue;
            if (segments_intersect(ring[i], ring[(i + 1) % n], ring[j], ring[(j + 1) % n]))
                throw ConfigError("footprint '" + id + "': ring is self-intersecting");
        }
    }
    if (std::abs(ring_area(ring)) < 1e-9)
        throw ConfigError("footprint '" + id + "': ring has zero area");
}

void RayPath::validate() const {
    origin.validate();
    if (!finite(azimuth) || azimuth < 0.0 || azimuth >= 360.0)
        throw ConfigError("RayPath: azimuth out of [0, 360)");
    if (!finite(elevation) || elevation < 0.0 || elevation > 90.0)
        throw ConfigError("RayPath: elevation out of [0, 90]");
}

PlanarPoint project_to_local(const GeoPoint& p, const GeoPoint& center) {
    p.validate();
    center.validate();
    const double x = kEarthMeanRadius * std::cos(deg2rad(center.lat)) * deg2rad(p.lon - center.lon);
    const double y = kEarthMeanRadius * deg2rad(p.lat - center.lat);
    if (std::hypot(x, y) >= 10000.0)
        throw ConfigError("project_to_local: separation of 10 km or more; projection distortion unbounded");
    return PlanarPoint{x, y, p.alt};
}

GeoPoint local_to_geo(const PlanarPoint& p, const GeoPoint& center) {
    p.validate();
    center.validate();
    GeoPoint g;
    g.lat = center.lat + rad2deg(p.y / kEarthMeanRadius);
    g.lon = center.lon + rad2deg(p.x / (kEarthMeanRadius * std::cos(deg2rad(center.lat))));
    g.alt = p.alt;
    return g;
}

std::array<double, 3> geodetic_to_ecef(const GeoPoint& p) {
    const double e2 = kWgs84Flattening * (2.0 - kWgs84Flattening);
    const double phi = deg2rad(p.lat);
    const double lam = deg2rad(p.lon);
    const double sp = std::sin(phi), cp = std::cos(phi);
    const double n = kWgs84SemiMajor / std::sqrt(1.0 - e2 * sp * sp);
    return {(n + p.alt) * cp * std::cos(lam),
            (n + p.alt) * cp * std::sin(lam),
            (n * (1.0 - e2) + p.alt) * sp};
}

LookAngles look_angles(const GeoPoint& receiver, const std::array<double, 3>& satellite_ecef) {
    receiver.validate();
    const double sat_norm = std::sqrt(satellite_ecef[0] * satellite_ecef[0] +
                                      satellite_ecef[1] * satellite_ecef[1] +
                                      satellite_ecef[2] * satellite_ecef[2]);
    if (!(sat_norm > 6.5e6))
        throw ConfigError("look_angles: satellite ECEF norm must exceed 6.5e6 m");

    const auto rec = geodetic_to_ecef(receiver);
    const double dx = satellite_ecef[0] - rec[0];
    const double dy = satellite_ecef[1] - rec[1];
    const double dz = satellite_ecef[2] - rec[2];
    const double range = std::sqrt(dx * dx + dy * dy + dz * dz);
    if (range < 1e-3)
        throw GeometryError("look_angles: satellite coincides with receiver");

    const double phi = deg2rad(receiver.lat);
    const double lam = deg2rad(receiver.lon);
    const double sp = std::sin(phi), cp = std::cos(phi);
    const double sl = std::sin(lam), cl = std::cos(lam);

    const double e = -sl * dx + cl * dy;
    const double n = -sp * cl * dx - sp * sl * dy + cp * dz;
    const double u = cp * cl * dx + cp * sl * dy + sp * dz;

    double az = rad2deg(std::atan2(e, n));
    if (az < 0.0)
        az += 360.0;
    if (az >= 360.0)
        az -= 360.0;
    const double el = rad2deg(std::asin(std::clamp(u / range, -1.0, 1.0)));
    return LookAngles{az, el};
}

bool point_in_polygon(const PlanarPoint& p, const std::vector<PlanarPoint>& ring) {
    const std::size_t n = ring.size();
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const auto& a = ring[i];
        const auto& b = ring[j];
        // boundary: point on edge counts as inside
        const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
        if (std::abs(cross) < 1e-12 &&
            p.x >= std::min(a.x, b.x) - 1e-12 && p.x <= std::max(a.x, b.x) + 1e-12 &&
            p.y >= std::min(a.y, b.y) - 1e-12 && p.y <= std::max(a.y, b.y) + 1e-12)
            return true;
        if ((a.y > p.y) != (b.y > p.y)) {
            const double xcross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < xcross)
                inside = !inside;
        }
    }
    return inside;
}

std::optional<Intersection> ray_entry(const RayPath& ray, const Footprint& fp) {
    ray.validate();
    fp.validate();
    if (ray.elevation == 90.0)
        throw ConfigError("ray_entry: elevation of exactly 90 degrees is rejected (vertical ray)");
    if (point_in_polygon(ray.origin, fp.ring))
        throw GeometryError("ray_entry: ray origin lies inside footprint '" + fp.id + "'");

    const double az = deg2rad(ray.azimuth);
    const double ux = std::sin(az); // east
    const double uy = std::cos(az); // north

    const std::size_t n = fp.ring.size();
    double best_t = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = fp.ring[i];
        const auto& q = fp.ring[(i + 1) % n];
        const double ex = q.x - p.x;
        const double ey = q.y - p.y;
        const double denom = ux * ey - uy * ex;
        if (std::abs(denom) < 1e-15)
            continue; // parallel
        const double wx = p.x - ray.origin.x;
        const double wy = p.y - ray.origin.y;
        const double t = (wx * ey - wy * ex) / denom;
        const double s = (wx * uy - wy * ux) / denom;
        if (t > 1e-12 && s >= 0.0 && s <= 1.0)
            best_t = std::min(best_t, t);
    }
    if (!std::isfinite(best_t))
        return std::nullopt;

    // tan(45 + r) = (1 + tan r) / (1 - tan r); r vanishes at 45 degrees, so
    // the quarter-turn slope is exactly 1 there
    const double r = deg2rad(ray.elevation - 45.0);
    const double tr = std::tan(r);
    const double slope = (1.0 + tr) / (1.0 - tr);
    Intersection hit;
    hit.entry_point = PlanarPoint{ray.origin.x + best_t * ux, ray.origin.y + best_t * uy, ray.origin.alt};
    hit.horizontal_distance = best_t;
    hit.intersection_height = ray.origin.alt + best_t * slope;
    return hit;
}

Footprint parse_footprint(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("footprint document: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("crs") || !doc.contains("ring"))
        throw ParseError("footprint document: expected object with 'crs' and 'ring'");

    Footprint fp;
    fp.id = doc.value("id", std::string("building"));
    const std::string crs = doc.at("crs").get<std::string>();
    if (crs != "local-metres" && crs != "wgs84")
        throw ParseError("footprint document: crs must be 'local-metres' or 'wgs84'");

    std::vector<std::array<double, 2>> raw;
    try {
        raw = doc.at("ring").get<std::vector<std::array<double, 2>>>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("footprint ring: ") + e.what());
    }

    if (crs == "local-metres") {
        for (const auto& v : raw)
            fp.ring.push_back(PlanarPoint{v[0], v[1], 0.0});
    } else {
        if (raw.empty())
            throw ParseError("footprint ring: empty");
        GeoPoint center{0.0, 0.0, 0.0};
        for (const auto& v : raw) {
            center.lon += v[0] / static_cast<double>(raw.size());
            center.lat += v[1] / static_cast<double>(raw.size());
        }
        for (const auto& v : raw)
            fp.ring.push_back(project_to_local(GeoPoint{v[1], v[0], 0.0}, center));
        fp.projection_center = center;
    }
    fp.validate();
    return fp;
}

Footprint load_footprint(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open footprint file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_footprint(buf.str());
}

} // namespace gnssheight::geo
