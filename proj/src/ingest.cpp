#include "ingest.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace gnssheight::ingest {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            out.push_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

bool parse_double(std::string_view s, double& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

struct RowError {
    std::string reason;
};

ObservationRecord parse_row(const std::vector<std::string_view>& f, bool planar) {
    ObservationRecord rec;
    if (!parse_double(f[0], rec.timestamp))
        throw RowError{"bad timestamp"};

    double p0, p1, alt;
    if (!parse_double(f[1], p0) || !parse_double(f[2], p1) || !parse_double(f[3], alt))
        throw RowError{planar ? "bad x/y/alt" : "bad lat/lon/alt"};
    if (planar) {
        rec.receiver = geo::PlanarPoint{p0, p1, alt};
    } else {
        if (p0 < -90.0 || p0 > 90.0)
            throw RowError{"latitude out of [-90, 90]"};
        if (p1 < -180.0 || p1 > 180.0)
            throw RowError{"longitude out of [-180, 180]"};
        rec.receiver = geo::GeoPoint{p0, p1, alt};
    }

    if (!parse_double(f[4], rec.sat_azimuth))
        throw RowError{"bad azimuth"};
    rec.sat_azimuth = std::fmod(rec.sat_azimuth, 360.0);
    if (rec.sat_azimuth < 0.0)
        rec.sat_azimuth += 360.0;

    if (!parse_double(f[5], rec.sat_elevation))
        throw RowError{"bad elevation"};
    if (rec.sat_elevation < 0.0 || rec.sat_elevation > 90.0)
        throw RowError{"elevation out of [0, 90]"};

    if (!f[6].empty()) {
        double cn0;
        if (!parse_double(f[6], cn0))
            throw RowError{"bad cn0"};
        if (cn0 <= 0.0 || cn0 >= 80.0)
            throw RowError{"cn0 out of (0, 80)"};
        rec.cn0 = cn0;
    }

    rec.sat_id = std::string(f[7]);

    if (f[8] == "open")
        rec.truth_open = true;
    else if (f[8] == "closed")
        rec.truth_open = false;
    else if (!f[8].empty())
        throw RowError{"truth_label must be open, closed or empty"};

    return rec;
}

} // namespace

LoadResult parse_observations(std::string_view csv_text) {
    static const std::vector<std::string> kGeoHeader = {
        "timestamp", "lat", "lon", "alt", "azimuth", "elevation", "cn0", "sat_id", "truth_label"};
    static const std::vector<std::string> kPlanarHeader = {
        "timestamp", "x", "y", "alt", "azimuth", "elevation", "cn0", "sat_id", "truth_label"};

    std::size_t pos = 0;
    std::size_t line_no = 0;
    auto next_line = [&](std::string_view& line) {
        if (pos >= csv_text.size())
            return false;
        std::size_t nl = csv_text.find('\n', pos);
        if (nl == std::string_view::npos)
            nl = csv_text.size();
        line = csv_text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        return true;
    };

    std::string_view header_line;
    if (!next_line(header_line))
        throw ParseError("observation CSV: empty file (header required)");
    const auto header = split_csv(header_line);

    auto matches = [&](const std::vector<std::string>& want) {
        if (header.size() != want.size())
            return false;
        for (std::size_t i = 0; i < want.size(); ++i)
            if (header[i] != want[i])
                return false;
        return true;
    };

    bool planar;
    if (matches(kGeoHeader))
        planar = false;
    else if (matches(kPlanarHeader))
        planar = true;
    else
        throw ParseError("observation CSV: header must be "
                         "'timestamp,lat,lon,alt,azimuth,elevation,cn0,sat_id,truth_label' "
                         "or the x,y,alt planar variant");

    LoadResult out;
    std::unordered_set<std::string> seen;
    std::string_view line;
    while (next_line(line)) {
        if (trim(line).empty())
            continue;
        ++out.report.rows;
        const auto fields = split_csv(line);
        if (fields.size() != 9) {
            out.report.malformed.push_back({line_no, "expected 9 fields, got " +
                                                         std::to_string(fields.size())});
            continue;
        }
        try {
            ObservationRecord rec = parse_row(fields, planar);
            std::uint64_t ts_bits;
            std::memcpy(&ts_bits, &rec.timestamp, sizeof ts_bits);
            if (!seen.insert(std::to_string(ts_bits) + "|" + rec.sat_id).second)
                ++out.report.duplicate_pairs;
            out.records.push_back(std::move(rec));
        } catch (const RowError& e) {
            out.report.malformed.push_back({line_no, e.reason});
        }
    }

    if (out.report.rows > 0 &&
        static_cast<double>(out.report.malformed.size()) > 0.10 * static_cast<double>(out.report.rows)) {
        std::ostringstream msg;
        msg << "observation CSV: " << out.report.malformed.size() << " of " << out.report.rows
            << " rows malformed (>10%); first errors:";
        for (std::size_t i = 0; i < out.report.malformed.size() && i < 5; ++i)
            msg << " [line " << out.report.malformed[i].line << ": "
                << out.report.malformed[i].reason << "]";
        throw ParseError(msg.str());
    }
    return out;
}

LoadResult load_observations(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open observation file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_observations(buf.str());
}

BuildingDataset build_dataset(const std::vector<ObservationRecord>& records,
                              const geo::Footprint& fp,
                              double elev_lower, double elev_upper) {
    if (records.empty())
        throw DegenerateDataError("build_dataset: no observation records");
    fp.validate();

    const auto kept = geo::elevation_filter(records, elev_lower, elev_upper);

    BuildingDataset ds;
    ds.building_id = fp.id;
    for (const auto& rec : records) {
        if (rec.cn0)
            ++ds.provenance.recorded;
        else
            ++ds.provenance.blocked;
    }

    for (const auto& rec : kept) {
        geo::PlanarPoint origin;
        if (const auto* pp = std::get_if<geo::PlanarPoint>(&rec.receiver)) {
            origin = *pp;
        } else {
            if (!fp.projection_center)
                throw ConfigError("build_dataset: geodetic records need a footprint loaded "
                                  "from a wgs84 document (no shared projection center)");
            origin = geo::project_to_local(std::get<geo::GeoPoint>(rec.receiver),
                                           *fp.projection_center);
        }
        geo::RayPath ray{origin, rec.sat_azimuth, rec.sat_elevation};
        std::optional<geo::Intersection> hit;
        try {
            hit = geo::ray_entry(ray, fp);
        } catch (const GeometryError&) {
            ++ds.provenance.inside_footprint;
            continue;
        }
        if (!hit)
            continue;
        ds.tuples.push_back(DataTuple{-1, rec.cn0, hit->intersection_height});
    }
    ds.provenance.intersecting = ds.tuples.size();

    if (ds.tuples.empty())
        throw DegenerateDataError("build_dataset: no records intersect footprint '" + fp.id + "'");
    return ds;
}

DatasetSummary summarize(const std::vector<ObservationRecord>& records,
                         const BuildingDataset& dataset) {
    DatasetSummary s;
    std::unordered_set<double> epochs;
    for (const auto& rec : records) {
        epochs.insert(rec.timestamp);
        if (rec.cn0)
            ++s.recorded;
        else
            ++s.blocked;
    }
    s.epochs = epochs.size();
    s.total = s.recorded + s.blocked;
    s.intersecting = dataset.tuples.size();
    return s;
}

void override_receiver_altitude(std::vector<ObservationRecord>& records, double ground_alt) {
    for (auto& rec : records) {
        if (auto* gp = std::get_if<geo::GeoPoint>(&rec.receiver))
            gp->alt = ground_alt + 1.0;
        else
            std::get<geo::PlanarPoint>(rec.receiver).alt = ground_alt + 1.0;
    }
}

} // namespace gnssheight::ingest
