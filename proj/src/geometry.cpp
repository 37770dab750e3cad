#include "satsim/geometry.hpp"

#include "satsim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace satsim::geometry {

double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

Vec3 cross(Vec3 a, Vec3 b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

double norm(Vec3 a) { return std::sqrt(dot(a, a)); }

Vec3 normalized(Vec3 a)
{
    const double n = norm(a);
    if (n == 0.0) {
        throw DomainError("cannot normalize a zero vector");
    }
    return (1.0 / n) * a;
}

double angle_between_rad(Vec3 a, Vec3 b) { return std::atan2(norm(cross(a, b)), dot(a, b)); }

Vec3 to_ecef(const GeoPoint& p, double earth_radius_km)
{
    const double r = earth_radius_km + p.alt_km;
    const double lat = deg_to_rad(p.lat_deg);
    const double lon = deg_to_rad(p.lon_deg);
    return {r * std::cos(lat) * std::cos(lon), r * std::cos(lat) * std::sin(lon), r * std::sin(lat)};
}

GeoPoint to_geo(Vec3 ecef, double earth_radius_km)
{
    const double r = norm(ecef);
    return {rad_to_deg(std::asin(ecef.z / r)), rad_to_deg(std::atan2(ecef.y, ecef.x)), r - earth_radius_km};
}

void OrbitConfig::validate() const
{
    if (!(altitude_km > 0.0)) {
        throw ConfigError("orbit.altitude_km must be positive");
    }
    if (!(earth_radius_km > 0.0)) {
        throw ConfigError("orbit.earth_radius_km must be positive");
    }
    if (!(central_beam_elevation_deg > 0.0 && central_beam_elevation_deg <= 90.0)) {
        throw ConfigError("orbit.central_beam_elevation_deg must lie in (0, 90]");
    }
}

double slant_range_km(double elevation_deg, const OrbitConfig& orbit)
{
    if (!(elevation_deg >= 0.0 && elevation_deg <= 90.0)) {
        throw DomainError("elevation must lie in [0, 90] degrees");
    }
    const double re = orbit.earth_radius_km;
    const double rs = orbit.earth_radius_km + orbit.altitude_km;
    const double el = deg_to_rad(elevation_deg);
    const double c = re * std::cos(el);
    if (elevation_deg == 90.0) {
        return orbit.altitude_km;
    }
    return std::sqrt(rs * rs - c * c) - re * std::sin(el);
}

Vec3 satellite_position(const OrbitConfig& orbit)
{
    return to_ecef({0.0, orbit.satellite_lon_deg, orbit.altitude_km}, orbit.earth_radius_km);
}

Vec3 earth_intersection(Vec3 origin, Vec3 direction, double earth_radius_km)
{
    const Vec3 u = normalized(direction);
    const double b = dot(origin, u);
    const double c = dot(origin, origin) - earth_radius_km * earth_radius_km;
    const double disc = b * b - c;
    if (disc < 0.0) {
        throw DomainError("beam direction does not intersect the earth");
    }
    const double t = -b - std::sqrt(disc);
    if (t <= 0.0) {
        throw DomainError("beam direction points away from the earth");
    }
    return origin + t * u;
}

double elevation_deg(Vec3 ground, Vec3 satellite)
{
    const Vec3 up = normalized(ground);
    const Vec3 los = normalized(satellite - ground);
    return rad_to_deg(std::asin(std::clamp(dot(up, los), -1.0, 1.0)));
}

namespace {

struct Basis {
    Vec3 e1;
    Vec3 e2;
};

Basis orthonormal_basis(Vec3 axis)
{
    // Prefer the earth rotation axis as reference so e2 points roughly north.
    Vec3 ref{0.0, 0.0, 1.0};
    if (std::abs(dot(ref, axis)) > 0.99) {
        ref = {1.0, 0.0, 0.0};
    }
    const Vec3 e1 = normalized(cross(axis, ref));
    const Vec3 e2 = cross(e1, axis);
    return {e1, e2};
}

Vec3 rotate_off_axis(Vec3 axis, const Basis& basis, double off_axis_rad, double azimuth_rad)
{
    const Vec3 lateral = std::cos(azimuth_rad) * basis.e1 + std::sin(azimuth_rad) * basis.e2;
    return normalized(std::cos(off_axis_rad) * axis + std::sin(off_axis_rad) * lateral);
}

// Sub-satellite meridian point at which the satellite is seen at `elevation` (northern side).
Vec3 central_ground_point(const OrbitConfig& orbit)
{
    const double re = orbit.earth_radius_km;
    const double rs = re + orbit.altitude_km;
    const double el = deg_to_rad(orbit.central_beam_elevation_deg);
    const double nadir = std::asin(re / rs * std::cos(el));
    const double central_angle = kPi / 2.0 - el - nadir;
    return to_ecef({rad_to_deg(central_angle), orbit.satellite_lon_deg, 0.0}, re);
}

} // namespace

BeamLayout build_beam_lattice(const OrbitConfig& orbit, int tiers, double beam_spacing_deg,
                              double half_power_beamwidth_deg)
{
    orbit.validate();
    if (tiers < 1 || tiers > 2) {
        throw ConfigError("geometry.tiers must be 1 or 2");
    }
    if (!(beam_spacing_deg > 0.0)) {
        throw ConfigError("geometry.beam_spacing_deg must be positive");
    }

    BeamLayout layout;
    layout.tiers = tiers;
    layout.beam_spacing_deg = beam_spacing_deg;
    layout.orbit = orbit;
    layout.satellite = satellite_position(orbit);

    const Vec3 center = central_ground_point(orbit);
    const Vec3 axis = normalized(center - layout.satellite);
    const Basis basis = orthonormal_basis(axis);

    struct LatticePoint {
        int ring;
        long azimuth_key;
        double off_axis_deg;
        double azimuth_rad;
    };
    std::vector<LatticePoint> points;
    for (int q = -tiers; q <= tiers; ++q) {
        for (int r = -tiers; r <= tiers; ++r) {
            const int ring = (std::abs(q) + std::abs(r) + std::abs(q + r)) / 2;
            if (ring > tiers) {
                continue;
            }
            const double x = beam_spacing_deg * (q + 0.5 * r);
            const double y = beam_spacing_deg * (std::sqrt(3.0) / 2.0 * r);
            double az = std::atan2(y, x);
            if (az < 0.0) {
                az += 2.0 * kPi;
            }
            // Azimuth key rounded to micro-degrees keeps the ordering stable.
            const long key = ring == 0 ? 0 : std::lround(rad_to_deg(az) * 1e6);
            points.push_back({ring, key, std::hypot(x, y), az});
        }
    }
    std::sort(points.begin(), points.end(), [](const LatticePoint& a, const LatticePoint& b) {
        return a.ring != b.ring ? a.ring < b.ring : a.azimuth_key < b.azimuth_key;
    });

    layout.beams.reserve(points.size());
    for (const auto& p : points) {
        Beam beam;
        beam.id = static_cast<int>(layout.beams.size());
        beam.ring = p.ring;
        beam.boresight = p.ring == 0 ? axis : rotate_off_axis(axis, basis, deg_to_rad(p.off_axis_deg), p.azimuth_rad);
        beam.center_ecef = earth_intersection(layout.satellite, beam.boresight, orbit.earth_radius_km);
        beam.center_geo = to_geo(beam.center_ecef, orbit.earth_radius_km);
        beam.center_geo.alt_km = 0.0;
        // Only one colour of the FRF-2+2 plan is simulated.
        beam.color = 0;
        beam.half_power_beamwidth_deg = half_power_beamwidth_deg;
        layout.beams.push_back(beam);
    }
    return layout;
}

double off_axis_angle_deg(const Beam& beam, Vec3 satellite, Vec3 point)
{
    return rad_to_deg(angle_between_rad(beam.boresight, point - satellite));
}

TerminalProfile builtin_profile(ProfileName name)
{
    switch (name) {
    case ProfileName::vsat_low:
        return {name, 36.7, 40.4, 30.0, 150.0, 1.2, 0.46};
    case ProfileName::vsat_default:
        return {name, 39.7, 43.2, 33.0, 150.0, 1.2, 0.60};
    case ProfileName::vsat_high:
        return {name, 53.2, 50.1, 33.0, 150.0, 1.2, 1.80};
    }
    throw ConfigError("unknown terminal profile");
}

std::string_view to_string(ProfileName name)
{
    switch (name) {
    case ProfileName::vsat_low:
        return "vsat_low";
    case ProfileName::vsat_default:
        return "vsat_default";
    case ProfileName::vsat_high:
        return "vsat_high";
    }
    return "?";
}

ProfileName parse_profile_name(std::string_view text)
{
    if (text == "vsat_low") {
        return ProfileName::vsat_low;
    }
    if (text == "vsat_default") {
        return ProfileName::vsat_default;
    }
    if (text == "vsat_high") {
        return ProfileName::vsat_high;
    }
    throw ConfigError("unknown terminal profile '" + std::string(text) + "'");
}

std::vector<Terminal> deploy_terminals(const BeamLayout& layout, const DeploymentConfig& config,
                                       std::uint64_t rng_seed)
{
    if (config.per_beam_count < 1) {
        throw ConfigError("geometry.terminals_per_beam must be at least 1");
    }
    int mix_total = 0;
    for (const auto& pc : config.profile_mix) {
        if (pc.count < 0) {
            throw ConfigError("geometry.terminal_mix counts must be non-negative");
        }
        mix_total += pc.count;
    }
    if (mix_total != config.per_beam_count) {
        throw ConfigError("geometry.terminal_mix counts must sum to terminals_per_beam");
    }
    if (!(config.placement_radius_deg >= 0.0)) {
        throw ConfigError("geometry.placement_radius_deg must be non-negative");
    }

    const double earth_radius = layout.orbit.earth_radius_km;
    const double cos_max = std::cos(deg_to_rad(config.placement_radius_deg));
    const int interfering_count =
        config.interfering_beam_count < 0 ? config.per_beam_count : config.interfering_beam_count;

    std::vector<Terminal> terminals;
    int next_id = 0;
    for (const Beam& beam : layout.beams) {
        const int count = beam.id == 0 ? config.per_beam_count : std::min(interfering_count, config.per_beam_count);
        RngStream rng(stream_seed(rng_seed, "placement", static_cast<std::uint64_t>(beam.id)));
        const Basis basis = orthonormal_basis(beam.boresight);

        std::size_t mix_index = 0;
        int left_in_class = config.profile_mix.empty() ? 0 : config.profile_mix[0].count;
        for (int i = 0; i < count; ++i) {
            while (left_in_class == 0) {
                ++mix_index;
                left_in_class = config.profile_mix[mix_index].count;
            }
            --left_in_class;

            const double cos_theta = 1.0 - rng.uniform() * (1.0 - cos_max);
            const double theta = std::acos(cos_theta);
            const double phi = 2.0 * kPi * rng.uniform();
            const Vec3 dir = rotate_off_axis(beam.boresight, basis, theta, phi);

            Terminal t;
            t.id = next_id++;
            t.beam_id = beam.id;
            t.index_in_beam = i;
            t.position_ecef = earth_intersection(layout.satellite, dir, earth_radius);
            t.position_geo = to_geo(t.position_ecef, earth_radius);
            t.position_geo.alt_km = 0.0;
            t.profile = config.profile_mix[mix_index].profile;
            terminals.push_back(t);
        }
    }
    return terminals;
}

std::uint64_t terminal_digest(std::span<const Terminal> terminals)
{
    std::uint64_t h = 0xCBF29CE484222325ull;
    auto mix = [&h](const void* data, std::size_t size) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < size; ++i) {
            h ^= bytes[i];
            h *= 0x100000001B3ull;
        }
    };
    for (const Terminal& t : terminals) {
        mix(&t.id, sizeof t.id);
        mix(&t.beam_id, sizeof t.beam_id);
        mix(&t.position_ecef.x, sizeof(double));
        mix(&t.position_ecef.y, sizeof(double));
        mix(&t.position_ecef.z, sizeof(double));
        const int profile = static_cast<int>(t.profile.name);
        mix(&profile, sizeof profile);
    }
    return h;
}

} // namespace satsim::geometry
