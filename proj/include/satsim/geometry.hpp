#pragma once

#include "satsim/common.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

/// Static scene construction: satellite, beam lattice and terminal drops.
/// Everything is expressed in earth-centred earth-fixed (ECEF) kilometres on
/// a spherical earth; geodetic coordinates appear only at the boundary.
namespace satsim::geometry {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double k, Vec3 a) { return {k * a.x, k * a.y, k * a.z}; }
    friend bool operator==(const Vec3&, const Vec3&) = default;
};

double dot(Vec3 a, Vec3 b);
Vec3 cross(Vec3 a, Vec3 b);
double norm(Vec3 a);
Vec3 normalized(Vec3 a);
/// Angle between two directions in radians, stable for small angles.
double angle_between_rad(Vec3 a, Vec3 b);

struct GeoPoint {
    double lat_deg = 0.0;
    double lon_deg = 0.0;
    double alt_km = 0.0;

    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

Vec3 to_ecef(const GeoPoint& p, double earth_radius_km);
GeoPoint to_geo(Vec3 ecef, double earth_radius_km);

struct OrbitConfig {
    double altitude_km = 35786.0;
    double earth_radius_km = 6371.0;
    double central_beam_elevation_deg = 45.0;
    double satellite_lon_deg = 0.0;

    void validate() const;
    friend bool operator==(const OrbitConfig&, const OrbitConfig&) = default;
};

/// Distance from a ground point seeing the satellite at `elevation_deg` to
/// the satellite. Elevation must lie in [0, 90] degrees.
double slant_range_km(double elevation_deg, const OrbitConfig& orbit);

Vec3 satellite_position(const OrbitConfig& orbit);

/// Ground point where a ray from `origin` along `direction` first meets the
/// earth sphere. Throws DomainError when the ray misses the earth.
Vec3 earth_intersection(Vec3 origin, Vec3 direction, double earth_radius_km);

/// Elevation angle of the satellite seen from a ground point.
double elevation_deg(Vec3 ground, Vec3 satellite);

enum class FrequencyReuse { frf2plus2_single_color };

struct Beam {
    int id = 0;
    int ring = 0;
    Vec3 boresight;        // unit vector from the satellite
    GeoPoint center_geo;   // sub-boresight ground point
    Vec3 center_ecef;
    int color = 0;
    double half_power_beamwidth_deg = 0.0;
};

struct BeamLayout {
    std::vector<Beam> beams;
    int tiers = 0;
    double beam_spacing_deg = 0.0;
    FrequencyReuse frf_scheme = FrequencyReuse::frf2plus2_single_color;
    Vec3 satellite;
    OrbitConfig orbit;

    const Beam& central() const { return beams.front(); }
};

/// Number of beams in a hexagonal lattice with `tiers` rings.
constexpr int hex_beam_count(int tiers) { return 1 + 3 * tiers * (tiers + 1); }

/// Hexagonal lattice of simulated (same-colour) beams around the central
/// boresight. Beams are ordered by (ring, azimuth); beam 0 is the central one.
BeamLayout build_beam_lattice(const OrbitConfig& orbit, int tiers, double beam_spacing_deg,
                              double half_power_beamwidth_deg);

/// Angle between a beam boresight and the satellite-to-point direction.
double off_axis_angle_deg(const Beam& beam, Vec3 satellite, Vec3 point);

enum class ProfileName { vsat_low, vsat_default, vsat_high };

struct TerminalProfile {
    ProfileName name = ProfileName::vsat_default;
    double rx_gain_dbi = 0.0;
    double tx_gain_dbi = 0.0;
    double tx_power_dbm = 0.0;
    double antenna_temp_k = 0.0;
    double noise_figure_db = 0.0;
    double aperture_diameter_m = 0.0;

    friend bool operator==(const TerminalProfile&, const TerminalProfile&) = default;
};

/// Built-in VSAT classes (low capability, default, high capability).
TerminalProfile builtin_profile(ProfileName name);
std::string_view to_string(ProfileName name);
ProfileName parse_profile_name(std::string_view text);

struct ProfileCount {
    TerminalProfile profile;
    int count = 0;

    friend bool operator==(const ProfileCount&, const ProfileCount&) = default;
};

struct Terminal {
    int id = 0;
    int beam_id = 0;
    int index_in_beam = 0;
    GeoPoint position_geo;
    Vec3 position_ecef;
    TerminalProfile profile;
};

struct DeploymentConfig {
    int per_beam_count = 50;
    /// Terminal count in every non-central beam; defaults to per_beam_count.
    int interfering_beam_count = -1;
    std::vector<ProfileCount> profile_mix;
    /// Off-axis radius of the placement cone around each boresight.
    double placement_radius_deg = 0.0;
};

/// Drops terminals uniformly (in solid angle) inside the placement cone of
/// every beam. The result depends only on (layout, config, seed).
std::vector<Terminal> deploy_terminals(const BeamLayout& layout, const DeploymentConfig& config,
                                       std::uint64_t rng_seed);

/// Order-sensitive FNV-1a digest of terminal ids, beams and positions.
std::uint64_t terminal_digest(std::span<const Terminal> terminals);

} // namespace satsim::geometry
