#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace satsim {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numeric argument lies outside the domain of the function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A configuration value or table is malformed or inconsistent.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Statistics input that cannot be reduced (empty sample sets, bad intervals).
class DataError : public Error {
public:
    using Error::Error;
};

/// A resource request that does not fit the frame or grid.
class AllocationError : public Error {
public:
    using Error::Error;
};

inline constexpr double kBoltzmann = 1.380649e-23;       // J/K
inline constexpr double kSpeedOfLight = 299792458.0;     // m/s
inline constexpr double kReferenceTemperature = 290.0;   // K
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double lin)
{
    if (lin <= 0.0) {
        return -kInf;
    }
    return 10.0 * std::log10(lin);
}

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

enum class Direction { dl, ul };

/// Air interface family. `dvb` means DVB-S2X on the forward link and
/// DVB-RCS2 on the return link; `nr` means NR PDSCH / PUSCH.
enum class Stack { dvb, nr };

inline std::string_view to_string(Direction d) { return d == Direction::dl ? "dl" : "ul"; }
inline std::string_view to_string(Stack s) { return s == Stack::dvb ? "dvb" : "nr"; }

inline std::string_view technology_name(Stack s, Direction d)
{
    if (s == Stack::dvb) {
        return d == Direction::dl ? "DVB-S2X" : "DVB-RCS2";
    }
    return d == Direction::dl ? "NR PDSCH" : "NR PUSCH";
}

} // namespace satsim
