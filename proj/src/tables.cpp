#include "satsim/phy.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace satsim::phy {

namespace {

struct Row {
    std::vector<std::string> fields;
    int line = 0;
};

std::vector<Row> split_rows(std::string_view text)
{
    std::vector<Row> rows;
    std::istringstream in{std::string(text)};
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream fields(line);
        Row row{{}, number};
        std::string f;
        while (fields >> f) {
            row.fields.push_back(f);
        }
        if (!row.fields.empty()) {
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

[[noreturn]] void fail(std::string_view origin, int line, const std::string& what)
{
    throw ConfigError(std::string(origin) + ":" + std::to_string(line) + ": " + what);
}

int to_int(std::string_view s, std::string_view origin, int line)
{
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        fail(origin, line, "expected an integer, got '" + std::string(s) + "'");
    }
    return v;
}

double to_double(const std::string& s, std::string_view origin, int line)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size()) {
        fail(origin, line, "expected a number, got '" + s + "'");
    }
    return v;
}

CodeRate to_rate(const std::string& s, std::string_view origin, int line)
{
    const auto slash = s.find('/');
    if (slash == std::string::npos) {
        fail(origin, line, "code rate must be num/den, got '" + s + "'");
    }
    CodeRate r{to_int(std::string_view(s).substr(0, slash), origin, line),
               to_int(std::string_view(s).substr(slash + 1), origin, line)};
    if (r.num <= 0 || r.den <= 0 || r.num > r.den) {
        fail(origin, line, "code rate must lie in (0, 1]");
    }
    return r;
}

template <class Entry>
void fill_common(Entry& e, const Row& row, std::string_view origin)
{
    e.id = to_int(row.fields[0], origin, row.line);
    try {
        e.modulation = parse_modulation(row.fields[1]);
    } catch (const ConfigError& err) {
        fail(origin, row.line, err.what());
    }
    e.code_rate = to_rate(row.fields[2], origin, row.line);
    e.spectral_efficiency = to_double(row.fields[3], origin, row.line);
    e.curve.sinr50_db = to_double(row.fields[4], origin, row.line);
    e.curve.slope_per_db = to_double(row.fields[5], origin, row.line);
    if (!(e.curve.slope_per_db > 0.0)) {
        fail(origin, row.line, "error-curve slope must be positive");
    }
    if (!(e.spectral_efficiency > 0.0) ||
        e.spectral_efficiency > bits_per_symbol(e.modulation) * e.code_rate.value() * (1.0 + 1e-3)) {
        fail(origin, row.line, "efficiency must lie in (0, log2(M) * rate]");
    }
}

template <class Entry>
void check_ids(const std::vector<Entry>& table, std::string_view origin)
{
    if (table.empty()) {
        throw ConfigError(std::string(origin) + ": table has no entries");
    }
    for (std::size_t i = 0; i < table.size(); ++i) {
        for (std::size_t j = i + 1; j < table.size(); ++j) {
            if (table[i].id == table[j].id) {
                throw ConfigError(std::string(origin) + ": duplicate id " + std::to_string(table[i].id));
            }
        }
    }
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open table file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

std::vector<ModcodEntry> parse_modcod_table(std::string_view text, std::string_view origin)
{
    std::vector<ModcodEntry> table;
    for (const Row& row : split_rows(text)) {
        if (row.fields.size() != 6) {
            fail(origin, row.line, "expected 6 columns, got " + std::to_string(row.fields.size()));
        }
        ModcodEntry e;
        fill_common(e, row, origin);
        table.push_back(e);
    }
    check_ids(table, origin);
    return table;
}

std::vector<WaveformEntry> parse_waveform_table(std::string_view text, std::string_view origin)
{
    std::vector<WaveformEntry> table;
    for (const Row& row : split_rows(text)) {
        if (row.fields.size() != 11) {
            fail(origin, row.line, "expected 11 columns, got " + std::to_string(row.fields.size()));
        }
        WaveformEntry e;
        fill_common(e, row, origin);
        e.payload_symbols = to_int(row.fields[6], origin, row.line);
        e.preamble_symbols = to_int(row.fields[7], origin, row.line);
        e.postamble_symbols = to_int(row.fields[8], origin, row.line);
        e.pilot_symbols = to_int(row.fields[9], origin, row.line);
        e.guard_symbols = to_int(row.fields[10], origin, row.line);
        if (e.payload_symbols <= 0 || e.preamble_symbols < 0 || e.postamble_symbols < 0 || e.pilot_symbols < 0 ||
            e.guard_symbols < 0) {
            fail(origin, row.line, "burst symbol counts must be non-negative with a positive payload");
        }
        table.push_back(e);
    }
    check_ids(table, origin);
    return table;
}

std::vector<ModcodEntry> load_modcod_table(const std::filesystem::path& path)
{
    return parse_modcod_table(read_file(path), path.string());
}

std::vector<WaveformEntry> load_waveform_table(const std::filesystem::path& path)
{
    return parse_waveform_table(read_file(path), path.string());
}

} // namespace satsim::phy
