#include "resact/csv_io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "resact/errors.hpp"

namespace resact::io {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return buf;
}

double parse_number(std::string_view token) {
    while (!token.empty() && (token.front() == ' ' || token.front() == '\t')) token.remove_prefix(1);
    while (!token.empty() && (token.back() == ' ' || token.back() == '\t' || token.back() == '\r')) token.remove_suffix(1);
    if (token.empty()) throw InvalidInput("empty numeric field");
    const std::string s(token);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE) throw InvalidInput("not a number: '" + s + "'");
    return v;
}

bool CsvTable::has(std::string_view name) const {
    return std::find(header.begin(), header.end(), name) != header.end();
}

const std::vector<double>& CsvTable::column(std::string_view name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw InvalidInput("missing CSV column '" + std::string(name) + "'");
    return columns[static_cast<std::size_t>(it - header.begin())];
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return std::string(s);
}

}  // namespace

CsvTable parse_csv(std::string_view text, const std::string& source) {
    CsvTable table;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    bool have_header = false;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (trim(line).empty() || line.front() == '#') {
            if (nl == text.size()) break;
            continue;
        }
        const auto fields = split(line);
        if (!have_header) {
            for (auto f : fields) table.header.push_back(trim(f));
            for (std::size_t i = 0; i < table.header.size(); ++i) {
                if (table.header[i].empty()) throw InvalidInput(source + ": empty column name");
                for (std::size_t j = 0; j < i; ++j) {
                    if (table.header[i] == table.header[j]) throw InvalidInput(source + ": duplicate column '" + table.header[i] + "'");
                }
            }
            table.columns.resize(table.header.size());
            have_header = true;
        } else {
            if (fields.size() != table.header.size()) {
                throw InvalidInput(source + ":" + std::to_string(line_no) + ": expected " +
                                   std::to_string(table.header.size()) + " fields");
            }
            for (std::size_t i = 0; i < fields.size(); ++i) {
                try {
                    table.columns[i].push_back(parse_number(fields[i]));
                } catch (const InvalidInput& e) {
                    throw InvalidInput(source + ":" + std::to_string(line_no) + ": " + e.what());
                }
            }
        }
        if (nl == text.size()) break;
    }
    if (!have_header) throw InvalidInput(source + ": no header row");
    return table;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("error reading '" + path.string() + "'");
    return ss.str();
}

CsvTable read_csv(const fs::path& path) { return parse_csv(read_text(path), path.string()); }

std::string to_csv(const CsvTable& table) {
    std::string out;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i) out += ',';
        out += table.header[i];
    }
    out += '\n';
    for (std::size_t r = 0; r < table.rows(); ++r) {
        for (std::size_t i = 0; i < table.columns.size(); ++i) {
            if (i) out += ',';
            out += format_number(table.columns[i][r]);
        }
        out += '\n';
    }
    return out;
}

void write_text_atomic(const fs::path& path, std::string_view content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError("error writing '" + path.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move output into '" + path.string() + "'");
    }
}

namespace {

void require_same_length(const CsvTable& t, const std::string& what) {
    for (const auto& c : t.columns) {
        if (c.size() != t.rows()) throw InvalidInput(what + ": ragged columns");
    }
    if (t.rows() == 0) throw InvalidInput(what + ": no data rows");
}

}  // namespace

std::string motion_to_csv(const MotionTrace& trace) {
    CsvTable t;
    t.header = {"time_s", "position_rad"};
    t.columns = {trace.time_s, trace.position_rad};
    if (trace.velocity_rad_s) {
        t.header.push_back("velocity_rad_s");
        t.columns.push_back(*trace.velocity_rad_s);
    }
    if (trace.accel_rad_s2) {
        t.header.push_back("accel_rad_s2");
        t.columns.push_back(*trace.accel_rad_s2);
    }
    return to_csv(t);
}

MotionTrace motion_from_csv(const CsvTable& table) {
    require_same_length(table, "motion trace");
    MotionTrace m;
    m.time_s = table.column("time_s");
    m.position_rad = table.column("position_rad");
    if (table.has("velocity_rad_s")) m.velocity_rad_s = table.column("velocity_rad_s");
    if (table.has("accel_rad_s2")) m.accel_rad_s2 = table.column("accel_rad_s2");
    if (m.size() < 2) throw InvalidInput("motion trace: need at least two samples");
    m.sample_rate_hz = static_cast<double>(m.size() - 1) / (m.time_s.back() - m.time_s.front());
    m.validate();
    return m;
}

std::string electrical_to_csv(const ElectricalTrace& trace) {
    CsvTable t;
    t.header = {"time_s", "voltage_v", "current_a"};
    t.columns = {trace.time_s, trace.voltage_v, trace.current_a};
    return to_csv(t);
}

ElectricalTrace electrical_from_csv(const CsvTable& table) {
    require_same_length(table, "electrical trace");
    return {table.column("time_s"), table.column("voltage_v"), table.column("current_a")};
}

std::string thermal_to_csv(const ThermalTrace& trace) {
    CsvTable t;
    t.header.push_back("time_s");
    t.columns.push_back(trace.time_s);
    const std::pair<const char*, const std::vector<double>*> cols[] = {{"t_winding_c", &trace.t_winding_c},
                                                                       {"t_case_c", &trace.t_case_c},
                                                                       {"q_joule_w", &trace.q_joule_w},
                                                                       {"q_bushing_w", &trace.q_bushing_w}};
    for (const auto& [name, col] : cols) {
        if (col->empty()) continue;
        if (col->size() != trace.time_s.size()) throw InvalidInput(std::string("thermal trace: column ") + name + " has wrong length");
        t.header.push_back(name);
        t.columns.push_back(*col);
    }
    return to_csv(t);
}

ThermalTrace thermal_from_csv(const CsvTable& table) {
    require_same_length(table, "thermal trace");
    ThermalTrace tr;
    tr.time_s = table.column("time_s");
    tr.t_case_c = table.column("t_case_c");
    if (table.has("t_winding_c")) tr.t_winding_c = table.column("t_winding_c");
    if (table.has("q_joule_w")) tr.q_joule_w = table.column("q_joule_w");
    if (table.has("q_bushing_w")) tr.q_bushing_w = table.column("q_bushing_w");
    for (std::size_t i = 1; i < tr.time_s.size(); ++i) {
        if (!(tr.time_s[i] > tr.time_s[i - 1])) throw InvalidInput("thermal trace: time column must increase");
    }
    return tr;
}

std::string record_sidecar(const ExperimentRecord& record) {
    const json side = {{"kind", to_string(record.kind)},
                       {"speed_rad_s", record.speed_rad_s},
                       {"pulse_current_a", record.pulse_current_a},
                       {"pulse_duration_s", record.pulse_duration_s},
                       {"heatsink", record.heatsink}};
    return side.dump(2) + "\n";
}

std::string record_csv(const ExperimentRecord& record) {
    if (record.kind != RecordKind::Oven) return thermal_to_csv(record.trace);
    CsvTable t;
    t.header = {"temperature_c", "resistance_ohm"};
    t.columns.resize(2);
    for (const auto& s : record.oven_samples) {
        t.columns[0].push_back(s.temperature_c);
        t.columns[1].push_back(s.resistance_ohm);
    }
    return to_csv(t);
}

void write_record(const fs::path& dir, const ExperimentRecord& record) {
    record.validate();
    write_text_atomic(dir / (record.name + ".csv"), record_csv(record));
    write_text_atomic(dir / (record.name + ".json"), record_sidecar(record));
}

ExperimentRecord read_record(const fs::path& sidecar) {
    const std::string where = sidecar.string();
    ExperimentRecord r;
    r.name = sidecar.stem().string();
    try {
        const json side = json::parse(read_text(sidecar));
        if (!side.is_object()) throw InvalidInput("sidecar must be a JSON object");
        for (const auto& [key, value] : side.items()) {
            if (key == "kind") r.kind = record_kind_from_string(value.get<std::string>());
            else if (key == "speed_rad_s") r.speed_rad_s = value.get<double>();
            else if (key == "pulse_current_a") r.pulse_current_a = value.get<double>();
            else if (key == "pulse_duration_s") r.pulse_duration_s = value.get<double>();
            else if (key == "heatsink") r.heatsink = value.get<bool>();
            else throw InvalidInput("unknown sidecar key '" + key + "'");
        }
        if (!side.contains("kind")) throw InvalidInput("sidecar lacks 'kind'");
        fs::path csv = sidecar;
        csv.replace_extension(".csv");
        const CsvTable t = read_csv(csv);
        if (r.kind == RecordKind::Oven) {
            require_same_length(t, "oven record");
            const auto& temp = t.column("temperature_c");
            const auto& res = t.column("resistance_ohm");
            for (std::size_t i = 0; i < temp.size(); ++i) r.oven_samples.push_back({temp[i], res[i]});
        } else {
            r.trace = thermal_from_csv(t);
        }
        r.validate();
    } catch (const json::exception& e) {
        throw InvalidInput(where + ": " + e.what());
    } catch (const InvalidInput& e) {
        const std::string msg = e.what();
        if (msg.rfind(where, 0) == 0) throw;
        throw InvalidInput(where + ": " + msg);
    }
    return r;
}

std::vector<ExperimentRecord> read_record_dir(const fs::path& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw IoError("'" + dir.string() + "' is not a directory");
    std::vector<fs::path> sidecars;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") sidecars.push_back(entry.path());
    }
    std::sort(sidecars.begin(), sidecars.end());
    if (sidecars.empty()) throw InvalidInput("'" + dir.string() + "' contains no records");
    std::vector<ExperimentRecord> out;
    out.reserve(sidecars.size());
    for (const auto& p : sidecars) out.push_back(read_record(p));
    return out;
}

}  // namespace resact::io
