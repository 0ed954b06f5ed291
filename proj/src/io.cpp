#include "wavekin/io.hpp"

#include "wavekin/errors.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <system_error>

#include <fmt/format.h>
#include <json.hpp>

namespace wavekin::io {

namespace fs = std::filesystem;
namespace kin = kinetics;
namespace pp = pointprocess;
namespace est = estimators;
using json = nlohmann::ordered_json;

namespace {

// Appends a number with 17 significant digits.
void put(fmt::memory_buffer& buf, double v) { fmt::format_to(std::back_inserter(buf), "{:.17g}", v); }

void flush(std::ostream& out, fmt::memory_buffer& buf)
{
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    buf.clear();
}

std::vector<std::string_view> split(std::string_view line, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos - start));
        if (pos == std::string_view::npos) {
            return out;
        }
        start = pos + 1;
    }
}

double parse_double(std::string_view s, std::size_t line)
{
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size()) {
        throw FormatError(fmt::format("line {}: '{}' is not a number", line, s), line);
    }
    return v;
}

std::string_view trim_cr(std::string_view s)
{
    if (!s.empty() && s.back() == '\r') {
        s.remove_suffix(1);
    }
    return s;
}

// Reads a CSV with the given header into rows of doubles.
std::vector<std::vector<double>> read_csv(std::istream& in, std::string_view header)
{
    std::string line;
    if (!std::getline(in, line) || trim_cr(line) != header) {
        throw FormatError(fmt::format("line 1: expected header '{}'", header), 1);
    }
    const std::size_t cols = split(header, ',').size();
    std::vector<std::vector<double>> rows;
    std::size_t n = 1;
    while (std::getline(in, line)) {
        ++n;
        const auto text = trim_cr(line);
        if (text.empty()) {
            continue;
        }
        const auto fields = split(text, ',');
        if (fields.size() != cols) {
            throw FormatError(fmt::format("line {}: expected {} fields, found {}", n, cols,
                                          fields.size()),
                              n);
        }
        std::vector<double> row;
        row.reserve(cols);
        for (auto f : fields) {
            row.push_back(parse_double(f, n));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

json params_json(const kin::KineticParams& p)
{
    return json{{"mode", kin::mode_name(p.mode())},
                {"omega", p.omega()},
                {"gamma", p.gamma()},
                {"tau", p.tau()},
                {"beta", p.beta()}};
}

kin::KineticParams params_from_json(const json& j)
{
    return kin::KineticParams::restore(kin::parse_mode(j.at("mode").get<std::string>()),
                                       j.at("omega").get<double>(), j.at("gamma").get<double>(),
                                       j.at("tau").get<double>());
}

double number_or_nan(const json& j)
{
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

} // namespace

void write_atomic(const fs::path& path, const std::function<void(std::ostream&)>& writer)
{
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    const fs::path tmp = dir / fmt::format(".{}.tmp", path.filename().string());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(fmt::format("cannot write '{}'", tmp.string()));
        }
        try {
            writer(out);
        } catch (...) {
            out.close();
            std::error_code ignored;
            fs::remove(tmp, ignored);
            throw;
        }
        out.flush();
        if (!out) {
            std::error_code ignored;
            fs::remove(tmp, ignored);
            throw Error(fmt::format("write to '{}' failed", tmp.string()));
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        std::error_code ignored;
        fs::remove(tmp, ignored);
        throw Error(fmt::format("cannot move '{}' into place: {}", path.string(), ec.message()));
    }
}

void write_density_csv(std::ostream& out, const kin::DensitySeries& series)
{
    fmt::memory_buffer buf;
    fmt::format_to(std::back_inserter(buf), "t,r,value\n");
    for (std::size_t ti = 0; ti < series.rows(); ++ti) {
        for (std::size_t ri = 0; ri < series.cols(); ++ri) {
            put(buf, series.times[ti]);
            buf.push_back(',');
            put(buf, series.grid[ri]);
            buf.push_back(',');
            put(buf, series.at(ti, ri));
            buf.push_back('\n');
        }
        if (buf.size() > (1U << 20)) {
            flush(out, buf);
        }
    }
    flush(out, buf);
}

kin::DensitySeries read_density_csv(std::istream& in, kin::Mode mode)
{
    const auto rows = read_csv(in, "t,r,value");
    kin::DensitySeries s;
    s.mode = mode;
    if (rows.empty()) {
        return s;
    }
    const double t0 = rows.front()[0];
    for (const auto& row : rows) {
        if (row[0] != t0) {
            break;
        }
        s.grid.push_back(row[1]);
    }
    const std::size_t cols = s.grid.size();
    if (rows.size() % cols != 0) {
        throw FormatError("density rows do not form a complete time x grid table");
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::size_t ti = i / cols;
        const std::size_t ri = i % cols;
        if (ri == 0) {
            if (!s.times.empty() && !(rows[i][0] > s.times.back())) {
                throw FormatError(fmt::format("line {}: times must increase", i + 2), i + 2);
            }
            s.times.push_back(rows[i][0]);
        }
        if (rows[i][0] != s.times[ti] || rows[i][1] != s.grid[ri]) {
            throw FormatError(fmt::format("line {}: row out of grid order", i + 2), i + 2);
        }
        s.values.push_back(rows[i][2]);
    }
    return s;
}

void write_events_ndjson(std::ostream& out, const pp::EventLog& log)
{
    const json header{{"seed", log.seed},
                      {"generator", log.generator},
                      {"params", params_json(log.params)},
                      {"region", {log.region.lo, log.region.hi}},
                      {"t_end", log.t_end},
                      {"rate_bound", log.rate_bound}};
    out << header.dump() << '\n';
    fmt::memory_buffer buf;
    for (const auto& e : log.events) {
        fmt::format_to(std::back_inserter(buf), R"({{"kind":"{}","id":{},"position":)",
                       e.kind == pp::EventKind::Birth ? "birth" : "death", e.particle_id);
        put(buf, e.position);
        fmt::format_to(std::back_inserter(buf), R"(,"time":)");
        put(buf, e.time);
        fmt::format_to(std::back_inserter(buf), "}}\n");
        if (buf.size() > (1U << 20)) {
            flush(out, buf);
        }
    }
    flush(out, buf);
}

pp::EventLog read_events_ndjson(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) {
        throw FormatError("empty event file: missing header line", 1);
    }
    pp::EventLog log;
    try {
        const auto h = json::parse(line);
        log.seed = h.at("seed").get<std::uint64_t>();
        log.generator = h.at("generator").get<std::string>();
        log.params = params_from_json(h.at("params"));
        log.region = {h.at("region").at(0).get<double>(), h.at("region").at(1).get<double>()};
        log.t_end = h.at("t_end").get<double>();
        log.rate_bound = h.at("rate_bound").get<double>();
    } catch (const json::exception& e) {
        throw FormatError(fmt::format("line 1: bad header: {}", e.what()), 1);
    } catch (const Error& e) {
        throw FormatError(fmt::format("line 1: bad header: {}", e.what()), 1);
    }
    std::size_t n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (trim_cr(line).empty()) {
            continue;
        }
        try {
            const auto j = json::parse(line);
            pp::BirthDeathEvent e;
            const auto kind = j.at("kind").get<std::string>();
            if (kind == "birth") {
                e.kind = pp::EventKind::Birth;
            } else if (kind == "death") {
                e.kind = pp::EventKind::Death;
            } else {
                throw FormatError(fmt::format("line {}: unknown event kind '{}'", n, kind), n);
            }
            e.particle_id = j.at("id").get<std::uint64_t>();
            e.position = j.at("position").get<double>();
            e.time = j.at("time").get<double>();
            log.events.push_back(e);
        } catch (const json::exception& e) {
            throw FormatError(fmt::format("line {}: {}", n, e.what()), n);
        }
    }
    return log;
}

void write_histogram_csv(std::ostream& out, const est::BinnedDistribution& histogram,
                         const std::vector<double>& expected)
{
    if (expected.size() != histogram.counts.size()) {
        throw DomainError("expected pmf and histogram sizes differ");
    }
    fmt::memory_buffer buf;
    fmt::format_to(std::back_inserter(buf), "bin_lo,bin_hi,count,expected\n");
    const auto& edges = histogram.grid.edges();
    for (std::size_t i = 0; i < histogram.counts.size(); ++i) {
        put(buf, edges[i]);
        buf.push_back(',');
        put(buf, edges[i + 1]);
        buf.push_back(',');
        put(buf, histogram.counts[i]);
        buf.push_back(',');
        put(buf, expected[i]);
        buf.push_back('\n');
    }
    flush(out, buf);
}

HistogramFile read_histogram_csv(std::istream& in)
{
    const auto rows = read_csv(in, "bin_lo,bin_hi,count,expected");
    if (rows.empty()) {
        throw FormatError("histogram has no bins");
    }
    std::vector<double> edges{rows.front()[0]};
    std::vector<double> counts;
    std::vector<double> expected;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i][0] != edges.back()) {
            throw FormatError(fmt::format("line {}: bins are not contiguous", i + 2), i + 2);
        }
        edges.push_back(rows[i][1]);
        counts.push_back(rows[i][2]);
        expected.push_back(rows[i][3]);
    }
    try {
        return {est::BinnedDistribution::from_counts(pp::BinGrid(std::move(edges)),
                                                     std::move(counts)),
                std::move(expected)};
    } catch (const Error& e) {
        throw FormatError(fmt::format("bad histogram: {}", e.what()));
    }
}

void write_profile_csv(std::ostream& out, const std::vector<double>& grid,
                       const std::vector<double>& value)
{
    if (grid.size() != value.size()) {
        throw DomainError("profile grid and values differ in length");
    }
    double area = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        area += 0.5 * (value[i] + value[i + 1]) * (grid[i + 1] - grid[i]);
    }
    fmt::memory_buffer buf;
    fmt::format_to(std::back_inserter(buf), "r,value,density\n");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        put(buf, grid[i]);
        buf.push_back(',');
        put(buf, value[i]);
        buf.push_back(',');
        put(buf, area > 0.0 ? value[i] / area : 0.0);
        buf.push_back('\n');
    }
    flush(out, buf);
}

ProfileFile read_profile_csv(std::istream& in)
{
    ProfileFile out;
    for (const auto& row : read_csv(in, "r,value,density")) {
        out.grid.push_back(row[0]);
        out.value.push_back(row[1]);
        out.density.push_back(row[2]);
    }
    return out;
}

void write_summary_json(std::ostream& out, const scenarios::Scenario& scenario,
                        const scenarios::ResultBundle& bundle)
{
    json stats = json::object();
    for (const auto& [k, v] : bundle.statistics) {
        stats[k] = v;
    }
    json checks = json::array();
    for (const auto& c : bundle.checks) {
        checks.push_back({{"statistic", c.statistic},
                          {"bound", c.threshold.bound == scenarios::Threshold::Bound::Min ? "min"
                                                                                         : "max"},
                          {"threshold", c.threshold.value},
                          {"value", c.value},
                          {"passed", c.passed}});
    }
    const json j{
        {"scenario", bundle.scenario},
        {"description", scenario.description},
        {"kind", scenarios::kind_name(bundle.kind)},
        {"passed", bundle.passed()},
        {"seed", bundle.seed},
        {"generator", bundle.events.generator},
        {"params", params_json(bundle.params)},
        {"setup",
         {{"region", {scenario.region.lo, scenario.region.hi}},
          {"t_end", scenario.t_end},
          {"dt", scenario.dt},
          {"grid_points", scenario.grid_points},
          {"bins", scenario.bins},
          {"ensemble", scenario.ensemble}}},
        {"statistics", stats},
        {"checks", checks},
        {"events",
         {{"path", kEventsFile},
          {"seed", bundle.events.seed},
          {"births", bundle.events.birth_count()},
          {"events", bundle.events.events.size()}}},
        {"files",
         {{"summary", kSummaryFile},
          {"density", kDensityFile},
          {"events", kEventsFile},
          {"histogram", kHistogramFile},
          {"profile", kProfileFile}}},
    };
    out << j.dump(2) << '\n';
}

Summary read_summary_json(std::istream& in)
{
    Summary s;
    try {
        const auto j = json::parse(in);
        s.scenario = j.at("scenario").get<std::string>();
        s.description = j.at("description").get<std::string>();
        s.kind = scenarios::parse_kind(j.at("kind").get<std::string>());
        s.seed = j.at("seed").get<std::uint64_t>();
        s.generator = j.at("generator").get<std::string>();
        s.params = params_from_json(j.at("params"));
        for (const auto& [k, v] : j.at("statistics").items()) {
            s.statistics[k] = number_or_nan(v);
        }
        for (const auto& c : j.at("checks")) {
            scenarios::CheckOutcome o;
            o.statistic = c.at("statistic").get<std::string>();
            const auto bound = c.at("bound").get<std::string>();
            o.threshold.bound = bound == "min" ? scenarios::Threshold::Bound::Min
                                               : scenarios::Threshold::Bound::Max;
            o.threshold.value = number_or_nan(c.at("threshold"));
            o.value = number_or_nan(c.at("value"));
            o.passed = c.at("passed").get<bool>();
            s.checks.push_back(std::move(o));
        }
        s.passed = j.at("passed").get<bool>();
        for (const auto& [k, v] : j.at("files").items()) {
            s.files[k] = v.get<std::string>();
        }
    } catch (const json::exception& e) {
        throw FormatError(fmt::format("bad summary: {}", e.what()));
    }
    return s;
}

void write_run(const fs::path& dir, const scenarios::Scenario& scenario,
               const scenarios::ResultBundle& bundle)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw Error(fmt::format("cannot create output directory '{}': {}", dir.string(),
                                ec.message()));
    }
    write_atomic(dir / kDensityFile,
                 [&](std::ostream& out) { write_density_csv(out, bundle.density); });
    write_atomic(dir / kEventsFile,
                 [&](std::ostream& out) { write_events_ndjson(out, bundle.events); });
    write_atomic(dir / kHistogramFile, [&](std::ostream& out) {
        write_histogram_csv(out, bundle.histogram, bundle.expected_pmf);
    });
    write_atomic(dir / kProfileFile, [&](std::ostream& out) {
        write_profile_csv(out, bundle.profile_grid, bundle.profile);
    });
    // Last, so a complete summary implies complete data files.
    write_atomic(dir / kSummaryFile,
                 [&](std::ostream& out) { write_summary_json(out, scenario, bundle); });
}

} // namespace wavekin::io
