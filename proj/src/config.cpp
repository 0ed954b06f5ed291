#include "wavekin/config.hpp"

#include "wavekin/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <yaml-cpp/yaml.h>

namespace wavekin::config {

namespace wf = wavefield;
namespace kin = kinetics;
using scenarios::Scenario;
using scenarios::Threshold;

namespace {

std::string join_path(const std::string& path, std::string_view key)
{
    return path.empty() ? std::string(key) : fmt::format("{}.{}", path, key);
}

[[noreturn]] void fail(const YAML::Node& node, const std::string& path, const std::string& what)
{
    std::size_t line = 0;
    if (node.IsDefined()) {
        const auto mark = node.Mark();
        if (mark.line >= 0) {
            line = static_cast<std::size_t>(mark.line) + 1;
        }
    }
    const std::string where = line > 0 ? fmt::format("line {}: ", line) : std::string();
    throw ConfigError(fmt::format("{}{}: {}", where, path.empty() ? "<root>" : path, what), line,
                      path);
}

double to_number(const YAML::Node& n, const std::string& path)
{
    if (!n.IsScalar()) {
        fail(n, path, "expected a number");
    }
    const std::string& s = n.Scalar();
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size()) {
        fail(n, path, fmt::format("'{}' is not a number", s));
    }
    return v;
}

template <typename U>
U to_unsigned(const YAML::Node& n, const std::string& path)
{
    if (!n.IsScalar()) {
        fail(n, path, "expected a non-negative integer");
    }
    const std::string& s = n.Scalar();
    U v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size()) {
        fail(n, path, fmt::format("'{}' is not a non-negative integer in range", s));
    }
    return v;
}

std::string to_string(const YAML::Node& n, const std::string& path)
{
    if (!n.IsScalar()) {
        fail(n, path, "expected a string");
    }
    return n.Scalar();
}

// Reads a mapping and rejects keys nobody asked for.
class MapReader {
public:
    MapReader(const YAML::Node& node, std::string path) : node_(node), path_(std::move(path))
    {
        if (!node.IsMap()) {
            fail(node, path_, "expected a mapping");
        }
    }

    // Declares every key of the mapping up front, so a misspelt key is
    // reported before the required key it was meant to be.
    void expect(std::initializer_list<std::string_view> keys)
    {
        for (auto k : keys) {
            allowed_.insert(std::string(k));
        }
        finish();
    }

    bool has(std::string_view key)
    {
        allowed_.insert(std::string(key));
        return static_cast<bool>(node_[std::string(key)]);
    }

    YAML::Node get(std::string_view key)
    {
        allowed_.insert(std::string(key));
        return node_[std::string(key)];
    }

    std::string path(std::string_view key) const { return join_path(path_, key); }

    YAML::Node require(std::string_view key)
    {
        auto n = get(key);
        if (!n) {
            fail(node_, path_, fmt::format("missing required key '{}'", key));
        }
        return n;
    }

    void number(std::string_view key, double& out)
    {
        if (auto n = get(key)) {
            out = to_number(n, path(key));
        }
    }

    template <typename U>
    void integer(std::string_view key, U& out)
    {
        if (auto n = get(key)) {
            out = to_unsigned<U>(n, path(key));
        }
    }

    void text(std::string_view key, std::string& out)
    {
        if (auto n = get(key)) {
            out = to_string(n, path(key));
        }
    }

    void finish() const
    {
        for (const auto& kv : node_) {
            const auto key = kv.first.as<std::string>();
            if (!allowed_.count(key)) {
                std::vector<std::string> names(allowed_.begin(), allowed_.end());
                fail(kv.first, join_path(path_, key),
                     fmt::format("unknown key (allowed here: {})", fmt::join(names, ", ")));
            }
        }
    }

private:
    const YAML::Node node_;
    std::string path_;
    std::set<std::string> allowed_;
};

wf::FieldSpec parse_field(const YAML::Node& node, const std::string& path);

std::complex<double> parse_weight(const YAML::Node& n, const std::string& path)
{
    if (n.IsScalar()) {
        return {to_number(n, path), 0.0};
    }
    if (n.IsSequence() && n.size() == 2) {
        return {to_number(n[0], path + "[0]"), to_number(n[1], path + "[1]")};
    }
    fail(n, path, "weight must be a number or [re, im]");
}

wf::FieldSpec parse_field(const YAML::Node& node, const std::string& path)
{
    MapReader r(node, path);
    const std::string type = to_string(r.require("type"), r.path("type"));
    wf::FieldSpec out;
    if (type == "plane_wave" || type == "standing_wave_normal") {
        double a = 1.0;
        double k = 1.0;
        double w = 1.0;
        r.number("amplitude", a);
        r.number("wavenumber", k);
        r.number("angular_frequency", w);
        if (type == "plane_wave") {
            out = wf::PlaneWave{a, k, w};
        } else {
            out = wf::StandingWaveNormal{a, k, w};
        }
    } else if (type == "oblique_standing") {
        wf::ObliqueStanding f;
        r.number("amplitude", f.amplitude);
        r.number("wavenumber", f.wavenumber);
        r.number("angular_frequency", f.angular_frequency);
        r.number("incidence_angle", f.incidence_angle);
        if (auto p = r.get("polarization")) {
            const auto s = to_string(p, r.path("polarization"));
            if (s == "s" || s == "S") {
                f.polarization = wf::Polarization::S;
            } else if (s == "p" || s == "P") {
                f.polarization = wf::Polarization::P;
            } else {
                fail(p, r.path("polarization"), fmt::format("'{}' is neither s nor p", s));
            }
        }
        out = f;
    } else if (type == "double_slit_far_field") {
        wf::DoubleSlitFarField f;
        r.number("slit_separation", f.slit_separation);
        r.number("slit_width", f.slit_width);
        r.number("wavelength", f.wavelength);
        r.number("screen_distance", f.screen_distance);
        out = f;
    } else if (type == "gaussian_packet") {
        wf::GaussianPacket f;
        r.number("initial_width", f.initial_width);
        r.number("mean_wavenumber", f.mean_wavenumber);
        r.number("mass", f.mass);
        r.number("focus_time", f.focus_time);
        out = f;
    } else if (type == "box_eigenstate") {
        wf::BoxEigenstate f;
        if (auto q = r.get("quantum_number")) {
            const auto v = to_unsigned<unsigned>(q, r.path("quantum_number"));
            if (v > 1000000U) {
                fail(q, r.path("quantum_number"), "quantum number too large");
            }
            f.quantum_number = static_cast<int>(v);
        }
        r.number("box_length", f.box_length);
        r.number("mass", f.mass);
        out = f;
    } else if (type == "superposition") {
        wf::Superposition f;
        const auto terms = r.require("terms");
        if (!terms.IsSequence()) {
            fail(terms, r.path("terms"), "expected a list of {weight, field}");
        }
        for (std::size_t i = 0; i < terms.size(); ++i) {
            const std::string tp = fmt::format("{}[{}]", r.path("terms"), i);
            MapReader t(terms[i], tp);
            t.expect({"weight", "field"});
            const auto w = parse_weight(t.require("weight"), t.path("weight"));
            auto field = parse_field(t.require("field"), t.path("field"));
            t.finish();
            f.terms.push_back({w, std::move(field)});
        }
        out = std::move(f);
    } else {
        fail(node["type"], r.path("type"), fmt::format("unknown field type '{}'", type));
    }
    r.finish();
    return out;
}

scenarios::Drive parse_drive(const YAML::Node& node, const std::string& path)
{
    MapReader r(node, path);
    const std::string type = to_string(r.require("type"), r.path("type"));
    scenarios::Drive out;
    if (type == "constant") {
        scenarios::ConstantDrive d;
        r.number("level", d.level);
        out = d;
    } else if (type == "square") {
        scenarios::SquareDrive d;
        r.number("low", d.low);
        r.number("high", d.high);
        r.number("half_period", d.half_period);
        out = d;
    } else if (type == "sinusoid") {
        scenarios::SinusoidDrive d;
        r.number("mean", d.mean);
        r.number("amplitude", d.amplitude);
        r.number("angular_frequency", d.angular_frequency);
        r.number("phase", d.phase);
        out = d;
    } else {
        fail(node["type"], r.path("type"),
             fmt::format("unknown drive type '{}' (constant, square, sinusoid)", type));
    }
    r.finish();
    return out;
}

kin::KineticParams parse_kinetics(const YAML::Node& node, const std::string& path)
{
    MapReader r(node, path);
    r.expect({"mode", "omega", "tau", "gamma"});
    const auto mode_node = r.require("mode");
    kin::Mode mode{};
    try {
        mode = kin::parse_mode(to_string(mode_node, r.path("mode")));
    } catch (const Error& e) {
        fail(mode_node, r.path("mode"), e.what());
    }
    const double omega = to_number(r.require("omega"), r.path("omega"));
    std::optional<double> tau;
    std::optional<double> gamma;
    if (auto n = r.get("tau")) {
        tau = to_number(n, r.path("tau"));
    }
    if (auto n = r.get("gamma")) {
        gamma = to_number(n, r.path("gamma"));
    }
    r.finish();
    if (tau && gamma) {
        // Exact serialized pairs restore as they are; anything else must be
        // consistent to calibration tolerance.
        try {
            return kin::KineticParams::restore(mode, omega, *gamma, *tau);
        } catch (const InvalidSpecError&) {
        }
    }
    try {
        return kin::KineticParams::calibrate(mode, omega, tau, gamma);
    } catch (const Error& e) {
        fail(node, path, e.what());
    }
}

Threshold parse_threshold(const YAML::Node& node, const std::string& path)
{
    MapReader r(node, path);
    const bool has_min = r.has("min");
    const bool has_max = r.has("max");
    r.finish();
    if (has_min == has_max) {
        fail(node, path, "give exactly one of min or max");
    }
    const auto key = has_min ? "min" : "max";
    return {has_min ? Threshold::Bound::Min : Threshold::Bound::Max,
            to_number(node[key], join_path(path, key))};
}

Scenario from_node(const YAML::Node& root)
{
    MapReader r(root, "");
    r.expect({"name", "description", "kind", "field", "drive", "kinetics", "region",
              "grid_points", "bins", "occupancy_bins", "t_end", "dt", "record_every", "threads",
              "seed", "ensemble", "transient_lifetimes", "checkpoints", "contrast_factor",
              "critical_constant", "thresholds"});
    Scenario s;
    s.name = to_string(r.require("name"), "name");
    r.text("description", s.description);
    const auto kind_node = r.require("kind");
    try {
        s.kind = scenarios::parse_kind(to_string(kind_node, "kind"));
    } catch (const InvalidSpecError& e) {
        fail(kind_node, "kind", e.what());
    }
    const bool has_field = r.has("field");
    const bool has_drive = r.has("drive");
    if (has_field == has_drive) {
        fail(root, "", "give exactly one of 'field' or 'drive'");
    }
    if (has_field) {
        s.drive = parse_field(root["field"], "field");
    } else {
        s.drive = parse_drive(root["drive"], "drive");
    }
    s.params = parse_kinetics(r.require("kinetics"), "kinetics");

    const auto region = r.require("region");
    if (!region.IsSequence() || region.size() != 2) {
        fail(region, "region", "expected [lo, hi]");
    }
    s.region = {to_number(region[0], "region[0]"), to_number(region[1], "region[1]")};

    r.integer("grid_points", s.grid_points);
    r.integer("bins", s.bins);
    r.integer("occupancy_bins", s.occupancy_bins);
    r.number("t_end", s.t_end);
    r.number("dt", s.dt);
    r.integer("record_every", s.record_every);
    r.integer("threads", s.threads);
    r.integer("seed", s.seed);
    r.number("ensemble", s.ensemble);
    r.number("transient_lifetimes", s.transient_lifetimes);
    r.number("contrast_factor", s.contrast_factor);
    r.number("critical_constant", s.critical_constant);
    if (auto cp = r.get("checkpoints")) {
        if (!cp.IsSequence()) {
            fail(cp, "checkpoints", "expected a list of birth counts");
        }
        s.checkpoints.clear();
        for (std::size_t i = 0; i < cp.size(); ++i) {
            s.checkpoints.push_back(
                to_unsigned<std::size_t>(cp[i], fmt::format("checkpoints[{}]", i)));
        }
    }
    if (auto th = r.get("thresholds")) {
        if (!th.IsMap()) {
            fail(th, "thresholds", "expected a mapping of statistic -> {min|max: value}");
        }
        for (const auto& kv : th) {
            const auto name = kv.first.as<std::string>();
            s.thresholds[name] = parse_threshold(kv.second, join_path("thresholds", name));
        }
    }
    r.finish();

    try {
        scenarios::validate(s);
    } catch (const InvalidSpecError& e) {
        fail(root, "", e.what());
    }
    return s;
}

std::string num(double v) { return fmt::format("{}", v); }

YAML::Node field_node(const wf::FieldSpec& spec)
{
    YAML::Node n;
    n["type"] = std::string(wf::variant_name(spec));
    std::visit(
        [&](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, wf::PlaneWave> ||
                          std::is_same_v<T, wf::StandingWaveNormal>) {
                n["amplitude"] = num(f.amplitude);
                n["wavenumber"] = num(f.wavenumber);
                n["angular_frequency"] = num(f.angular_frequency);
            } else if constexpr (std::is_same_v<T, wf::ObliqueStanding>) {
                n["amplitude"] = num(f.amplitude);
                n["wavenumber"] = num(f.wavenumber);
                n["angular_frequency"] = num(f.angular_frequency);
                n["incidence_angle"] = num(f.incidence_angle);
                n["polarization"] = f.polarization == wf::Polarization::S ? "s" : "p";
            } else if constexpr (std::is_same_v<T, wf::DoubleSlitFarField>) {
                n["slit_separation"] = num(f.slit_separation);
                n["slit_width"] = num(f.slit_width);
                n["wavelength"] = num(f.wavelength);
                n["screen_distance"] = num(f.screen_distance);
            } else if constexpr (std::is_same_v<T, wf::GaussianPacket>) {
                n["initial_width"] = num(f.initial_width);
                n["mean_wavenumber"] = num(f.mean_wavenumber);
                n["mass"] = num(f.mass);
                n["focus_time"] = num(f.focus_time);
            } else if constexpr (std::is_same_v<T, wf::BoxEigenstate>) {
                n["quantum_number"] = f.quantum_number;
                n["box_length"] = num(f.box_length);
                n["mass"] = num(f.mass);
            } else {
                YAML::Node terms(YAML::NodeType::Sequence);
                for (const auto& t : f.terms) {
                    YAML::Node term;
                    YAML::Node w(YAML::NodeType::Sequence);
                    w.push_back(num(t.weight.real()));
                    w.push_back(num(t.weight.imag()));
                    w.SetStyle(YAML::EmitterStyle::Flow);
                    term["weight"] = w;
                    term["field"] = field_node(t.field);
                    terms.push_back(term);
                }
                n["terms"] = terms;
            }
        },
        spec.variant);
    return n;
}

YAML::Node drive_node(const scenarios::Drive& drive)
{
    YAML::Node n;
    if (const auto* c = std::get_if<scenarios::ConstantDrive>(&drive)) {
        n["type"] = "constant";
        n["level"] = num(c->level);
    } else if (const auto* q = std::get_if<scenarios::SquareDrive>(&drive)) {
        n["type"] = "square";
        n["low"] = num(q->low);
        n["high"] = num(q->high);
        n["half_period"] = num(q->half_period);
    } else if (const auto* s = std::get_if<scenarios::SinusoidDrive>(&drive)) {
        n["type"] = "sinusoid";
        n["mean"] = num(s->mean);
        n["amplitude"] = num(s->amplitude);
        n["angular_frequency"] = num(s->angular_frequency);
        n["phase"] = num(s->phase);
    }
    return n;
}

YAML::Node to_node(const Scenario& s)
{
    YAML::Node n;
    n["name"] = s.name;
    n["description"] = s.description;
    n["kind"] = std::string(scenarios::kind_name(s.kind));
    if (const auto* f = std::get_if<wf::FieldSpec>(&s.drive)) {
        n["field"] = field_node(*f);
    } else {
        n["drive"] = drive_node(s.drive);
    }
    YAML::Node k;
    k["mode"] = std::string(kin::mode_name(s.params.mode()));
    k["omega"] = num(s.params.omega());
    k["tau"] = num(s.params.tau());
    k["gamma"] = num(s.params.gamma());
    n["kinetics"] = k;
    YAML::Node region(YAML::NodeType::Sequence);
    region.push_back(num(s.region.lo));
    region.push_back(num(s.region.hi));
    region.SetStyle(YAML::EmitterStyle::Flow);
    n["region"] = region;
    n["grid_points"] = s.grid_points;
    n["bins"] = s.bins;
    n["occupancy_bins"] = s.occupancy_bins;
    n["t_end"] = num(s.t_end);
    n["dt"] = num(s.dt);
    n["record_every"] = s.record_every;
    n["threads"] = s.threads;
    n["seed"] = s.seed;
    n["ensemble"] = num(s.ensemble);
    n["transient_lifetimes"] = num(s.transient_lifetimes);
    YAML::Node cp(YAML::NodeType::Sequence);
    for (auto c : s.checkpoints) {
        cp.push_back(c);
    }
    cp.SetStyle(YAML::EmitterStyle::Flow);
    n["checkpoints"] = cp;
    n["contrast_factor"] = num(s.contrast_factor);
    n["critical_constant"] = num(s.critical_constant);
    YAML::Node th(YAML::NodeType::Map);
    for (const auto& [name, t] : s.thresholds) {
        YAML::Node entry;
        entry[t.bound == Threshold::Bound::Min ? "min" : "max"] = num(t.value);
        entry.SetStyle(YAML::EmitterStyle::Flow);
        th[name] = entry;
    }
    n["thresholds"] = th;
    return n;
}

std::string field_type(const YAML::Node& n)
{
    if (n.IsMap() && n["type"] && n["type"].IsScalar()) {
        return n["type"].Scalar();
    }
    return {};
}

// Overlays `over` onto `base`; mappings merge key by key, anything else is
// replaced.
void merge_into(YAML::Node base, const YAML::Node& over, const std::string& path)
{
    for (const auto& kv : over) {
        const auto key = kv.first.as<std::string>();
        const std::string p = join_path(path, key);
        YAML::Node target = base[key];
        const bool replace_whole =
            !target || !target.IsMap() || !kv.second.IsMap() ||
            ((p == "field" || p == "drive") && !field_type(kv.second).empty() &&
             field_type(kv.second) != field_type(target)) ||
            path == "thresholds";
        if (replace_whole) {
            base[key] = kv.second;
        } else {
            merge_into(target, kv.second, p);
        }
    }
    if (path.empty()) {
        if (over["field"]) {
            base.remove("drive");
        }
        if (over["drive"]) {
            base.remove("field");
        }
        if (const auto k = over["kinetics"]; k && k.IsMap()) {
            if (k["tau"] && !k["gamma"]) {
                base["kinetics"].remove("gamma");
            }
            if (k["gamma"] && !k["tau"]) {
                base["kinetics"].remove("tau");
            }
        }
    }
}

YAML::Node load_document(std::string_view text)
{
    YAML::Node doc;
    try {
        doc = YAML::Load(std::string(text));
    } catch (const YAML::Exception& e) {
        const std::size_t line = e.mark.line >= 0 ? static_cast<std::size_t>(e.mark.line) + 1 : 0;
        throw ConfigError(fmt::format("line {}: {}", line, e.msg), line);
    }
    if (!doc.IsMap()) {
        throw ConfigError("a scenario file must be a mapping of keys to values", 1);
    }
    if (const auto base = doc["base"]) {
        const std::string name = to_string(base, "base");
        const Scenario* preset = nullptr;
        try {
            preset = &scenarios::find_scenario(name);
        } catch (const InvalidSpecError& e) {
            fail(base, "base", e.what());
        }
        YAML::Node merged = to_node(*preset);
        YAML::Node over = YAML::Clone(doc);
        over.remove("base");
        merge_into(merged, over, "");
        return merged;
    }
    return doc;
}

} // namespace

Scenario parse_scenario(std::string_view text)
{
    try {
        return from_node(load_document(text));
    } catch (const YAML::Exception& e) {
        const std::size_t line = e.mark.line >= 0 ? static_cast<std::size_t>(e.mark.line) + 1 : 0;
        throw ConfigError(fmt::format("line {}: {}", line, e.msg), line);
    }
}

Scenario load_scenario_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError(fmt::format("cannot open scenario file '{}'", path.string()));
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_scenario(buf.str());
    } catch (const ConfigError& e) {
        throw ConfigError(fmt::format("{}: {}", path.string(), e.what()), e.line(), e.field());
    }
}

std::string to_yaml(const Scenario& scenario)
{
    YAML::Emitter out;
    out << to_node(scenario);
    return std::string(out.c_str()) + "\n";
}

void apply_override(Scenario& scenario, std::string_view assignment)
{
    const auto eq = assignment.find('=');
    const std::string key(assignment.substr(0, eq));
    if (eq == std::string_view::npos || key.empty()) {
        throw ConfigError(fmt::format("override '{}' is not of the form key=value", assignment));
    }
    const std::string value(assignment.substr(eq + 1));
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        parts.push_back(key.substr(start, dot - start));
        if (dot == std::string::npos) {
            break;
        }
        start = dot + 1;
    }
    if (std::any_of(parts.begin(), parts.end(), [](const auto& p) { return p.empty(); })) {
        throw ConfigError(fmt::format("override key '{}' has an empty component", key), 0, key);
    }
    try {
        YAML::Node parsed;
        try {
            parsed = YAML::Load(value);
        } catch (const YAML::Exception& e) {
            throw ConfigError(fmt::format("value '{}': {}", value, e.msg), 0, key);
        }
        YAML::Node root = to_node(scenario);
        // Node assignment copies values in yaml-cpp; reset() rebinds.
        YAML::Node parent;
        parent.reset(root);
        for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
            YAML::Node child;
            child.reset(parent[parts[i]]);
            if (!child || !child.IsMap()) {
                if (child && !child.IsNull()) {
                    throw ConfigError(
                        fmt::format("'{}' is not a table", fmt::join(parts.begin(),
                                                                   parts.begin() + i + 1, ".")),
                        0, key);
                }
                parent[parts[i]] = YAML::Node(YAML::NodeType::Map);
                child.reset(parent[parts[i]]);
            }
            parent.reset(child);
        }
        const std::string& leaf = parts.back();
        parent[leaf] = parsed;
        if (parts.size() == 2 && parts[0] == "kinetics") {
            if (leaf == "tau") {
                parent.remove("gamma");
            } else if (leaf == "gamma") {
                parent.remove("tau");
            }
        }
        if (parts.size() == 3 && parts[0] == "thresholds") {
            parent.remove(leaf == "min" ? "max" : "min");
        }
        scenario = from_node(root);
    } catch (const ConfigError& e) {
        throw ConfigError(fmt::format("override '{}': {}", assignment, e.what()), 0,
                          e.field().empty() ? key : e.field());
    }
}

std::string template_text()
{
    return R"(# Scenario file for the wavekin simulator.
#
# All quantities are dimensionless, in natural units with hbar = c = 1:
# pick a length scale and a time scale, and every number below is a multiple
# of them. Intensities are E.E for optical fields and |psi|^2 for matter
# fields. Run with:  wavekin run this_file.yaml --out DIR
#
# Instead of writing everything out, `base: <preset>` starts from a built-in
# scenario (see `wavekin list`) and the keys given here override it.

name: my_scenario
description: Standing wave at normal incidence
# wiener | double_slit | packet_relaxation | eigenstate_steady |
# born_violation | constant_rate | relaxation
kind: wiener

# Either a field ...
field:
  # plane_wave | standing_wave_normal | oblique_standing |
  # double_slit_far_field | gaussian_packet | box_eigenstate | superposition
  type: standing_wave_normal
  amplitude: 252            # E0
  wavenumber: 12.566370614359172   # k = 2 pi / wavelength
  angular_frequency: 12.566370614359172
  # oblique_standing also takes incidence_angle (radians) and polarization (s|p)
  # double_slit_far_field: slit_separation, slit_width, wavelength, screen_distance
  # gaussian_packet: initial_width, mean_wavenumber, mass, focus_time
  # box_eigenstate: quantum_number, box_length, mass
  # superposition: terms: [{weight: [re, im], field: {...}}, ...]
# ... or a spatially uniform drive:
# drive: {type: constant, level: 1}
# drive: {type: square, low: 0, high: 1, half_period: 1}
# drive: {type: sinusoid, mean: 1, amplitude: 0.5, angular_frequency: 1, phase: 0}

kinetics:
  mode: photon              # photon: 4 pi gamma tau omega = 1; matter: gamma tau omega = 1
  omega: 12.566370614359172 # photon mode: must equal the field frequency
  tau: 1                    # mean lifetime; give tau or gamma (or both, if consistent)
  # gamma: 0.0063325739776461107

region: [0, 5]              # simulated interval of the coordinate
grid_points: 201            # density grid (density.csv)
bins: 200                   # birth histogram (histogram.csv)
occupancy_bins: 50          # occupancy check; 0 uses bins
t_end: 50                   # run length
dt: 0.01                    # integrator step, at most tau / 20
record_every: 25            # keep every n-th integrator step
threads: 1                  # results do not depend on this
seed: 42                    # 64-bit unsigned
ensemble: 1                 # independent copies feeding the point process
transient_lifetimes: 10     # Born-limit checks start at this many tau
checkpoints: []             # double_slit: birth counts to compare at
contrast_factor: 100        # packet_relaxation, born_violation: contrast run scale
critical_constant: 1        # C in <E^2> Lambda^3 = C omega

# Acceptance thresholds on the statistics written to summary.json.
thresholds:
  visibility: {min: 0.99}
  chi_square_p: {min: 0.001}
  fringe_spacing_error: {max: 0.025}
  occupancy_max_z: {max: 4}
)";
}

} // namespace wavekin::config
