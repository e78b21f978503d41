#include "culd/config.hpp"

#include <fmt/format.h>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "culd/error.hpp"

namespace culd {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
    std::vector<std::string_view> out;
    while (true) {
        const auto comma = s.find(',');
        out.push_back(trim(s.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        s.remove_prefix(comma + 1);
    }
    return out;
}

// Sub-unit prefixes divide by an exact power of ten so that "25ns" parses to
// the same double as the literal 25e-9.
std::pair<double, bool> prefix_scale(std::string_view prefix) {
    static const std::map<std::string_view, std::pair<double, bool>> table{
        {"", {1.0, false}},    {"f", {1e15, true}}, {"p", {1e12, true}}, {"n", {1e9, true}},
        {"u", {1e6, true}},    {"m", {1e3, true}},  {"k", {1e3, false}}, {"M", {1e6, false}},
        {"G", {1e9, false}},
    };
    const auto it = table.find(prefix);
    return it == table.end() ? std::pair{0.0, false} : it->second;
}

// Key schema: section -> key -> expected unit ("" = dimensionless,
// "list" = list value, "word" = identifier).
struct KeyInfo {
    std::string_view unit;
    bool positive = false;
};

const std::map<std::string_view, std::map<std::string_view, KeyInfo>>& schema() {
    static const std::map<std::string_view, std::map<std::string_view, KeyInfo>> s{
        {"experiment",
         {{"kind", {"word"}},
          {"name", {"word"}},
          {"topology", {"word"}},
          {"n", {"int", true}},
          {"n_list", {"list"}},
          {"weights", {"list"}},
          {"samples", {"int", true}},
          {"seed", {"int"}},
          {"bootstrap", {"int", true}},
          {"mismatch_role", {"word"}},
          {"mismatch_r_upper", {"Ohm", true}},
          {"mismatch_r_lower", {"Ohm", true}},
          {"mismatch_r_other", {"Ohm", true}}}},
        {"device",
         {{"r_hrs", {"Ohm", true}},
          {"r_lrs", {"Ohm", true}},
          {"sigma_rel", {""}},
          {"series_r_on", {"Ohm"}},
          {"distribution", {"word"}},
          {"verify_tol", {"", true}},
          {"max_iters", {"int", true}},
          {"sram_g_on", {"S", true}},
          {"sram_g_off", {"S"}}}},
        {"readout",
         {{"i_bias", {"A", true}},
          {"c_p", {"F", true}},
          {"c_n", {"F", true}},
          {"v_dd", {"V", true}},
          {"mirror_gain_p", {"", true}},
          {"mirror_gain_n", {"", true}},
          {"dt", {"s", true}}}},
        {"schedule", {{"x_max", {"s", true}}, {"widths", {"list"}}, {"order", {"word"}}}},
    };
    return s;
}

std::int64_t parse_int(std::string_view text, const std::string& key) {
    std::int64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end) throw ConfigError(key, "malformed integer '" + std::string(text) + "'");
    return v;
}

std::uint64_t parse_u64(std::string_view text, const std::string& key) {
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end) throw ConfigError(key, "malformed unsigned integer '" + std::string(text) + "'");
    return v;
}

template <class E, std::size_t N>
using Words = std::array<std::pair<std::string_view, E>, N>;

template <class E, std::size_t N>
E parse_word(std::string_view text, const std::string& key, const Words<E, N>& opts) {
    std::string allowed;
    for (const auto& [word, value] : opts) {
        if (word == text) return value;
        allowed += (allowed.empty() ? "" : ", ") + std::string(word);
    }
    throw ConfigError(key, "unknown value '" + std::string(text) + "' (expected one of: " + allowed + ")");
}

constexpr Words<ExperimentKind, 4> kKinds{{
    {"mismatch_compare", ExperimentKind::MismatchCompare},
    {"mac_sweep", ExperimentKind::MacSweep},
    {"n_sweep", ExperimentKind::NSweep},
    {"monte_carlo", ExperimentKind::MonteCarlo}}};
constexpr Words<Topology, 3> kTopologies{{
    {"4t4r", Topology::FourT4R}, {"4t2r", Topology::FourT2R}, {"8t", Topology::EightTSram}}};
constexpr Words<PhaseOrder, 2> kOrders{{
    {"wl_first", PhaseOrder::WlFirst}, {"wlb_first", PhaseOrder::WlbFirst}}};
constexpr Words<MismatchRole, 2> kRoles{{
    {"p", MismatchRole::P}, {"n", MismatchRole::N}}};
constexpr Words<VariationModel, 2> kModels{{
    {"lognormal", VariationModel::LogNormal}, {"truncated_normal", VariationModel::TruncatedNormal}}};

template <class E, std::size_t N>
std::string_view word_of(E value, const Words<E, N>& opts) {
    for (const auto& [word, v] : opts) {
        if (v == value) return word;
    }
    return "?";
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

double parse_quantity(std::string_view text, std::string_view unit, const std::string& key_path) {
    text = trim(text);
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || text.empty()) {
        throw ConfigError(key_path, "malformed number '" + std::string(text) + "'");
    }
    if (!std::isfinite(value)) throw ConfigError(key_path, "non-finite number '" + std::string(text) + "'");
    const std::string_view suffix = trim(std::string_view(ptr, static_cast<std::size_t>(end - ptr)));
    if (suffix.empty()) return value;
    if (unit.empty() || !suffix.ends_with(unit)) {
        throw ConfigError(key_path, "unexpected unit '" + std::string(suffix) + "'" +
                                        (unit.empty() ? " on a dimensionless value" : " (expected " + std::string(unit) + ")"));
    }
    const auto [scale, divide] = prefix_scale(suffix.substr(0, suffix.size() - unit.size()));
    if (scale == 0.0) throw ConfigError(key_path, "unknown SI prefix in '" + std::string(suffix) + "'");
    return divide ? value / scale : value * scale;
}

RunConfig parse_config(std::string_view text) {
    // section.key -> (raw value, line number)
    std::map<std::string, std::pair<std::string, int>> entries;
    std::string section;
    int line_no = 0;
    std::istringstream in{std::string(text)};
    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(line_no);
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where, "unterminated section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (!schema().contains(section)) throw ConfigError(section, "unknown section");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(where, "expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        if (section.empty()) throw ConfigError(key, "key outside of any section");
        const std::string path = section + "." + key;
        if (!schema().at(section).contains(key)) throw ConfigError(path, "unknown key");
        if (entries.contains(path)) throw ConfigError(path, "duplicate key");
        entries[path] = {std::string(trim(line.substr(eq + 1))), line_no};
    }

    if (!entries.contains("experiment.kind")) throw ConfigError("experiment.kind", "missing required key");

    RunConfig cfg;
    ExperimentSpec& spec = cfg.spec;
    for (const auto& [path, entry] : entries) {
        const auto dot = path.find('.');
        const std::string_view sec(path.data(), dot);
        const std::string_view key(path.data() + dot + 1, path.size() - dot - 1);
        const KeyInfo info = schema().at(sec).at(key);
        const std::string& value = entry.first;
        if (value.empty()) throw ConfigError(path, "empty value");

        auto quantity = [&]() {
            const double v = parse_quantity(value, info.unit, path);
            if (info.positive && !(v > 0.0)) throw ConfigError(path, "must be positive, got " + value);
            if (!info.positive && v < 0.0) throw ConfigError(path, "must not be negative, got " + value);
            return v;
        };
        auto integer = [&]() {
            const std::int64_t v = parse_int(value, path);
            if (info.positive && v <= 0) throw ConfigError(path, "must be positive, got " + value);
            if (v > std::numeric_limits<int>::max()) throw ConfigError(path, "too large");
            return static_cast<int>(v);
        };

        if (path == "experiment.kind") spec.kind = parse_word(value, path, kKinds);
        else if (path == "experiment.name") cfg.name = value;
        else if (path == "experiment.topology") spec.topology = parse_word(value, path, kTopologies);
        else if (path == "experiment.n") spec.n_rows = integer();
        else if (path == "experiment.n_list") {
            spec.n_list.clear();
            for (auto item : split_list(value)) {
                const std::int64_t n = parse_int(item, path);
                if (n < 1 || n > 1 << 20) throw ConfigError(path, "row count out of range: " + std::string(item));
                spec.n_list.push_back(static_cast<int>(n));
            }
        } else if (path == "experiment.weights") {
            spec.weights.clear();
            for (auto item : split_list(value)) {
                const double w = parse_quantity(item, "", path);
                if (!(w >= -1.0 && w <= 1.0)) throw ConfigError(path, "weight outside [-1, 1]: " + std::string(item));
                spec.weights.push_back(w);
            }
        } else if (path == "experiment.samples") spec.samples = integer();
        else if (path == "experiment.seed") spec.seed = parse_u64(value, path);
        else if (path == "experiment.bootstrap") spec.bootstrap_resamples = integer();
        else if (path == "experiment.mismatch_role") spec.mismatch.role = parse_word(value, path, kRoles);
        else if (path == "experiment.mismatch_r_upper") spec.mismatch.r_upper = quantity();
        else if (path == "experiment.mismatch_r_lower") spec.mismatch.r_lower = quantity();
        else if (path == "experiment.mismatch_r_other") spec.mismatch.r_other = quantity();
        else if (path == "device.r_hrs") spec.cells.device.r_hrs = quantity();
        else if (path == "device.r_lrs") spec.cells.device.r_lrs = quantity();
        else if (path == "device.sigma_rel") spec.cells.device.sigma_rel = quantity();
        else if (path == "device.series_r_on") spec.cells.device.series_r_on = quantity();
        else if (path == "device.distribution") spec.cells.device.model = parse_word(value, path, kModels);
        else if (path == "device.verify_tol") spec.cells.program.verify_tol = quantity();
        else if (path == "device.max_iters") spec.cells.program.max_iters = integer();
        else if (path == "device.sram_g_on") spec.cells.sram.g_on = quantity();
        else if (path == "device.sram_g_off") spec.cells.sram.g_off = quantity();
        else if (path == "readout.i_bias") spec.readout.i_bias = quantity();
        else if (path == "readout.c_p") spec.readout.c_p = quantity();
        else if (path == "readout.c_n") spec.readout.c_n = quantity();
        else if (path == "readout.v_dd") spec.readout.v_dd = quantity();
        else if (path == "readout.mirror_gain_p") spec.readout.mirror_gain_p = quantity();
        else if (path == "readout.mirror_gain_n") spec.readout.mirror_gain_n = quantity();
        else if (path == "readout.dt") spec.readout.dt = quantity();
        else if (path == "schedule.x_max") spec.x_max = quantity();
        else if (path == "schedule.order") spec.order = parse_word(value, path, kOrders);
        else if (path == "schedule.widths") {
            spec.widths.clear();
            for (auto item : split_list(value)) {
                const double w = parse_quantity(item, "s", path);
                if (w < 0.0) throw ConfigError(path, "negative width: " + std::string(item));
                spec.widths.push_back(w);
            }
        }
    }

    // Cross-key checks, reported against the key a user would edit.
    if (!(spec.cells.device.r_hrs > spec.cells.device.r_lrs)) throw ConfigError("device.r_hrs", "must exceed device.r_lrs");
    if (!(spec.cells.sram.g_on > spec.cells.sram.g_off)) throw ConfigError("device.sram_g_on", "must exceed device.sram_g_off");
    if (spec.weights.empty()) spec.weights = {1.0};
    if (spec.widths.empty()) spec.widths = {spec.x_max / 2.0};
    for (double w : spec.widths) {
        if (w > spec.x_max) throw ConfigError("schedule.widths", "width exceeds schedule.x_max");
    }
    if (spec.kind == ExperimentKind::NSweep && spec.n_list.empty()) {
        throw ConfigError("experiment.n_list", "missing required key for n_sweep");
    }
    if (spec.kind == ExperimentKind::MonteCarlo && !(spec.cells.device.sigma_rel > 0.0)) {
        throw ConfigError("device.sigma_rel", "monte_carlo requires a positive value");
    }
    if (spec.topology == Topology::EightTSram) {
        for (double w : spec.weights) {
            if (w != 1.0 && w != -1.0) throw ConfigError("experiment.weights", "8t cells store only +1 or -1");
        }
    }
    return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
    const ExperimentSpec& s = cfg.spec;
    auto list = [](const auto& values, std::string_view unit) {
        std::string out;
        for (const auto& v : values) {
            if (!out.empty()) out += ", ";
            if constexpr (std::is_integral_v<std::decay_t<decltype(v)>>) out += std::to_string(v);
            else out += num(v) + std::string(unit);
        }
        return out;
    };

    std::string out = "[experiment]\n";
    out += fmt::format("kind = {}\n", to_string(s.kind));
    if (!cfg.name.empty()) out += fmt::format("name = {}\n", cfg.name);
    out += fmt::format("topology = {}\n", word_of(s.topology, kTopologies));
    out += fmt::format("n = {}\n", s.n_rows);
    if (!s.n_list.empty()) out += fmt::format("n_list = {}\n", list(s.n_list, ""));
    out += fmt::format("weights = {}\n", list(s.weights, ""));
    out += fmt::format("samples = {}\n", s.samples);
    out += fmt::format("seed = {}\n", s.seed);
    out += fmt::format("bootstrap = {}\n", s.bootstrap_resamples);
    out += fmt::format("mismatch_role = {}\n", word_of(s.mismatch.role, kRoles));
    out += fmt::format("mismatch_r_upper = {}Ohm\n", num(s.mismatch.r_upper));
    out += fmt::format("mismatch_r_lower = {}Ohm\n", num(s.mismatch.r_lower));
    out += fmt::format("mismatch_r_other = {}Ohm\n", num(s.mismatch.r_other));

    const DeviceParams& d = s.cells.device;
    out += "\n[device]\n";
    out += fmt::format("r_hrs = {}Ohm\n", num(d.r_hrs));
    out += fmt::format("r_lrs = {}Ohm\n", num(d.r_lrs));
    out += fmt::format("sigma_rel = {}\n", num(d.sigma_rel));
    out += fmt::format("series_r_on = {}Ohm\n", num(d.series_r_on));
    out += fmt::format("distribution = {}\n", word_of(d.model, kModels));
    out += fmt::format("verify_tol = {}\n", num(s.cells.program.verify_tol));
    out += fmt::format("max_iters = {}\n", s.cells.program.max_iters);
    out += fmt::format("sram_g_on = {}S\n", num(s.cells.sram.g_on));
    out += fmt::format("sram_g_off = {}S\n", num(s.cells.sram.g_off));

    const ReadoutConfig& r = s.readout;
    out += "\n[readout]\n";
    out += fmt::format("i_bias = {}A\n", num(r.i_bias));
    out += fmt::format("c_p = {}F\n", num(r.c_p));
    out += fmt::format("c_n = {}F\n", num(r.c_n));
    out += fmt::format("v_dd = {}V\n", num(r.v_dd));
    out += fmt::format("mirror_gain_p = {}\n", num(r.mirror_gain_p));
    out += fmt::format("mirror_gain_n = {}\n", num(r.mirror_gain_n));
    out += fmt::format("dt = {}s\n", num(r.dt));

    out += "\n[schedule]\n";
    out += fmt::format("x_max = {}s\n", num(s.x_max));
    out += fmt::format("widths = {}\n", list(s.widths, "s"));
    out += fmt::format("order = {}\n", word_of(s.order, kOrders));
    return out;
}

const Preset* find_preset(std::string_view name) {
    for (const Preset& p : presets()) {
        if (p.name == name) return &p;
    }
    return nullptr;
}

std::string list_presets() {
    std::string out;
    for (const Preset& p : presets()) out += fmt::format("{:<16} {:<8} {}\n", p.name, p.figure, p.summary);
    return out;
}

RunConfig load_config(const std::string& path_or_preset) {
    std::error_code ec;
    if (std::filesystem::is_regular_file(path_or_preset, ec)) {
        std::ifstream in(path_or_preset);
        if (!in) throw IoError("cannot open config file " + path_or_preset);
        std::stringstream buf;
        buf << in.rdbuf();
        RunConfig cfg = parse_config(buf.str());
        cfg.config_path = path_or_preset;
        return cfg;
    }
    if (const Preset* p = find_preset(path_or_preset)) {
        RunConfig cfg = parse_config(p->text);
        cfg.config_path = "preset:" + std::string(p->name);
        return cfg;
    }
    throw IoError("no config file or preset named '" + path_or_preset + "'");
}

}  // namespace culd
