#pragma once

// Scenario files: a small INI dialect with explicit unit suffixes in every
// key, canonical serialization, and a stable 64-bit config hash.
//
// The canonical text (and therefore the hash) is built from the file-unit
// values; %.17g round-trips doubles exactly, so serialize(parse(x)) parses
// back to an identical hash regardless of unit-conversion rounding.

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "oamem/protocol.hpp"

namespace oamem {

struct SweepAxis {
    std::string name;  // one of: T_en_K, g_over_Gamma, k_per_m, tau_s_ns, eta, r
    double start = 0.0;
    double stop = 0.0;
    int points = 0;
};

struct SweepSpec {
    std::vector<SweepAxis> axes;  // zero, one, or two
};

struct ScenarioDocument {
    ProtocolConfig config;
    SweepSpec sweep;
    std::string canonical;   // serialization the hash is computed from
    std::uint64_t hash = 0;  // FNV-1a of canonical
};

class ScenarioError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline std::uint64_t fnv1a_hash(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

namespace scenario_detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

struct Entry {
    std::string value;
    int line = 0;
    mutable bool used = false;
};

struct Document {
    std::map<std::string, std::map<std::string, Entry>> sections;
    std::map<std::string, int> section_lines;
};

inline Document tokenize(const std::string& text) {
    Document doc;
    std::string current;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string line = text.substr(pos, nl == std::string::npos ? std::string::npos
                                                                    : nl - pos);
        pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ScenarioError("line " + std::to_string(line_no) +
                                    ": malformed section header '" + t + "'");
            current = trim(t.substr(1, t.size() - 2));
            if (current.empty())
                throw ScenarioError("line " + std::to_string(line_no) + ": empty section name");
            doc.sections[current];
            doc.section_lines.emplace(current, line_no);
            continue;
        }
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ScenarioError("line " + std::to_string(line_no) + ": expected 'key = value'");
        if (current.empty())
            throw ScenarioError("line " + std::to_string(line_no) + ": key outside any section");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw ScenarioError("line " + std::to_string(line_no) + ": empty key");
        bool fresh = doc.sections[current].emplace(key, Entry{value, line_no, false}).second;
        if (!fresh)
            throw ScenarioError("line " + std::to_string(line_no) + ": duplicate key '" + key +
                                "' in [" + current + "]");
    }
    return doc;
}

class Reader {
  public:
    explicit Reader(const Document& doc) : doc_(doc) {}

    bool has_section(const std::string& s) const { return doc_.sections.count(s) != 0; }

    const Entry* find(const std::string& sec, const std::string& key) const {
        auto s = doc_.sections.find(sec);
        if (s == doc_.sections.end()) return nullptr;
        auto k = s->second.find(key);
        if (k == s->second.end()) return nullptr;
        k->second.used = true;
        return &k->second;
    }

    double number(const std::string& sec, const std::string& key) const {
        const Entry* e = find(sec, key);
        if (!e) throw ScenarioError("missing required key '" + key + "' in [" + sec + "]");
        return parse_number(*e, key);
    }

    double number_or(const std::string& sec, const std::string& key, double def) const {
        const Entry* e = find(sec, key);
        return e ? parse_number(*e, key) : def;
    }

    std::string word(const std::string& sec, const std::string& key) const {
        const Entry* e = find(sec, key);
        if (!e) throw ScenarioError("missing required key '" + key + "' in [" + sec + "]");
        return e->value;
    }

    std::string word_or(const std::string& sec, const std::string& key,
                        const std::string& def) const {
        const Entry* e = find(sec, key);
        return e ? e->value : def;
    }

    static double parse_number(const Entry& e, const std::string& key) {
        const std::string& v = e.value;
        char* end = nullptr;
        double x = std::strtod(v.c_str(), &end);
        if (end == v.c_str() || *end != '\0')
            throw ScenarioError("line " + std::to_string(e.line) + ": key '" + key +
                                "' expects a number, got '" + v + "'");
        return x;
    }

    // Every key must have been consumed; anything left over is unknown.
    void finish(const std::set<std::string>& known_sections) const {
        for (const auto& [name, sec] : doc_.sections) {
            if (!known_sections.count(name))
                throw ScenarioError("line " + std::to_string(doc_.section_lines.at(name)) +
                                    ": unknown section [" + name + "]");
            for (const auto& [key, entry] : sec)
                if (!entry.used)
                    throw ScenarioError("line " + std::to_string(entry.line) +
                                        ": unknown key '" + key + "' in [" + name + "]");
        }
    }

  private:
    const Document& doc_;
};

// Fully-resolved scenario in file units; the canonical text is a pure
// function of this record.
struct RawScenario {
    double Gamma_MHz = 0.0, gamma_MHz = 0.0, Omega_GHz = 0.0;
    double v_o = 2e8, v_ac = 2500.0;
    double T_K = 0.0;
    double g1_over_Gamma = 0.0, g2_over_Gamma = 0.0;
    std::string type;
    double r = 0.0, u = 1.0, alpha_re = 0.0, alpha_im = 0.0, eta = 0.0, theta = 0.0;
    double k = 0.0, gamma_smf_MHz = 0.0;
    std::optional<double> beta_b, beta_re;
    std::optional<double> tau1_ns, tau2_ns;  // nullopt = auto
    double tau_s_ns = 0.0;
    std::vector<SweepAxis> axes;
    std::string backend = "analytic";
    int samples_per_stage = 121;
};

inline std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string canonical_text(const RawScenario& raw) {
    std::string s;
    s += "[waveguide]\n";
    s += "Gamma_over_2pi_MHz = " + fmt(raw.Gamma_MHz) + "\n";
    s += "gamma_over_2pi_MHz = " + fmt(raw.gamma_MHz) + "\n";
    s += "Omega_ac_over_2pi_GHz = " + fmt(raw.Omega_GHz) + "\n";
    s += "v_o_m_per_s = " + fmt(raw.v_o) + "\n";
    s += "v_ac_m_per_s = " + fmt(raw.v_ac) + "\n";
    s += "\n[environment]\n";
    s += "T_en_K = " + fmt(raw.T_K) + "\n";
    s += "\n[coupling]\n";
    s += "g1_over_Gamma = " + fmt(raw.g1_over_Gamma) + "\n";
    s += "g2_over_Gamma = " + fmt(raw.g2_over_Gamma) + "\n";
    s += "\n[scenario]\n";
    s += "type = " + raw.type + "\n";
    if (raw.type == "entangled") {
        s += "eta = " + fmt(raw.eta) + "\n";
    } else {
        s += "r = " + fmt(raw.r) + "\n";
        if (raw.type == "squeezed_thermal") s += "u = " + fmt(raw.u) + "\n";
        if (raw.type == "squeezed_coherent") {
            s += "alpha_re = " + fmt(raw.alpha_re) + "\n";
            s += "alpha_im = " + fmt(raw.alpha_im) + "\n";
        }
    }
    s += "theta_rad = " + fmt(raw.theta) + "\n";
    s += "k_per_m = " + fmt(raw.k) + "\n";
    s += "gamma_smf_over_2pi_MHz = " + fmt(raw.gamma_smf_MHz) + "\n";
    if (raw.beta_b) s += "beta_b_rad = " + fmt(*raw.beta_b) + "\n";
    if (raw.beta_re) s += "beta_re_rad = " + fmt(*raw.beta_re) + "\n";
    s += "\n[schedule]\n";
    s += "tau_1_ns = " + (raw.tau1_ns ? fmt(*raw.tau1_ns) : std::string("auto")) + "\n";
    s += "tau_s_ns = " + fmt(raw.tau_s_ns) + "\n";
    s += "tau_2_ns = " + (raw.tau2_ns ? fmt(*raw.tau2_ns) : std::string("auto")) + "\n";
    if (!raw.axes.empty()) {
        s += "\n[sweep]\n";
        for (std::size_t i = 0; i < raw.axes.size(); ++i) {
            std::string base = "axis" + std::to_string(i + 1);
            const SweepAxis& ax = raw.axes[i];
            s += base + "_name = " + ax.name + "\n";
            s += base + "_start = " + fmt(ax.start) + "\n";
            s += base + "_stop = " + fmt(ax.stop) + "\n";
            s += base + "_points = " + std::to_string(ax.points) + "\n";
        }
    }
    s += "\n[output]\n";
    s += "backend = " + raw.backend + "\n";
    s += "samples_per_stage = " + std::to_string(raw.samples_per_stage) + "\n";
    return s;
}

inline ProtocolConfig config_from_raw(const RawScenario& raw) {
    ProtocolConfig cfg;
    cfg.wg.Gamma = raw.Gamma_MHz * two_pi * 1e6;
    cfg.wg.gamma = raw.gamma_MHz * two_pi * 1e6;
    cfg.wg.Omega_ac = raw.Omega_GHz * two_pi * 1e9;
    cfg.wg.v_o = raw.v_o;
    cfg.wg.v_ac = raw.v_ac;
    cfg.env.T_en = raw.T_K;
    cfg.coupling.g1 = raw.g1_over_Gamma * cfg.wg.Gamma;
    cfg.coupling.g2 = raw.g2_over_Gamma * cfg.wg.Gamma;
    if (raw.type == "squeezed_vacuum")
        cfg.scenario.kind = ScenarioKind::squeezed_vacuum;
    else if (raw.type == "squeezed_thermal")
        cfg.scenario.kind = ScenarioKind::squeezed_thermal;
    else if (raw.type == "squeezed_coherent")
        cfg.scenario.kind = ScenarioKind::squeezed_coherent;
    else if (raw.type == "entangled")
        cfg.scenario.kind = ScenarioKind::entangled;
    else
        throw ScenarioError("unknown scenario type '" + raw.type + "'");
    cfg.scenario.r = raw.r;
    cfg.scenario.u = raw.u;
    cfg.scenario.alpha = complex(raw.alpha_re, raw.alpha_im);
    cfg.scenario.eta = raw.eta;
    cfg.scenario.theta = raw.theta;
    cfg.selector.k = raw.k;
    cfg.selector.gamma_smf = raw.gamma_smf_MHz * two_pi * 1e6;
    cfg.phases.beta_b = raw.beta_b;
    cfg.phases.beta_re = raw.beta_re;
    if (raw.tau1_ns) cfg.schedule.tau1 = *raw.tau1_ns * 1e-9;
    if (raw.tau2_ns) cfg.schedule.tau2 = *raw.tau2_ns * 1e-9;
    cfg.schedule.tau_s = raw.tau_s_ns * 1e-9;
    if (raw.backend == "analytic")
        cfg.backend = Backend::analytic;
    else if (raw.backend == "numeric")
        cfg.backend = Backend::numeric;
    else if (raw.backend == "both")
        cfg.backend = Backend::both;
    else
        throw ScenarioError("unknown backend '" + raw.backend + "'");
    cfg.samples_per_stage = raw.samples_per_stage;

    check_params(cfg.wg);
    check_environment(cfg.env);
    check_coupling(cfg.coupling);
    if (cfg.schedule.tau_s < 0.0) throw ScenarioError("tau_s_ns must be non-negative");
    return cfg;
}

inline RawScenario raw_from_config(const ProtocolConfig& cfg, const SweepSpec& sweep) {
    RawScenario raw;
    raw.Gamma_MHz = cfg.wg.Gamma / (two_pi * 1e6);
    raw.gamma_MHz = cfg.wg.gamma / (two_pi * 1e6);
    raw.Omega_GHz = cfg.wg.Omega_ac / (two_pi * 1e9);
    raw.v_o = cfg.wg.v_o;
    raw.v_ac = cfg.wg.v_ac;
    raw.T_K = cfg.env.T_en;
    raw.g1_over_Gamma = cfg.coupling.g1 / cfg.wg.Gamma;
    raw.g2_over_Gamma = cfg.coupling.g2 / cfg.wg.Gamma;
    switch (cfg.scenario.kind) {
        case ScenarioKind::squeezed_vacuum: raw.type = "squeezed_vacuum"; break;
        case ScenarioKind::squeezed_thermal: raw.type = "squeezed_thermal"; break;
        case ScenarioKind::squeezed_coherent: raw.type = "squeezed_coherent"; break;
        case ScenarioKind::entangled: raw.type = "entangled"; break;
    }
    raw.r = cfg.scenario.r;
    raw.u = cfg.scenario.u;
    raw.alpha_re = cfg.scenario.alpha.real();
    raw.alpha_im = cfg.scenario.alpha.imag();
    raw.eta = cfg.scenario.eta;
    raw.theta = cfg.scenario.theta;
    raw.k = cfg.selector.k;
    raw.gamma_smf_MHz = cfg.selector.gamma_smf / (two_pi * 1e6);
    raw.beta_b = cfg.phases.beta_b;
    raw.beta_re = cfg.phases.beta_re;
    if (cfg.schedule.tau1) raw.tau1_ns = *cfg.schedule.tau1 * 1e9;
    if (cfg.schedule.tau2) raw.tau2_ns = *cfg.schedule.tau2 * 1e9;
    raw.tau_s_ns = cfg.schedule.tau_s * 1e9;
    raw.axes = sweep.axes;
    raw.backend = cfg.backend == Backend::analytic ? "analytic"
                  : cfg.backend == Backend::numeric ? "numeric"
                                                    : "both";
    raw.samples_per_stage = cfg.samples_per_stage;
    return raw;
}

}  // namespace scenario_detail

inline ScenarioDocument parse_scenario(const std::string& text) {
    using namespace scenario_detail;
    Document doc = tokenize(text);
    Reader rd(doc);
    RawScenario raw;

    for (const char* sec : {"waveguide", "environment", "coupling", "scenario"})
        if (!rd.has_section(sec))
            throw ScenarioError(std::string("missing required section [") + sec + "]");

    raw.Gamma_MHz = rd.number("waveguide", "Gamma_over_2pi_MHz");
    raw.gamma_MHz = rd.number("waveguide", "gamma_over_2pi_MHz");
    raw.Omega_GHz = rd.number("waveguide", "Omega_ac_over_2pi_GHz");
    raw.v_o = rd.number_or("waveguide", "v_o_m_per_s", 2e8);
    raw.v_ac = rd.number_or("waveguide", "v_ac_m_per_s", 2500.0);

    raw.T_K = rd.number("environment", "T_en_K");

    const Entry* g1_rel = rd.find("coupling", "g1_over_Gamma");
    const Entry* g1_abs = rd.find("coupling", "g1_over_2pi_MHz");
    if (g1_rel && g1_abs)
        throw ScenarioError("line " + std::to_string(g1_abs->line) +
                            ": give g1_over_Gamma or g1_over_2pi_MHz, not both");
    if (!g1_rel && !g1_abs)
        throw ScenarioError("missing required key 'g1_over_Gamma' in [coupling]");
    if (raw.Gamma_MHz <= 0.0) throw ScenarioError("Gamma_over_2pi_MHz must be positive");
    raw.g1_over_Gamma = g1_rel ? Reader::parse_number(*g1_rel, "g1_over_Gamma")
                               : Reader::parse_number(*g1_abs, "g1_over_2pi_MHz") /
                                     raw.Gamma_MHz;
    const Entry* g2_rel = rd.find("coupling", "g2_over_Gamma");
    const Entry* g2_abs = rd.find("coupling", "g2_over_2pi_MHz");
    if (g2_rel && g2_abs)
        throw ScenarioError("line " + std::to_string(g2_abs->line) +
                            ": give g2_over_Gamma or g2_over_2pi_MHz, not both");
    raw.g2_over_Gamma = g2_rel ? Reader::parse_number(*g2_rel, "g2_over_Gamma")
                       : g2_abs ? Reader::parse_number(*g2_abs, "g2_over_2pi_MHz") /
                                      raw.Gamma_MHz
                                : raw.g1_over_Gamma;

    raw.type = rd.word("scenario", "type");
    if (raw.type == "squeezed_vacuum") {
        raw.r = rd.number("scenario", "r");
    } else if (raw.type == "squeezed_thermal") {
        raw.r = rd.number("scenario", "r");
        raw.u = rd.number("scenario", "u");
    } else if (raw.type == "squeezed_coherent") {
        raw.r = rd.number("scenario", "r");
        raw.alpha_re = rd.number_or("scenario", "alpha_re", 0.0);
        raw.alpha_im = rd.number_or("scenario", "alpha_im", 0.0);
    } else if (raw.type == "entangled") {
        raw.eta = rd.number("scenario", "eta");
    } else {
        throw ScenarioError("unknown scenario type '" + raw.type + "'");
    }
    raw.theta = rd.number_or("scenario", "theta_rad", 0.0);
    raw.k = rd.number_or("scenario", "k_per_m", 0.0);
    raw.gamma_smf_MHz = rd.number_or("scenario", "gamma_smf_over_2pi_MHz", 0.0);
    if (const Entry* e = rd.find("scenario", "beta_b_rad"))
        raw.beta_b = Reader::parse_number(*e, "beta_b_rad");
    if (const Entry* e = rd.find("scenario", "beta_re_rad"))
        raw.beta_re = Reader::parse_number(*e, "beta_re_rad");

    if (rd.has_section("schedule")) {
        if (const Entry* e = rd.find("schedule", "tau_1_ns"))
            if (e->value != "auto") raw.tau1_ns = Reader::parse_number(*e, "tau_1_ns");
        raw.tau_s_ns = rd.number_or("schedule", "tau_s_ns", 0.0);
        if (const Entry* e = rd.find("schedule", "tau_2_ns"))
            if (e->value != "auto") raw.tau2_ns = Reader::parse_number(*e, "tau_2_ns");
    }

    if (rd.has_section("output")) {
        raw.backend = rd.word_or("output", "backend", "analytic");
        double sp = rd.number_or("output", "samples_per_stage", 121.0);
        raw.samples_per_stage = int(sp);
        if (raw.samples_per_stage < 9 || double(raw.samples_per_stage) != sp)
            throw ScenarioError("samples_per_stage must be an integer >= 9");
    }

    if (rd.has_section("sweep")) {
        static const std::set<std::string> axis_names{"T_en_K", "g_over_Gamma", "k_per_m",
                                                      "tau_s_ns", "eta", "r"};
        for (const char* prefix : {"axis1", "axis2"}) {
            std::string base(prefix);
            const Entry* name = rd.find("sweep", base + "_name");
            if (!name) {
                if (rd.find("sweep", base + "_start") || rd.find("sweep", base + "_stop") ||
                    rd.find("sweep", base + "_points"))
                    throw ScenarioError("sweep " + base + " needs " + base + "_name");
                continue;
            }
            SweepAxis ax;
            ax.name = name->value;
            if (!axis_names.count(ax.name))
                throw ScenarioError("line " + std::to_string(name->line) +
                                    ": unknown sweep axis '" + ax.name + "'");
            ax.start = rd.number("sweep", base + "_start");
            ax.stop = rd.number("sweep", base + "_stop");
            double pts = rd.number("sweep", base + "_points");
            ax.points = int(pts);
            if (ax.points < 1 || double(ax.points) != pts)
                throw ScenarioError(base + "_points must be an integer >= 1");
            raw.axes.push_back(ax);
        }
        if (raw.axes.empty())
            throw ScenarioError("[sweep] section present but no axis defined");
    }

    rd.finish({"waveguide", "environment", "coupling", "scenario", "schedule", "sweep",
               "output"});

    ScenarioDocument out;
    out.config = config_from_raw(raw);
    out.sweep.axes = raw.axes;
    out.canonical = canonical_text(raw);
    out.hash = fnv1a_hash(out.canonical);
    return out;
}

inline std::string serialize_scenario(const ScenarioDocument& doc) { return doc.canonical; }

inline std::string serialize_scenario(const ProtocolConfig& cfg, const SweepSpec& sweep = {}) {
    return scenario_detail::canonical_text(scenario_detail::raw_from_config(cfg, sweep));
}

inline std::uint64_t config_hash(const ProtocolConfig& cfg, const SweepSpec& sweep = {}) {
    return fnv1a_hash(serialize_scenario(cfg, sweep));
}

}  // namespace oamem
