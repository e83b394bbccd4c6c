#include "twt/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <system_error>
#include <algorithm>
#include <variant>
#include <vector>

#include "twt/errors.hpp"

namespace twt::scenario {

namespace {

using Value = std::variant<double, bool, std::string, std::vector<double>>;

struct ParsedConfig {
    std::string origin;
    std::map<std::string, Value> entries;  // dotted keys
    std::map<std::string, std::size_t> lines;
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

// Strips a trailing comment that is not inside a quoted string.
std::string_view strip_comment(std::string_view s) {
    bool in_string = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') in_string = !in_string;
        if (s[i] == '#' && !in_string) return s.substr(0, i);
    }
    return s;
}

bool parse_number(std::string_view s, double& out) {
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

Value parse_value(std::string_view s, const std::string& key, std::size_t line,
                  const std::string& origin) {
    auto fail = [&](const std::string& what) {
        throw ConfigError(origin + ":" + std::to_string(line) + ": " + key + ": " + what);
    };
    if (s.empty()) fail("missing value");
    if (s.front() == '"') {
        if (s.size() < 2 || s.back() != '"') fail("unterminated string");
        return std::string(s.substr(1, s.size() - 2));
    }
    if (s == "true") return true;
    if (s == "false") return false;
    if (s.front() == '[') {
        if (s.back() != ']') fail("unterminated array");
        std::vector<double> vals;
        std::string_view body = s.substr(1, s.size() - 2);
        while (true) {
            const std::size_t comma = body.find(',');
            const std::string_view item = trim(body.substr(0, comma));
            if (!item.empty()) {
                double v = 0.0;
                if (!parse_number(item, v)) fail("array element is not a number");
                vals.push_back(v);
            } else if (comma != std::string_view::npos) {
                fail("empty array element");
            }
            if (comma == std::string_view::npos) break;
            body = body.substr(comma + 1);
        }
        return vals;
    }
    double v = 0.0;
    if (!parse_number(s, v)) fail("expected a number, string, bool, or array");
    return v;
}

ParsedConfig parse(const std::string& text, const std::string& origin) {
    ParsedConfig cfg;
    cfg.origin = origin;
    std::istringstream is(text);
    std::string raw;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        const std::string_view line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": bad section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (section.empty())
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty section name");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
        const std::string key_local(trim(line.substr(0, eq)));
        if (key_local.empty())
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
        const std::string key = section.empty() ? key_local : section + "." + key_local;
        if (cfg.entries.count(key))
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate key " + key);
        cfg.entries[key] = parse_value(trim(line.substr(eq + 1)), key, line_no, origin);
        cfg.lines[key] = line_no;
    }
    return cfg;
}

/// Typed access that tracks which keys were consumed.
class Reader {
public:
    explicit Reader(const ParsedConfig& cfg) : cfg_(cfg) {}

    bool has(const std::string& key) const { return cfg_.entries.count(key) > 0; }

    double number(const std::string& key, double fallback) {
        if (!has(key)) return fallback;
        return expect<double>(key, "a number");
    }
    int integer(const std::string& key, int fallback) {
        if (!has(key)) return fallback;
        const double v = expect<double>(key, "an integer");
        const double r = std::round(v);
        if (std::abs(v - r) > 1e-9) fail(key, "must be an integer");
        return static_cast<int>(r);
    }
    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        return expect<bool>(key, "a bool");
    }
    std::string text(const std::string& key, const std::string& fallback) {
        if (!has(key)) return fallback;
        return expect<std::string>(key, "a string");
    }
    std::vector<double> array(const std::string& key, std::size_t size) {
        const auto v = expect<std::vector<double>>(key, "an array");
        if (v.size() != size)
            fail(key, "must have exactly " + std::to_string(size) + " elements");
        return v;
    }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        const auto it = cfg_.lines.find(key);
        const std::string loc =
            it == cfg_.lines.end() ? cfg_.origin : cfg_.origin + ":" + std::to_string(it->second);
        throw ConfigError(loc + ": " + key + ": " + what);
    }

    void reject_unconsumed() const {
        for (const auto& [key, value] : cfg_.entries)
            if (!consumed_.count(key)) fail(key, "unknown key");
    }

private:
    template <class T>
    T expect(const std::string& key, const char* kind) {
        consumed_.insert(key);
        const Value& v = cfg_.entries.at(key);
        if (const T* p = std::get_if<T>(&v)) return *p;
        fail(key, std::string("must be ") + kind);
    }

    const ParsedConfig& cfg_;
    std::set<std::string> consumed_;
};

machine::Phase parse_phase(Reader& r, const std::string& key, const std::string& text) {
    if (text == "a" || text == "A") return machine::Phase::A;
    if (text == "b" || text == "B") return machine::Phase::B;
    if (text == "c" || text == "C") return machine::Phase::C;
    r.fail(key, "must be one of \"a\", \"b\", \"c\"");
}

}  // namespace

Verdict judge(const sim::RunMetrics& m, const VerdictThresholds& t) {
    Verdict v;
    auto check = [&](bool ok, const std::string& reason) {
        if (!ok) {
            v.pass = false;
            v.reasons.push_back(reason);
        }
    };
    if (t.require_completion) check(!m.diverged, std::string("run ") + sim::to_string(m.status));
    if (t.psi_error_max) check(m.psi_error_max <= *t.psi_error_max, "psi error above bound");
    if (t.omega_error_rel_max)
        check(std::max(m.omega_error_rel_max[0], m.omega_error_rel_max[1]) <=
                  *t.omega_error_rel_max,
              "omega error above bound");
    if (t.id_max) check(std::max(m.id_max[0], m.id_max[1]) <= *t.id_max, "id above bound");
    if (t.ih_max) check(std::max(m.ih_max[0], m.ih_max[1]) <= *t.ih_max, "ih above bound");
    if (t.phase_sum_max)
        check(std::max(m.phase_sum_max[0], m.phase_sum_max[1]) <= *t.phase_sum_max,
              "phase current sum above bound");
    return v;
}

ScenarioConfig default_config() {
    ScenarioConfig cfg;
    sim::Scenario& sc = cfg.scenario;
    sc.name = "healthy_active";
    // Default physical parameters are desk-scale stand-ins; the published
    // study reports none.
    sc.params.aero = aero::AeroParams{};
    sc.params.machine = machine::MachineParams::from_dq(0.5, 0.2, 3, 8e-3, 4e-3, 1e-3, 0.5, 0.01);
    sc.params.pitch_reference = sc.refs.beta_ref;
    sc.wind = sim::WindProfile::constant(10.0, 0.0);
    sc.law = sim::ControlLaw::Active;
    sc.fault = machine::FaultSpec{};  // healthy
    sc.x0 = sim::operating_point(sc, 0.1);
    return cfg;
}

ScenarioConfig load_string(const std::string& text, const std::string& origin) {
    const ParsedConfig parsed = parse(text, origin);
    Reader r(parsed);
    ScenarioConfig cfg = default_config();
    sim::Scenario& sc = cfg.scenario;

    sc.name = r.text("scenario.name", sc.name);

    aero::AeroParams& ap = sc.params.aero;
    ap.air_density = r.number("aero.rho", ap.air_density);
    ap.blade_radius = r.number("aero.Rp", ap.blade_radius);
    ap.yaw_inertia = r.number("aero.dr", ap.yaw_inertia);
    ap.yaw_friction = r.number("aero.fr", ap.yaw_friction);
    ap.lever_arm = r.number("aero.l", ap.lever_arm);
    ap.pitch_time_constant = r.number("aero.T_beta", ap.pitch_time_constant);
    if (r.has("aero.cd.a")) {
        const auto a = r.array("aero.cd.a", 4);
        std::copy(a.begin(), a.end(), sc.params.cd.a.begin());
    }
    if (r.has("aero.cd.b")) {
        const auto b = r.array("aero.cd.b", 4);
        std::copy(b.begin(), b.end(), sc.params.cd.b.begin());
    }

    {
        const machine::MachineParams& d = sc.params.machine;
        const double rs = r.number("machine.rs", d.stator_resistance);
        const double phi_f = r.number("machine.phi_f", d.magnet_flux);
        const int p = r.integer("machine.p", d.pole_pairs);
        const double Ld = r.number("machine.Ld", d.Ld);
        const double Lq = r.number("machine.Lq", d.Lq);
        const double Lh = r.number("machine.Lh", d.homopolar_inductance());
        const double J = r.number("machine.J", d.inertia);
        const double fv = r.number("machine.fv", d.viscous_friction);
        sc.params.machine = machine::MachineParams::from_dq(rs, phi_f, p, Ld, Lq, Lh, J, fv);
    }

    {
        const std::string kind = r.text("wind.kind", "constant");
        const double speed = r.number("wind.speed", 10.0);
        const double direction = r.number("wind.direction", 0.0);
        if (kind == "constant") {
            sc.wind = sim::WindProfile::constant(speed, direction);
        } else if (kind == "step") {
            sc.wind = sim::WindProfile::step(speed, direction, r.number("wind.t_switch", 3.0),
                                             r.number("wind.speed2", speed),
                                             r.number("wind.direction2", direction));
        } else if (kind == "ramp") {
            sc.wind = sim::WindProfile::ramp(speed, r.number("wind.speed_rate", 0.0), direction,
                                             r.number("wind.direction_rate", 0.0));
        } else if (kind == "turbulence") {
            sc.wind = sim::WindProfile::turbulence(
                speed, direction, r.number("wind.amplitude", 0.5),
                r.integer("wind.n_modes", 8), r.number("wind.freq_lo", 0.5),
                r.number("wind.freq_hi", 6.0),
                static_cast<std::uint64_t>(r.integer("wind.seed", 1)));
        } else {
            r.fail("wind.kind", "must be constant, step, ramp, or turbulence");
        }
    }

    control::References& refs = sc.refs;
    refs.omega_ref1 = r.number("references.omega_ref1", refs.omega_ref1);
    refs.omega_ref2 = r.number("references.omega_ref2", refs.omega_ref2);
    refs.beta_ref = r.number("references.beta_ref", refs.beta_ref);
    if (r.has("references.alpha")) refs.fixed_yaw_target = r.number("references.alpha", 0.0);
    sc.params.pitch_reference = refs.beta_ref;

    machine::FaultSpec& fault = sc.fault;
    fault.severity = r.number("fault.mu", fault.severity);
    fault.turbine = r.integer("fault.turbine", fault.turbine);
    if (r.has("fault.phase")) fault.phase = parse_phase(r, "fault.phase", r.text("fault.phase", "b"));
    fault.onset_time = r.number("fault.t_on", fault.onset_time);

    {
        const std::string law = r.text("controller.law", "active");
        if (law == "active")
            sc.law = sim::ControlLaw::Active;
        else if (law == "passive")
            sc.law = sim::ControlLaw::Passive;
        else if (law == "none")
            sc.law = sim::ControlLaw::None;
        else
            r.fail("controller.law", "must be active, passive, or none");
    }
    control::ControllerGains& g = sc.gains;
    g.K_psi = r.number("controller.K_psi", g.K_psi);
    g.K_omega1 = r.number("controller.K_omega1", g.K_omega1);
    g.K_id1 = r.number("controller.K_id1", g.K_id1);
    g.K_ih1 = r.number("controller.K_ih1", g.K_ih1);
    g.K_omega2 = r.number("controller.K_omega2", g.K_omega2);
    g.K_id2 = r.number("controller.K_id2", g.K_id2);
    g.K_ih2 = r.number("controller.K_ih2", g.K_ih2);
    g.delta = r.number("controller.delta", g.delta);
    g.eps_psi = r.number("controller.eps_psi", g.eps_psi);
    g.eps_omega1 = r.number("controller.eps_omega1", g.eps_omega1);
    g.eps_id1 = r.number("controller.eps_id1", g.eps_id1);
    g.eps_ih1 = r.number("controller.eps_ih1", g.eps_ih1);
    g.eps_omega2 = r.number("controller.eps_omega2", g.eps_omega2);
    g.eps_id2 = r.number("controller.eps_id2", g.eps_id2);
    g.eps_ih2 = r.number("controller.eps_ih2", g.eps_ih2);
    if (r.has("controller.surface_psi")) {
        const auto c = r.array("controller.surface_psi", 2);
        g.psi_surface = {c[0], c[1]};
    }
    if (r.has("controller.surface_omega")) {
        const auto c = r.array("controller.surface_omega", 1);
        g.omega_surface = {c[0]};
    }
    g.passive_id_boost = r.number("controller.passive_id_boost", g.passive_id_boost);

    sim::IntegratorConfig& ic = sc.integrator;
    ic.dt = r.number("integrator.dt", ic.dt);
    ic.t_end = r.number("integrator.t_end", ic.t_end);
    {
        const std::string method = r.text("integrator.method", "rk4");
        if (method == "rk4")
            ic.method = sim::Method::Rk4;
        else if (method == "euler")
            ic.method = sim::Method::Euler;
        else
            r.fail("integrator.method", "must be rk4 or euler");
    }

    sc.metrics_t0 = r.number("metrics.t0", sc.metrics_t0);
    sc.metrics_t1 = r.number("metrics.t1", sc.metrics_t1);
    sc.divergence_current_factor =
        r.number("metrics.divergence_current_factor", sc.divergence_current_factor);

    {
        const std::string kind = r.text("initial.kind", "operating_point");
        if (kind == "operating_point") {
            sc.x0 = sim::operating_point(sc, r.number("initial.psi_offset", 0.1));
        } else if (kind == "explicit") {
            const auto v = r.array("initial.state", plant::PlantState::kSize);
            plant::PlantState::Packed packed{};
            std::copy(v.begin(), v.end(), packed.begin());
            sc.x0 = plant::PlantState::unpack(packed);
        } else {
            r.fail("initial.kind", "must be operating_point or explicit");
        }
    }

    if (r.has("verdict.require_completion"))
        cfg.verdict.require_completion = r.boolean("verdict.require_completion", true);
    if (r.has("verdict.psi_error_max"))
        cfg.verdict.psi_error_max = r.number("verdict.psi_error_max", 0.0);
    if (r.has("verdict.omega_error_rel_max"))
        cfg.verdict.omega_error_rel_max = r.number("verdict.omega_error_rel_max", 0.0);
    if (r.has("verdict.id_max")) cfg.verdict.id_max = r.number("verdict.id_max", 0.0);
    if (r.has("verdict.ih_max")) cfg.verdict.ih_max = r.number("verdict.ih_max", 0.0);
    if (r.has("verdict.phase_sum_max"))
        cfg.verdict.phase_sum_max = r.number("verdict.phase_sum_max", 0.0);

    cfg.out_dir = r.text("output.dir", cfg.out_dir);
    cfg.write_csv = r.boolean("output.csv", cfg.write_csv);
    cfg.csv_stride = r.integer("output.stride", cfg.csv_stride);
    cfg.write_plots = r.boolean("output.plots", cfg.write_plots);
    if (cfg.csv_stride < 1) r.fail("output.stride", "must be >= 1");

    r.reject_unconsumed();
    try {
        cfg.scenario.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    return cfg;
}

ScenarioConfig load_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open config: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return load_string(ss.str(), path);
}

std::string example_config_text() {
    return R"([scenario]
name = "healthy_active"

[aero]
rho = 1.25      # air density (kg/m^3)
Rp = 1.0        # blade radius (m)
dr = 10.0       # yaw inertia (kg*m^2)
fr = 5.0        # yaw friction (N*m*s/rad)
l = 2.0         # lever arm (m)
T_beta = 0.1    # pitch actuator time constant (s)

[machine]
rs = 0.5        # stator resistance (ohm)
phi_f = 0.2     # magnet flux (Wb)
p = 3           # pole pairs
Ld = 0.008      # d-axis inductance (H)
Lq = 0.004      # q-axis inductance (H)
Lh = 0.001      # homopolar inductance (H)
J = 0.5         # rotor inertia (kg*m^2)
fv = 0.01       # viscous friction (N*m*s/rad)

[wind]
kind = "constant"   # constant | step | ramp | turbulence
speed = 10.0
direction = 0.0

[references]
omega_ref1 = 80.0
omega_ref2 = 80.0
beta_ref = 0.1
# alpha = 0.0       # fixed yaw target; omit to track the wind direction

[fault]
mu = 0.0        # severity in [0, 1)
turbine = 1
phase = "b"
t_on = 7.0

[controller]
law = "active"  # active | passive | none

[integrator]
dt = 1e-4
t_end = 10.0
method = "rk4"

[initial]
kind = "operating_point"
psi_offset = 0.1

[output]
dir = "out"
csv = true
stride = 1
plots = false
)";
}

}  // namespace twt::scenario
