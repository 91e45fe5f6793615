#pragma once

// Run configuration: one JSON file, frequencies in MHz, times in us, angles
// in radians. Every key is optional and defaults to the table_s1 profile;
// unknown keys are rejected. Loading fills all defaults into `resolved`, kept
// in file units, so writing it back gives a file that reloads bit-identically.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>  // nlohmann, vendored

#include "cqad/core/error.hpp"
#include "cqad/core/profiles.hpp"
#include "cqad/core/types.hpp"
#include "cqad/core/units.hpp"
#include "cqad/effective/resonance.hpp"
#include "cqad/estimation/fit.hpp"
#include "cqad/tomography/fidelity.hpp"

namespace cqad::io {

using json = nlohmann::ordered_json;

struct SidebandsConfig {
    std::vector<double> depths;  ///< empty uses the drive's modulation depth
    int n_max = 5;
};

struct SpectroscopyConfig {
    double start_mhz = -40.0;  ///< probe offsets from the bare qubit
    double stop_mhz = 40.0;
    int points = 801;
    double Omega_p_mhz = 0.05;
};

struct EffectiveConfig {
    std::vector<std::string> modes;
    std::vector<double> depths;  ///< optional sweep, one operating point per depth
};

struct ChevronConfig {
    std::vector<std::string> modes;
    std::string initial;
    std::vector<std::string> readout;
    std::pair<std::string, std::string> resonance;
    double span_mhz = 0.0;
    int delta_points = 0;
    double tau_max_us = 0.0;
    int tau_points = 0;
    int smoothing = 1;
    double noise_sigma = 0.0;
    double modulation_depth = 0.0;  ///< overrides the operating point's depth when nonzero
};

struct HomConfig {
    std::vector<double> taus_us;
    bool include_half_swap = true;  ///< adds pi / (4 |g_bc|)
    bool decoherence = true;
    bool residual_jc = false;
    int cutoff = 4;
    std::optional<std::pair<double, double>> preparation;
    double band = 0.0;  ///< relative g spread of an uncertainty band; 0 disables
};

struct TomographyConfig {
    std::filesystem::path records;  ///< empty synthesizes records from the target
    double target_fidelity = 0.69;
    double target_phi = 0.0;
    long shots = 5000;
    int bootstrap = 100;
    bool multinomial = false;
    std::vector<StepFidelity> chain_a;
    std::vector<StepFidelity> chain_b;
};

struct FitConfig {
    std::filesystem::path dataset;
    std::vector<std::string> free;
    ParamMap init;   ///< overrides of the predicted starting values
    ParamMap fixed;  ///< overrides of the predicted fixed values
    double readout_g_infidelity = 0.06;
    bool error_bars = true;
    double threshold = 0.05;
    int random_starts = 0;
};

struct CalibrateConfig {
    double delta_mhz = 0.0;
    std::vector<std::pair<double, double>> points;  ///< (DAC amplitude, qubit MHz)
    double synthetic_eta_mhz = 0.0;                   ///< used when points is empty
    std::vector<double> synthetic_dac;
    double synthetic_noise_mhz = 0.0;
};

struct OracleConfig {
    double duration_us = 50.0;
    int points = 501;
    bool full_model = true;
};

struct RunConfig {
    DeviceParameters device;
    std::optional<DriveConfiguration> drive;  ///< explicit drive; otherwise designed
    OperatingPointRequest operating_point;
    std::uint64_t rng_seed = 1;
    SidebandsConfig sidebands;
    SpectroscopyConfig spectroscopy;
    EffectiveConfig effective;
    ChevronConfig chevron;
    ChevronConfig three_mode;
    HomConfig hom;
    TomographyConfig tomography;
    FitConfig fit;
    CalibrateConfig calibrate;
    OracleConfig oracle;
    json resolved;

    /// Device and drive actually simulated; designing an operating point
    /// retunes the qubit.
    std::pair<DeviceParameters, DriveConfiguration> device_and_drive() const {
        if (drive) return {device, *drive};
        const auto op = design_operating_point(device, operating_point);
        return {op.device, op.drive};
    }

    /// Same configuration at a different modulation depth.
    std::pair<DeviceParameters, DriveConfiguration> device_and_drive(double depth) const {
        OperatingPointRequest r = operating_point;
        r.modulation_depth = depth;
        const auto op = design_operating_point(device, r);
        return {op.device, op.drive};
    }
};

namespace detail {

/// Reads one JSON object, copying every value (or its default) into `out`.
class Section {
public:
    Section(const json* in, std::string path, json& out) : in_(in), path_(std::move(path)), out_(out) {
        if (in_ && !in_->is_object()) fail(ErrorCode::ParseError, where() + ": expected an object");
        out_ = json::object();
    }

    bool has(const std::string& key) const { return in_ && in_->contains(key); }

    double number(const std::string& key, double def) {
        const json* v = take(key);
        if (v && !v->is_number()) type_error(key, "a number");
        const double x = v ? v->get<double>() : def;
        out_[key] = x;
        return x;
    }

    long integer(const std::string& key, long def) {
        const json* v = take(key);
        if (v && !v->is_number_integer()) type_error(key, "an integer");
        const long x = v ? v->get<long>() : def;
        out_[key] = x;
        return x;
    }

    bool boolean(const std::string& key, bool def) {
        const json* v = take(key);
        if (v && !v->is_boolean()) type_error(key, "true or false");
        const bool x = v ? v->get<bool>() : def;
        out_[key] = x;
        return x;
    }

    std::string text(const std::string& key, const std::string& def) {
        const json* v = take(key);
        if (v && !v->is_string()) type_error(key, "a string");
        std::string x = v ? v->get<std::string>() : def;
        out_[key] = x;
        return x;
    }

    std::vector<double> numbers(const std::string& key, const std::vector<double>& def) {
        const json* v = take(key);
        std::vector<double> x = def;
        if (v) {
            if (!v->is_array()) type_error(key, "an array of numbers");
            x.clear();
            for (const auto& e : *v) {
                if (!e.is_number()) type_error(key, "an array of numbers");
                x.push_back(e.get<double>());
            }
        }
        out_[key] = x;
        return x;
    }

    std::vector<std::string> texts(const std::string& key, const std::vector<std::string>& def) {
        const json* v = take(key);
        std::vector<std::string> x = def;
        if (v) {
            if (!v->is_array()) type_error(key, "an array of strings");
            x.clear();
            for (const auto& e : *v) {
                if (!e.is_string()) type_error(key, "an array of strings");
                x.push_back(e.get<std::string>());
            }
        }
        out_[key] = x;
        return x;
    }

    Section child(const std::string& key) {
        const json* v = take(key);
        return Section(v, path_.empty() ? key : path_ + "." + key, out_[key]);
    }

    /// Raw value for structured fields; marks the key as read.
    const json* raw(const std::string& key) { return take(key); }
    json& out(const std::string& key) { return out_[key]; }
    std::string where(const std::string& key = "") const {
        if (key.empty()) return path_.empty() ? "<root>" : path_;
        return path_.empty() ? key : path_ + "." + key;
    }

    [[noreturn]] void type_error(const std::string& key, const std::string& expected) const {
        fail(ErrorCode::ParseError, where(key) + ": expected " + expected);
    }

    void finish() const {
        if (!in_) return;
        for (auto it = in_->begin(); it != in_->end(); ++it)
            if (!seen_.contains(it.key())) fail(ErrorCode::ParseError, where(it.key()) + ": unknown key");
    }

private:
    const json* take(const std::string& key) {
        seen_.insert(key);
        if (!in_) return nullptr;
        const auto it = in_->find(key);
        return it == in_->end() ? nullptr : &*it;
    }

    const json* in_;
    std::string path_;
    json& out_;
    std::set<std::string> seen_;
};

inline void check(bool ok, const std::string& what) { require(ok, ErrorCode::ValidationError, what); }

inline QubitParams read_qubit(Section s) {
    using namespace table_s1;
    QubitParams q;
    q.omega_q = to_angular(s.number("omega_q_mhz", omega_q_mhz));
    q.alpha = to_angular(s.number("alpha_mhz", alpha_mhz));
    q.t1 = s.number("t1_us", t1_us);
    q.t2_star = s.number("t2_star_us", t2_star_us);
    q.t2_echo = s.number("t2_echo_us", t2_echo_us);
    s.finish();
    return q;
}

inline DeviceParameters read_device(Section s) {
    DeviceParameters dev = table_s1_device();
    dev.qubit = read_qubit(s.child("qubit"));
    const double fsr_mhz = s.number("fsr_mhz", table_s1::fsr_mhz);
    dev.ladder.fsr = to_angular(fsr_mhz);
    const json* modes = s.raw("modes");
    json& out = s.out("modes");
    out = json::array();
    if (modes) {
        if (!modes->is_array()) s.type_error("modes", "an array of mode objects");
        dev.ladder.modes.clear();
        for (std::size_t i = 0; i < modes->size(); ++i) {
            json entry;
            Section m(&(*modes)[i], s.where("modes") + "[" + std::to_string(i) + "]", entry);
            ModeSpec spec;
            spec.label = m.text("label", "");
            check(!spec.label.empty(), m.where("label") + ": label must be non-empty");
            check(spec.label.find_first_of(",\" \n") == std::string::npos, m.where("label") + ": label must be a plain word");
            spec.omega_m = to_angular(m.number("omega_mhz", std::nan("")));
            spec.g_m = to_angular(m.number("g_mhz", std::nan("")));
            spec.gamma_m = to_angular(m.number("gamma_mhz", std::nan("")));
            for (const char* k : {"omega_mhz", "g_mhz", "gamma_mhz"})
                if (!m.has(k)) fail(ErrorCode::ParseError, m.where(k) + ": required");
            m.finish();
            out.push_back(entry);
            dev.ladder.modes.push_back(spec);
        }
    } else {
        for (const auto& m : dev.ladder.modes)
            out.push_back(json{{"label", m.label},
                               {"omega_mhz", to_mhz(m.omega_m)},
                               {"g_mhz", to_mhz(m.g_m)},
                               {"gamma_mhz", to_mhz(m.gamma_m)}});
        // rebuild from the written values so a reload is bit-identical
        for (std::size_t i = 0; i < dev.ladder.modes.size(); ++i) {
            auto& m = dev.ladder.modes[i];
            m.omega_m = to_angular(out[i]["omega_mhz"].get<double>());
            m.g_m = to_angular(out[i]["g_mhz"].get<double>());
            m.gamma_m = to_angular(out[i]["gamma_mhz"].get<double>());
        }
    }
    s.finish();
    try {
        validate(dev);
    } catch (const Error& e) {
        fail(ErrorCode::ValidationError, "device: " + std::string(e.what()));
    }
    return dev;
}

inline DriveConfiguration read_drive(Section s) {
    DriveConfiguration d;
    for (const char* k : {"omega_1_mhz", "omega_2_mhz", "Omega_1_mhz", "Omega_2_mhz"})
        if (!s.has(k)) fail(ErrorCode::ParseError, s.where(k) + ": required");
    d.omega_1 = to_angular(s.number("omega_1_mhz", 0.0));
    d.omega_2 = to_angular(s.number("omega_2_mhz", 0.0));
    d.Omega_1 = to_angular(s.number("Omega_1_mhz", 0.0));
    d.Omega_2 = to_angular(s.number("Omega_2_mhz", 0.0));
    d.phi = s.number("phi", 0.0);
    s.finish();
    try {
        validate(d);
    } catch (const Error& e) {
        fail(ErrorCode::ValidationError, "drive: " + std::string(e.what()));
    }
    return d;
}

inline OperatingPointRequest read_operating_point(Section s, const DeviceParameters& dev) {
    OperatingPointRequest r;
    r.modulation_depth = s.number("modulation_depth", two_mode_default_depth);
    r.reference_mode = s.text("reference_mode", "b");
    r.detuning_tilde = to_angular(s.number("detuning_tilde_mhz", 1.0));
    r.mode_m = s.text("mode_m", "b");
    r.mode_k = s.text("mode_k", "c");
    r.step = static_cast<int>(s.integer("step", 1));
    r.delta_1 = to_angular(s.number("delta_1_mhz", table_s1::delta_1_mhz));
    s.finish();
    check(r.modulation_depth > 0.0, s.where("modulation_depth") + ": must be > 0");
    check(r.step >= 1, s.where("step") + ": must be >= 1");
    check(r.delta_1 > 0.0, s.where("delta_1_mhz") + ": must be > 0");
    for (const auto& m : {r.reference_mode, r.mode_m, r.mode_k})
        check(dev.ladder.find(m).has_value(), s.where() + ": unknown mode '" + m + "'");
    return r;
}

inline void check_modes(const DeviceParameters& dev, const std::vector<std::string>& modes, const std::string& where) {
    for (const auto& m : modes) check(dev.ladder.find(m).has_value(), where + ": unknown mode '" + m + "'");
}

inline ChevronConfig read_chevron(Section s, ChevronConfig d, const DeviceParameters& dev, bool explicit_drive) {
    d.modes = s.texts("modes", d.modes);
    d.initial = s.text("initial", d.initial);
    d.readout = s.texts("readout", d.readout);
    const auto pair = s.texts("resonance_pair", {d.resonance.first, d.resonance.second});
    d.span_mhz = s.number("span_mhz", d.span_mhz);
    d.delta_points = static_cast<int>(s.integer("delta_points", d.delta_points));
    d.tau_max_us = s.number("tau_max_us", d.tau_max_us);
    d.tau_points = static_cast<int>(s.integer("tau_points", d.tau_points));
    d.smoothing = static_cast<int>(s.integer("smoothing", d.smoothing));
    d.noise_sigma = s.number("noise_sigma", d.noise_sigma);
    d.modulation_depth = s.number("modulation_depth", d.modulation_depth);
    s.finish();
    check(d.modulation_depth >= 0.0, s.where("modulation_depth") + ": must be >= 0");
    check(!(explicit_drive && d.modulation_depth != 0.0),
          s.where("modulation_depth") + ": only applies to a designed operating point");
    check(pair.size() == 2, s.where("resonance_pair") + ": needs two modes");
    d.resonance = {pair[0], pair[1]};
    check(d.modes.size() >= 2, s.where("modes") + ": needs at least two modes");
    check_modes(dev, d.modes, s.where("modes"));
    check(std::find(d.modes.begin(), d.modes.end(), d.initial) != d.modes.end(), s.where("initial") + ": not in modes");
    for (const auto& m : d.readout)
        check(std::find(d.modes.begin(), d.modes.end(), m) != d.modes.end(), s.where("readout") + ": '" + m + "' not in modes");
    for (const auto& m : pair)
        check(std::find(d.modes.begin(), d.modes.end(), m) != d.modes.end(), s.where("resonance_pair") + ": '" + m + "' not in modes");
    check(dev.ladder.index_of(pair[0]) < dev.ladder.index_of(pair[1]),
          s.where("resonance_pair") + ": lower mode first");
    check(d.span_mhz > 0.0, s.where("span_mhz") + ": must be > 0");
    check(d.delta_points >= 2 && d.tau_points >= 2, s.where() + ": grids need at least two points");
    check(d.tau_max_us > 0.0, s.where("tau_max_us") + ": must be > 0");
    check(d.smoothing >= 1 && d.smoothing % 2 == 1, s.where("smoothing") + ": must be odd and >= 1");
    check(d.noise_sigma >= 0.0, s.where("noise_sigma") + ": must be >= 0");
    return d;
}

inline std::vector<StepFidelity> read_chain(Section& s, const std::string& key, const std::vector<StepFidelity>& def) {
    const json* v = s.raw(key);
    json& out = s.out(key);
    out = json::array();
    std::vector<StepFidelity> chain;
    if (!v) {
        chain = def;
    } else {
        if (!v->is_array()) s.type_error(key, "an array of steps");
        for (std::size_t i = 0; i < v->size(); ++i) {
            json tmp;
            Section st(&(*v)[i], s.where(key) + "[" + std::to_string(i) + "]", tmp);
            chain.push_back({st.text("name", "step"), st.number("g", 1.0), st.number("e", 1.0)});
            st.finish();
        }
    }
    for (const auto& st : chain) out.push_back(json{{"name", st.name}, {"g", st.g}, {"e", st.e}});
    try {
        compose_chain(chain);
    } catch (const Error& e) {
        fail(ErrorCode::ValidationError, s.where(key) + ": " + e.what());
    }
    return chain;
}

inline ParamMap read_params(Section& s, const std::string& key) {
    const json* v = s.raw(key);
    json& out = s.out(key);
    out = json::object();
    ParamMap p;
    if (!v) return p;
    if (!v->is_object()) s.type_error(key, "an object of parameter values");
    const auto names = fit_parameter_names();
    for (auto it = v->begin(); it != v->end(); ++it) {
        const std::string k = it.key();
        const std::string name = k.ends_with("_mhz") ? k.substr(0, k.size() - 4) : "";
        check(std::find(names.begin(), names.end(), name) != names.end(), s.where(key) + "." + k + ": unknown parameter");
        if (!it->is_number()) s.type_error(key + "." + k, "a number");
        p[name] = to_angular(it->get<double>());
        out[k] = it->get<double>();
    }
    return p;
}

inline std::filesystem::path resolve_path(const std::string& p, const std::filesystem::path& base) {
    if (p.empty()) return {};
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

}  // namespace detail

/// Builds a configuration from parsed JSON. Relative paths resolve against base_dir.
inline RunConfig parse_config(const json& root, const std::filesystem::path& base_dir = ".") {
    using detail::check;
    RunConfig c;
    detail::Section top(&root, "", c.resolved);
    const std::string profile = top.text("profile", "table_s1");
    check(profile == "table_s1", "profile: only 'table_s1' is built in");
    c.device = detail::read_device(top.child("device"));

    const bool has_drive = top.has("drive"), has_op = top.has("operating_point");
    check(!(has_drive && has_op), "drive and operating_point are mutually exclusive");
    if (has_drive) {
        c.drive = detail::read_drive(top.child("drive"));
    } else {
        c.operating_point = detail::read_operating_point(top.child("operating_point"), c.device);
    }
    const long seed = top.integer("rng_seed", 1);
    check(seed >= 0, "rng_seed: must be >= 0");
    c.rng_seed = static_cast<std::uint64_t>(seed);

    {
        auto s = top.child("sidebands");
        c.sidebands.depths = s.numbers("depths", {});
        c.sidebands.n_max = static_cast<int>(s.integer("n_max", 5));
        s.finish();
        check(c.sidebands.n_max >= 0 && c.sidebands.n_max <= 200, "sidebands.n_max: must lie in [0, 200]");
    }
    {
        auto s = top.child("spectroscopy");
        auto& p = c.spectroscopy;
        p.start_mhz = s.number("start_mhz", p.start_mhz);
        p.stop_mhz = s.number("stop_mhz", p.stop_mhz);
        p.points = static_cast<int>(s.integer("points", p.points));
        p.Omega_p_mhz = s.number("Omega_p_mhz", p.Omega_p_mhz);
        s.finish();
        check(p.stop_mhz > p.start_mhz, "spectroscopy: stop_mhz must exceed start_mhz");
        check(p.points >= 2, "spectroscopy.points: must be >= 2");
        check(p.Omega_p_mhz >= 0.0, "spectroscopy.Omega_p_mhz: must be >= 0");
    }
    {
        auto s = top.child("effective");
        c.effective.modes = s.texts("modes", {"a", "b", "c"});
        c.effective.depths = s.numbers("depths", {});
        s.finish();
        check(c.effective.modes.size() >= 2, "effective.modes: needs at least two modes");
        detail::check_modes(c.device, c.effective.modes, "effective.modes");
        for (double x : c.effective.depths) check(x > 0.0, "effective.depths: must be > 0");
    }
    {
        ChevronConfig two;
        two.modes = {"b", "c"};
        two.initial = "b";
        two.readout = {"b", "c"};
        two.resonance = {"b", "c"};
        two.span_mhz = 0.14;
        two.delta_points = 71;
        two.tau_max_us = 50.0;
        two.tau_points = 100;
        c.chevron = detail::read_chevron(top.child("chevron"), two, c.device, has_drive);
        ChevronConfig three = two;
        three.modes = {"d", "a", "b", "c", "e"};
        three.readout = {"a", "b", "c"};
        three.resonance = {"a", "c"};
        three.modulation_depth = has_drive ? 0.0 : regime_finder(Regime::ThreeModeEqual);
        c.three_mode = detail::read_chevron(top.child("three_mode"), three, c.device, has_drive);
    }
    {
        auto s = top.child("hom");
        auto& h = c.hom;
        h.taus_us = s.numbers("taus_us", {6.7});
        h.include_half_swap = s.boolean("include_half_swap", true);
        h.decoherence = s.boolean("decoherence", true);
        h.residual_jc = s.boolean("residual_jc", false);
        h.cutoff = static_cast<int>(s.integer("cutoff", 4));
        h.band = s.number("band", 0.0);
        const json* prep = s.raw("preparation");
        json& out = s.out("preparation");
        out = nullptr;
        if (prep && !prep->is_null()) {
            if (!prep->is_array() || prep->size() != 2 || !(*prep)[0].is_number() || !(*prep)[1].is_number())
                s.type_error("preparation", "null or [p_b, p_c]");
            h.preparation = std::pair{(*prep)[0].get<double>(), (*prep)[1].get<double>()};
            out = json::array({h.preparation->first, h.preparation->second});
            check(h.preparation->first >= 0.0 && h.preparation->first <= 1.0 && h.preparation->second >= 0.0 &&
                      h.preparation->second <= 1.0,
                  "hom.preparation: probabilities must lie in [0, 1]");
        }
        s.finish();
        for (double t : h.taus_us) check(t >= 0.0, "hom.taus_us: must be >= 0");
        check(!h.taus_us.empty() || h.include_half_swap, "hom: no gate times");
        check(h.cutoff >= 3 && h.cutoff <= 8, "hom.cutoff: must lie in [3, 8]");
        check(h.band >= 0.0 && h.band < 1.0, "hom.band: must lie in [0, 1)");
    }
    {
        auto s = top.child("tomography");
        auto& t = c.tomography;
        t.records = detail::resolve_path(s.text("records", ""), base_dir);
        s.out("records") = t.records.empty() ? "" : std::filesystem::absolute(t.records).lexically_normal().string();
        t.target_fidelity = s.number("target_fidelity", 0.69);
        t.target_phi = s.number("target_phi", 0.0);
        t.shots = s.integer("shots", 5000);
        t.bootstrap = static_cast<int>(s.integer("bootstrap", 100));
        const std::string lk = s.text("likelihood", "gaussian");
        check(lk == "gaussian" || lk == "multinomial", "tomography.likelihood: 'gaussian' or 'multinomial'");
        t.multinomial = lk == "multinomial";
        t.chain_a = detail::read_chain(s, "chain_a", reference_chain_a());
        t.chain_b = detail::read_chain(s, "chain_b", reference_chain_b());
        s.finish();
        check(t.target_fidelity >= 0.0 && t.target_fidelity <= 1.0, "tomography.target_fidelity: must lie in [0, 1]");
        check(t.shots >= 0, "tomography.shots: must be >= 0");
        check(t.bootstrap == 0 || t.bootstrap >= 100, "tomography.bootstrap: 0 or >= 100");
    }
    {
        auto s = top.child("fit");
        auto& f = c.fit;
        f.dataset = detail::resolve_path(s.text("dataset", ""), base_dir);
        s.out("dataset") = f.dataset.empty() ? "" : std::filesystem::absolute(f.dataset).lexically_normal().string();
        f.free = s.texts("free", default_free_parameters());
        f.init = detail::read_params(s, "init");
        f.fixed = detail::read_params(s, "fixed");
        f.readout_g_infidelity = s.number("readout_g_infidelity", 0.06);
        f.error_bars = s.boolean("error_bars", true);
        f.threshold = s.number("threshold", 0.05);
        f.random_starts = static_cast<int>(s.integer("random_starts", 0));
        s.finish();
        const auto names = fit_parameter_names();
        for (const auto& n : f.free)
            check(std::find(names.begin(), names.end(), n) != names.end(), "fit.free: unknown parameter '" + n + "'");
        check(f.readout_g_infidelity >= 0.0 && f.readout_g_infidelity < 1.0, "fit.readout_g_infidelity: must lie in [0, 1)");
        check(f.threshold > 0.0, "fit.threshold: must be > 0");
        check(f.random_starts >= 0, "fit.random_starts: must be >= 0");
    }
    {
        auto s = top.child("calibrate");
        auto& k = c.calibrate;
        k.delta_mhz = s.number("delta_mhz", table_s1::delta_1_mhz);
        const json* pts = s.raw("points");
        json& out = s.out("points");
        out = json::array();
        if (pts) {
            if (!pts->is_array()) s.type_error("points", "an array of {dac, qubit_mhz}");
            for (std::size_t i = 0; i < pts->size(); ++i) {
                json tmp;
                detail::Section p(&(*pts)[i], "calibrate.points[" + std::to_string(i) + "]", tmp);
                for (const char* key : {"dac", "qubit_mhz"})
                    if (!p.has(key)) fail(ErrorCode::ParseError, p.where(key) + ": required");
                k.points.emplace_back(p.number("dac", 0.0), p.number("qubit_mhz", 0.0));
                p.finish();
                out.push_back(tmp);
            }
        }
        k.synthetic_eta_mhz = s.number("synthetic_eta_mhz", 20.0);
        k.synthetic_dac = s.numbers("synthetic_dac", {0.0, 1.0, 2.0, 3.0, 4.0, 5.0});
        k.synthetic_noise_mhz = s.number("synthetic_noise_mhz", 0.01);
        s.finish();
        check(k.delta_mhz != 0.0, "calibrate.delta_mhz: must be nonzero");
        check(k.synthetic_noise_mhz >= 0.0, "calibrate.synthetic_noise_mhz: must be >= 0");
    }
    {
        auto s = top.child("oracle");
        auto& o = c.oracle;
        o.duration_us = s.number("duration_us", 50.0);
        o.points = static_cast<int>(s.integer("points", o.points));
        o.full_model = s.boolean("full_model", true);
        s.finish();
        check(o.duration_us > 0.0, "oracle.duration_us: must be > 0");
        check(o.points >= 16, "oracle.points: must be >= 16");
    }
    top.finish();
    return c;
}

inline RunConfig parse_config_text(const std::string& text, const std::string& name = "<config>",
                                   const std::filesystem::path& base_dir = ".") {
    require(text.find_first_not_of(" \t\r\n") != std::string::npos, ErrorCode::ParseError, name + ": empty file");
    json root;
    try {
        root = json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        fail(ErrorCode::ParseError, name + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
    }
    require(root.is_object(), ErrorCode::ParseError, name + ": top level must be an object");
    return parse_config(root, base_dir);
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(in.good(), ErrorCode::IoError, "cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.string(), path.parent_path().empty() ? "." : path.parent_path());
}

}  // namespace cqad::io
