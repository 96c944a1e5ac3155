#include "qbath/device.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qbath/states.hpp"

namespace qbath {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key)
{
    return path.empty() ? key : path + "." + key;
}

std::string at_index(const std::string& path, std::size_t i)
{
    return path + "[" + std::to_string(i) + "]";
}

// Walks one JSON object, remembering which keys were read so leftovers can
// be reported as unknown.
class Fields {
public:
    Fields(const json& obj, std::string path) : obj_(obj), path_(std::move(path))
    {
        if (!obj_.is_object()) {
            throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
        }
    }

    const json* find(const std::string& key)
    {
        used_.insert(key);
        auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    const json& require(const std::string& key)
    {
        const json* v = find(key);
        if (!v) throw ConfigError(join(path_, key), "missing required field");
        return *v;
    }

    double number(const std::string& key) { return as_number(require(key), join(path_, key)); }

    double number_or(const std::string& key, double fallback)
    {
        const json* v = find(key);
        return v ? as_number(*v, join(path_, key)) : fallback;
    }

    std::optional<double> optional_number(const std::string& key)
    {
        const json* v = find(key);
        if (!v || v->is_null()) return std::nullopt;
        return as_number(*v, join(path_, key));
    }

    // Positive time in us; the strings "inf" / "infinity" mean no decay.
    double time_or(const std::string& key, double fallback)
    {
        const json* v = find(key);
        if (!v) return fallback;
        const auto p = join(path_, key);
        if (v->is_string()) {
            const auto s = v->get<std::string>();
            if (s == "inf" || s == "infinity") return kInfinity;
            throw ConfigError(p, "expected a number or \"inf\"");
        }
        return as_number(*v, p);
    }

    std::string string_or(const std::string& key, const std::string& fallback)
    {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_string()) throw ConfigError(join(path_, key), "expected a string");
        return v->get<std::string>();
    }

    std::string string(const std::string& key)
    {
        const json& v = require(key);
        if (!v.is_string()) throw ConfigError(join(path_, key), "expected a string");
        return v.get<std::string>();
    }

    bool boolean_or(const std::string& key, bool fallback)
    {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_boolean()) throw ConfigError(join(path_, key), "expected true or false");
        return v->get<bool>();
    }

    long long integer_or(const std::string& key, long long fallback)
    {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_number_integer()) throw ConfigError(join(path_, key), "expected an integer");
        return v->get<long long>();
    }

    const json& array(const std::string& key)
    {
        const json& v = require(key);
        if (!v.is_array()) throw ConfigError(join(path_, key), "expected an array");
        return v;
    }

    std::string path(const std::string& key) const { return join(path_, key); }

    void finish() const
    {
        for (auto it = obj_.begin(); it != obj_.end(); ++it) {
            if (!used_.count(it.key())) {
                throw ConfigError(join(path_, it.key()), "unknown field");
            }
        }
    }

    static double as_number(const json& v, const std::string& path)
    {
        if (!v.is_number()) throw ConfigError(path, "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ConfigError(path, "must be finite");
        return x;
    }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> used_;
};

std::complex<double> as_complex(const json& v, const std::string& path)
{
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        return {v[0].get<double>(), v[1].get<double>()};
    }
    throw ConfigError(path, "expected a number or [re, im]");
}

json complex_to_json(std::complex<double> z)
{
    if (z.imag() == 0.0) return z.real();
    return json::array({z.real(), z.imag()});
}

json time_to_json(double t)
{
    if (std::isinf(t)) return "inf";
    return t;
}

template <typename Enum>
Enum parse_enum(const std::string& text, const std::string& path,
                const std::vector<std::pair<std::string, Enum>>& options)
{
    std::string allowed;
    for (const auto& [name, value] : options) {
        if (name == text) return value;
        allowed += (allowed.empty() ? "" : ", ") + name;
    }
    throw ConfigError(path, "unknown value '" + text + "' (allowed: " + allowed + ")");
}

const std::vector<std::pair<std::string, DetuningReference>> kReferenceNames{
    {"bare", DetuningReference::bare}, {"target", DetuningReference::target}};
const std::vector<std::pair<std::string, SteadyMethod>> kSteadyNames{
    {"auto", SteadyMethod::automatic}, {"nullspace", SteadyMethod::nullspace}, {"long_time", SteadyMethod::long_time}};
const std::vector<std::pair<std::string, DephasingConvention>> kDephasingNames{
    {"direct", DephasingConvention::direct}, {"pure_dephasing", DephasingConvention::pure_dephasing}};
const std::vector<std::pair<std::string, ResonatorFrame>> kFrameNames{
    {"displaced", ResonatorFrame::displaced}, {"lab", ResonatorFrame::lab}};

template <typename Enum>
std::string enum_name(Enum value, const std::vector<std::pair<std::string, Enum>>& options)
{
    for (const auto& [name, v] : options) {
        if (v == value) return name;
    }
    return "?";
}

QubitParams read_qubit(const json& j, const std::string& path, std::size_t i)
{
    Fields f(j, path);
    QubitParams q;
    q.label = f.string_or("label", "Q" + std::to_string(i + 1));
    q.omega_q = f.number("omega_q");
    q.alpha = f.number("alpha");
    q.t1 = f.time_or("T1", kInfinity);
    q.t2e = f.time_or("T2e", kInfinity);
    q.working_freq = f.number_or("working_freq", q.omega_q);
    f.finish();
    return q;
}

ResonatorParams read_resonator(const json& j, const std::string& path, std::size_t i)
{
    Fields f(j, path);
    ResonatorParams r;
    r.label = f.string_or("label", "R" + std::to_string(i + 1));
    r.omega_r = f.number("omega_r");
    r.kappa = f.number("kappa");
    r.chi = f.number("chi");
    r.g = f.optional_number("g");
    f.finish();
    return r;
}

PumpDrive read_pump(const json& j, const std::string& path, std::size_t i)
{
    Fields f(j, path);
    PumpDrive p;
    p.label = f.string_or("label", "P" + std::to_string(i + 1));
    const json& amps = f.array("amplitudes");
    for (std::size_t k = 0; k < amps.size(); ++k) {
        p.amplitudes.push_back(as_complex(amps[k], at_index(f.path("amplitudes"), k)));
    }
    p.frequency = f.number("frequency");
    p.source_manifold = static_cast<int>(f.integer_or("source_manifold", 0));
    p.enabled = f.boolean_or("enabled", true);
    f.finish();
    return p;
}

RamanChannel read_channel(const json& j, const std::string& path)
{
    Fields f(j, path);
    RamanChannel c;
    c.detuning = f.number("detuning");
    c.amplitude = f.optional_number("amplitude");
    c.n_bar = f.optional_number("n_bar");
    c.enabled = f.boolean_or("enabled", true);
    f.finish();
    return c;
}

} // namespace

std::string to_string(DetuningReference r) { return enum_name(r, kReferenceNames); }
std::string to_string(SteadyMethod m) { return enum_name(m, kSteadyNames); }
std::string to_string(DephasingConvention c) { return enum_name(c, kDephasingNames); }
std::string to_string(ResonatorFrame f) { return enum_name(f, kFrameNames); }

void validate(const ScenarioConfig& c)
{
    const std::size_t n = c.qubits.size();
    if (n == 0) throw ConfigError("qubits", "at least one qubit is required");
    std::set<std::string> labels;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& q = c.qubits[i];
        const auto p = at_index("qubits", i);
        if (!(q.t1 > 0.0)) throw ConfigError(p + ".T1", "must be positive");
        if (!(q.t2e > 0.0)) throw ConfigError(p + ".T2e", "must be positive");
        if (std::isfinite(q.t1) && q.t2e > 2.0 * q.t1 * 1.1) {
            throw ConfigError(p + ".T2e", "exceeds 2*T1 by more than 10%");
        }
        if (!labels.insert(q.label).second) throw ConfigError(p + ".label", "duplicate label '" + q.label + "'");
    }
    if (c.resonators.size() != n) {
        throw ConfigError("resonators", "expected one readout resonator per qubit (" + std::to_string(n) + ")");
    }
    for (std::size_t k = 0; k < c.resonators.size(); ++k) {
        const auto& r = c.resonators[k];
        const auto p = at_index("resonators", k);
        if (!(r.kappa > 0.0)) throw ConfigError(p + ".kappa", "must be positive");
        if (r.g && !(*r.g >= 0.0)) throw ConfigError(p + ".g", "must be non-negative");
        if (!labels.insert(r.label).second) throw ConfigError(p + ".label", "duplicate label '" + r.label + "'");
    }
    if (c.couplings.j.size() + 1 != n) {
        throw ConfigError("couplings.J", "expected " + std::to_string(n - 1) + " values, one per adjacent pair");
    }
    for (std::size_t i = 0; i < c.pumps.size(); ++i) {
        const auto& pump = c.pumps[i];
        const auto p = at_index("pumps", i);
        if (pump.amplitudes.size() != n) {
            throw ConfigError(p + ".amplitudes", "expected " + std::to_string(n) + " entries");
        }
        const bool any = std::any_of(pump.amplitudes.begin(), pump.amplitudes.end(),
                                     [](std::complex<double> z) { return std::abs(z) > 0.0; });
        if (pump.enabled && !any) throw ConfigError(p + ".amplitudes", "an enabled pump needs a nonzero amplitude");
        if (pump.source_manifold < 0 || pump.source_manifold >= static_cast<int>(n) * (c.truncation.qubit_dim - 1)) {
            throw ConfigError(p + ".source_manifold", "outside the excitation manifolds of the register");
        }
    }
    if (c.raman.channels.size() != c.resonators.size()) {
        throw ConfigError("raman.channels", "expected one entry per resonator");
    }
    for (std::size_t k = 0; k < c.raman.channels.size(); ++k) {
        const auto& ch = c.raman.channels[k];
        const auto p = at_index("raman.channels", k);
        if (ch.amplitude.has_value() == ch.n_bar.has_value()) {
            throw ConfigError(p, "give exactly one of amplitude or n_bar");
        }
        if (ch.n_bar && *ch.n_bar < 0.0) throw ConfigError(p + ".n_bar", "must be non-negative");
    }
    if (!is_qubit_state_name(c.target_state, n, c.truncation.qubit_dim)) {
        throw ConfigError("target_state", "unknown state '" + c.target_state + "'");
    }
    if (c.initial_state.name.empty()) {
        const auto& occ = c.initial_state.occupations;
        if (occ.size() != n && occ.size() != 2 * n) {
            throw ConfigError("initial_state", "occupation list must cover the qubits, or qubits and resonators");
        }
        for (std::size_t i = 0; i < occ.size(); ++i) {
            const int dim = i < n ? c.truncation.qubit_dim : c.truncation.resonator_dim;
            if (occ[i] < 0 || occ[i] >= dim) {
                throw ConfigError(at_index("initial_state", i), "occupation exceeds the truncation");
            }
        }
    } else if (!is_qubit_state_name(c.initial_state.name, n, c.truncation.qubit_dim)) {
        throw ConfigError("initial_state", "unknown state '" + c.initial_state.name + "'");
    }
    if (!(c.t_final > 0.0)) throw ConfigError("t_final", "must be positive");
    if (!(c.t_step > 0.0) || c.t_step > c.t_final) throw ConfigError("t_step", "must be in (0, t_final]");
    if (c.truncation.qubit_dim < 2 || c.truncation.qubit_dim > 4) {
        throw ConfigError("truncation.qubit_dim", "must be between 2 and 4");
    }
    if (c.truncation.resonator_dim < 2) throw ConfigError("truncation.resonator_dim", "must be at least 2");
    if (!(c.solver.rtol > 0.0)) throw ConfigError("solver.rtol", "must be positive");
    if (!(c.solver.atol > 0.0)) throw ConfigError("solver.atol", "must be positive");
    if (!(c.solver.steady_tol > 0.0)) throw ConfigError("solver.steady_tol", "must be positive");
    if (c.solver.nullspace_max_dim2 < 1) throw ConfigError("solver.nullspace_max_dim2", "must be positive");
    if (!(c.solver.long_time_max > 0.0)) throw ConfigError("solver.long_time_max", "must be positive");
}

ScenarioConfig scenario_from_json(const json& doc)
{
    Fields root(doc, "");
    ScenarioConfig c;
    c.name = root.string_or("name", "scenario");

    const json& qubits = root.array("qubits");
    for (std::size_t i = 0; i < qubits.size(); ++i) {
        c.qubits.push_back(read_qubit(qubits[i], at_index("qubits", i), i));
    }
    const json& resonators = root.array("resonators");
    for (std::size_t i = 0; i < resonators.size(); ++i) {
        c.resonators.push_back(read_resonator(resonators[i], at_index("resonators", i), i));
    }
    {
        Fields f(root.require("couplings"), "couplings");
        const json& js = f.array("J");
        for (std::size_t i = 0; i < js.size(); ++i) {
            c.couplings.j.push_back(Fields::as_number(js[i], at_index("couplings.J", i)));
        }
        f.finish();
    }
    if (const json* pumps = root.find("pumps")) {
        if (!pumps->is_array()) throw ConfigError("pumps", "expected an array");
        for (std::size_t i = 0; i < pumps->size(); ++i) {
            c.pumps.push_back(read_pump((*pumps)[i], at_index("pumps", i), i));
        }
    }
    {
        Fields f(root.require("raman"), "raman");
        c.raman.reference = parse_enum(f.string_or("detuning_reference", "bare"), f.path("detuning_reference"),
                                       kReferenceNames);
        const json& chans = f.array("channels");
        for (std::size_t i = 0; i < chans.size(); ++i) {
            c.raman.channels.push_back(read_channel(chans[i], at_index("raman.channels", i)));
        }
        f.finish();
    }
    c.target_state = root.string("target_state");
    if (const json* init = root.find("initial_state")) {
        if (init->is_string()) {
            c.initial_state.name = init->get<std::string>();
        } else if (init->is_array()) {
            for (std::size_t i = 0; i < init->size(); ++i) {
                if (!(*init)[i].is_number_integer()) throw ConfigError(at_index("initial_state", i), "expected an integer");
                c.initial_state.occupations.push_back((*init)[i].get<int>());
            }
        } else {
            throw ConfigError("initial_state", "expected a state name or an occupation list");
        }
    } else {
        c.initial_state.name = std::string(c.qubits.size(), 'g');
    }
    c.t_final = root.number_or("t_final", c.t_final);
    c.t_step = root.number_or("t_step", c.t_step);
    if (const json* t = root.find("truncation")) {
        Fields f(*t, "truncation");
        c.truncation.qubit_dim = static_cast<int>(f.integer_or("qubit_dim", c.truncation.qubit_dim));
        c.truncation.resonator_dim = static_cast<int>(f.integer_or("resonator_dim", c.truncation.resonator_dim));
        c.truncation.keep_idle_resonators = f.boolean_or("keep_idle_resonators", false);
        f.finish();
    }
    if (const json* s = root.find("solver")) {
        Fields f(*s, "solver");
        c.solver.rtol = f.number_or("rtol", c.solver.rtol);
        c.solver.atol = f.number_or("atol", c.solver.atol);
        c.solver.steady_method = parse_enum(f.string_or("steady_method", "auto"), f.path("steady_method"), kSteadyNames);
        c.solver.steady_tol = f.number_or("steady_tol", c.solver.steady_tol);
        c.solver.nullspace_max_dim2 = f.integer_or("nullspace_max_dim2", c.solver.nullspace_max_dim2);
        c.solver.long_time_max = f.number_or("long_time_max", c.solver.long_time_max);
        f.finish();
    }
    c.dephasing = parse_enum(root.string_or("dephasing_convention", "direct"), "dephasing_convention", kDephasingNames);
    c.stark_compensation = root.boolean_or("stark_compensation", true);
    c.resonator_frame = parse_enum(root.string_or("resonator_frame", "displaced"), "resonator_frame", kFrameNames);
    c.decoherence = root.boolean_or("decoherence", true);
    root.finish();

    validate(c);
    return c;
}

ScenarioConfig load_scenario(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<document>", std::string("parse error: ") + e.what());
    }
    return scenario_from_json(doc);
}

ScenarioConfig load_scenario_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("<file>", "cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return load_scenario(buf.str());
}

json to_json(const ScenarioConfig& c)
{
    json doc;
    doc["name"] = c.name;
    doc["qubits"] = json::array();
    for (const auto& q : c.qubits) {
        doc["qubits"].push_back({{"label", q.label},
                                 {"omega_q", q.omega_q},
                                 {"alpha", q.alpha},
                                 {"T1", time_to_json(q.t1)},
                                 {"T2e", time_to_json(q.t2e)},
                                 {"working_freq", q.working_freq}});
    }
    doc["resonators"] = json::array();
    for (const auto& r : c.resonators) {
        json jr{{"label", r.label}, {"omega_r", r.omega_r}, {"kappa", r.kappa}, {"chi", r.chi}};
        if (r.g) jr["g"] = *r.g;
        doc["resonators"].push_back(jr);
    }
    doc["couplings"] = {{"J", c.couplings.j}};
    doc["pumps"] = json::array();
    for (const auto& p : c.pumps) {
        json amps = json::array();
        for (auto z : p.amplitudes) amps.push_back(complex_to_json(z));
        doc["pumps"].push_back({{"label", p.label},
                                {"amplitudes", amps},
                                {"frequency", p.frequency},
                                {"source_manifold", p.source_manifold},
                                {"enabled", p.enabled}});
    }
    json chans = json::array();
    for (const auto& ch : c.raman.channels) {
        json jc{{"detuning", ch.detuning}, {"enabled", ch.enabled}};
        if (ch.amplitude) jc["amplitude"] = *ch.amplitude;
        if (ch.n_bar) jc["n_bar"] = *ch.n_bar;
        chans.push_back(jc);
    }
    doc["raman"] = {{"detuning_reference", to_string(c.raman.reference)}, {"channels", chans}};
    doc["target_state"] = c.target_state;
    if (c.initial_state.name.empty()) {
        doc["initial_state"] = c.initial_state.occupations;
    } else {
        doc["initial_state"] = c.initial_state.name;
    }
    doc["t_final"] = c.t_final;
    doc["t_step"] = c.t_step;
    doc["truncation"] = {{"qubit_dim", c.truncation.qubit_dim},
                         {"resonator_dim", c.truncation.resonator_dim},
                         {"keep_idle_resonators", c.truncation.keep_idle_resonators}};
    doc["solver"] = {{"rtol", c.solver.rtol},
                     {"atol", c.solver.atol},
                     {"steady_method", to_string(c.solver.steady_method)},
                     {"steady_tol", c.solver.steady_tol},
                     {"nullspace_max_dim2", c.solver.nullspace_max_dim2},
                     {"long_time_max", c.solver.long_time_max}};
    doc["dephasing_convention"] = to_string(c.dephasing);
    doc["stark_compensation"] = c.stark_compensation;
    doc["resonator_frame"] = to_string(c.resonator_frame);
    doc["decoherence"] = c.decoherence;
    return doc;
}

std::string dump_scenario(const ScenarioConfig& config)
{
    return to_json(config).dump(2) + "\n";
}

QubitRates derive_rates(const QubitParams& q, DephasingConvention convention)
{
    if (!(q.t1 > 0.0)) throw ConfigError("T1", "must be positive");
    if (!(q.t2e > 0.0)) throw ConfigError("T2e", "must be positive");
    QubitRates r;
    r.gamma1 = std::isinf(q.t1) ? 0.0 : 1.0 / q.t1;
    const double echo = std::isinf(q.t2e) ? 0.0 : 1.0 / q.t2e;
    switch (convention) {
    case DephasingConvention::direct:
        r.gamma_phi = echo;
        break;
    case DephasingConvention::pure_dephasing:
        // T2e slightly above 2 T1 is tolerated by validation; no negative rates.
        r.gamma_phi = std::max(0.0, echo - 0.5 * r.gamma1);
        break;
    }
    return r;
}

ChainLevels single_excitation_levels(const ScenarioConfig& config)
{
    const auto n = static_cast<Eigen::Index>(config.qubits.size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        h(i, i) = config.qubits[static_cast<std::size_t>(i)].working_freq;
        if (i + 1 < n) {
            h(i, i + 1) = h(i + 1, i) = -config.couplings.j[static_cast<std::size_t>(i)];
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    ChainLevels out;
    for (Eigen::Index k = 0; k < n; ++k) {
        out.frequencies.push_back(es.eigenvalues()(k));
        Eigen::VectorXd v = es.eigenvectors().col(k);
        out.vectors.emplace_back(v.data(), v.data() + n);
    }
    return out;
}

double named_level_frequency(const ScenarioConfig& config, const std::string& name)
{
    const std::size_t n = config.qubits.size();
    const StateVector psi = qubit_state(name, n, 2);
    // Single-excitation amplitudes in the order (qubit 1 excited, qubit 2 excited, ...).
    const auto space = CompositeSpace::qubits_and_resonators(n, 2, 0, 2);
    Eigen::VectorXcd amps(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<int> occ(n, 0);
        occ[i] = 1;
        amps(static_cast<Eigen::Index>(i)) = psi(space.index_of(occ));
    }
    if (std::abs(amps.squaredNorm() - 1.0) > 1e-12) {
        throw std::invalid_argument("state '" + name + "' is not a single-excitation state");
    }
    const auto levels = single_excitation_levels(config);
    double best = -1.0;
    double freq = 0.0;
    for (std::size_t k = 0; k < levels.frequencies.size(); ++k) {
        std::complex<double> overlap = 0.0;
        for (std::size_t i = 0; i < n; ++i) overlap += amps(static_cast<Eigen::Index>(i)) * levels.vectors[k][i];
        if (std::norm(overlap) > best) {
            best = std::norm(overlap);
            freq = levels.frequencies[k];
        }
    }
    return freq;
}

ScenarioConfig default_bell_scenario()
{
    ScenarioConfig c;
    c.name = "bell";
    c.qubits = {
        {"Q1", 4202.0, -197.0, 27.0, 14.0, 4202.0},
        {"Q2", 4430.0, -189.0, 27.0, 28.0, 4202.0},
    };
    c.resonators = {
        {"R1", 6481.0, 1.1, -0.75, std::nullopt},
        {"R2", 6604.0, 0.87, -0.90, std::nullopt},
    };
    c.couplings.j = {5.0};
    c.target_state = "T";
    c.initial_state.name = "gg";

    const double omega_s = named_level_frequency(c, "S");
    const double omega_t = named_level_frequency(c, "T");
    c.pumps = {{"P1", {0.53, -0.53}, omega_s, 0, true}};

    const double gap = omega_s - omega_t;
    c.raman.reference = DetuningReference::bare;
    c.raman.channels = {
        {gap, std::nullopt, 0.74, true},
        {gap, std::nullopt, 0.60, true},
    };
    c.t_final = 10.0;
    c.t_step = 0.02;
    c.truncation = {2, 4, false};
    return c;
}

ScenarioConfig default_w_scenario()
{
    ScenarioConfig c;
    c.name = "w";
    const double j = 5.0;
    c.qubits = {
        {"Q1", 4202.0, -197.0, 27.0, 14.0, 4179.0},
        {"Q2", 4430.0, -189.0, 27.0, 28.0, 4179.0 + j},
        {"Q3", 4179.0, -199.0, 27.0, 11.0, 4179.0},
    };
    c.resonators = {
        {"R1", 6481.0, 1.1, -0.75, std::nullopt},
        {"R2", 6604.0, 0.87, -0.90, std::nullopt},
        {"R3", 6517.0, 0.88, -0.85, std::nullopt},
    };
    c.couplings.j = {j, j};
    c.target_state = "W";
    c.initial_state.name = "ggg";

    // eigensolver noise rounded off at 1 Hz so the defaults serialize cleanly
    auto level = [&](const char* name) { return std::round(named_level_frequency(c, name) * 1e6) / 1e6; };
    const double omega_w = level("W");
    const double omega_a = level("A");
    const double omega_b = level("B");
    c.pumps = {{"P1", {0.0, 0.74, 0.0}, omega_b, 0, true}};
    c.raman.reference = DetuningReference::bare;
    c.raman.channels = {
        {0.0, std::nullopt, 0.0, true},
        {omega_b - omega_w, std::nullopt, 1.26, true},
        {omega_a - omega_w, std::nullopt, 0.5, true},
    };
    c.t_final = 20.0;
    c.t_step = 0.05;
    c.truncation = {2, 3, false};
    return c;
}

} // namespace qbath
