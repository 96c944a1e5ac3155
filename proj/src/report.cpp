#include "qbath/report.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace qbath {

using nlohmann::json;

namespace {

json diagnostics_json(const EvolutionDiagnostics& d)
{
    return {{"max_trace_error", d.max_trace_error},
            {"max_hermiticity_error", d.max_hermiticity_error},
            {"min_eigenvalue", d.min_eigenvalue},
            {"steps_accepted", d.steps_accepted},
            {"steps_rejected", d.steps_rejected},
            {"rhs_evaluations", d.rhs_evaluations}};
}

json fit_json(const ExponentialFit& f)
{
    return {{"rate", f.rate}, {"asymptote", f.asymptote}, {"amplitude", f.amplitude}, {"residual", f.residual}};
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string format_number(double v)
{
    // shortest text that round-trips
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

} // namespace

json report_to_json(const ScenarioReport& r)
{
    json j;
    j["scenario"] = r.scenario;
    j["config"] = r.config;
    j["target_state"] = r.target;
    j["initial_state"] = r.initial;
    j["hilbert_dimension"] = r.dimension;
    j["observables"] = r.trace_names;
    j["samples"] = r.times.size();

    if (r.steady) {
        const auto& s = *r.steady;
        j["steady_fidelity"] = s.fidelity;
        j["steady_state"] = {{"fidelity", s.fidelity},
                             {"residual", s.residual},
                             {"method", s.method},
                             {"degenerate_nullspace", s.degenerate_nullspace},
                             {"simulated_time_us", s.simulated_time},
                             {"trace_error", s.state.trace_error},
                             {"hermiticity_error", s.state.hermiticity_error},
                             {"min_eigenvalue", s.state.min_eigenvalue},
                             {"cross_check_fidelity", optional_number(s.cross_check_fidelity)},
                             {"cross_check_difference", optional_number(s.cross_check_difference)}};
        if (!s.cross_check_error.empty()) j["steady_state"]["cross_check_error"] = s.cross_check_error;
    } else {
        j["steady_fidelity"] = nullptr;
    }

    if (!r.times.empty()) {
        j["final_fidelity"] = r.final_fidelity();
        j["windowed_fidelity"] = optional_number(r.windowed_fidelity);
        j["diagnostics"] = diagnostics_json(r.diagnostics);
    }
    j["T_s_us"] = optional_number(r.stabilization_time());
    if (r.stabilization_fit) j["stabilization_fit"] = fit_json(*r.stabilization_fit);
    if (!r.fit_error.empty()) j["stabilization_fit_error"] = r.fit_error;
    if (r.three_level_fit) {
        const auto& p = r.three_level_fit->params;
        j["three_level_fit"] = {{"omega_p_MHz", p.omega_p},
                                {"gamma1_per_us", p.gamma1},
                                {"gamma_phi_per_us", p.gamma_phi},
                                {"gamma_s_per_us", p.gamma_s},
                                {"residual", r.three_level_fit->residual}};
    }
    if (!r.three_level_error.empty()) j["three_level_fit_error"] = r.three_level_error;
    return j;
}

std::string traces_csv(const ScenarioReport& r)
{
    std::ostringstream out;
    out << "t_us";
    for (const auto& n : r.trace_names) out << ',' << n;
    out << '\n';
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        out << format_number(r.times[i]);
        for (const auto& t : r.traces) out << ',' << format_number(t[i]);
        out << '\n';
    }
    return out.str();
}

json sweep_to_json(const SweepResult& s)
{
    json points = json::array();
    for (const auto& p : s.points) {
        json row = {{"value", p.value}, {"ok", p.ok}};
        if (p.ok) {
            row["steady_fidelity"] = p.steady_fidelity;
            row["steady_residual"] = p.steady_residual;
            row["steady_method"] = p.steady_method;
        } else {
            row["error"] = p.error;
        }
        if (p.transfer) {
            row["gamma_ST"] = p.transfer->forward;
            row["gamma_TS"] = p.transfer->reverse;
            row["transfer_fit"] = fit_json(p.transfer->fit);
        }
        if (!p.transfer_error.empty()) row["transfer_error"] = p.transfer_error;
        points.push_back(std::move(row));
    }
    return {{"axis", to_string(s.axis)}, {"points", points}};
}

std::string sweep_csv(const SweepResult& s)
{
    std::ostringstream out;
    out << to_string(s.axis) << ",ok,steady_fidelity,gamma_ST,gamma_TS,error\n";
    for (const auto& p : s.points) {
        out << format_number(p.value) << ',' << (p.ok ? 1 : 0) << ',';
        if (p.ok) out << format_number(p.steady_fidelity);
        out << ',';
        if (p.transfer) out << format_number(p.transfer->forward) << ',' << format_number(p.transfer->reverse);
        else out << ',';
        std::string err = p.ok ? p.transfer_error : p.error;
        for (char& c : err) {
            if (c == ',' || c == '\n' || c == '"') c = ' ';
        }
        out << ',' << err << '\n';
    }
    return out.str();
}

std::string spectroscopy_csv(const SpectroscopyResult& s)
{
    std::ostringstream out;
    out << "frequency_MHz,excited";
    for (const auto& l : s.labels) out << ",P_" << l;
    out << '\n';
    for (std::size_t f = 0; f < s.frequencies.size(); ++f) {
        out << format_number(s.frequencies[f]) << ',' << format_number(s.excited[f]);
        for (const auto& p : s.populations) out << ',' << format_number(p[f]);
        out << '\n';
    }
    return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_scenario_outputs(const ScenarioReport& report, const std::filesystem::path& out_dir)
{
    std::filesystem::create_directories(out_dir);
    write_text(out_dir / "report.json", report_to_json(report).dump(2) + "\n");
    write_text(out_dir / "traces.csv", traces_csv(report));
}

} // namespace qbath
