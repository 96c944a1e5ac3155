#include "qbath/states.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace qbath {

namespace {

constexpr char kLevelLetters[] = "gefh";

struct Component {
    const char* label;
    double weight;
};

// Unnormalized superpositions; normalized on construction.
const std::vector<std::pair<std::string, std::vector<Component>>>& two_qubit_named()
{
    static const std::vector<std::pair<std::string, std::vector<Component>>> table{
        {"T", {{"ge", 1.0}, {"eg", 1.0}}},
        {"S", {{"eg", 1.0}, {"ge", -1.0}}},
    };
    return table;
}

const std::vector<std::pair<std::string, std::vector<Component>>>& three_qubit_named()
{
    static const std::vector<std::pair<std::string, std::vector<Component>>> table{
        {"W", {{"gge", 1.0}, {"geg", 1.0}, {"egg", 1.0}}},
        {"A", {{"gge", 1.0}, {"egg", -1.0}}},
        {"B", {{"gge", 1.0}, {"geg", -2.0}, {"egg", 1.0}}},
        {"C", {{"eeg", 1.0}, {"ege", 2.0}, {"gee", 1.0}}},
        {"D", {{"eeg", 1.0}, {"gee", -1.0}}},
        {"E", {{"eeg", 1.0}, {"ege", -1.0}, {"gee", 1.0}}},
    };
    return table;
}

const std::vector<Component>* find_named(const std::string& name, std::size_t n_qubits)
{
    const auto* table = n_qubits == 2 ? &two_qubit_named() : n_qubits == 3 ? &three_qubit_named() : nullptr;
    if (!table) return nullptr;
    for (const auto& [key, comps] : *table) {
        if (key == name) return &comps;
    }
    return nullptr;
}

bool is_basis_label(const std::string& name, std::size_t n_qubits, int qubit_dim)
{
    if (name.size() != n_qubits) return false;
    for (char ch : name) {
        bool ok = false;
        for (int k = 0; k < qubit_dim && k < 4; ++k) {
            ok = ok || ch == kLevelLetters[k];
        }
        if (!ok) return false;
    }
    return true;
}

CompositeSpace register_space(std::size_t n_qubits, int qubit_dim)
{
    return CompositeSpace::qubits_and_resonators(n_qubits, qubit_dim, 0, 2);
}

} // namespace

std::vector<int> occupations_from_label(const std::string& label, int qubit_dim)
{
    std::vector<int> occ;
    occ.reserve(label.size());
    for (char ch : label) {
        int level = -1;
        for (int k = 0; k < 4; ++k) {
            if (ch == kLevelLetters[k]) level = k;
        }
        if (level < 0 || level >= qubit_dim) {
            throw std::invalid_argument("basis label '" + label + "' has a level outside the qubit truncation");
        }
        occ.push_back(level);
    }
    return occ;
}

bool is_qubit_state_name(const std::string& name, std::size_t n_qubits, int qubit_dim)
{
    return is_basis_label(name, n_qubits, qubit_dim) || find_named(name, n_qubits) != nullptr;
}

StateVector qubit_state(const std::string& name, std::size_t n_qubits, int qubit_dim)
{
    const auto space = register_space(n_qubits, qubit_dim);
    if (is_basis_label(name, n_qubits, qubit_dim)) {
        return basis_state(space, occupations_from_label(name, qubit_dim));
    }
    const auto* comps = find_named(name, n_qubits);
    if (!comps) {
        throw std::invalid_argument("unknown state '" + name + "' for " + std::to_string(n_qubits) + " qubits");
    }
    StateVector psi = StateVector::Zero(space.total_dim());
    for (const auto& c : *comps) {
        psi(space.index_of(occupations_from_label(c.label, qubit_dim))) += c.weight;
    }
    return psi / psi.norm();
}

std::vector<std::string> basis_labels(std::size_t n_qubits, int qubit_dim)
{
    const auto space = register_space(n_qubits, qubit_dim);
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(space.total_dim()));
    for (Eigen::Index i = 0; i < space.total_dim(); ++i) {
        std::string label;
        for (int n : space.occupations_of(i)) label.push_back(kLevelLetters[n]);
        out.push_back(label);
    }
    return out;
}

std::vector<std::string> named_eigenstates(std::size_t n_qubits)
{
    std::vector<std::string> out;
    if (n_qubits == 2) {
        for (const auto& e : two_qubit_named()) out.push_back(e.first);
    } else if (n_qubits == 3) {
        for (const auto& e : three_qubit_named()) out.push_back(e.first);
    }
    return out;
}

} // namespace qbath
