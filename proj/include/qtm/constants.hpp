#pragma once

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace qtm {

/// Physical constants table (CODATA 2018). A custom table can be loaded
/// from a key=value file for testing via QTM_CONSTANTS_FILE.
struct Constants {
    double hbar = 1.054571817e-34;    // J*s
    double mu_bohr = 9.2740100783e-24; // J/T
    double flux_quantum = 2.067833848e-15; // Wb
    double elementary_charge = 1.602176634e-19; // C
};

inline Constants load_constants_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open constants file: " + path);
    Constants c;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key=value");
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        double val = std::stod(line.substr(eq + 1));
        if (key == "hbar") c.hbar = val;
        else if (key == "mu_bohr") c.mu_bohr = val;
        else if (key == "flux_quantum") c.flux_quantum = val;
        else if (key == "elementary_charge") c.elementary_charge = val;
        else throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unknown key " + key);
    }
    return c;
}

inline const Constants& constants() {
    static Constants table = [] {
        if (const char* p = std::getenv("QTM_CONSTANTS_FILE"))
            return load_constants_file(p);
        return Constants{};
    }();
    return table;
}

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

} // namespace qtm
