#pragma once

// CSV and JSON file formats. Numbers are written in shortest round-trip form
// so reruns are byte-identical. Frequencies in files are MHz, times us.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>  // nlohmann, vendored

#include "cqad/core/error.hpp"
#include "cqad/core/units.hpp"
#include "cqad/estimation/fit.hpp"
#include "cqad/modeswap/chevron.hpp"
#include "cqad/tomography/reconstruct.hpp"

namespace cqad::io {

using json = nlohmann::ordered_json;

inline std::string format_number(double v) {
    if (v == 0.0) return "0";  // folds -0
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline double parse_number(std::string_view s, const std::string& where) {
    double v = 0.0;
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    require(r.ec == std::errc{} && r.ptr == s.data() + s.size(), ErrorCode::ParseError,
            where + ": '" + std::string(s) + "' is not a number");
    return v;
}

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header) : out_(path) {
        require(out_.good(), ErrorCode::IoError, "cannot write " + path.string());
        write_row(header);
    }

    void row(const std::vector<std::string>& cells) { write_row(cells); }

    template <class... T>
    void values(const T&... v) {
        std::vector<std::string> cells;
        (cells.push_back(cell(v)), ...);
        write_row(cells);
    }

private:
    static std::string cell(double v) { return format_number(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(long v) { return std::to_string(v); }
    static std::string cell(std::size_t v) { return std::to_string(v); }
    static std::string cell(const std::string& v) { return v; }
    static std::string cell(const char* v) { return v; }

    void write_row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            require(cells[i].find_first_of(",\n\"") == std::string::npos, ErrorCode::InvalidArgument,
                    "CSV cell contains a separator: " + cells[i]);
            out_ << (i ? "," : "") << cells[i];
        }
        out_ << '\n';
    }

    std::ofstream out_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        fail(ErrorCode::ParseError, "CSV has no column '" + name + "'");
    }

    double number(std::size_t row, const std::string& name) const {
        return parse_number(rows[row][column(name)], "line " + std::to_string(row + 2) + ", column " + name);
    }
};

inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(in.good(), ErrorCode::IoError, "cannot read " + path.string());
    CsvTable t;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty() || line == "\r") continue;
        auto cells = split_line(line);
        if (t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        require(cells.size() == t.header.size(), ErrorCode::ParseError,
                path.string() + " line " + std::to_string(n) + ": expected " + std::to_string(t.header.size()) +
                    " fields");
        t.rows.push_back(std::move(cells));
    }
    require(!t.header.empty(), ErrorCode::ParseError, path.string() + " is empty");
    return t;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    require(out.good(), ErrorCode::IoError, "cannot write " + path.string());
    out << text;
}

inline void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

// tomography records: operator_a, operator_b, p00, p01, p10, p11, shots

inline void write_records(const std::filesystem::path& path, const std::vector<MeasurementRecord>& recs) {
    CsvWriter w(path, {"operator_a", "operator_b", "p00", "p01", "p10", "p11", "shots"});
    for (const auto& r : recs)
        w.values(std::string(1, pauli_name(r.a)), std::string(1, pauli_name(r.b)), r.p(0), r.p(1), r.p(2), r.p(3), r.shots);
}

inline Pauli pauli_cell(const std::string& cell, std::size_t row) {
    require(cell.size() == 1, ErrorCode::ParseError, "line " + std::to_string(row + 2) + ": operator '" + cell + "'");
    return pauli_from_name(cell[0]);
}

inline std::vector<MeasurementRecord> load_records(const std::filesystem::path& path) {
    const auto t = read_csv(path);
    std::vector<MeasurementRecord> out;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        MeasurementRecord r;
        r.a = pauli_cell(t.rows[i][t.column("operator_a")], i);
        r.b = pauli_cell(t.rows[i][t.column("operator_b")], i);
        r.p = Eigen::Vector4d(t.number(i, "p00"), t.number(i, "p01"), t.number(i, "p10"), t.number(i, "p11"));
        const double shots = t.number(i, "shots");
        require(shots >= 0.0 && shots == std::floor(shots), ErrorCode::ParseError,
                "line " + std::to_string(i + 2) + ": shots must be a non-negative integer");
        r.shots = static_cast<long>(shots);
        validate(r);
        out.push_back(r);
    }
    return out;
}

inline json density_to_json(const Eigen::MatrixXcd& rho) {
    json re = json::array(), im = json::array();
    for (Eigen::Index i = 0; i < rho.rows(); ++i) {
        json rr = json::array(), ii = json::array();
        for (Eigen::Index j = 0; j < rho.cols(); ++j) {
            rr.push_back(rho(i, j).real());
            ii.push_back(rho(i, j).imag());
        }
        re.push_back(rr);
        im.push_back(ii);
    }
    return json{{"real", re}, {"imag", im}};
}

inline DensityMatrix2Q density_from_json(const json& j) {
    DensityMatrix2Q rho;
    try {
        for (int i = 0; i < 4; ++i)
            for (int k = 0; k < 4; ++k)
                rho(i, k) = {j.at("real").at(i).at(k).get<double>(), j.at("imag").at(i).at(k).get<double>()};
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ParseError, std::string("density matrix JSON: ") + e.what());
    }
    return rho;
}

// chevron maps: detuning_mhz (Delta_21 - Delta), delta_mhz (Delta_21 - FSR),
// tau_us, then p_<mode> per readout mode; delta-major rows

inline void write_chevron(const std::filesystem::path& path, const ChevronMap& map) {
    std::vector<std::string> header{"detuning_mhz", "delta_mhz", "tau_us"};
    for (const auto& [mode, grid] : map.population) header.push_back("p_" + mode);
    CsvWriter w(path, header);
    for (std::size_t i = 0; i < map.delta_grid.size(); ++i)
        for (std::size_t t = 0; t < map.tau_grid.size(); ++t) {
            std::vector<std::string> cells{format_number(to_mhz(map.delta_grid[i])),
                                           format_number(to_mhz(map.reference_delta + map.delta_grid[i])),
                                           format_number(map.tau_grid[t])};
            for (const auto& [mode, grid] : map.population) cells.push_back(format_number(grid[i][t]));
            w.row(cells);
        }
}

/// Reads a chevron CSV as a fit dataset on the absolute delta axis. Initial
/// populations come from the tau = 0 column when present.
inline ChevronDataset load_chevron_dataset(const std::filesystem::path& path, double readout_g_infidelity = 0.0) {
    const auto t = read_csv(path);
    require(!t.rows.empty(), ErrorCode::ParseError, path.string() + " has no data rows");
    std::vector<std::string> modes;
    for (const auto& h : t.header)
        if (h.starts_with("p_")) modes.push_back(h.substr(2));
    require(!modes.empty(), ErrorCode::ParseError, path.string() + " has no p_<mode> columns");
    std::set<double> deltas, taus;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        deltas.insert(t.number(i, "delta_mhz"));
        taus.insert(t.number(i, "tau_us"));
    }
    ChevronDataset d;
    for (double v : deltas) d.delta_grid.push_back(to_angular(v));
    d.tau_grid.assign(taus.begin(), taus.end());
    require(t.rows.size() == deltas.size() * taus.size(), ErrorCode::ParseError,
            path.string() + ": rows do not form a complete delta x tau grid");
    const std::vector<double> dvec(deltas.begin(), deltas.end());
    for (const auto& m : modes)
        d.population[m].assign(deltas.size(), std::vector<double>(taus.size(), std::nan("")));
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto di = static_cast<std::size_t>(std::lower_bound(dvec.begin(), dvec.end(), t.number(i, "delta_mhz")) - dvec.begin());
        const auto ti = static_cast<std::size_t>(std::lower_bound(d.tau_grid.begin(), d.tau_grid.end(), t.number(i, "tau_us")) - d.tau_grid.begin());
        for (const auto& m : modes) {
            auto& cell = d.population[m][di][ti];
            require(std::isnan(cell), ErrorCode::ParseError, path.string() + ": duplicate grid point");
            cell = t.number(i, "p_" + m);
        }
    }
    d.readout_g_infidelity = readout_g_infidelity;
    if (d.tau_grid.front() == 0.0) d.initial = initial_from_first_column(d);
    validate(d);
    return d;
}

inline json params_to_json(const ParamMap& p) {
    json j = json::object();
    for (const auto& n : fit_parameter_names())
        if (p.contains(n)) j[n + "_mhz"] = to_mhz(p.at(n));
    return j;
}

inline json fit_to_json(const FitResult& r) {
    json bars = json::object();
    for (const auto& [n, b] : r.error_bars) bars[n + "_mhz"] = json::array({to_mhz(b.first), to_mhz(b.second)});
    return json{{"params", params_to_json(r.params)},
                {"free", r.free},
                {"residual", r.residual},
                {"converged", r.converged},
                {"evaluations", r.evaluations},
                {"error_bars", bars}};
}

}  // namespace cqad::io
