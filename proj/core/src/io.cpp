#include "opmean/io.hpp"

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace opmean {

namespace {

using nlohmann::json;

double parse_double(std::string_view text, const char* what) {
    try {
        std::size_t used = 0;
        std::string owned(text);
        const double value = std::stod(owned, &used);
        if (used != owned.size()) throw std::invalid_argument("trailing characters");
        return value;
    } catch (const std::exception&) {
        std::ostringstream os;
        os << what << ": cannot parse number from '" << text << "'";
        throw ParseError(os.str());
    }
}

int parse_int(std::string_view text, const char* what) {
    try {
        std::size_t used = 0;
        std::string owned(text);
        const int value = std::stoi(owned, &used);
        if (used != owned.size()) throw std::invalid_argument("trailing characters");
        return value;
    } catch (const std::exception&) {
        std::ostringstream os;
        os << what << ": cannot parse integer from '" << text << "'";
        throw ParseError(os.str());
    }
}

Complex entry_from_json(const json& cell) {
    if (cell.is_number()) return Complex(cell.get<double>(), 0.0);
    if (cell.is_array() && cell.size() == 2 && cell[0].is_number() && cell[1].is_number()) {
        return Complex(cell[0].get<double>(), cell[1].get<double>());
    }
    throw ParseError("matrix entry must be a number or a [re, im] pair");
}

json parse_json_text(const std::string& text, const std::filesystem::path& origin) {
    json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) {
        throw ParseError("invalid JSON in " + origin.string());
    }
    return j;
}

} // namespace

json matrix_to_json(const HermitianMatrix& x) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < x.dim(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < x.dim(); ++k) {
            const Complex& z = x.entries()(i, k);
            row.push_back(json::array({z.real(), z.imag()}));
        }
        rows.push_back(std::move(row));
    }
    return json{{"dim", x.dim()}, {"entries", std::move(rows)}};
}

HermitianMatrix matrix_from_json(const json& j) {
    if (!j.is_object() || !j.contains("dim") || !j.contains("entries")) {
        throw ParseError("matrix JSON must be an object with 'dim' and 'entries'");
    }
    if (!j["dim"].is_number_integer()) throw ParseError("matrix 'dim' must be an integer");
    const Eigen::Index n = j["dim"].get<Eigen::Index>();
    if (n < 1) throw ParseError("matrix 'dim' must be >= 1");
    const json& rows = j["entries"];
    if (!rows.is_array() || Eigen::Index(rows.size()) != n) {
        throw ParseError("matrix 'entries' must hold 'dim' rows");
    }
    ComplexMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const json& row = rows[i];
        if (!row.is_array() || Eigen::Index(row.size()) != n) {
            throw ParseError("matrix rows must each hold 'dim' entries");
        }
        for (Eigen::Index k = 0; k < n; ++k) m(i, k) = entry_from_json(row[k]);
    }
    return HermitianMatrix(std::move(m));
}

void write_matrix_file(const std::filesystem::path& path, const HermitianMatrix& x) {
    write_text_file(path, canonical_dump(matrix_to_json(x)));
}

HermitianMatrix read_matrix_file(const std::filesystem::path& path) {
    return matrix_from_json(parse_json_text(read_text_file(path), path));
}

SpdMatrix read_spd_file(const std::filesystem::path& path) {
    return SpdMatrix(read_matrix_file(path));
}

json measure_to_json(const GeneratorMeasure& mu) {
    json j = json::object();
    if (!mu.atoms().empty()) {
        json atoms = json::array();
        for (const WeightedAtom& a : mu.atoms()) {
            atoms.push_back(json::array({a.location, a.mass}));
        }
        j["atoms"] = std::move(atoms);
    }
    if (mu.density_spec()) {
        const DensitySpec& spec = *mu.density_spec();
        json density = json{{"family", spec.family}, {"nodes", spec.nodes}};
        if (spec.family == "jacobi") density["p"] = spec.p;
        j["density"] = std::move(density);
    } else if (!mu.density_nodes().empty()) {
        // No family provenance: serialize the sampled nodes themselves.
        json nodes = json::array();
        for (const WeightedAtom& a : mu.density_nodes()) {
            nodes.push_back(json::array({a.location, a.mass}));
        }
        j["density_nodes"] = std::move(nodes);
    }
    return j;
}

GeneratorMeasure measure_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("measure JSON must be an object");
    auto read_atom_list = [](const json& list, const char* what) {
        if (!list.is_array()) throw ParseError(std::string(what) + " must be an array");
        std::vector<WeightedAtom> atoms;
        for (const json& cell : list) {
            if (!cell.is_array() || cell.size() != 2 || !cell[0].is_number() ||
                !cell[1].is_number()) {
                throw ParseError(std::string(what) + " entries must be [location, mass] pairs");
            }
            atoms.push_back({cell[0].get<double>(), cell[1].get<double>()});
        }
        return atoms;
    };
    std::vector<WeightedAtom> atoms;
    if (j.contains("atoms")) atoms = read_atom_list(j["atoms"], "measure 'atoms'");

    if (j.contains("density")) {
        const json& density = j["density"];
        if (!density.is_object() || !density.contains("family")) {
            throw ParseError("measure 'density' must be an object with a 'family'");
        }
        const std::string family = density["family"].get<std::string>();
        const int nodes = density.contains("nodes") ? density["nodes"].get<int>() : 64;
        GeneratorMeasure base = [&]() {
            if (family == "jacobi") {
                if (!density.contains("p")) throw ParseError("jacobi density requires 'p'");
                return GeneratorMeasure::jacobi_power_family(density["p"].get<double>(), nodes);
            }
            if (family == "legendre") return GeneratorMeasure::uniform_density(nodes);
            throw ParseError("unknown density family '" + family + "'");
        }();
        if (atoms.empty()) return base;
        return GeneratorMeasure(std::move(atoms), base.density_nodes(), *base.density_spec());
    }
    if (j.contains("density_nodes")) {
        return GeneratorMeasure(std::move(atoms),
                                read_atom_list(j["density_nodes"], "measure 'density_nodes'"));
    }
    return GeneratorMeasure::from_atoms(std::move(atoms));
}

void write_measure_file(const std::filesystem::path& path, const GeneratorMeasure& mu) {
    write_text_file(path, canonical_dump(measure_to_json(mu)));
}

GeneratorMeasure read_measure_file(const std::filesystem::path& path) {
    return measure_from_json(parse_json_text(read_text_file(path), path));
}

json ensemble_to_json(const WeightedEnsemble& ensemble) {
    json weights = json::array();
    json matrices = json::array();
    for (std::size_t jx = 0; jx < ensemble.size(); ++jx) {
        weights.push_back(ensemble.weight(jx));
        matrices.push_back(matrix_to_json(ensemble.matrix(jx).hermitian()));
    }
    return json{{"weights", std::move(weights)}, {"matrices", std::move(matrices)}};
}

WeightedEnsemble ensemble_from_json(const json& j) {
    if (!j.is_object() || !j.contains("weights") || !j.contains("matrices")) {
        throw ParseError("ensemble JSON must be an object with 'weights' and 'matrices'");
    }
    const json& weights_json = j["weights"];
    const json& matrices_json = j["matrices"];
    if (!weights_json.is_array() || !matrices_json.is_array()) {
        throw ParseError("ensemble 'weights' and 'matrices' must be arrays");
    }
    std::vector<double> weights;
    for (const json& w : weights_json) {
        if (!w.is_number()) throw ParseError("ensemble weights must be numbers");
        weights.push_back(w.get<double>());
    }
    std::vector<SpdMatrix> matrices;
    for (const json& m : matrices_json) matrices.emplace_back(matrix_from_json(m));
    return WeightedEnsemble(std::move(matrices), std::move(weights));
}

void write_ensemble_file(const std::filesystem::path& path, const WeightedEnsemble& ensemble) {
    write_text_file(path, canonical_dump(ensemble_to_json(ensemble)));
}

WeightedEnsemble read_ensemble_file(const std::filesystem::path& path) {
    return ensemble_from_json(parse_json_text(read_text_file(path), path));
}

json report_to_json(const SolverReport& report) {
    return json{{"converged", report.converged},
                {"iterations", report.iterations},
                {"final_residual", report.final_residual},
                {"residual_history", report.residual_history},
                {"objective", report.objective}};
}

SolverReport report_from_json(const json& j) {
    try {
        SolverReport report;
        report.converged = j.at("converged").get<bool>();
        report.iterations = j.at("iterations").get<int>();
        report.final_residual = j.at("final_residual").get<double>();
        report.residual_history = j.at("residual_history").get<std::vector<double>>();
        report.objective = j.at("objective").get<double>();
        return report;
    } catch (const json::exception& e) {
        throw ParseError(std::string("solver report JSON: ") + e.what());
    }
}

void write_report_file(const std::filesystem::path& path, const SolverReport& report) {
    write_text_file(path, canonical_dump(report_to_json(report)));
}

MeanDescriptor parse_mean_string(std::string_view spec) {
    if (spec == "#") return MeanDescriptor::geometric(0.5);
    if (spec == "parallel-sum") return MeanDescriptor::parallel_sum_connection();
    if (spec == "logmean") return MeanDescriptor::log_mean();
    const std::size_t colon = spec.find(':');
    if (colon == std::string_view::npos) {
        throw ParseError("mean '" + std::string(spec) +
                         "': expected 'family:parameter', 'parallel-sum', 'logmean', '#' or "
                         "'measure:<path>'");
    }
    const std::string_view family = spec.substr(0, colon);
    const std::string_view rest = spec.substr(colon + 1);
    if (family == "measure") {
        return MeanDescriptor::from_measure(parse_measure_string(rest), std::string(spec));
    }
    const double parameter = parse_double(rest, "mean parameter");
    if (family == "arithmetic") return MeanDescriptor::arithmetic(parameter);
    if (family == "geometric") return MeanDescriptor::geometric(parameter);
    if (family == "harmonic") return MeanDescriptor::harmonic(parameter);
    if (family == "ah-geo") return MeanDescriptor::ah_geometric(parameter);
    if (family == "heinz") return MeanDescriptor::heinz(parameter);
    throw ParseError("unknown mean family '" + std::string(family) + "'");
}

GeneratorMeasure parse_measure_string(std::string_view spec) {
    const std::size_t colon = spec.find(':');
    const std::string_view head = spec.substr(0, colon);
    if (head == "dirac" && colon != std::string_view::npos) {
        return GeneratorMeasure::dirac(parse_double(spec.substr(colon + 1), "dirac location"));
    }
    if (head == "endpoints" && colon != std::string_view::npos) {
        return GeneratorMeasure::endpoint_atoms(
            parse_double(spec.substr(colon + 1), "endpoint weight"));
    }
    if (head == "jacobi" && colon != std::string_view::npos) {
        std::string_view rest = spec.substr(colon + 1);
        const std::size_t second = rest.find(':');
        if (second == std::string_view::npos) {
            return GeneratorMeasure::jacobi_power_family(parse_double(rest, "jacobi exponent"));
        }
        return GeneratorMeasure::jacobi_power_family(
            parse_double(rest.substr(0, second), "jacobi exponent"),
            parse_int(rest.substr(second + 1), "jacobi node count"));
    }
    if (spec == "uniform") return GeneratorMeasure::uniform_density();
    if (head == "uniform" && colon != std::string_view::npos) {
        return GeneratorMeasure::uniform_density(parse_int(spec.substr(colon + 1), "node count"));
    }
    return read_measure_file(std::filesystem::path(std::string(spec)));
}

json manifest_to_json(const RunManifest& m) {
    return json{{"command", m.command}, {"inputs", m.inputs},   {"config", m.config_text},
                {"seed", m.seed},       {"version", m.version}, {"timestamp", m.timestamp}};
}

RunManifest manifest_from_json(const json& j) {
    try {
        RunManifest m;
        m.command = j.at("command").get<std::string>();
        m.inputs = j.at("inputs").get<std::vector<std::string>>();
        m.config_text = j.at("config").get<std::string>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.version = j.at("version").get<std::string>();
        m.timestamp = j.at("timestamp").get<std::string>();
        return m;
    } catch (const json::exception& e) {
        throw ParseError(std::string("manifest JSON: ") + e.what());
    }
}

std::string current_timestamp() {
    std::time_t stamp = std::time(nullptr);
    if (const char* fixed = std::getenv("SOURCE_DATE_EPOCH")) {
        try {
            stamp = static_cast<std::time_t>(std::stoll(fixed));
        } catch (const std::exception&) {
            throw ParseError("SOURCE_DATE_EPOCH is not an integer");
        }
    }
    std::tm parts{};
    gmtime_r(&stamp, &parts);
    char buffer[32];
    std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &parts);
    return buffer;
}

std::string canonical_dump(const json& j) {
    // nlohmann objects are backed by std::map, so keys serialize sorted.
    return j.dump(2) + "\n";
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out.write(text.data(), std::streamsize(text.size()));
    if (!out) throw Error("failed while writing '" + path.string() + "'");
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path.string() + "' for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

} // namespace opmean
