// Command-line front end: classify boundary conditions, compute isotropy
// groups, homology, fluxes, and desk-scale spectra of models given as JSON
// files. Exit codes: 0 ok, 1 usage, 2 parse error, 3 invalid model.

#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fluxgraph/model_io.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;
constexpr int kExitModel = 3;

struct GlobalOptions {
    std::string format = "json";
    fluxgraph::ToleranceConfig tol;
};

void emit(const fluxgraph::Json& report, const GlobalOptions& opts) {
    if (opts.format == "json") {
        std::cout << report.dump(2) << "\n";
    } else {
        fluxgraph::render_text(report, std::cout);
    }
}

std::optional<fluxgraph::DiagonalUnitary> load_unitary_file(const std::string& path, std::size_t k) {
    if (path.empty()) return std::nullopt;
    std::ifstream in(path);
    if (!in) throw fluxgraph::ParseError("cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    fluxgraph::Json j;
    try {
        j = fluxgraph::Json::parse(buffer.str());
    } catch (const nlohmann::json::parse_error& err) {
        throw fluxgraph::ParseError(std::string("invalid JSON: ") + err.what());
    }
    if (!j.contains("unitary")) throw fluxgraph::ParseError(path + ": missing 'unitary' section");
    return fluxgraph::parse_unitary(j.at("unitary"), k);
}

std::vector<double> parse_targets(const std::string& csv) {
    std::vector<double> out;
    if (csv.empty()) return out;
    std::stringstream stream(csv);
    std::string item;
    while (std::getline(stream, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw fluxgraph::ParseError("--targets: invalid number '" + item + "'");
        }
    }
    return out;
}

void require_valid_graph(const fluxgraph::MetricGraph& graph) {
    const auto report = fluxgraph::validate(graph);
    if (!report.ok()) {
        std::string detail;
        for (const auto& issue : report.issues) detail += "\n  " + issue.code + ": " + issue.detail;
        throw std::domain_error("invalid graph:" + detail);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Classify magnetic perturbations of Laplacians on metric graphs"};
    app.require_subcommand(1);

    GlobalOptions opts;
    app.add_option("--format", opts.format, "Output format")->check(CLI::IsMember({"json", "text"}));
    app.add_option("--tol-rank", opts.tol.rank, "Relative singular-value cutoff");
    app.add_option("--tol-eq", opts.tol.eq, "Equality residual threshold");

    std::string model_path, second_path, unitary_path, targets_csv;
    double k_max = 5.0, grid_step = 0.01;

    auto* cmd_check = app.add_subcommand("check", "Self-adjointness and locality of (A, B)");
    cmd_check->add_option("model", model_path)->required();

    auto* cmd_isotropy = app.add_subcommand("isotropy", "Isotropy group of the gauge action");
    cmd_isotropy->add_option("model", model_path)->required();
    cmd_isotropy->add_option("--unitary", unitary_path, "Unitary file for a membership test");

    auto* cmd_homology = app.add_subcommand("homology", "Cycle basis and H1 rank of the internal graph");
    cmd_homology->add_option("model", model_path)->required();

    auto* cmd_flux = app.add_subcommand("flux", "Fluxes of a unitary or potential on the basis cycles");
    cmd_flux->add_option("model", model_path)->required();
    cmd_flux->add_option("--unitary", unitary_path, "Unitary file overriding the model sections");

    auto* cmd_realize = app.add_subcommand("realize", "Construct a unitary with prescribed fluxes");
    cmd_realize->add_option("model", model_path)->required();
    cmd_realize->add_option("--targets", targets_csv, "Comma-separated flux targets in radians");

    auto* cmd_equal = app.add_subcommand("equal", "Whether two models define the same operator");
    cmd_equal->add_option("model1", model_path)->required();
    cmd_equal->add_option("model2", second_path)->required();

    auto* cmd_spectrum = app.add_subcommand("spectrum", "Eigenvalue scan for a compact model");
    cmd_spectrum->add_option("model", model_path)->required();
    cmd_spectrum->add_option("--kmax", k_max, "Upper end of the scan window")
        ->check(CLI::PositiveNumber);
    cmd_spectrum->add_option("--grid", grid_step, "Scan grid step")->check(CLI::PositiveNumber);

    // let --format / --tol-* appear after the subcommand as well
    for (auto* sub : app.get_subcommands(nullptr)) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        if (err.get_exit_code() == 0) return app.exit(err);  // --help
        app.exit(err);
        return kExitUsage;
    }

    try {
        if (!opts.tol.valid()) {
            std::cerr << "error: tolerances must lie in (0, 1)\n";
            return kExitUsage;
        }
        const fluxgraph::ModelFile model = fluxgraph::load_model(model_path);
        require_valid_graph(model.graph);

        if (cmd_check->parsed()) {
            emit(fluxgraph::check_report(model, opts.tol), opts);
        } else if (cmd_isotropy->parsed()) {
            auto u = load_unitary_file(unitary_path, model.graph.boundary_dim());
            if (!u) u = model.unitary;
            emit(fluxgraph::isotropy_report(model, u, opts.tol), opts);
        } else if (cmd_homology->parsed()) {
            emit(fluxgraph::homology_report(model), opts);
        } else if (cmd_flux->parsed()) {
            auto u = load_unitary_file(unitary_path, model.graph.boundary_dim());
            emit(fluxgraph::flux_report(model, u), opts);
        } else if (cmd_realize->parsed()) {
            const fluxgraph::FluxAssignment targets{parse_targets(targets_csv)};
            const auto u = fluxgraph::realize_flux(model.graph, targets);
            emit(fluxgraph::unitary_to_json(u), opts);
        } else if (cmd_equal->parsed()) {
            const fluxgraph::ModelFile other = fluxgraph::load_model(second_path);
            require_valid_graph(other.graph);
            emit(fluxgraph::equal_report(model, other, opts.tol), opts);
        } else if (cmd_spectrum->parsed()) {
            emit(fluxgraph::spectrum_report(model, k_max, grid_step, opts.tol), opts);
        }
    } catch (const fluxgraph::ParseError& err) {
        std::cerr << "parse error: " << err.what() << "\n";
        return kExitParse;
    } catch (const std::invalid_argument& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitModel;
    } catch (const std::domain_error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitModel;
    } catch (const std::exception& err) {
        std::cerr << "internal error: " << err.what() << "\n";
        return kExitModel;
    }
    return 0;
}
