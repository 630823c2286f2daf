// End-to-end checks of the command-line tool: exit codes, JSON output and
// the realize -> flux round trip, run against the built binary.

#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <json.hpp>

namespace {

struct CommandResult {
    int exit_code = -1;
    std::string output;  // stdout only
};

CommandResult run_cli(const std::string& args) {
    const std::string command = std::string(FLUXGRAPH_CLI_PATH) + " " + args + " 2>/dev/null";
    std::array<char, 4096> chunk{};
    CommandResult result;
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (fgets(chunk.data(), chunk.size(), pipe) != nullptr) result.output += chunk.data();
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string fixture(const std::string& name) {
    return std::string(FLUXGRAPH_FIXTURE_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("check subcommand classifies the cross-coupling fixture") {
    const auto result = run_cli("check " + fixture("fig1_cross.json"));
    REQUIRE(result.exit_code == 0);
    const auto report = nlohmann::json::parse(result.output);
    CHECK(report.at("self_adjoint") == true);
    CHECK(report.at("local") == false);
}

TEST_CASE("json output is byte-identical across runs") {
    const std::string args = "isotropy " + fixture("star_delta.json");
    CHECK(run_cli(args).output == run_cli(args).output);
}

TEST_CASE("text format renders without JSON punctuation") {
    const auto result = run_cli("check --format text " + fixture("fig1_standard.json"));
    REQUIRE(result.exit_code == 0);
    CHECK(result.output.find("self_adjoint: true") != std::string::npos);
}

TEST_CASE("usage errors exit with 1") {
    CHECK(run_cli("").exit_code == 1);
    CHECK(run_cli("frobnicate model.json").exit_code == 1);
    CHECK(run_cli("check").exit_code == 1);
}

TEST_CASE("parse failures exit with 2") {
    CHECK(run_cli("check " + fixture("does_not_exist.json")).exit_code == 2);
    const std::string bad = std::string(std::tmpnam(nullptr)) + ".json";
    std::ofstream(bad) << "{ not json";
    CHECK(run_cli("check " + bad).exit_code == 2);
    std::remove(bad.c_str());
}

TEST_CASE("invalid models exit with 3") {
    // spectrum on a non-compact graph
    CHECK(run_cli("spectrum " + fixture("fig1_standard.json")).exit_code == 3);
    // flux without unitary or potential
    CHECK(run_cli("flux " + fixture("ring_kirchhoff.json")).exit_code == 3);
    // disconnected graph
    const std::string bad = std::string(std::tmpnam(nullptr)) + ".json";
    std::ofstream(bad) << R"({"graph": {"vertices": ["a", "b", "c", "d"],
        "internal_edges": [{"id": "i0", "from": "a", "to": "b", "length": 1.0},
                           {"id": "i1", "from": "c", "to": "d", "length": 1.0}]}})";
    CHECK(run_cli("homology " + bad).exit_code == 3);
    std::remove(bad.c_str());
}

TEST_CASE("realize output feeds back into flux") {
    const auto realized = run_cli("realize " + fixture("theta_standard.json") + " --targets 0.5,-1.25");
    REQUIRE(realized.exit_code == 0);
    const std::string unitary_file = std::string(std::tmpnam(nullptr)) + ".json";
    std::ofstream(unitary_file) << realized.output;

    const auto flux = run_cli("flux " + fixture("theta_standard.json") + " --unitary " + unitary_file);
    REQUIRE(flux.exit_code == 0);
    const auto report = nlohmann::json::parse(flux.output);
    REQUIRE(report.at("fluxes").size() == 2);
    CHECK(std::abs(report.at("fluxes")[0].at("phase").get<double>() - 0.5) < 1e-12);
    CHECK(std::abs(report.at("fluxes")[1].at("phase").get<double>() + 1.25) < 1e-12);
    std::remove(unitary_file.c_str());
}

TEST_CASE("equal subcommand compares two models") {
    const auto same = run_cli("equal " + fixture("fig1_standard.json") + " " + fixture("fig1_standard.json"));
    REQUIRE(same.exit_code == 0);
    CHECK(nlohmann::json::parse(same.output).at("equal") == true);

    const auto different =
        run_cli("equal " + fixture("fig1_standard.json") + " " + fixture("fig1_cross.json"));
    REQUIRE(different.exit_code == 0);
    CHECK(nlohmann::json::parse(different.output).at("equal") == false);
}

TEST_CASE("spectrum subcommand reports the flux-shifted ring levels") {
    const auto result =
        run_cli("spectrum " + fixture("ring_kirchhoff_flux1.json") + " --kmax 2 --grid 0.005");
    REQUIRE(result.exit_code == 0);
    const auto report = nlohmann::json::parse(result.output);
    // closed form |2 pi n + 1| / (2 pi) within (0, 2]
    const std::vector<double> expected{1.0 / (2 * 3.141592653589793),
                                       1.0 - 1.0 / (2 * 3.141592653589793),
                                       1.0 + 1.0 / (2 * 3.141592653589793),
                                       2.0 - 1.0 / (2 * 3.141592653589793)};
    REQUIRE(report.at("roots").size() == expected.size());
    for (std::size_t j = 0; j < expected.size(); ++j)
        CHECK(std::abs(report.at("roots")[j].at("k").get<double>() - expected[j]) < 1e-6);
}
