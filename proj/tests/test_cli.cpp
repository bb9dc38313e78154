#include <cmath>
#include <limits>

#include "commands.hpp"
#include "doctest.h"
#include "tra/errors.hpp"

using namespace tra;
using namespace tra::cli;

namespace {

JobConfig job(const std::string& command, const std::string& model, std::map<std::string, double> params = {}) {
    JobConfig c;
    c.command = command;
    c.model = model;
    c.params = std::move(params);
    c.reproducible = true;
    return resolve(c);
}

JobConfig family_job(const std::string& command, const std::string& family, std::map<std::string, double> params = {},
                     std::optional<Grid> grid = std::nullopt) {
    JobConfig c;
    c.grid = grid;
    c.command = command;
    c.family = family;
    c.params = std::move(params);
    c.reproducible = true;
    return resolve(c);
}

}  // namespace

TEST_CASE("argument parsing") {
    CHECK(parse_param("Z=-1") == std::pair<std::string, double>("Z", -1.0));
    CHECK_THROWS_AS(parse_param("Z"), ValidationError);
    CHECK_THROWS_AS(parse_param("Z=abc"), ValidationError);
    CHECK_THROWS_AS(parse_param("Z=inf"), ValidationError);

    const Grid g = parse_grid("0.5:2.5:5");
    CHECK(g == Grid{0.5, 2.5, 5});
    CHECK(grid_points(g) == std::vector<double>{0.5, 1.0, 1.5, 2.0, 2.5});
    CHECK_THROWS_AS(parse_grid("1:2"), ValidationError);
    CHECK_THROWS_AS(parse_grid("1:2:0"), ValidationError);
}

TEST_CASE("resolve fills defaults and rejects bad input") {
    const JobConfig c = job("spectrum", "coulomb");
    CHECK(c.route == "mp");
    CHECK(c.M == 100);
    CHECK(c.tol.at("oracle") == 1e-6);
    CHECK_THROWS_AS(job("spectrum", "coulomb", {{"bogus", 1.0}}), ValidationError);
    CHECK_THROWS_AS(job("spectrum", "nonesuch"), ValidationError);
    CHECK_THROWS_AS(job("launch", "coulomb"), ValidationError);
    JobConfig both;
    both.command = "orthocheck";
    both.model = "coulomb";
    both.family = "krawtchouk";
    CHECK_THROWS_AS(resolve(both), ValidationError);
    JobConfig route = job("spectrum", "eckart");
    route.route = "mp";
    CHECK_THROWS_AS(run_job(resolve(route)), ValidationError);
}

TEST_CASE("report shape") {
    const json r = run_job(job("spectrum", "coulomb", {{"Z", -1.0}}));
    for (const char* k : {"schema_version", "command", "inputs", "results", "diagnostics"}) CHECK(r.contains(k));
    CHECK(r["schema_version"] == kSchemaVersion);
    CHECK(r["command"] == "spectrum");
    CHECK_FALSE(r["diagnostics"].contains("timestamp"));
}

TEST_CASE("inputs round trip") {
    for (const JobConfig& c : {job("spectrum", "morse", {{"V0", 0.125}, {"V1", -1.0}}),
                               family_job("poly-eval", "racah", {{"N", 10.0}, {"alpha", 2.09015},
                                                                 {"beta", 1.86569}, {"gamma", -19.5374}},
                                          Grid{0.0, 10.0, 11}),
                               job("tridiag", "")}) {
        const json r = run_job(c);
        CHECK(config_from_json(r["inputs"]) == c);
        CHECK(config_from_json(config_to_json(c)) == c);
    }
}

TEST_CASE("reproducible output is byte-identical") {
    const JobConfig c = family_job("orthocheck", "krawtchouk", {{"N", 8.0}, {"gamma", 0.3}});
    CHECK(dump_json(run_job(c)) == dump_json(run_job(c)));
}

TEST_CASE("numbers keep 17 significant digits, NaN becomes null") {
    json j = {{"a", 0.1}, {"b", std::numeric_limits<double>::quiet_NaN()}, {"c", 3}};
    const std::string s = dump_json(j);
    CHECK(s.find("0.10000000000000001") != std::string::npos);
    CHECK(s.find("null") != std::string::npos);
    CHECK(json::parse(s)["c"] == 3);
}

TEST_CASE("csv projection") {
    JobConfig c = job("spectrum", "coulomb");
    c.format = "csv";
    const std::string csv = to_csv(run_job(c));
    CHECK(csv.rfind("k,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') >= 2);
}

TEST_CASE("error object") {
    const json e = error_object("domain", "bad", 2);
    CHECK(e["error"]["code"] == "domain");
    CHECK(e["error"]["exit_code"] == 2);
}
