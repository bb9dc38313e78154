#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "tra/errors.hpp"

using tra::cli::json;

namespace {

int fail(const std::string& code, const std::string& msg, int exitCode) {
    std::cerr << tra::cli::dump_json(tra::cli::error_object(code, msg, exitCode)) << "\n";
    return exitCode;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Orthogonal-polynomial spectra, phase shifts and basis audits", "tra_cli"};
    app.require_subcommand(1);

    tra::cli::JobConfig c;
    std::vector<std::string> params;
    std::string grid, config;
    std::map<std::string, double> tol;

    app.add_option("--model", c.model, "coulomb|oscillator|morse|poschl-teller|trig-scarf|eckart|rosen-morse|"
                                        "log-spectrum|table1");
    app.add_option("--family", c.family, "meixner-pollaczek|meixner|krawtchouk|continuous-dual-hahn|dual-hahn|"
                                          "wilson|racah|h-poly");
    app.add_option("--route", c.route, "mp|cdh|wilson (default: the model's first route)")
        ->check(CLI::IsMember({"mp", "cdh", "wilson"}));
    app.add_option("--param", params, "k=v, repeatable");
    app.add_option("--M", c.M, "basis size / truncation");
    app.add_option("--kmax", c.kmax, "highest level index for infinite spectra");
    app.add_option("--nmax", c.nmax, "highest polynomial degree");
    app.add_option("--grid", grid, "start:stop:count");
    app.add_option("--level", c.level, "wavefunction label k=<int> or E=<value>");
    app.add_flag("--fit", c.fit, "phaseshift: add the large-n fit columns");
    app.add_option("--format", c.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--out", c.out, "output path (default stdout)");
    app.add_flag("--reproducible", c.reproducible, "omit timestamp, timing and thread count");
    app.add_option("--seed", c.seed, "sampling seed");
    app.add_option("--config", config, "run the inputs object of a JSON report or config file");
    for (const char* k : {"quad", "oracle", "tridiag", "control", "phase", "amplitude"})
        app.add_option_function<double>(std::string("--tol-") + k, [&tol, k](double v) { tol[k] = v; },
                                        std::string("override the ") + k + " tolerance");

    for (const char* name : {"spectrum", "phaseshift", "orthocheck", "tridiag", "wavefunction", "poly-eval"})
        app.add_subcommand(name)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), 2);
    }

    try {
        if (!config.empty()) {
            std::ifstream in(config);
            if (!in) throw tra::ValidationError("bad_config", "cannot read " + config);
            json j;
            try {
                j = json::parse(in);
            } catch (const json::exception& e) {
                throw tra::ValidationError("bad_config", e.what());
            }
            if (j.contains("inputs")) j = j["inputs"];
            const std::string cmd = app.get_subcommands().front()->get_name();
            const std::string out = c.out, format = c.format;
            c = tra::cli::config_from_json(j);
            // Output destination and format may be redirected on replay.
            if (app.count("--out")) c.out = out;
            if (app.count("--format")) c.format = format;
            if (c.command != cmd)
                throw tra::ValidationError("conflicting_inputs", "config is for '" + c.command + "', not '" + cmd + "'");
        } else {
            c.command = app.get_subcommands().front()->get_name();
            for (const auto& kv : params) {
                const auto [k, v] = tra::cli::parse_param(kv);
                if (!c.params.emplace(k, v).second)
                    throw tra::ValidationError("bad_param", "parameter '" + k + "' given twice");
            }
            if (!grid.empty()) c.grid = tra::cli::parse_grid(grid);
            c.tol = tol;
        }
        c = tra::cli::resolve(c);
        const json report = tra::cli::run_job(c);
        const std::string text =
            c.format == "csv" ? tra::cli::to_csv(report) : tra::cli::dump_json(report) + "\n";
        if (c.out.empty()) {
            std::cout << text;
        } else {
            std::ofstream out(c.out);
            if (!(out << text)) return fail("io", "cannot write " + c.out, 2);
        }
        return 0;
    } catch (const tra::ValidationError& e) {
        return fail(e.code(), e.what(), 2);
    } catch (const tra::NumericalError& e) {
        return fail(e.code(), e.what(), 3);
    } catch (const std::exception& e) {
        return fail("internal", e.what(), 3);
    }
}
