// Command-line front end: certified reconstruction bounds for tree MRFs.
//
// Exit codes: 0 success / certified, 1 not certified or cross-check
// mismatch, 2 input error, 3 enumeration budget refusal.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "survey/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"survey-recon: certified non-reconstruction bounds for tree Markov random fields"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".";
    unsigned workers = 1;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "run configuration file")->required();
        sub->add_option("--workers", workers, "worker count (results are deterministic regardless)");
        sub->add_option("--out", out_dir, "output directory");
    };
    CLI::App* run_cmd = app.add_subcommand("run", "iterate the survey recursion and write the bound trace");
    CLI::App* certify_cmd = app.add_subcommand("certify", "certify contraction (via the engine, or x_hat directly)");
    CLI::App* oracle_cmd = app.add_subcommand("oracle", "cross-check the recursion against brute-force enumeration");
    CLI::App* table_cmd = app.add_subcommand("table", "reference threshold table (Kesten-Stigum / Mossel-Peres)");
    for (CLI::App* sub : {run_cmd, certify_cmd, oracle_cmd, table_cmd}) add_common(sub);

    CLI11_PARSE(app, argc, argv);

    try {
        survey::RunConfig config = survey::parse_config_file(config_path);
        if (app.got_subcommand(run_cmd)) return survey::cmd_run(config, out_dir, std::cout);
        if (app.got_subcommand(certify_cmd)) return survey::cmd_certify(config, out_dir, std::cout);
        if (app.got_subcommand(oracle_cmd)) return survey::cmd_oracle(config, out_dir, std::cout);
        return survey::cmd_table(config, out_dir, std::cout);
    } catch (const survey::BudgetExceeded& e) {
        std::cerr << "budget refusal: " << e.what() << "\n"
                  << "(set SURVEY_RECON_BUDGET to raise the enumeration guard)\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
