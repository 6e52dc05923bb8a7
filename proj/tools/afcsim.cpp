#include "afcsim/config.hpp"
#include "afcsim/error.hpp"
#include "afcsim/pipeline.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

namespace {

struct Common {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c, bool config_required = true)
{
    auto* opt = cmd->add_option("-c,--config", c.config, "Run configuration (JSON); relative names are also looked up in "
                                                         "$AFCSIM_CONFIG_DIR");
    if (config_required) {
        opt->required();
    }
    cmd->add_option("-o,--out", c.out, "Output directory (default: output_dir from the config)");
    cmd->add_option("--seed", c.seed, "Seed for every stochastic output");
    cmd->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_flag("-q,--quiet", c.quiet, "Do not print the summary");
}

std::vector<afcsim::Override> overrides_for(const Common& c)
{
    std::vector<afcsim::Override> o;
    if (c.seed) {
        o.push_back({"/seed", std::to_string(*c.seed)});
    }
    if (c.threads) {
        o.push_back({"/threads", std::to_string(*c.threads)});
    }
    return o;
}

void finish(const afcsim::CommandOutput& result, const std::string& dir, bool quiet)
{
    result.files.commit(dir);
    if (!quiet) {
        std::cout << result.summary;
        for (const auto& f : result.files.files()) {
            std::cout << "wrote " << (std::filesystem::path(dir) / f.first).string() << "\n";
        }
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Atomic frequency comb memory simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "afcsim 0.1.0");

    Common holeburn, pump, store, commensurate, sweep, compile;
    std::string target_file;
    std::string limits_file;

    add_common(app.add_subcommand("holeburn", "Spectrum after a single-frequency burn"), holeburn);
    add_common(app.add_subcommand("pump", "Tailor a comb and report its shape"), pump);
    add_common(app.add_subcommand("store", "Tailor, wait, store a pulse and count photons"), store);
    add_common(app.add_subcommand("commensurate", "Mismatch map, field search and audit"), commensurate);
    add_common(app.add_subcommand("sweep", "Run store or pump over a parameter grid"), sweep);
    auto* compile_cmd = app.add_subcommand("compile", "Compile a pump target into an RF schedule");
    add_common(compile_cmd, compile, false);
    compile_cmd->add_option("--target", target_file, "Config holding target and train (overrides --config)");
    compile_cmd->add_option("--limits", limits_file, "JSON file holding hardware limits");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        auto run = [&](const Common& c, auto&& command) {
            const afcsim::RunConfig cfg = afcsim::load_config(c.config, overrides_for(c));
            finish(command(cfg), c.out.empty() ? cfg.output_dir : c.out, c.quiet);
        };
        if (app.got_subcommand("holeburn")) {
            run(holeburn, afcsim::cmd_holeburn);
        } else if (app.got_subcommand("pump")) {
            run(pump, afcsim::cmd_pump);
        } else if (app.got_subcommand("store")) {
            run(store, afcsim::cmd_store);
        } else if (app.got_subcommand("commensurate")) {
            run(commensurate, afcsim::cmd_commensurate);
        } else if (app.got_subcommand("sweep")) {
            const std::string path = afcsim::resolve_config_path(sweep.config);
            const std::string text = afcsim::read_text_file(path);
            const auto overrides = overrides_for(sweep);
            const afcsim::RunConfig cfg = afcsim::parse_config(text, path, overrides);
            finish(afcsim::cmd_sweep(text, path, overrides), sweep.out.empty() ? cfg.output_dir : sweep.out,
                   sweep.quiet);
        } else if (app.got_subcommand("compile")) {
            const std::string config = target_file.empty() ? compile.config : target_file;
            if (config.empty()) {
                std::cerr << "compile: give --config or --target\n";
                return 2;
            }
            auto overrides = overrides_for(compile);
            if (!limits_file.empty()) {
                overrides.push_back({"/hardware", afcsim::read_text_file(afcsim::resolve_config_path(limits_file))});
            }
            const afcsim::RunConfig cfg = afcsim::load_config(config, overrides);
            afcsim::CommandOutput result = afcsim::cmd_compile(cfg);
            // --out naming a .csv or .json file writes just that schedule.
            const std::filesystem::path out = compile.out;
            if (out.extension() == ".csv" || out.extension() == ".json") {
                afcsim::OutputSet single;
                single.add(out.filename().string(), *result.files.find("schedule" + out.extension().string()));
                single.add(out.stem().string() + "_coverage.json", *result.files.find("coverage.json"));
                result.files = single;
                const std::string dir = out.has_parent_path() ? out.parent_path().string() : ".";
                finish(result, dir, compile.quiet);
            } else {
                finish(result, compile.out.empty() ? cfg.output_dir : compile.out, compile.quiet);
            }
        }
    } catch (const afcsim::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
