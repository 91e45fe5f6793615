// Command-line front end: cqad <command> --config <file> --out <dir>.
// Exit codes: 0 success, 2 configuration, 3 numerical, 4 invariant.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cqad/cli/commands.hpp"

namespace {

int report(const cqad::io::json& err, const std::filesystem::path& out_dir) {
    std::cerr << err.dump() << '\n';
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (!ec) {
        try {
            cqad::io::write_json(out_dir / "error.json", err);
        } catch (const std::exception&) {
            // stderr already carries the error
        }
    }
    return err["exit_code"].get<int>();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cavity quantum acoustodynamics simulator"};
    app.set_version_flag("--version", cqad::version);
    app.require_subcommand(1);
    std::string config_path, out_dir = ".";
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    for (const auto& [name, description] : cqad::cli::commands()) {
        auto* sub = app.add_subcommand(name, description);
        sub->add_option("--config", config_path, "JSON configuration")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "overrides rng_seed");
        sub->add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 256u));
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    try {
        auto cfg = cqad::io::load_config(config_path);
        if (seed) {
            cfg.rng_seed = *seed;
            cfg.resolved["rng_seed"] = *seed;
        }
        const auto m = cqad::cli::run_command(command, cfg, {out_dir, threads});
        std::cout << m["summary"].dump(2) << '\n';
        return 0;
    } catch (const cqad::Error& e) {
        return report(cqad::cli::error_json(e.code(), e.what()), out_dir);
    } catch (const std::exception& e) {
        return report(cqad::cli::error_json(cqad::ErrorCode::InvalidArgument, e.what()), out_dir);
    }
}
