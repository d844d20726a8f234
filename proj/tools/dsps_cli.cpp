#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dsps/errors.hpp"
#include "dsps/scenario/commands.hpp"

namespace fs = std::filesystem;
using namespace dsps::scenario;

namespace {

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    unsigned threads = 0;
    std::string format = "csv";
};

void emit_text(const Flags& flags, const std::string& file, const std::function<void(std::ostream&)>& write) {
    if (flags.out.empty()) {
        write(std::cout);
        return;
    }
    fs::create_directories(flags.out);
    const fs::path path = fs::path(flags.out) / file;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw dsps::ConfigError("cannot write " + path.string());
    write(out);
    std::cerr << "wrote " << path.string() << '\n';
}

void write_tables(const Flags& flags, const std::vector<NamedTable>& tables) {
    for (const auto& t : tables) {
        if (flags.format == "json") {
            emit_text(flags, t.stem + ".json", [&](std::ostream& o) { o << t.table.to_json().dump(2) << '\n'; });
        } else {
            emit_text(flags, t.stem + ".csv", [&](std::ostream& o) { t.table.write_csv(o); });
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cavity-enhanced single-photon source and QKD link simulator"};
    app.set_version_flag("--version", std::string(DSPS_VERSION));
    app.require_subcommand(1);

    Flags flags;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", flags.config, "scenario JSON")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", flags.seed, "override the config seed");
        sub->add_option("--out", flags.out, "output directory (default: stdout)");
        sub->add_option("--threads", flags.threads, "worker threads, 0 = all cores");
        sub->add_option("--format", flags.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    };

    struct Command {
        const char* name;
        const char* help;
        std::function<void(const ScenarioConfig&, const RunOptions&)> run;
    };
    const std::vector<Command> commands = {
        {"emit", "master-equation time series of one cycle",
         [&](const ScenarioConfig& c, const RunOptions& o) { write_tables(flags, {{"emit", cmd_emit(c, o)}}); }},
        {"sweep-q", "emission probability against quality factor",
         [&](const ScenarioConfig& c, const RunOptions& o) {
             write_tables(flags, {{"sweep_q", cmd_sweep_q(c, o)}});
         }},
        {"sweep-excitation", "emission probabilities on a pulse width / pump rate grid",
         [&](const ScenarioConfig& c, const RunOptions& o) {
             write_tables(flags, {{"sweep_excitation", cmd_sweep_excitation(c, o)}});
         }},
        {"hbt", "trajectory ensemble and coincidence histogram",
         [&](const ScenarioConfig& c, const RunOptions& o) { write_tables(flags, cmd_hbt(c, o)); }},
        {"keyrate", "secure key rate per link",
         [&](const ScenarioConfig& c, const RunOptions& o) {
             write_tables(flags, {{"keyrate", cmd_keyrate(c, o)}});
         }},
        {"tables", "nominal emitter, fiber and free-space tables (JSON)",
         [&](const ScenarioConfig& c, const RunOptions& o) {
             const auto doc = cmd_tables(c, o);
             emit_text(flags, "tables.json", [&](std::ostream& s) { s << doc.dump(2) << '\n'; });
         }},
    };
    std::vector<CLI::App*> subs;
    for (const auto& c : commands) {
        subs.push_back(app.add_subcommand(c.name, c.help));
        add_common(subs.back());
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const ScenarioConfig config = load_config(flags.config);
        const RunOptions options{flags.seed, flags.threads};
        for (std::size_t i = 0; i < commands.size(); ++i) {
            if (subs[i]->parsed()) commands[i].run(config, options);
        }
    } catch (const dsps::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const dsps::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
