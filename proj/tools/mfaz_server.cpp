#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "mfaz/config.hpp"
#include "mfaz/errors.hpp"
#include "mfaz/ledger.hpp"
#include "mfaz/policy.hpp"
#include "mfaz/server.hpp"
#include "mfaz/service.hpp"

namespace {

volatile std::sig_atomic_t g_stop = 0;

void on_signal(int) { g_stop = 1; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mfaz-server: multi-factor authorization service"};
    std::string config_path;
    app.add_option("--config", config_path, "path to key = value config file");

    CLI11_PARSE(app, argc, argv);

    try {
        mfaz::ServiceConfig config;
        if (!config_path.empty())
            config = mfaz::load_service_config(config_path);
        mfaz::apply_env_overrides(config);

        std::unique_ptr<mfaz::Ledger> ledger;
        if (config.ledger_backend == "file")
            ledger = std::make_unique<mfaz::FileLedger>(config.ledger_path);
        else
            ledger = std::make_unique<mfaz::InMemoryLedger>();

        mfaz::AuthzServer server(*ledger, config.server);

        if (!config.rules_path.empty()) {
            std::ifstream rules_file(config.rules_path);
            if (!rules_file) {
                std::cerr << "error: cannot open rules file " << config.rules_path
                          << "\n";
                return 1;
            }
            std::ostringstream buf;
            buf << rules_file.rdbuf();
            mfaz::RuleSet rules = mfaz::parse_rules_text(buf.str());
            mfaz::ruleset_store(rules, *ledger);
            std::cout << "loaded " << rules.rules.size() << " rules from "
                      << config.rules_path << "\n";
        }

        mfaz::WireService service(server, config.port, &std::cout);
        service.start();
        std::cout << "mfaz-server listening on 127.0.0.1:" << service.port()
                  << " (ledger=" << config.ledger_backend << ")\n";

        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        while (!g_stop)
            std::this_thread::sleep_for(std::chrono::milliseconds(100));

        std::cout << "shutting down\n";
        service.stop();
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
