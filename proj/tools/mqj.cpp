#include "mqj/config.hpp"
#include "mqj/experiments.hpp"

#include <iostream>

int main(int argc, char** argv) {
    try {
        const auto cmd = mqj::parse_command_line(argc, argv);
        if (cmd.help) {
            std::cout << *cmd.help;
            return mqj::kExitOk;
        }
        return mqj::run_experiment(cmd.config, std::cout, std::cerr);
    } catch (const mqj::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return mqj::kExitConfig;
    }
}
