#pragma once

#include <cstdint>
#include <string>

#include "mfaz/server.hpp"

namespace mfaz {

/// Service deployment settings, read from a `key = value` file with '#'
/// comments. Recognized keys: bf.capacity, bf.fpr, session.ttl_secs,
/// enroll.bootstrap_count, sga.max, ledger.backend (memory|file),
/// ledger.path, rules.path, port. MFAZ_PORT in the environment overrides
/// the configured port.
struct ServiceConfig {
    ServerConfig server;
    std::string ledger_backend = "memory";
    std::string ledger_path = "mfaz-ledger.bin";
    std::string rules_path;
    std::uint16_t port = 7461;
};

ServiceConfig parse_service_config(std::string_view text);
ServiceConfig load_service_config(const std::string& path);

/// Applies MFAZ_PORT when set; throws Error{RejectFormat} on a bad value.
void apply_env_overrides(ServiceConfig& config);

}  // namespace mfaz
