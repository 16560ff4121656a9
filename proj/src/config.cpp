#include "mfaz/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mfaz/errors.hpp"

namespace mfaz {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        std::uint64_t v = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorCode::RejectFormat, key + ": not an integer: " + value);
    }
}

}  // namespace

ServiceConfig parse_service_config(std::string_view text) {
    ServiceConfig config;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t comment = line.find('#');
        if (comment != std::string::npos) line.resize(comment);
        line = trim(line);
        if (line.empty()) continue;

        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::RejectFormat,
                        "config line " + std::to_string(line_no) +
                            ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));

        if (key == "bf.capacity") {
            config.server.bf_capacity = parse_u64(key, value);
        } else if (key == "bf.fpr") {
            try {
                config.server.bf_fpr = std::stod(value);
            } catch (const std::exception&) {
                throw Error(ErrorCode::RejectFormat, "bf.fpr: bad value " + value);
            }
        } else if (key == "session.ttl_secs") {
            config.server.session_ttl_secs = parse_u64(key, value);
        } else if (key == "enroll.bootstrap_count") {
            config.server.bootstrap_count = std::uint32_t(parse_u64(key, value));
        } else if (key == "sga.max") {
            config.server.sga_max = std::uint32_t(parse_u64(key, value));
        } else if (key == "ledger.backend") {
            if (value != "memory" && value != "file")
                throw Error(ErrorCode::RejectFormat,
                            "ledger.backend must be memory or file");
            config.ledger_backend = value;
        } else if (key == "ledger.path") {
            config.ledger_path = value;
        } else if (key == "rules.path") {
            config.rules_path = value;
        } else if (key == "port") {
            std::uint64_t port = parse_u64(key, value);
            if (port > 65535)
                throw Error(ErrorCode::RejectFormat, "port out of range");
            config.port = std::uint16_t(port);
        } else {
            throw Error(ErrorCode::RejectFormat,
                        "config line " + std::to_string(line_no) +
                            ": unknown key '" + key + "'");
        }
    }
    return config;
}

ServiceConfig load_service_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::RejectFormat, "cannot open config " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_service_config(buf.str());
}

void apply_env_overrides(ServiceConfig& config) {
    if (const char* port = std::getenv("MFAZ_PORT")) {
        std::uint64_t v = parse_u64("MFAZ_PORT", port);
        if (v > 65535)
            throw Error(ErrorCode::RejectFormat, "MFAZ_PORT out of range");
        config.port = std::uint16_t(v);
    }
}

}  // namespace mfaz
