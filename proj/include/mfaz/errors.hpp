#pragma once

#include <stdexcept>
#include <string>

namespace mfaz {

enum class ErrorCode {
    RejectEncoding,     // malformed TLV field list
    RejectParams,       // invalid filter parameters
    RejectState,        // corrupted in-memory structure
    RejectFormat,       // malformed serialized input
    RejectFrame,        // malformed wire frame
    RejectPayload,      // empty or oversized ledger payload
    Conflict,           // stale optimistic-concurrency token on append
    NotFound,
    AlreadyEnrolled,
    AuthFail,
    UnknownUser,
    VaultEmpty,
    NotInVault,
    LedgerUnavailable,  // infrastructure failure; authorization fails closed
    ScenarioSetupFail,
    Transport,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code), message_(message) {}

    ErrorCode code() const noexcept { return code_; }
    /// The message without the code-name prefix (what() carries both).
    const std::string& message() const noexcept { return message_; }

private:
    ErrorCode code_;
    std::string message_;
};

}  // namespace mfaz
