#include "mfaz/errors.hpp"

namespace mfaz {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::RejectEncoding: return "REJECT_ENCODING";
        case ErrorCode::RejectParams: return "REJECT_PARAMS";
        case ErrorCode::RejectState: return "REJECT_STATE";
        case ErrorCode::RejectFormat: return "REJECT_FORMAT";
        case ErrorCode::RejectFrame: return "REJECT_FRAME";
        case ErrorCode::RejectPayload: return "REJECT_PAYLOAD";
        case ErrorCode::Conflict: return "CONFLICT";
        case ErrorCode::NotFound: return "NOT_FOUND";
        case ErrorCode::AlreadyEnrolled: return "ALREADY_ENROLLED";
        case ErrorCode::AuthFail: return "AUTH_FAIL";
        case ErrorCode::UnknownUser: return "UNKNOWN_USER";
        case ErrorCode::VaultEmpty: return "VAULT_EMPTY";
        case ErrorCode::NotInVault: return "NOT_IN_VAULT";
        case ErrorCode::LedgerUnavailable: return "LEDGER_UNAVAILABLE";
        case ErrorCode::ScenarioSetupFail: return "SCENARIO_SETUP_FAIL";
        case ErrorCode::Transport: return "TRANSPORT";
    }
    return "UNKNOWN";
}

}  // namespace mfaz
