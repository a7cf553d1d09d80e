#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sddhopf {

/// Failure categories raised by the library. The CLI maps each onto an exit code.
enum class ErrorKind {
    InvalidArgument,
    NoConvergence,
    NonPositive,
    DenominatorBreach,
    NoRoot,
    HypothesisViolated,
    UnhandledRegime,
    SingularFrame,
    ResonanceViolation,
    DegenerateProjection,
    NoSignChange,
    HistoryTooShort,
    NoBracket,
    InsufficientCycles,
    Incompatible,
    InternalCheck,
    Config,
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::NonPositive: return "NonPositive";
        case ErrorKind::DenominatorBreach: return "DenominatorBreach";
        case ErrorKind::NoRoot: return "NoRoot";
        case ErrorKind::HypothesisViolated: return "HypothesisViolated";
        case ErrorKind::UnhandledRegime: return "UnhandledRegime";
        case ErrorKind::SingularFrame: return "SingularFrame";
        case ErrorKind::ResonanceViolation: return "ResonanceViolation";
        case ErrorKind::DegenerateProjection: return "DegenerateProjection";
        case ErrorKind::NoSignChange: return "NoSignChange";
        case ErrorKind::HistoryTooShort: return "HistoryTooShort";
        case ErrorKind::NoBracket: return "NoBracket";
        case ErrorKind::InsufficientCycles: return "InsufficientCycles";
        case ErrorKind::Incompatible: return "Incompatible";
        case ErrorKind::InternalCheck: return "InternalCheck";
        case ErrorKind::Config: return "Config";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& what) {
    if (!condition) throw Error(kind, what);
}

}  // namespace sddhopf
