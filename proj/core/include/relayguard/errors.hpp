#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace relayguard {

enum class Errc {
    MalformedRow,
    MissingColumn,
    EmptyTrace,
    EmptyInput,
    InvalidProfile,
    StatsMismatch,
    CorruptSnapshot,
    InfeasibleDegree,
    OriginOutOfRange,
    LabelMismatch,
    InvalidMix,
    InvalidConfig,
    SinkUnwritable,
};

std::string_view errc_name(Errc code) noexcept;

/// All data-level failures raised by the library. The CLI maps these onto
/// exit code 2; anything else escaping is a bug.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace relayguard
