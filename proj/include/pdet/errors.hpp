#pragma once

#include <stdexcept>
#include <string>

namespace pdet {

// Every contract violation in the library throws pdet::Error with one of these
// codes, so callers (and tests) can dispatch without parsing message strings.
enum class ErrorCode {
    // signal_core
    SignalTooShort,
    ZeroVariance,
    BandOutOfRange,
    // spectral
    BadNfft,
    EmptyBand,
    ZeroBandPower,
    BinMismatch,
    ZeroTotalPower,
    // loss
    DegenerateOutput,
    NonFiniteLoss,
    // autodiff / model
    ShapeMismatch,
    InputTooShort,
    GraphConsumed,
    BadLength,
    // persistence
    BadMagic,
    UnsupportedVersion,
    CorruptCheckpoint,
    Truncated,
    IoError,
    // datagen
    BadFrequency,
    BadConfig,
    ParseError,
    EmptyFile,
    // metrics / eval
    LengthMismatch,
    ZeroTruth,
    ConstantSequence,
    NoLabels,
    AllSamplesFailed,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::SignalTooShort:     return "SignalTooShort";
        case ErrorCode::ZeroVariance:       return "ZeroVariance";
        case ErrorCode::BandOutOfRange:     return "BandOutOfRange";
        case ErrorCode::BadNfft:            return "BadNfft";
        case ErrorCode::EmptyBand:          return "EmptyBand";
        case ErrorCode::ZeroBandPower:      return "ZeroBandPower";
        case ErrorCode::BinMismatch:        return "BinMismatch";
        case ErrorCode::ZeroTotalPower:     return "ZeroTotalPower";
        case ErrorCode::DegenerateOutput:   return "DegenerateOutput";
        case ErrorCode::NonFiniteLoss:      return "NonFiniteLoss";
        case ErrorCode::ShapeMismatch:      return "ShapeMismatch";
        case ErrorCode::InputTooShort:      return "InputTooShort";
        case ErrorCode::GraphConsumed:      return "GraphConsumed";
        case ErrorCode::BadLength:          return "BadLength";
        case ErrorCode::BadMagic:           return "BadMagic";
        case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
        case ErrorCode::CorruptCheckpoint:  return "CorruptCheckpoint";
        case ErrorCode::Truncated:          return "Truncated";
        case ErrorCode::IoError:            return "IoError";
        case ErrorCode::BadFrequency:       return "BadFrequency";
        case ErrorCode::BadConfig:          return "BadConfig";
        case ErrorCode::ParseError:         return "ParseError";
        case ErrorCode::EmptyFile:          return "EmptyFile";
        case ErrorCode::LengthMismatch:     return "LengthMismatch";
        case ErrorCode::ZeroTruth:          return "ZeroTruth";
        case ErrorCode::ConstantSequence:   return "ConstantSequence";
        case ErrorCode::NoLabels:           return "NoLabels";
        case ErrorCode::AllSamplesFailed:   return "AllSamplesFailed";
    }
    return "Unknown";
}

} // namespace pdet
