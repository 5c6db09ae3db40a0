#pragma once

#include <stdexcept>
#include <string>

namespace dim3 {

// Error categories map onto CLI exit codes (config=2, data=3, numeric=4).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class ModelKind {
    MtvGibbs,
    MtvSlice,
    MtiGibbs,
    FiniteMtv,
    FiniteMti,
};

inline const char* to_string(ModelKind m) {
    switch (m) {
        case ModelKind::MtvGibbs: return "mtv-gibbs";
        case ModelKind::MtvSlice: return "mtv-slice";
        case ModelKind::MtiGibbs: return "mti-gibbs";
        case ModelKind::FiniteMtv: return "f-mtv";
        case ModelKind::FiniteMti: return "f-mti";
    }
    return "?";
}

inline bool parse_model_kind(const std::string& s, ModelKind& out) {
    if (s == "mtv-gibbs") { out = ModelKind::MtvGibbs; return true; }
    if (s == "mtv-slice") { out = ModelKind::MtvSlice; return true; }
    if (s == "mti-gibbs" || s == "mti") { out = ModelKind::MtiGibbs; return true; }
    if (s == "f-mtv") { out = ModelKind::FiniteMtv; return true; }
    if (s == "f-mti") { out = ModelKind::FiniteMti; return true; }
    return false;
}

}  // namespace dim3
