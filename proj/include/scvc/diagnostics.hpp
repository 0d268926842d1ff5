#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace scvc {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct SourceLoc {
    int line = 0;  // 1-based; 0 = unknown
    int column = 0;

    std::string str() const {
        return std::to_string(line) + ":" + std::to_string(column);
    }
};

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string message;
    SourceLoc loc;

    std::string str() const {
        std::ostringstream os;
        os << (severity == Severity::Error ? "error" : "warning");
        if (loc.line > 0) os << " at " << loc.str();
        os << ": " << message;
        return os.str();
    }
};

using Diagnostics = std::vector<Diagnostic>;

inline bool hasErrors(const Diagnostics& ds) {
    for (const auto& d : ds)
        if (d.severity == Severity::Error) return true;
    return false;
}

inline Diagnostic errorDiag(std::string msg, SourceLoc loc = {}) {
    return Diagnostic{Severity::Error, std::move(msg), loc};
}

inline Diagnostic warningDiag(std::string msg, SourceLoc loc = {}) {
    return Diagnostic{Severity::Warning, std::move(msg), loc};
}

}  // namespace scvc
