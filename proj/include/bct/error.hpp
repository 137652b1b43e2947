#pragma once

#include <stdexcept>
#include <string>

namespace bct {

/// Error category, mapped to CLI exit codes (usage=2, data=3, resource=4).
enum class ErrorKind {
    Usage,
    Data,
    Resource,
    Internal,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

    int exit_code() const {
        switch (kind_) {
            case ErrorKind::Usage: return 2;
            case ErrorKind::Data: return 3;
            case ErrorKind::Resource: return 4;
            case ErrorKind::Internal: return 1;
        }
        return 1;
    }

  private:
    ErrorKind kind_;
};

inline Error usage_error(const std::string& msg) { return Error(ErrorKind::Usage, msg); }
inline Error data_error(const std::string& msg) { return Error(ErrorKind::Data, msg); }
inline Error resource_error(const std::string& msg) { return Error(ErrorKind::Resource, msg); }
inline Error internal_error(const std::string& msg) { return Error(ErrorKind::Internal, msg); }

}  // namespace bct
