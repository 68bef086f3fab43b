#pragma once

#include <stdexcept>
#include <string>

namespace edf {

enum class ErrorKind {
    Config,  // bad configuration or arguments
    Data,    // malformed or inconsistent input data
    Model,   // estimation / numerical failure
    Io,      // filesystem problems
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail_config(const std::string& msg) { throw Error(ErrorKind::Config, msg); }
[[noreturn]] inline void fail_data(const std::string& msg) { throw Error(ErrorKind::Data, msg); }
[[noreturn]] inline void fail_model(const std::string& msg) { throw Error(ErrorKind::Model, msg); }
[[noreturn]] inline void fail_io(const std::string& msg) { throw Error(ErrorKind::Io, msg); }

}  // namespace edf
