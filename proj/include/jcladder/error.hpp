// error.hpp: exception types shared by the jcladder headers

#pragma once

#include <stdexcept>
#include <string>

namespace jcladder {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Inputs that violate a documented precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// A requested level, photon number or matrix index is outside the stored range.
class IndexOutOfRange : public Error {
public:
    using Error::Error;
};

// Eigensolver or root finder failed to deliver the requested accuracy.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

// Config document errors carry the offending field path in the message.
class ConfigError : public Error {
public:
    ConfigError(const std::string& path, const std::string& what)
        : Error(path + ": " + what), path_(path) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

} // namespace jcladder
