#pragma once

#include <stdexcept>
#include <string>

namespace vawt {

/// Malformed input file (polar table, config, CSV). Carries the offending line when known.
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

/// A parsed value violates a documented invariant; names the field.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(field) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Time step violates a stability limit; suggests a stable value.
class StepError : public std::runtime_error {
public:
    StepError(const std::string& what, double suggested_dt)
        : std::runtime_error(what), suggested_dt_(suggested_dt) {}

    double suggested_dt() const noexcept { return suggested_dt_; }

private:
    double suggested_dt_;
};

}  // namespace vawt
