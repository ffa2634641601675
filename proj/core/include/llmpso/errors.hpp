#pragma once

#include <cstddef>
#include <exception>
#include <stdexcept>
#include <string>

namespace llmpso {

/// Base for every error raised by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration: bad bounds, empty swarm, inconsistent settings.
class config_error : public error {
public:
    using error::error;
};

/// Argument outside the domain of a pure objective.
class domain_error : public error {
public:
    using error::error;
};

/// An objective evaluation failed (timeout, dead evaluator, non-finite cost).
class evaluation_error : public error {
public:
    using error::error;
};

/// A peer replied with something that does not follow the wire protocol.
/// The offending payload is kept verbatim.
class protocol_error : public error {
public:
    protocol_error(const std::string& what, std::string raw)
        : error(what), raw_(std::move(raw)) {}

    const std::string& raw() const noexcept { return raw_; }

private:
    std::string raw_;
};

/// Advisor response text that cannot be turned into suggestions.
class parse_error : public error {
public:
    parse_error(const std::string& what, std::string raw)
        : error(what), raw_(std::move(raw)) {}

    const std::string& raw() const noexcept { return raw_; }

private:
    std::string raw_;
};

/// Network or process failure while talking to an advisor backend.
class transport_error : public error {
public:
    using error::error;
};

/// Advisor gave up after exhausting its retries on transport failures.
class advisor_error : public error {
public:
    using error::error;
};

class io_error : public error {
public:
    using error::error;
};

/// Evaluation failure inside a batch, tagged with the particle index.
/// The original exception is kept in cause().
class step_error : public evaluation_error {
public:
    step_error(const std::string& what, std::size_t particle, std::exception_ptr cause)
        : evaluation_error(what), particle_(particle), cause_(std::move(cause)) {}

    std::size_t particle() const noexcept { return particle_; }
    const std::exception_ptr& cause() const noexcept { return cause_; }

private:
    std::size_t particle_;
    std::exception_ptr cause_;
};

}  // namespace llmpso
