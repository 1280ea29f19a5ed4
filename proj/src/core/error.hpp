#pragma once

#include <stdexcept>
#include <string>

namespace spinglass {

enum class Errc {
    invalid_argument,
    parse,
    too_large,
    io,
    no_target,
    search_failed,
    internal,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

} // namespace spinglass
