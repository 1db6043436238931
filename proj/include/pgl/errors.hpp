#pragma once

#include <stdexcept>
#include <string>

namespace pgl {

struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct geometry_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct solver_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace pgl
