#pragma once

#include <stdexcept>
#include <string>

namespace henopt {

// Input data violates a schema or names an unknown entity.
struct schema_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A value falls outside the domain it is defined on.
struct domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A piecewise-linear fit cannot reach its target.
struct fit_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Model construction misuse (duplicate names, undeclared variables, ...).
struct model_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A PWL-to-MILP encoding cannot be built as requested.
struct encoding_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Solver backend missing or failing outside of normal statuses.
struct solver_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace henopt
