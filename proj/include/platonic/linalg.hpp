#pragma once

#include "platonic/rational.hpp"

#include <optional>
#include <vector>

// Exact dense linear algebra on column lists. A "column list" holds the
// columns of a matrix; every column has the same length (the row count).
namespace platonic::linalg {

using Vector = std::vector<Rational>;
using Columns = std::vector<Vector>;

std::size_t rank(const Columns& columns, std::size_t rows);

/// Some x with sum_j x_j columns[j] == target, or nullopt when target is not
/// in the column span. Free variables are set to zero.
std::optional<Vector> solve_in_span(const Columns& columns, const Vector& target);

/// Basis of {y : y . columns[j] == 0 for all j} in R^rows.
Columns left_null_space(const Columns& columns, std::size_t rows);

/// Basis of {x : sum_j x_j columns[j] == 0}.
Columns null_space(const Columns& columns, std::size_t rows);

Rational dot(const Vector& a, const Vector& b);

}  // namespace platonic::linalg
