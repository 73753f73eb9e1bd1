#pragma once

#include "platonic/rational.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace platonic::lp {

enum class Sense { maximize, minimize };
enum class Relation { less_equal, equal, greater_equal };
enum class Status { optimal, infeasible, unbounded };
enum class Arithmetic { exact, floating };

std::string to_string(Status status);
std::string to_string(Arithmetic arithmetic);

struct Constraint {
    std::vector<Rational> coeffs;
    Relation relation = Relation::less_equal;
    Rational rhs;
};

/**
 * Dense linear program. Variables default to [0, +inf); use set_free or
 * set_bounds to change that. Missing bounds mean infinite.
 */
struct LinearProgram {
    Sense sense = Sense::maximize;
    std::vector<Rational> objective;
    std::vector<Constraint> constraints;
    std::vector<std::optional<Rational>> lower;
    std::vector<std::optional<Rational>> upper;

    LinearProgram() = default;
    LinearProgram(std::size_t variables, Sense s = Sense::maximize);

    std::size_t num_variables() const { return objective.size(); }

    /// Appends a variable with the given objective coefficient and bounds;
    /// existing constraints get a zero coefficient. Returns its index.
    std::size_t add_variable(const Rational& cost, std::optional<Rational> lo = Rational(0),
                             std::optional<Rational> hi = std::nullopt);
    void add_constraint(std::vector<Rational> coeffs, Relation relation, Rational rhs);
    void set_free(std::size_t j);
    void set_bounds(std::size_t j, std::optional<Rational> lo, std::optional<Rational> hi);

    /// Throws std::invalid_argument when dimensions disagree.
    void check_dimensions() const;
};

struct SolveOptions {
    Arithmetic arithmetic = Arithmetic::exact;
    /// Feasibility and certification tolerance in float mode; unused in exact mode.
    double tolerance = 1e-9;
    std::size_t max_iterations = 200000;
};

/**
 * Result of a solve. Dual values satisfy the usual sign conventions for the
 * stated sense, and with reduced costs d = c - A^T y the dual objective is
 * b^T y plus the bound contributions of d. In exact mode primal feasibility,
 * complementary slackness and objective == dual_objective hold exactly.
 */
struct LpSolution {
    Status status = Status::infeasible;
    Arithmetic arithmetic = Arithmetic::exact;
    std::vector<Rational> primal;
    std::vector<Rational> duals;
    Rational objective;
    Rational dual_objective;
    std::size_t iterations = 0;
};

/// Float-mode solve that could not be certified within tolerance.
class NumericalFailure : public std::runtime_error {
public:
    explicit NumericalFailure(const std::string& what)
        : std::runtime_error(what + " (retry in exact mode)") {}
};

/// Simplex iteration limit hit.
class IterationLimit : public std::runtime_error {
public:
    explicit IterationLimit(const std::string& what) : std::runtime_error(what) {}
};

/**
 * Two-phase dense tableau simplex. Exact mode pivots on GMP rationals with
 * Bland's rule, so it terminates and ties break by lowest index. Float mode
 * runs the same pivoting in double and then certifies the answer against the
 * original data; a failed certificate raises NumericalFailure instead of
 * returning a possibly wrong status.
 */
LpSolution solve(const LinearProgram& lp, const SolveOptions& options = {});

/// Residuals of an optimal solution against `lp`, all zero in exact mode.
struct Certificate {
    Rational primal_infeasibility;
    Rational dual_infeasibility;
    Rational complementary_slackness;
    Rational duality_gap;
    bool exact_zero() const {
        return primal_infeasibility == 0 && dual_infeasibility == 0 && complementary_slackness == 0 &&
               duality_gap == 0;
    }
};

/// Recomputes primal/dual feasibility and complementary slackness from the
/// original problem data. Requires status == optimal.
Certificate certify(const LinearProgram& lp, const LpSolution& solution);

class DimensionGuard : public std::length_error {
public:
    explicit DimensionGuard(const std::string& what) : std::length_error(what) {}
};

/**
 * All vertices of the polyhedron {constraints, bounds} of `polytope` (the
 * objective is ignored), by brute-force enumeration of linearly independent
 * active sets in exact arithmetic. Output is sorted and deduplicated.
 * The polyhedron must be bounded; throws DimensionGuard when it has more than
 * `max_dimension` variables and std::domain_error when it is unbounded.
 */
std::vector<std::vector<Rational>> enumerate_vertices(const LinearProgram& polytope, std::size_t max_dimension = 12);

}  // namespace platonic::lp
