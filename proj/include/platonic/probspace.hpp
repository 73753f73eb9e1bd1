#pragma once

#include "platonic/rational.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace platonic::prob {

/// Thrown when objects over different outcome sets are combined, or when a
/// constructor is handed data that violates its invariants.
class StructuralError : public std::invalid_argument {
public:
    explicit StructuralError(const std::string& what) : std::invalid_argument(what) {}
};

/// Conditioning on a block with zero mass under the conditioning measure.
class NullBlockError : public std::domain_error {
public:
    explicit NullBlockError(const std::string& what) : std::domain_error(what) {}
};

/// One value per outcome.
using RandomVariable = std::vector<Rational>;

/**
 * Finite outcome set with a strictly positive reference probability.
 *
 * The sigma-algebra is the power set, so equivalence to the reference
 * measure means full support.
 */
class FiniteSpace {
public:
    /// Throws StructuralError unless labels are unique, every probability is
    /// strictly positive and the probabilities sum to exactly one.
    FiniteSpace() = default;
    FiniteSpace(std::vector<std::string> outcomes, std::vector<Rational> probs);

    /// Float-mode constructor: the sum may miss one by at most `tolerance`;
    /// the stored weights are rescaled to sum to exactly one.
    static FiniteSpace from_doubles(std::vector<std::string> outcomes, const std::vector<double>& probs,
                                    double tolerance = 1e-12);

    /// Uniform reference measure.
    static FiniteSpace uniform(std::vector<std::string> outcomes);

    std::size_t size() const { return outcomes_.size(); }
    const std::vector<std::string>& outcomes() const { return outcomes_; }
    const std::vector<Rational>& probs() const { return probs_; }
    std::size_t index_of(const std::string& label) const;

    bool operator==(const FiniteSpace&) const = default;

private:
    std::vector<std::string> outcomes_;
    std::vector<Rational> probs_;
};

/// Finite sigma-algebra represented by the partition of its atoms. Blocks are
/// stored canonically: sorted internally and ordered by smallest element.
class Partition {
public:
    using Block = std::vector<std::size_t>;

    Partition(std::size_t outcome_count, std::vector<Block> blocks);

    static Partition trivial(std::size_t outcome_count);
    static Partition discrete(std::size_t outcome_count);

    /// Atoms of the sigma-algebra generated by the given variables.
    static Partition generated_by(std::size_t outcome_count, std::span<const RandomVariable> variables);

    std::size_t outcome_count() const { return block_of_.size(); }
    std::size_t block_count() const { return blocks_.size(); }
    const std::vector<Block>& blocks() const { return blocks_; }
    const Block& block(std::size_t b) const { return blocks_[b]; }
    std::size_t block_of(std::size_t outcome) const { return block_of_[outcome]; }

    /// True iff `x` is constant on every block.
    bool measurable(const RandomVariable& x) const;

    bool operator==(const Partition& other) const { return blocks_ == other.blocks_; }

private:
    std::vector<Block> blocks_;
    std::vector<std::size_t> block_of_;
};

/// True iff every block of `fine` lies inside a block of `coarse`.
bool refines(const Partition& fine, const Partition& coarse);

/// Coarsest common refinement (sigma-algebra generated by both).
Partition join(const Partition& a, const Partition& b);

/// Finest common coarsening (intersection of the sigma-algebras).
Partition meet(const Partition& a, const Partition& b);

/// Increasing family of partitions on a strictly increasing grid of times in
/// [0,1]. Between and before grid points the latest earlier partition applies;
/// before the first time the trivial partition applies.
class Filtration {
public:
    Filtration() = default;
    Filtration(std::vector<Rational> times, std::vector<Partition> partitions);

    static Filtration trivial(std::size_t outcome_count, std::vector<Rational> times);
    static Filtration discrete(std::size_t outcome_count, std::vector<Rational> times);

    /// Natural filtration of the given processes: the partition at times[k] is
    /// generated by every process value at times[0..k]. `processes[p][k]` is
    /// process p at times[k].
    static Filtration natural(std::size_t outcome_count, std::vector<Rational> times,
                              std::span<const std::vector<RandomVariable>> processes);

    std::size_t outcome_count() const { return partitions_.front().outcome_count(); }
    const std::vector<Rational>& times() const { return times_; }
    const std::vector<Partition>& partitions() const { return partitions_; }

    /// Partition at the latest time <= t, or trivial if there is none.
    Partition at(const Rational& t) const;

    bool operator==(const Filtration&) const = default;

private:
    std::vector<Rational> times_;
    std::vector<Partition> partitions_;
};

/// Pointwise containment: for every time t of `small`, the partition of `big`
/// in force at t refines the partition of `small` at t.
bool is_sub_filtration(const Filtration& small, const Filtration& big);

/// Per-time join of two filtrations over the union of their time grids.
Filtration join(const Filtration& a, const Filtration& b);

/// Information delayed by `delay`: on the grid of `base`, the partition at t
/// is the base partition at the latest base time <= t - delay.
Filtration delayed_filtration(const Filtration& base, const Rational& delay);

/// Weighted block averages of `x` under `weights`. A block of zero weight is
/// averaged under `null_block_reference` when one is supplied; otherwise the
/// conditional expectation is ambiguous and NullBlockError is thrown.
template <class Scalar>
std::vector<Scalar> block_average(std::span<const Scalar> x, const Partition& part, std::span<const Scalar> weights,
                                  std::optional<std::span<const Scalar>> null_block_reference = std::nullopt) {
    if (x.size() != part.outcome_count() || weights.size() != part.outcome_count())
        throw StructuralError("conditional expectation: outcome count mismatch");
    if (null_block_reference && null_block_reference->size() != part.outcome_count())
        throw StructuralError("conditional expectation: reference measure has wrong length");
    std::vector<Scalar> out(x.size());
    for (const auto& block : part.blocks()) {
        Scalar mass = 0, total = 0;
        for (std::size_t w : block) {
            if (weights[w] < 0) throw std::domain_error("conditional expectation: negative weight");
            mass += weights[w];
            total += weights[w] * x[w];
        }
        if (mass == 0) {
            if (!null_block_reference)
                throw NullBlockError("conditional expectation: block containing outcome " + std::to_string(block.front()) +
                                     " has zero mass");
            const auto& ref = *null_block_reference;
            mass = 0;
            total = 0;
            for (std::size_t w : block) {
                mass += ref[w];
                total += ref[w] * x[w];
            }
            if (mass == 0) throw NullBlockError("conditional expectation: block null under the reference measure too");
        }
        Scalar value = total / mass;
        for (std::size_t w : block) out[w] = value;
    }
    return out;
}

/// Exact conditional expectation E_q[x | part]. `q` need not be normalised.
RandomVariable conditional_expectation(const RandomVariable& x, const Partition& part, std::span<const Rational> q,
                                       std::optional<std::span<const Rational>> null_block_reference = std::nullopt);

/// Float-mode conditional expectation.
std::vector<double> conditional_expectation(std::span<const double> x, const Partition& part,
                                            std::span<const double> q);

/// Sum over outcomes of q(w) x(w); the expectation when q is a probability.
Rational expectation(const RandomVariable& x, std::span<const Rational> q);

RandomVariable constant(std::size_t outcome_count, const Rational& value);

}  // namespace platonic::prob
