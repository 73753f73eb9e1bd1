#include "platonic/probspace.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace platonic::prob {

FiniteSpace::FiniteSpace(std::vector<std::string> outcomes, std::vector<Rational> probs)
    : outcomes_(std::move(outcomes)), probs_(std::move(probs)) {
    if (outcomes_.empty()) throw StructuralError("finite space needs at least one outcome");
    if (outcomes_.size() != probs_.size())
        throw StructuralError("finite space: " + std::to_string(outcomes_.size()) + " outcomes but " +
                              std::to_string(probs_.size()) + " probabilities");
    std::set<std::string> seen;
    for (const auto& label : outcomes_)
        if (!seen.insert(label).second) throw StructuralError("finite space: duplicate outcome label '" + label + "'");
    Rational total = 0;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
        if (probs_[i] <= 0)
            throw StructuralError("finite space: outcome '" + outcomes_[i] + "' has non-positive probability " +
                                  to_string(probs_[i]));
        total += probs_[i];
    }
    if (total != 1) throw StructuralError("finite space: probabilities sum to " + to_string(total));
}

FiniteSpace FiniteSpace::from_doubles(std::vector<std::string> outcomes, const std::vector<double>& probs,
                                      double tolerance) {
    double total = std::accumulate(probs.begin(), probs.end(), 0.0);
    if (std::abs(total - 1.0) > tolerance)
        throw StructuralError("finite space: probabilities sum to " + std::to_string(total));
    std::vector<Rational> exact;
    exact.reserve(probs.size());
    Rational sum = 0;
    for (double p : probs) {
        exact.push_back(rational_from_double(p));
        sum += exact.back();
    }
    if (sum <= 0) throw StructuralError("finite space: probabilities sum to zero");
    for (auto& p : exact) p /= sum;
    return FiniteSpace(std::move(outcomes), std::move(exact));
}

FiniteSpace FiniteSpace::uniform(std::vector<std::string> outcomes) {
    std::vector<Rational> probs(outcomes.size(), Rational(1, static_cast<unsigned long>(outcomes.size())));
    return FiniteSpace(std::move(outcomes), std::move(probs));
}

std::size_t FiniteSpace::index_of(const std::string& label) const {
    auto it = std::find(outcomes_.begin(), outcomes_.end(), label);
    if (it == outcomes_.end()) throw StructuralError("unknown outcome label '" + label + "'");
    return static_cast<std::size_t>(it - outcomes_.begin());
}

Partition::Partition(std::size_t outcome_count, std::vector<Block> blocks) : blocks_(std::move(blocks)) {
    constexpr auto unassigned = static_cast<std::size_t>(-1);
    block_of_.assign(outcome_count, unassigned);
    for (auto& block : blocks_) {
        if (block.empty()) throw StructuralError("partition: empty block");
        std::sort(block.begin(), block.end());
    }
    std::sort(blocks_.begin(), blocks_.end(), [](const Block& a, const Block& b) { return a.front() < b.front(); });
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
        for (std::size_t w : blocks_[b]) {
            if (w >= outcome_count)
                throw StructuralError("partition: outcome index " + std::to_string(w) + " out of range");
            if (block_of_[w] != unassigned)
                throw StructuralError("partition: outcome " + std::to_string(w) + " lies in two blocks");
            block_of_[w] = b;
        }
    }
    for (std::size_t w = 0; w < outcome_count; ++w)
        if (block_of_[w] == unassigned) throw StructuralError("partition: outcome " + std::to_string(w) + " not covered");
}

Partition Partition::trivial(std::size_t outcome_count) {
    Block all(outcome_count);
    std::iota(all.begin(), all.end(), std::size_t{0});
    return Partition(outcome_count, {std::move(all)});
}

Partition Partition::discrete(std::size_t outcome_count) {
    std::vector<Block> blocks;
    blocks.reserve(outcome_count);
    for (std::size_t w = 0; w < outcome_count; ++w) blocks.push_back({w});
    return Partition(outcome_count, std::move(blocks));
}

Partition Partition::generated_by(std::size_t outcome_count, std::span<const RandomVariable> variables) {
    std::map<std::vector<Rational>, Block> atoms;
    for (std::size_t w = 0; w < outcome_count; ++w) {
        std::vector<Rational> key;
        key.reserve(variables.size());
        for (const auto& v : variables) {
            if (v.size() != outcome_count) throw StructuralError("generated partition: variable has wrong length");
            key.push_back(v[w]);
        }
        atoms[key].push_back(w);
    }
    std::vector<Block> blocks;
    for (auto& [key, block] : atoms) blocks.push_back(std::move(block));
    return Partition(outcome_count, std::move(blocks));
}

bool Partition::measurable(const RandomVariable& x) const {
    if (x.size() != outcome_count()) throw StructuralError("measurability: outcome count mismatch");
    for (const auto& block : blocks_)
        for (std::size_t w : block)
            if (x[w] != x[block.front()]) return false;
    return true;
}

bool refines(const Partition& fine, const Partition& coarse) {
    if (fine.outcome_count() != coarse.outcome_count())
        throw StructuralError("refines: partitions over " + std::to_string(fine.outcome_count()) + " and " +
                              std::to_string(coarse.outcome_count()) + " outcomes");
    for (const auto& block : fine.blocks()) {
        std::size_t target = coarse.block_of(block.front());
        for (std::size_t w : block)
            if (coarse.block_of(w) != target) return false;
    }
    return true;
}

Partition join(const Partition& a, const Partition& b) {
    if (a.outcome_count() != b.outcome_count()) throw StructuralError("join: outcome count mismatch");
    std::map<std::pair<std::size_t, std::size_t>, Partition::Block> atoms;
    for (std::size_t w = 0; w < a.outcome_count(); ++w) atoms[{a.block_of(w), b.block_of(w)}].push_back(w);
    std::vector<Partition::Block> blocks;
    for (auto& [key, block] : atoms) blocks.push_back(std::move(block));
    return Partition(a.outcome_count(), std::move(blocks));
}

Partition meet(const Partition& a, const Partition& b) {
    if (a.outcome_count() != b.outcome_count()) throw StructuralError("meet: outcome count mismatch");
    const std::size_t n = a.outcome_count();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const Partition* p : {&a, &b})
        for (const auto& block : p->blocks())
            for (std::size_t w : block) parent[find(w)] = find(block.front());
    std::map<std::size_t, Partition::Block> groups;
    for (std::size_t w = 0; w < n; ++w) groups[find(w)].push_back(w);
    std::vector<Partition::Block> blocks;
    for (auto& [root, block] : groups) blocks.push_back(std::move(block));
    return Partition(n, std::move(blocks));
}

Filtration::Filtration(std::vector<Rational> times, std::vector<Partition> partitions)
    : times_(std::move(times)), partitions_(std::move(partitions)) {
    if (times_.empty()) throw StructuralError("filtration needs at least one time");
    if (times_.size() != partitions_.size()) throw StructuralError("filtration: one partition per time required");
    if (times_.front() < 0 || times_.back() > 1) throw StructuralError("filtration: times must lie in [0,1]");
    for (std::size_t k = 1; k < times_.size(); ++k) {
        if (times_[k] <= times_[k - 1]) throw StructuralError("filtration: times must be strictly increasing");
        if (partitions_[k].outcome_count() != partitions_[0].outcome_count())
            throw StructuralError("filtration: partitions over different outcome counts");
        if (!refines(partitions_[k], partitions_[k - 1]))
            throw StructuralError("filtration: partition at t=" + to_string(times_[k]) +
                                  " does not refine the one at t=" + to_string(times_[k - 1]));
    }
}

Filtration Filtration::trivial(std::size_t outcome_count, std::vector<Rational> times) {
    std::vector<Partition> parts(times.size(), Partition::trivial(outcome_count));
    return Filtration(std::move(times), std::move(parts));
}

Filtration Filtration::discrete(std::size_t outcome_count, std::vector<Rational> times) {
    std::vector<Partition> parts(times.size(), Partition::discrete(outcome_count));
    return Filtration(std::move(times), std::move(parts));
}

Filtration Filtration::natural(std::size_t outcome_count, std::vector<Rational> times,
                               std::span<const std::vector<RandomVariable>> processes) {
    std::vector<Partition> parts;
    std::vector<RandomVariable> seen;
    for (std::size_t k = 0; k < times.size(); ++k) {
        for (const auto& process : processes) {
            if (process.size() != times.size()) throw StructuralError("natural filtration: process length mismatch");
            seen.push_back(process[k]);
        }
        parts.push_back(Partition::generated_by(outcome_count, seen));
    }
    return Filtration(std::move(times), std::move(parts));
}

Partition Filtration::at(const Rational& t) const {
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    if (it == times_.begin()) return Partition::trivial(outcome_count());
    return partitions_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

bool is_sub_filtration(const Filtration& small, const Filtration& big) {
    if (small.outcome_count() != big.outcome_count())
        throw StructuralError("is_sub_filtration: filtrations over different outcome counts");
    for (std::size_t k = 0; k < small.times().size(); ++k)
        if (!refines(big.at(small.times()[k]), small.partitions()[k])) return false;
    return true;
}

Filtration join(const Filtration& a, const Filtration& b) {
    std::vector<Rational> times = a.times();
    times.insert(times.end(), b.times().begin(), b.times().end());
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    std::vector<Partition> parts;
    for (const auto& t : times) parts.push_back(join(a.at(t), b.at(t)));
    return Filtration(std::move(times), std::move(parts));
}

Filtration delayed_filtration(const Filtration& base, const Rational& delay) {
    if (delay < 0) throw std::domain_error("delayed_filtration: negative delay " + to_string(delay));
    std::vector<Partition> parts;
    for (const auto& t : base.times()) parts.push_back(base.at(t - delay));
    return Filtration(base.times(), std::move(parts));
}

RandomVariable conditional_expectation(const RandomVariable& x, const Partition& part, std::span<const Rational> q,
                                       std::optional<std::span<const Rational>> null_block_reference) {
    return block_average<Rational>(x, part, q, null_block_reference);
}

std::vector<double> conditional_expectation(std::span<const double> x, const Partition& part,
                                            std::span<const double> q) {
    return block_average<double>(x, part, q);
}

Rational expectation(const RandomVariable& x, std::span<const Rational> q) {
    if (x.size() != q.size()) throw StructuralError("expectation: outcome count mismatch");
    Rational total = 0;
    for (std::size_t w = 0; w < x.size(); ++w) total += q[w] * x[w];
    return total;
}

RandomVariable constant(std::size_t outcome_count, const Rational& value) {
    return RandomVariable(outcome_count, value);
}

}  // namespace platonic::prob
