#include "platonic/linalg.hpp"
#include "platonic/lpsolve.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace platonic;
using namespace platonic::lp;

namespace {

Rational R(long n, long d = 1) { return ratio(n, d); }

LinearProgram random_bounded_lp(std::mt19937& rng, std::size_t n, std::size_t m) {
    std::uniform_int_distribution<int> coef(-5, 5), rhs(0, 10), rel(0, 2);
    LinearProgram lp(n, rng() % 2 ? Sense::maximize : Sense::minimize);
    for (auto& c : lp.objective) c = coef(rng);
    for (std::size_t j = 0; j < n; ++j) lp.set_bounds(j, R(-(rng() % 3)), R(1 + rng() % 4));
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<Rational> a(n);
        for (auto& v : a) v = coef(rng);
        int r = rel(rng);
        lp.add_constraint(a, r == 0 ? Relation::less_equal : r == 1 ? Relation::greater_equal : Relation::equal,
                          R(rhs(rng) - 5));
    }
    return lp;
}

}  // namespace

TEST(Solve, SimpleOptimum) {
    LinearProgram lp(1);
    lp.objective = {R(1)};
    lp.add_constraint({R(1)}, Relation::less_equal, R(1));
    auto sol = solve(lp);
    ASSERT_EQ(sol.status, Status::optimal);
    EXPECT_EQ(sol.primal[0], R(1));
    EXPECT_EQ(sol.objective, R(1));
    EXPECT_EQ(sol.dual_objective, R(1));
    EXPECT_EQ(sol.duals[0], R(1));
}

TEST(Solve, Unbounded) {
    LinearProgram lp(1);
    lp.objective = {R(1)};
    EXPECT_EQ(solve(lp).status, Status::unbounded);
}

TEST(Solve, Infeasible) {
    LinearProgram lp(1);
    lp.objective = {R(1)};
    lp.add_constraint({R(1)}, Relation::less_equal, R(-1));
    EXPECT_EQ(solve(lp).status, Status::infeasible);
    LinearProgram box(1);
    box.set_bounds(0, R(2), R(1));
    EXPECT_EQ(solve(box).status, Status::infeasible);
}

TEST(Solve, FreeVariablesAndMinimisation) {
    // min x + y  s.t.  x - y = 3, x + 2y >= 0, both free  -> x = 2, y = -1.
    LinearProgram lp(2, Sense::minimize);
    lp.objective = {R(1), R(1)};
    lp.set_free(0);
    lp.set_free(1);
    lp.add_constraint({R(1), R(-1)}, Relation::equal, R(3));
    lp.add_constraint({R(1), R(2)}, Relation::greater_equal, R(0));
    auto sol = solve(lp);
    ASSERT_EQ(sol.status, Status::optimal);
    EXPECT_EQ(sol.primal, (std::vector<Rational>{R(2), R(-1)}));
    EXPECT_EQ(sol.objective, R(1));
    EXPECT_TRUE(certify(lp, sol).exact_zero());
}

TEST(Solve, RedundantEqualityRows) {
    LinearProgram lp(2);
    lp.objective = {R(1), R(2)};
    lp.add_constraint({R(1), R(1)}, Relation::equal, R(1));
    lp.add_constraint({R(2), R(2)}, Relation::equal, R(2));
    auto sol = solve(lp);
    ASSERT_EQ(sol.status, Status::optimal);
    EXPECT_EQ(sol.objective, R(2));
    EXPECT_TRUE(certify(lp, sol).exact_zero());
}

TEST(Solve, DegenerateCyclingExample) {
    // Beale's example cycles under the textbook largest-coefficient rule.
    LinearProgram lp(4, Sense::minimize);
    lp.objective = {R(-3, 4), R(150), R(-1, 50), R(6)};
    lp.add_constraint({R(1, 4), R(-60), R(-1, 25), R(9)}, Relation::less_equal, R(0));
    lp.add_constraint({R(1, 2), R(-90), R(-1, 50), R(3)}, Relation::less_equal, R(0));
    lp.add_constraint({R(0), R(0), R(1), R(0)}, Relation::less_equal, R(1));
    auto sol = solve(lp);
    ASSERT_EQ(sol.status, Status::optimal);
    EXPECT_EQ(sol.objective, R(-1, 20));
}

TEST(Solve, StrongDualityOnRandomPrograms) {
    std::mt19937 rng(3);
    int optimal = 0;
    for (int trial = 0; trial < 300; ++trial) {
        auto lp = random_bounded_lp(rng, 1 + rng() % 5, rng() % 5);
        auto sol = solve(lp);
        if (sol.status != Status::optimal) continue;
        ++optimal;
        EXPECT_EQ(sol.objective, sol.dual_objective);
        EXPECT_TRUE(certify(lp, sol).exact_zero());
        auto again = solve(lp);
        EXPECT_EQ(again.primal, sol.primal);
        EXPECT_EQ(again.duals, sol.duals);
    }
    EXPECT_GT(optimal, 100);
}

TEST(Solve, FloatModeAgreesWithExact) {
    std::mt19937 rng(5);
    SolveOptions fl{Arithmetic::floating, 1e-9};
    for (int trial = 0; trial < 200; ++trial) {
        auto lp = random_bounded_lp(rng, 1 + rng() % 5, rng() % 5);
        auto exact = solve(lp);
        auto approx = solve(lp, fl);
        ASSERT_EQ(approx.status, exact.status);
        if (exact.status != Status::optimal) continue;
        EXPECT_NEAR(to_double(approx.objective), to_double(exact.objective), 1e-8);
        EXPECT_LE(to_double(abs(approx.objective - approx.dual_objective)), 1e-8);
    }
}

TEST(EnumerateVertices, Simplex) {
    LinearProgram simplex(2);
    simplex.add_constraint({R(1), R(1)}, Relation::equal, R(1));
    auto v = enumerate_vertices(simplex);
    EXPECT_EQ(v, (std::vector<std::vector<Rational>>{{R(0), R(1)}, {R(1), R(0)}}));
    simplex.add_constraint({R(1), R(-1)}, Relation::equal, R(0));
    EXPECT_EQ(enumerate_vertices(simplex), (std::vector<std::vector<Rational>>{{R(1, 2), R(1, 2)}}));
}

TEST(EnumerateVertices, UnitCube) {
    LinearProgram cube(3);
    for (std::size_t j = 0; j < 3; ++j) cube.set_bounds(j, R(0), R(1));
    EXPECT_EQ(enumerate_vertices(cube).size(), 8u);
}

TEST(EnumerateVertices, GuardsAndUnbounded) {
    LinearProgram big(13);
    EXPECT_THROW(enumerate_vertices(big), DimensionGuard);
    LinearProgram ray(1);
    EXPECT_THROW(enumerate_vertices(ray), std::domain_error);
    LinearProgram empty(1);
    empty.add_constraint({R(1)}, Relation::greater_equal, R(2));
    empty.set_bounds(0, R(0), R(1));
    EXPECT_TRUE(enumerate_vertices(empty).empty());
}

TEST(EnumerateVertices, MaximumMatchesSimplex) {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 150; ++trial) {
        auto lp = random_bounded_lp(rng, 1 + rng() % 4, rng() % 4);
        auto sol = solve(lp);
        auto vertices = enumerate_vertices(lp);
        if (sol.status == Status::infeasible) {
            EXPECT_TRUE(vertices.empty());
            continue;
        }
        ASSERT_EQ(sol.status, Status::optimal);
        ASSERT_FALSE(vertices.empty());
        Rational best = 0;
        bool first = true;
        for (const auto& v : vertices) {
            Rational value = linalg::dot(lp.objective, v);
            if (first || (lp.sense == Sense::maximize ? value > best : value < best)) best = value;
            first = false;
        }
        EXPECT_EQ(best, sol.objective);
    }
}

TEST(Linalg, RankSpanAndNullSpace) {
    linalg::Columns cols{{R(1), R(1), R(0)}, {R(0), R(1), R(1)}, {R(1), R(2), R(1)}};
    EXPECT_EQ(linalg::rank(cols, 3), 2u);
    auto x = linalg::solve_in_span(cols, {R(2), R(3), R(1)});
    ASSERT_TRUE(x);
    EXPECT_FALSE(linalg::solve_in_span(cols, {R(1), R(0), R(0)}));
    auto left = linalg::left_null_space(cols, 3);
    ASSERT_EQ(left.size(), 1u);
    for (const auto& c : cols) EXPECT_EQ(linalg::dot(left[0], c), 0);
    EXPECT_EQ(linalg::null_space(cols, 3).size(), 1u);
}
