#include "platonic/lpsolve.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace platonic::lp {

std::string to_string(Status status) {
    switch (status) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    }
    return "?";
}

std::string to_string(Arithmetic arithmetic) { return arithmetic == Arithmetic::exact ? "exact" : "float"; }

LinearProgram::LinearProgram(std::size_t variables, Sense s)
    : sense(s), objective(variables), lower(variables, Rational(0)), upper(variables) {}

std::size_t LinearProgram::add_variable(const Rational& cost, std::optional<Rational> lo, std::optional<Rational> hi) {
    objective.push_back(cost);
    lower.push_back(std::move(lo));
    upper.push_back(std::move(hi));
    for (auto& c : constraints) c.coeffs.emplace_back(0);
    return objective.size() - 1;
}

void LinearProgram::add_constraint(std::vector<Rational> coeffs, Relation relation, Rational rhs) {
    if (coeffs.size() != num_variables())
        throw std::invalid_argument("constraint has " + std::to_string(coeffs.size()) + " coefficients, expected " +
                                    std::to_string(num_variables()));
    constraints.push_back({std::move(coeffs), relation, std::move(rhs)});
}

void LinearProgram::set_free(std::size_t j) { set_bounds(j, std::nullopt, std::nullopt); }

void LinearProgram::set_bounds(std::size_t j, std::optional<Rational> lo, std::optional<Rational> hi) {
    lower.at(j) = std::move(lo);
    upper.at(j) = std::move(hi);
}

void LinearProgram::check_dimensions() const {
    const std::size_t n = num_variables();
    if (lower.size() != n || upper.size() != n) throw std::invalid_argument("LP: bounds do not match variable count");
    for (const auto& c : constraints)
        if (c.coeffs.size() != n) throw std::invalid_argument("LP: constraint width does not match variable count");
}

namespace {

// max c.z  s.t.  A z = b,  z >= 0,  b >= 0
struct StandardForm {
    enum class Kind { shifted, mirrored, split };
    struct VarMap {
        Kind kind;
        std::size_t col;
        Rational offset;
    };
    std::vector<std::vector<Rational>> A;
    std::vector<Rational> b;
    std::vector<Rational> c;
    std::vector<VarMap> vars;
    std::vector<int> row_sign;
    std::size_t original_rows = 0;
    bool empty_box = false;  // some upper < lower
};

StandardForm standardize(const LinearProgram& lp) {
    StandardForm sf;
    const std::size_t n = lp.num_variables();
    std::size_t cols = 0;
    struct BoundRow {
        std::size_t col;
        Rational width;
    };
    std::vector<BoundRow> bound_rows;
    for (std::size_t j = 0; j < n; ++j) {
        const auto& lo = lp.lower[j];
        const auto& hi = lp.upper[j];
        if (lo) {
            sf.vars.push_back({StandardForm::Kind::shifted, cols, *lo});
            if (hi) {
                if (*hi < *lo) sf.empty_box = true;
                bound_rows.push_back({cols, *hi - *lo});
            }
            cols += 1;
        } else if (hi) {
            sf.vars.push_back({StandardForm::Kind::mirrored, cols, *hi});
            cols += 1;
        } else {
            sf.vars.push_back({StandardForm::Kind::split, cols, Rational(0)});
            cols += 2;
        }
    }
    const std::size_t structural = cols;
    std::size_t slacks = 0;
    for (const auto& con : lp.constraints)
        if (con.relation != Relation::equal) ++slacks;
    slacks += bound_rows.size();
    const std::size_t width = structural + slacks;
    const bool minimize = lp.sense == Sense::minimize;

    sf.c.assign(width, Rational(0));
    for (std::size_t j = 0; j < n; ++j) {
        Rational cj = minimize ? Rational(-lp.objective[j]) : lp.objective[j];
        const auto& vm = sf.vars[j];
        switch (vm.kind) {
        case StandardForm::Kind::shifted: sf.c[vm.col] = cj; break;
        case StandardForm::Kind::mirrored: sf.c[vm.col] = -cj; break;
        case StandardForm::Kind::split:
            sf.c[vm.col] = cj;
            sf.c[vm.col + 1] = -cj;
            break;
        }
    }

    std::size_t slack = structural;
    for (const auto& con : lp.constraints) {
        std::vector<Rational> row(width);
        Rational rhs = con.rhs;
        for (std::size_t j = 0; j < n; ++j) {
            const Rational& a = con.coeffs[j];
            if (a == 0) continue;
            const auto& vm = sf.vars[j];
            switch (vm.kind) {
            case StandardForm::Kind::shifted:
                row[vm.col] = a;
                rhs -= a * vm.offset;
                break;
            case StandardForm::Kind::mirrored:
                row[vm.col] = -a;
                rhs -= a * vm.offset;
                break;
            case StandardForm::Kind::split:
                row[vm.col] = a;
                row[vm.col + 1] = -a;
                break;
            }
        }
        if (con.relation == Relation::less_equal) row[slack++] = 1;
        if (con.relation == Relation::greater_equal) row[slack++] = -1;
        sf.A.push_back(std::move(row));
        sf.b.push_back(std::move(rhs));
    }
    sf.original_rows = sf.A.size();
    for (const auto& br : bound_rows) {
        std::vector<Rational> row(width);
        row[br.col] = 1;
        row[slack++] = 1;
        sf.A.push_back(std::move(row));
        sf.b.push_back(br.width);
    }
    sf.row_sign.assign(sf.A.size(), 1);
    for (std::size_t i = 0; i < sf.A.size(); ++i) {
        if (sf.b[i] < 0) {
            sf.row_sign[i] = -1;
            sf.b[i] = -sf.b[i];
            for (auto& a : sf.A[i]) a = -a;
        }
    }
    return sf;
}

template <class T>
struct Numeric;

template <>
struct Numeric<Rational> {
    double tol = 0;
    bool positive(const Rational& x) const { return x > 0; }
    bool negative(const Rational& x) const { return x < 0; }
    bool nonzero(const Rational& x) const { return x != 0; }
    bool equal(const Rational& a, const Rational& b) const { return a == b; }
    static Rational from(const Rational& x) { return x; }
    static Rational to_rational(const Rational& x) { return x; }
};

template <>
struct Numeric<double> {
    double tol = 1e-9;
    bool positive(double x) const { return x > tol; }
    bool negative(double x) const { return x < -tol; }
    bool nonzero(double x) const { return std::abs(x) > tol; }
    bool equal(double a, double b) const { return std::abs(a - b) <= tol * (1 + std::max(std::abs(a), std::abs(b))); }
    static double from(const Rational& x) { return x.get_d(); }
    static Rational to_rational(double x) { return Rational(x); }
};

template <class T>
class Tableau {
public:
    Tableau(const StandardForm& sf, Numeric<T> num, std::size_t max_iterations)
        : num_(num), m_(sf.A.size()), nz_(sf.c.size()), width_(nz_ + m_), max_iterations_(max_iterations) {
        data_.assign(m_, std::vector<T>(width_ + 1, T(0)));
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t j = 0; j < nz_; ++j) data_[i][j] = Numeric<T>::from(sf.A[i][j]);
            data_[i][nz_ + i] = T(1);
            data_[i][width_] = Numeric<T>::from(sf.b[i]);
        }
        basis_.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) basis_[i] = nz_ + i;
        cost_.assign(width_, T(0));
        for (std::size_t j = 0; j < nz_; ++j) cost_[j] = Numeric<T>::from(sf.c[j]);
    }

    Status run() {
        // Phase 1: maximise -sum(artificials).
        std::vector<T> phase1(width_, T(0));
        for (std::size_t i = 0; i < m_; ++i) phase1[nz_ + i] = T(-1);
        load_costs(phase1);
        iterate(width_);
        if (num_.negative(value_)) return Status::infeasible;
        // Drive zero-level artificials out of the basis where possible;
        // artificials that remain sit on redundant rows.
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < nz_) continue;
            for (std::size_t j = 0; j < nz_; ++j) {
                if (num_.nonzero(data_[i][j])) {
                    pivot(i, j);
                    break;
                }
            }
        }
        std::vector<T> phase2(width_, T(0));
        std::copy(cost_.begin(), cost_.begin() + static_cast<std::ptrdiff_t>(nz_), phase2.begin());
        load_costs(phase2);
        return iterate(nz_) ? Status::optimal : Status::unbounded;
    }

    std::vector<T> primal() const {
        std::vector<T> z(nz_, T(0));
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] < nz_) z[basis_[i]] = data_[i][width_];
        return z;
    }

    // y' = c_B B^{-1}; B^{-1} sits in the artificial columns.
    std::vector<T> duals() const {
        std::vector<T> y(m_, T(0));
        for (std::size_t k = 0; k < m_; ++k) {
            const T& cb = basis_[k] < nz_ ? cost_[basis_[k]] : zero_;
            if (cb == T(0)) continue;
            for (std::size_t i = 0; i < m_; ++i) y[i] += cb * data_[k][nz_ + i];
        }
        return y;
    }

    std::size_t iterations() const { return iterations_; }

private:
    void load_costs(const std::vector<T>& costs) {
        active_costs_ = costs;
        reduced_.assign(width_, T(0));
        value_ = T(0);
        for (std::size_t j = 0; j < width_; ++j) {
            T d = costs[j];
            for (std::size_t i = 0; i < m_; ++i)
                if (data_[i][j] != T(0)) d -= costs[basis_[i]] * data_[i][j];
            reduced_[j] = d;
        }
        for (std::size_t i = 0; i < m_; ++i) value_ += costs[basis_[i]] * data_[i][width_];
    }

    // Bland's rule over columns [0, allowed). Returns false on unboundedness.
    bool iterate(std::size_t allowed) {
        while (true) {
            std::size_t enter = allowed;
            for (std::size_t j = 0; j < allowed; ++j) {
                if (num_.positive(reduced_[j])) {
                    enter = j;
                    break;
                }
            }
            if (enter == allowed) return true;
            std::size_t leave = m_;
            T best_ratio{};
            for (std::size_t i = 0; i < m_; ++i) {
                if (!num_.positive(data_[i][enter])) continue;
                T ratio = data_[i][width_] / data_[i][enter];
                bool take = leave == m_;
                if (!take) {
                    if (num_.equal(ratio, best_ratio))
                        take = basis_[i] < basis_[leave];
                    else
                        take = ratio < best_ratio;
                }
                if (take) {
                    leave = i;
                    best_ratio = ratio;
                }
            }
            if (leave == m_) return false;
            pivot(leave, enter);
            if (++iterations_ > max_iterations_)
                throw IterationLimit("simplex exceeded " + std::to_string(max_iterations_) + " pivots");
        }
    }

    void pivot(std::size_t row, std::size_t col) {
        auto& pr = data_[row];
        T inv = T(1) / pr[col];
        for (auto& v : pr)
            if (v != T(0)) v *= inv;
        pr[col] = T(1);
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == row) continue;
            T factor = data_[i][col];
            if (factor == T(0)) continue;
            auto& r = data_[i];
            for (std::size_t j = 0; j <= width_; ++j)
                if (pr[j] != T(0)) r[j] -= factor * pr[j];
            r[col] = T(0);
        }
        T d = reduced_[col];
        if (d != T(0)) {
            for (std::size_t j = 0; j < width_; ++j)
                if (pr[j] != T(0)) reduced_[j] -= d * pr[j];
            reduced_[col] = T(0);
            value_ += d * pr[width_];
        }
        basis_[row] = col;
    }

    Numeric<T> num_;
    std::size_t m_, nz_, width_;
    std::size_t max_iterations_;
    std::size_t iterations_ = 0;
    std::vector<std::vector<T>> data_;
    std::vector<std::size_t> basis_;
    std::vector<T> cost_;
    std::vector<T> active_costs_;
    std::vector<T> reduced_;
    T value_{};
    T zero_{};
};

Rational row_activity(const Constraint& con, const std::vector<Rational>& x) {
    Rational s = 0;
    for (std::size_t j = 0; j < x.size(); ++j)
        if (con.coeffs[j] != 0) s += con.coeffs[j] * x[j];
    return s;
}

std::vector<Rational> reduced_costs(const LinearProgram& lp, const std::vector<Rational>& y) {
    std::vector<Rational> d = lp.objective;
    for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
        if (y[i] == 0) continue;
        for (std::size_t j = 0; j < d.size(); ++j)
            if (lp.constraints[i].coeffs[j] != 0) d[j] -= lp.constraints[i].coeffs[j] * y[i];
    }
    return d;
}

// Dual objective b^T y + bound terms; reduced costs below `zero_band` in
// magnitude are treated as zero.
Rational dual_value(const LinearProgram& lp, const std::vector<Rational>& y, const Rational& zero_band) {
    Rational v = 0;
    for (std::size_t i = 0; i < lp.constraints.size(); ++i) v += lp.constraints[i].rhs * y[i];
    auto d = reduced_costs(lp, y);
    const bool maximize = lp.sense == Sense::maximize;
    for (std::size_t j = 0; j < d.size(); ++j) {
        if (abs(d[j]) <= zero_band) continue;
        const bool push_up = (d[j] > 0) == maximize;
        const auto& bound = push_up ? lp.upper[j] : lp.lower[j];
        if (bound) v += d[j] * *bound;
    }
    return v;
}

template <class T>
LpSolution solve_with(const LinearProgram& lp, const StandardForm& sf, const SolveOptions& options) {
    Numeric<T> num;
    num.tol = options.tolerance;
    Tableau<T> tableau(sf, num, options.max_iterations);
    LpSolution sol;
    sol.arithmetic = options.arithmetic;
    sol.status = tableau.run();
    sol.iterations = tableau.iterations();
    if (sol.status != Status::optimal) return sol;

    auto z = tableau.primal();
    std::vector<Rational> zr;
    zr.reserve(z.size());
    for (const auto& v : z) zr.push_back(Numeric<T>::to_rational(v));
    const std::size_t n = lp.num_variables();
    sol.primal.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto& vm = sf.vars[j];
        switch (vm.kind) {
        case StandardForm::Kind::shifted: sol.primal[j] = vm.offset + zr[vm.col]; break;
        case StandardForm::Kind::mirrored: sol.primal[j] = vm.offset - zr[vm.col]; break;
        case StandardForm::Kind::split: sol.primal[j] = zr[vm.col] - zr[vm.col + 1]; break;
        }
    }
    auto ys = tableau.duals();
    sol.duals.resize(lp.constraints.size());
    const bool minimize = lp.sense == Sense::minimize;
    for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
        Rational yi = Numeric<T>::to_rational(ys[i]) * sf.row_sign[i];
        sol.duals[i] = minimize ? Rational(-yi) : yi;
    }
    sol.objective = 0;
    for (std::size_t j = 0; j < n; ++j) sol.objective += lp.objective[j] * sol.primal[j];
    Rational band = std::is_same_v<T, double> ? rational_from_double(options.tolerance) : Rational(0);
    sol.dual_objective = dual_value(lp, sol.duals, band);
    return sol;
}

Rational data_scale(const LinearProgram& lp) {
    Rational s = 1;
    auto bump = [&](const Rational& v) {
        if (abs(v) > s) s = abs(v);
    };
    for (const auto& v : lp.objective) bump(v);
    for (const auto& c : lp.constraints) {
        bump(c.rhs);
        for (const auto& v : c.coeffs) bump(v);
    }
    return s;
}

}  // namespace

LpSolution solve(const LinearProgram& lp, const SolveOptions& options) {
    lp.check_dimensions();
    StandardForm sf = standardize(lp);
    if (sf.empty_box) {
        LpSolution sol;
        sol.arithmetic = options.arithmetic;
        sol.status = Status::infeasible;
        return sol;
    }
    if (options.arithmetic == Arithmetic::exact) {
        LpSolution sol = solve_with<Rational>(lp, sf, options);
        if (sol.status == Status::optimal && !certify(lp, sol).exact_zero())
            throw std::logic_error("exact simplex produced an uncertified optimum");
        return sol;
    }
    LpSolution sol = solve_with<double>(lp, sf, options);
    if (sol.status == Status::optimal) {
        Certificate cert = certify(lp, sol);
        Rational scale = data_scale(lp);
        for (const auto& v : sol.primal)
            if (abs(v) > scale) scale = abs(v);
        Rational limit = rational_from_double(options.tolerance) * scale * 10;
        if (cert.primal_infeasibility > limit || cert.dual_infeasibility > limit ||
            cert.complementary_slackness > limit * scale || cert.duality_gap > limit * scale)
            throw NumericalFailure("float simplex certificate exceeds tolerance");
    }
    return sol;
}

Certificate certify(const LinearProgram& lp, const LpSolution& solution) {
    if (solution.status != Status::optimal) throw std::invalid_argument("certify: solution is not optimal");
    lp.check_dimensions();
    Certificate cert;
    const auto& x = solution.primal;
    const auto& y = solution.duals;
    auto raise = [](Rational& slot, const Rational& v) {
        if (v > slot) slot = v;
    };
    const bool maximize = lp.sense == Sense::maximize;
    for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
        const auto& con = lp.constraints[i];
        Rational gap = row_activity(con, x) - con.rhs;  // activity - rhs
        switch (con.relation) {
        case Relation::less_equal:
            raise(cert.primal_infeasibility, gap);
            raise(cert.dual_infeasibility, maximize ? Rational(-y[i]) : y[i]);
            break;
        case Relation::greater_equal:
            raise(cert.primal_infeasibility, -gap);
            raise(cert.dual_infeasibility, maximize ? y[i] : Rational(-y[i]));
            break;
        case Relation::equal: raise(cert.primal_infeasibility, abs(gap)); break;
        }
        raise(cert.complementary_slackness, abs(y[i] * gap));
    }
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (lp.lower[j]) raise(cert.primal_infeasibility, *lp.lower[j] - x[j]);
        if (lp.upper[j]) raise(cert.primal_infeasibility, x[j] - *lp.upper[j]);
    }
    auto d = reduced_costs(lp, y);
    for (std::size_t j = 0; j < d.size(); ++j) {
        if (d[j] == 0) continue;
        const bool push_up = (d[j] > 0) == maximize;
        const auto& bound = push_up ? lp.upper[j] : lp.lower[j];
        if (!bound) {
            raise(cert.dual_infeasibility, abs(d[j]));
            continue;
        }
        raise(cert.complementary_slackness, abs(d[j] * (x[j] - *bound)));
    }
    Rational primal_value = 0;
    for (std::size_t j = 0; j < x.size(); ++j) primal_value += lp.objective[j] * x[j];
    cert.duality_gap = abs(primal_value - dual_value(lp, y, Rational(0)));
    return cert;
}

namespace {

struct EchelonRow {
    std::vector<Rational> coeffs;
    Rational rhs;
    std::size_t pivot;
};

// Reduces `row` against `basis`; appends it and returns true when independent.
bool add_independent(std::vector<EchelonRow>& basis, std::vector<Rational> coeffs, Rational rhs) {
    for (const auto& r : basis) {
        if (coeffs[r.pivot] == 0) continue;
        Rational f = coeffs[r.pivot];
        for (std::size_t j = 0; j < coeffs.size(); ++j)
            if (r.coeffs[j] != 0) coeffs[j] -= f * r.coeffs[j];
        rhs -= f * r.rhs;
    }
    auto it = std::find_if(coeffs.begin(), coeffs.end(), [](const Rational& v) { return v != 0; });
    if (it == coeffs.end()) return false;
    std::size_t p = static_cast<std::size_t>(it - coeffs.begin());
    Rational inv = 1 / coeffs[p];
    for (auto& v : coeffs) v *= inv;
    rhs *= inv;
    // Keep earlier pivots eliminated from later rows and vice versa.
    for (auto& r : basis) {
        if (r.coeffs[p] == 0) continue;
        Rational f = r.coeffs[p];
        for (std::size_t j = 0; j < coeffs.size(); ++j)
            if (coeffs[j] != 0) r.coeffs[j] -= f * coeffs[j];
        r.rhs -= f * rhs;
    }
    basis.push_back({std::move(coeffs), std::move(rhs), p});
    return true;
}

struct HalfSpace {
    std::vector<Rational> a;
    Rational b;  // a.x <= b
};

}  // namespace

std::vector<std::vector<Rational>> enumerate_vertices(const LinearProgram& polytope, std::size_t max_dimension) {
    polytope.check_dimensions();
    const std::size_t n = polytope.num_variables();
    if (n > max_dimension)
        throw DimensionGuard("vertex enumeration limited to " + std::to_string(max_dimension) + " variables, got " +
                             std::to_string(n));

    // Boundedness and feasibility.
    for (std::size_t j = 0; j < n; ++j) {
        for (Sense s : {Sense::maximize, Sense::minimize}) {
            LinearProgram probe = polytope;
            probe.sense = s;
            std::fill(probe.objective.begin(), probe.objective.end(), Rational(0));
            probe.objective[j] = 1;
            auto sol = solve(probe);
            if (sol.status == Status::infeasible) return {};
            if (sol.status == Status::unbounded)
                throw std::domain_error("vertex enumeration: polyhedron is unbounded in coordinate " +
                                        std::to_string(j));
        }
    }

    std::vector<HalfSpace> equalities, inequalities;
    for (const auto& con : polytope.constraints) {
        switch (con.relation) {
        case Relation::equal: equalities.push_back({con.coeffs, con.rhs}); break;
        case Relation::less_equal: inequalities.push_back({con.coeffs, con.rhs}); break;
        case Relation::greater_equal: {
            HalfSpace h{con.coeffs, -con.rhs};
            for (auto& v : h.a) v = -v;
            inequalities.push_back(std::move(h));
            break;
        }
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (polytope.lower[j]) {
            std::vector<Rational> a(n);
            a[j] = -1;
            inequalities.push_back({std::move(a), Rational(-*polytope.lower[j])});
        }
        if (polytope.upper[j]) {
            std::vector<Rational> a(n);
            a[j] = 1;
            inequalities.push_back({std::move(a), *polytope.upper[j]});
        }
    }

    std::vector<EchelonRow> base;
    for (const auto& e : equalities) add_independent(base, e.a, e.b);

    auto satisfies = [&](const std::vector<Rational>& x) {
        for (const auto& e : equalities) {
            Rational s = 0;
            for (std::size_t j = 0; j < n; ++j) s += e.a[j] * x[j];
            if (s != e.b) return false;
        }
        for (const auto& h : inequalities) {
            Rational s = 0;
            for (std::size_t j = 0; j < n; ++j) s += h.a[j] * x[j];
            if (s > h.b) return false;
        }
        return true;
    };

    std::set<std::vector<Rational>> found;
    auto recurse = [&](auto&& self, const std::vector<EchelonRow>& rows, std::size_t start) -> void {
        if (rows.size() == n) {
            std::vector<Rational> x(n);
            for (const auto& r : rows) x[r.pivot] = r.rhs;  // fully reduced: identity on pivots
            if (satisfies(x)) found.insert(std::move(x));
            return;
        }
        if (inequalities.size() - start < n - rows.size()) return;
        for (std::size_t k = start; k < inequalities.size(); ++k) {
            std::vector<EchelonRow> next = rows;
            if (add_independent(next, inequalities[k].a, inequalities[k].b)) self(self, next, k + 1);
        }
    };
    recurse(recurse, base, 0);
    return {found.begin(), found.end()};
}

}  // namespace platonic::lp
