#include <algorithm>
#include <cmath>
#include <queue>

#include "modlab/errors.hpp"
#include "modlab/modulus.hpp"

namespace modlab {

namespace {

constexpr Side kCcw[4] = {Side::left, Side::bottom, Side::right, Side::top};

int ccw_index(Side s) {
    for (int k = 0; k < 4; ++k)
        if (kCcw[k] == s)
            return k;
    return 0;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        s += a[k] * b[k];
    return s;
}

// Matrix-free Jacobi-preconditioned CG on the free nodes of a padded grid array.
class LatticeSystem {
public:
    LatticeSystem(const Grid& g, const std::vector<NodeState>& state, const std::vector<std::uint8_t>& active)
        : g_(g), nx_(g.nx()), pad_(g.nx() + 1), n_(g.size()) {
        const int nx = g.nx(), ny = g.ny();
        w_east_.assign(n_, 0.0);
        w_north_.assign(n_, 0.0);
        diag_.assign(n_, 0.0);
        act_.assign(n_, 0.0);
        rhs_.assign(n_, 0.0);
        auto usable = [&](int k) { return state[k] != NodeState::deleted; };
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const int k = g.index(i, j);
                if (!usable(k))
                    continue;
                if (i + 1 < nx && usable(k + 1))
                    w_east_[k] = (j == 0 || j == ny - 1) ? 0.5 : 1.0;
                if (j + 1 < ny && usable(k + nx))
                    w_north_[k] = (i == 0 || i == nx - 1) ? 0.5 : 1.0;
            }
        }
        for (std::size_t k = 0; k < n_; ++k) {
            if (!active[k])
                continue;
            act_[k] = 1.0;
            const int i = g.col(static_cast<int>(k)), j = g.row(static_cast<int>(k));
            auto couple = [&](int nb, double w) {
                if (w == 0.0)
                    return;
                diag_[k] += w;
                if (state[nb] == NodeState::high)
                    rhs_[k] += w;
            };
            if (i + 1 < nx)
                couple(static_cast<int>(k) + 1, w_east_[k]);
            if (i > 0)
                couple(static_cast<int>(k) - 1, w_east_[k - 1]);
            if (j + 1 < ny)
                couple(static_cast<int>(k) + nx, w_north_[k]);
            if (j > 0)
                couple(static_cast<int>(k) - nx, w_north_[k - nx]);
        }
    }

    const std::vector<double>& rhs() const { return rhs_; }

    // y = A x over active nodes; x must vanish on inactive nodes. Both vectors are padded.
    void apply(const std::vector<double>& x, std::vector<double>& y) const {
        const double* xp = x.data() + pad_;
        double* yp = y.data() + pad_;
        const double* we = w_east_.data();
        const double* wn = w_north_.data();
        const std::size_t nx = static_cast<std::size_t>(nx_);
        for (std::size_t k = 0; k < n_; ++k) {
            const double west = k >= 1 ? we[k - 1] : 0.0;
            const double south = k >= nx ? wn[k - nx] : 0.0;
            const double v = diag_[k] * xp[k] - we[k] * xp[k + 1] - west * xp[k - 1] - wn[k] * xp[k + nx] -
                             south * xp[k - static_cast<std::ptrdiff_t>(nx)];
            yp[k] = act_[k] * v;
        }
    }

    // Returns iteration count; throws NumericError past the cap.
    int solve(std::vector<double>& u, double rel_tol, long max_iter) const {
        const std::size_t total = n_ + 2 * static_cast<std::size_t>(pad_);
        std::vector<double> x(total, 0.0), r(total, 0.0), z(total, 0.0), p(total, 0.0), q(total, 0.0);
        for (std::size_t k = 0; k < n_; ++k)
            r[k + pad_] = rhs_[k];
        const double bnorm = std::sqrt(dot(r, r));
        if (bnorm == 0.0) {
            u.assign(n_, 0.0);
            return 0;
        }
        auto precondition = [&]() {
            for (std::size_t k = 0; k < n_; ++k)
                z[k + pad_] = act_[k] != 0.0 ? r[k + pad_] / diag_[k] : 0.0;
        };
        precondition();
        p = z;
        double rz = dot(r, z);
        int it = 0;
        while (true) {
            if (std::sqrt(dot(r, r)) <= rel_tol * bnorm)
                break;
            if (it >= max_iter)
                throw NumericError("conjugate gradient did not converge in " + std::to_string(max_iter) + " iterations");
            apply(p, q);
            const double alpha = rz / dot(p, q);
            for (std::size_t k = 0; k < total; ++k) {
                x[k] += alpha * p[k];
                r[k] -= alpha * q[k];
            }
            precondition();
            const double rz_next = dot(r, z);
            const double beta = rz_next / rz;
            rz = rz_next;
            for (std::size_t k = 0; k < total; ++k)
                p[k] = z[k] + beta * p[k];
            ++it;
        }
        u.assign(x.begin() + pad_, x.begin() + pad_ + static_cast<std::ptrdiff_t>(n_));
        return it;
    }

    double energy(const std::vector<double>& pot) const {
        double e = 0.0;
        for (std::size_t k = 0; k < n_; ++k) {
            if (w_east_[k] != 0.0) {
                const double d = pot[k + 1] - pot[k];
                e += w_east_[k] * d * d;
            }
            if (w_north_[k] != 0.0) {
                const double d = pot[k + nx_] - pot[k];
                e += w_north_[k] * d * d;
            }
        }
        return e;
    }

private:
    Grid g_;
    int nx_;
    int pad_;
    std::size_t n_;
    std::vector<double> w_east_, w_north_, diag_, act_, rhs_;
};

ScalarField gradient_density(const Grid& g, const std::vector<double>& pot, const std::vector<NodeState>& state,
                             const std::vector<std::uint8_t>& live) {
    ScalarField rho(g);
    auto ok = [&](int i, int j) { return g.inside(i, j) && live[g.index(i, j)]; };
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            const int k = g.index(i, j);
            if (!live[k] || state[k] == NodeState::deleted)
                continue;
            auto diff = [&](int di, int dj) {
                const bool fwd = ok(i + di, j + dj), bwd = ok(i - di, j - dj);
                if (fwd && bwd)
                    return (pot[g.index(i + di, j + dj)] - pot[g.index(i - di, j - dj)]) / (2.0 * g.h());
                if (fwd)
                    return (pot[g.index(i + di, j + dj)] - pot[k]) / g.h();
                if (bwd)
                    return (pot[k] - pot[g.index(i - di, j - dj)]) / g.h();
                return 0.0;
            };
            const double gx = diff(1, 0), gy = diff(0, 1);
            rho[k] = std::sqrt(gx * gx + gy * gy);
        }
    }
    return rho;
}

} // namespace

std::string to_string(Side side) {
    switch (side) {
    case Side::left: return "left";
    case Side::bottom: return "bottom";
    case Side::right: return "right";
    case Side::top: return "top";
    }
    return "?";
}

std::string to_string(SolverKind kind) { return kind == SolverKind::conductance ? "conductance" : "cutting_plane"; }

Side Quadrilateral::side(int k) const { return kCcw[(ccw_index(first) + (k - 1) % 4 + 4) % 4]; }

std::vector<int> side_nodes(const Grid& grid, Side side) {
    std::vector<int> out;
    switch (side) {
    case Side::left:
        for (int j = 0; j < grid.ny(); ++j)
            out.push_back(grid.index(0, j));
        break;
    case Side::right:
        for (int j = 0; j < grid.ny(); ++j)
            out.push_back(grid.index(grid.nx() - 1, j));
        break;
    case Side::bottom:
        for (int i = 0; i < grid.nx(); ++i)
            out.push_back(grid.index(i, 0));
        break;
    case Side::top:
        for (int i = 0; i < grid.nx(); ++i)
            out.push_back(grid.index(i, grid.ny() - 1));
        break;
    }
    return out;
}

ModulusResult conductance_modulus(const Grid& grid, const std::vector<NodeState>& state,
                                  const ConductanceOptions& opt) {
    if (state.size() != grid.size())
        throw ParameterError("state", "node state size does not match grid");
    const int nx = grid.nx(), ny = grid.ny();
    auto neighbours = [&](int k, auto&& f) {
        const int i = grid.col(k), j = grid.row(k);
        if (i + 1 < nx) f(k + 1);
        if (i > 0) f(k - 1);
        if (j + 1 < ny) f(k + nx);
        if (j > 0) f(k - nx);
    };

    // Free nodes touching a fixed node through free nodes are the unknowns; the rest of the
    // free nodes float and carry no energy.
    std::vector<std::uint8_t> live(grid.size(), 0);
    std::vector<std::uint8_t> from_low(grid.size(), 0);
    bool connected = false;
    {
        std::queue<int> todo;
        for (std::size_t k = 0; k < grid.size(); ++k)
            if (state[k] == NodeState::low || state[k] == NodeState::high) {
                live[k] = 1;
                todo.push(static_cast<int>(k));
            }
        while (!todo.empty()) {
            const int u = todo.front();
            todo.pop();
            neighbours(u, [&](int v) {
                if (state[v] == NodeState::free && !live[v]) {
                    live[v] = 1;
                    todo.push(v);
                }
            });
        }
        std::queue<int> low;
        for (std::size_t k = 0; k < grid.size(); ++k)
            if (state[k] == NodeState::low) {
                from_low[k] = 1;
                low.push(static_cast<int>(k));
            }
        while (!low.empty() && !connected) {
            const int u = low.front();
            low.pop();
            neighbours(u, [&](int v) {
                if (state[v] == NodeState::high)
                    connected = true;
                if (state[v] == NodeState::free && !from_low[v]) {
                    from_low[v] = 1;
                    low.push(v);
                }
            });
        }
    }

    ModulusResult res{0.0, ScalarField(grid), 0, 1.0, SolverKind::conductance, true, false, false, opt.rel_tol,
                      std::max(nx, ny), {}};
    if (!connected) {
        res.no_curves = true;
        res.note = "family of no rectifiable admissible curves";
        return res;
    }

    std::vector<std::uint8_t> active(grid.size(), 0);
    for (std::size_t k = 0; k < grid.size(); ++k)
        active[k] = state[k] == NodeState::free && live[k];
    LatticeSystem sys(grid, state, active);
    std::vector<double> u;
    const long cap = static_cast<long>(opt.max_iter_factor * double(res.grid_n) * double(res.grid_n));
    res.iterations = sys.solve(u, opt.rel_tol, cap);

    std::vector<double> pot(grid.size(), 0.0);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (state[k] == NodeState::high)
            pot[k] = 1.0;
        else if (active[k])
            pot[k] = u[k];
    }
    // Edges into floating components are excluded by zeroing their potential difference.
    std::vector<NodeState> energy_state = state;
    for (std::size_t k = 0; k < grid.size(); ++k)
        if (state[k] == NodeState::free && !live[k])
            energy_state[k] = NodeState::deleted;
    LatticeSystem energy_sys(grid, energy_state, active);
    res.value = energy_sys.energy(pot);
    res.rho = gradient_density(grid, pot, energy_state, live);
    res.certificate = 1.0;
    return res;
}

ModulusResult quad_modulus_conductance(const Quadrilateral& q, const Grid& grid, const PixelMask* removed,
                                       const ConductanceOptions& opt) {
    const Rect e = grid.extent();
    const double eps = 1e-9 * grid.h();
    if (std::abs(e.x0 - q.rect.x0) > eps || std::abs(e.y0 - q.rect.y0) > eps || std::abs(e.x1 - q.rect.x1) > eps ||
        std::abs(e.y1 - q.rect.y1) > eps)
        throw GeometryError("grid does not span the quadrilateral");
    if (removed)
        require_same_grid(removed->grid(), grid);

    std::vector<NodeState> state(grid.size(), NodeState::free);
    if (removed)
        for (std::size_t k = 0; k < grid.size(); ++k)
            if (removed->at(static_cast<int>(k)))
                state[k] = NodeState::deleted;
    auto mark = [&](Side s, NodeState st, const char* name) {
        bool any = false;
        for (int k : side_nodes(grid, s)) {
            if (state[k] == NodeState::deleted)
                continue;
            state[k] = st;
            any = true;
        }
        if (!any)
            throw PreconditionError(std::string(name) + " is entirely covered by the removed set");
    };
    mark(q.side(1), NodeState::low, "zeta_1");
    mark(q.side(3), NodeState::high, "zeta_3");
    return conductance_modulus(grid, state, opt);
}

ModulusResult annulus_modulus(Point center, double r, double R, const Grid& grid, const ConductanceOptions& opt) {
    if (!(r < R))
        throw PreconditionError("annulus needs r < R");
    if (!(r > 2.0 * grid.h()))
        throw GeometryError("annulus radii too small for grid spacing");
    const Rect e = grid.extent();
    if (center.x - R < e.x0 || center.x + R > e.x1 || center.y - R < e.y0 || center.y + R > e.y1)
        throw GeometryError("annulus does not fit inside the grid");
    std::vector<NodeState> state(grid.size(), NodeState::free);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Point p = grid.node(static_cast<int>(k));
        const double d = std::hypot(p.x - center.x, p.y - center.y);
        if (d <= r)
            state[k] = NodeState::low;
        else if (d >= R)
            state[k] = NodeState::high;
    }
    return conductance_modulus(grid, state, opt);
}

ModulusResult small_ball_decay(const PixelMask& set_mask, Point center, double r, double R,
                               const ConductanceOptions& opt) {
    const Grid& grid = set_mask.grid();
    if (!(r < R))
        throw PreconditionError("small-ball decay needs r < R");
    if (!(r > grid.h()))
        throw GeometryError("ball radius too small for grid spacing");
    if (set_mask.empty())
        throw PreconditionError("small-ball decay needs a nonempty set");
    std::vector<NodeState> state(grid.size(), NodeState::free);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Point p = grid.node(static_cast<int>(k));
        const double d = std::hypot(p.x - center.x, p.y - center.y);
        if (set_mask.at(static_cast<int>(k))) {
            if (d <= R)
                throw PreconditionError("ball B(x0, R) intersects the set");
            state[k] = NodeState::low;
        } else if (d <= r) {
            state[k] = NodeState::high;
        }
    }
    return conductance_modulus(grid, state, opt);
}

} // namespace modlab
