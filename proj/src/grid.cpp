#include "hrsim/grid.hpp"

#include "hrsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace hrsim {

SpatialGrid::SpatialGrid(int dim, std::array<std::size_t, 3> n_cells, std::array<double, 3> extents)
    : dim_(dim) {
    if (dim < 1 || dim > 3) {
        throw DomainError("SpatialGrid: dimension must be 1, 2 or 3");
    }
    for (int ax = 0; ax < dim; ++ax) {
        if (n_cells[ax] < 2) {
            throw DomainError("SpatialGrid: at least 2 cells per axis");
        }
        if (!(extents[ax] > 0.0) || !std::isfinite(extents[ax])) {
            throw DomainError("SpatialGrid: extents must be positive and finite");
        }
        n_[ax] = n_cells[ax];
        extents_[ax] = extents[ax];
        h_[ax] = extents[ax] / static_cast<double>(n_cells[ax]);
    }
    size_ = 1;
    cell_volume_ = 1.0;
    measure_ = 1.0;
    for (int ax = dim - 1; ax >= 0; --ax) {
        stride_[ax] = size_;
        size_ *= n_[ax];
    }
    for (int ax = 0; ax < dim; ++ax) {
        cell_volume_ *= h_[ax];
        measure_ *= extents_[ax];
    }
}

SpatialGrid SpatialGrid::box(int dim, std::size_t cells, double extent) {
    return SpatialGrid(dim, {cells, cells, cells}, {extent, extent, extent});
}

SpatialGrid SpatialGrid::parse(const std::string& spec) {
    std::istringstream in(spec);
    std::string dim_s;
    std::string cells_s;
    std::string extent_s;
    if (!std::getline(in, dim_s, ':') || !std::getline(in, cells_s, ':') ||
        !std::getline(in, extent_s)) {
        throw ConfigError("grid spec must be dim:cells:extent, got '" + spec + "'");
    }
    try {
        std::size_t pos = 0;
        const int dim = std::stoi(dim_s, &pos);
        if (pos != dim_s.size()) throw std::invalid_argument(dim_s);
        const long cells = std::stol(cells_s, &pos);
        if (pos != cells_s.size() || cells < 2) throw std::invalid_argument(cells_s);
        const double extent = std::stod(extent_s, &pos);
        if (pos != extent_s.size()) throw std::invalid_argument(extent_s);
        return box(dim, static_cast<std::size_t>(cells), extent);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("grid spec: ") + e.what());
    } catch (const std::logic_error&) {
        throw ConfigError("grid spec must be dim:cells:extent, got '" + spec + "'");
    }
}

std::string SpatialGrid::spec() const {
    std::ostringstream os;
    os << dim_ << ':' << n_[0] << ':' << std::setprecision(17) << extents_[0];
    return os.str();
}

double SpatialGrid::coordinate(std::size_t index, int axis) const noexcept {
    const std::size_t i = (index / stride_[axis]) % n_[axis];
    return (static_cast<double>(i) + 0.5) * h_[axis];
}

StateField StateField::zeros(const SpatialGrid& grid) {
    return constant(grid, 0.0, 0.0, 0.0);
}

StateField StateField::constant(const SpatialGrid& grid, double u, double v, double z) {
    return {ScalarField(grid.size(), u), ScalarField(grid.size(), v), ScalarField(grid.size(), z)};
}

bool StateField::conforms(const SpatialGrid& grid) const noexcept {
    return U.size() == grid.size() && V.size() == grid.size() && Z.size() == grid.size();
}

bool StateField::all_finite() const noexcept {
    auto finite = [](const ScalarField& f) {
        return std::all_of(f.begin(), f.end(), [](double x) { return std::isfinite(x); });
    };
    return finite(U) && finite(V) && finite(Z);
}

StateField& StateField::operator*=(double s) {
    for (int c = 0; c < 3; ++c) {
        for (double& x : component(c)) {
            x *= s;
        }
    }
    return *this;
}

StateField operator*(double s, StateField f) {
    f *= s;
    return f;
}

StateField operator-(const StateField& a, const StateField& b) {
    StateField out = a;
    for (int c = 0; c < 3; ++c) {
        const auto& rhs = b.component(c);
        auto& lhs = out.component(c);
        if (lhs.size() != rhs.size()) {
            throw ShapeError("StateField difference: shape mismatch");
        }
        for (std::size_t i = 0; i < lhs.size(); ++i) {
            lhs[i] -= rhs[i];
        }
    }
    return out;
}

void check_conforms(std::span<const double> f, const SpatialGrid& grid) {
    if (f.size() != grid.size()) {
        throw ShapeError("field has " + std::to_string(f.size()) + " entries, grid has " +
                         std::to_string(grid.size()) + " cells");
    }
}

void check_conforms(const StateField& f, const SpatialGrid& grid) {
    if (!f.conforms(grid)) {
        throw ShapeError("state field does not conform to grid");
    }
}

void neumann_laplacian_into(std::span<const double> f, const SpatialGrid& grid, std::span<double> out) {
    check_conforms(f, grid);
    check_conforms(out, grid);
    std::fill(out.begin(), out.end(), 0.0);
    for (int ax = 0; ax < grid.dim(); ++ax) {
        const std::size_t n = grid.cells(ax);
        const std::size_t st = grid.stride(ax);
        const double inv_h2 = 1.0 / (grid.spacing(ax) * grid.spacing(ax));
        for (std::size_t idx = 0; idx < f.size(); ++idx) {
            const std::size_t i = (idx / st) % n;
            // mirror ghosts: the missing neighbour equals the cell itself
            const double left = i > 0 ? f[idx - st] : f[idx];
            const double right = i + 1 < n ? f[idx + st] : f[idx];
            out[idx] += (left - 2.0 * f[idx] + right) * inv_h2;
        }
    }
}

ScalarField neumann_laplacian(std::span<const double> f, const SpatialGrid& grid) {
    ScalarField out(f.size());
    neumann_laplacian_into(f, grid, out);
    return out;
}

double inner(std::span<const double> f, std::span<const double> g, const SpatialGrid& grid) {
    check_conforms(f, grid);
    check_conforms(g, grid);
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        s += f[i] * g[i];
    }
    return s * grid.cell_volume();
}

double l2_norm(std::span<const double> f, const SpatialGrid& grid) {
    return std::sqrt(inner(f, f, grid));
}

double l2_norm(const StateField& f, const SpatialGrid& grid) {
    check_conforms(f, grid);
    return std::sqrt(inner(f.U, f.U, grid) + inner(f.V, f.V, grid) + inner(f.Z, f.Z, grid));
}

double l4_norm(std::span<const double> f, const SpatialGrid& grid) {
    check_conforms(f, grid);
    double s = 0.0;
    for (double x : f) {
        const double x2 = x * x;
        s += x2 * x2;
    }
    return std::sqrt(std::sqrt(s * grid.cell_volume()));
}

double h1_seminorm_sq(std::span<const double> f, const SpatialGrid& grid) {
    check_conforms(f, grid);
    double s = 0.0;
    for (int ax = 0; ax < grid.dim(); ++ax) {
        const std::size_t n = grid.cells(ax);
        const std::size_t st = grid.stride(ax);
        const double inv_h = 1.0 / grid.spacing(ax);
        for (std::size_t idx = 0; idx < f.size(); ++idx) {
            if ((idx / st) % n + 1 < n) {
                const double g = (f[idx + st] - f[idx]) * inv_h;
                s += g * g;
            }
        }
    }
    return s * grid.cell_volume();
}

double h1_seminorm(std::span<const double> f, const SpatialGrid& grid) {
    return std::sqrt(h1_seminorm_sq(f, grid));
}

double h1_seminorm_sq(const StateField& f, const SpatialGrid& grid) {
    check_conforms(f, grid);
    return h1_seminorm_sq(std::span<const double>(f.U), grid) +
           h1_seminorm_sq(std::span<const double>(f.V), grid) +
           h1_seminorm_sq(std::span<const double>(f.Z), grid);
}

void write_field_csv(std::ostream& os, const StateField& f, const SpatialGrid& grid) {
    check_conforms(f, grid);
    static const char* axis_names[] = {"x", "y", "z"};
    os << "index";
    for (int ax = 0; ax < grid.dim(); ++ax) {
        os << ',' << axis_names[ax];
    }
    os << ",U,V,Z\n" << std::setprecision(17);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        os << i;
        for (int ax = 0; ax < grid.dim(); ++ax) {
            os << ',' << grid.coordinate(i, ax);
        }
        os << ',' << f.U[i] << ',' << f.V[i] << ',' << f.Z[i] << '\n';
    }
}

namespace {

template <typename T>
void put_le(std::ostream& os, T value) {
    static_assert(sizeof(T) == 8);
    std::uint64_t bits = 0;
    std::memcpy(&bits, &value, 8);
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) {
        buf[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xFF);
    }
    os.write(reinterpret_cast<const char*>(buf), 8);
}

template <typename T>
T get_le(std::istream& is) {
    unsigned char buf[8];
    if (!is.read(reinterpret_cast<char*>(buf), 8)) {
        throw ShapeError("binary snapshot: truncated stream");
    }
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) {
        bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    }
    T value;
    std::memcpy(&value, &bits, 8);
    return value;
}

} // namespace

void write_field_binary(std::ostream& os, const StateField& f, const SpatialGrid& grid) {
    check_conforms(f, grid);
    put_le<std::int64_t>(os, grid.dim());
    for (int ax = 0; ax < grid.dim(); ++ax) {
        put_le<std::int64_t>(os, static_cast<std::int64_t>(grid.cells(ax)));
    }
    for (int ax = 0; ax < grid.dim(); ++ax) {
        put_le<double>(os, grid.extent(ax));
    }
    for (int c = 0; c < 3; ++c) {
        for (double x : f.component(c)) {
            put_le<double>(os, x);
        }
    }
}

StateField read_field_binary(std::istream& is, SpatialGrid* grid_out) {
    const auto dim = get_le<std::int64_t>(is);
    if (dim < 1 || dim > 3) {
        throw ShapeError("binary snapshot: bad dimension");
    }
    std::array<std::size_t, 3> cells{1, 1, 1};
    std::array<double, 3> extents{1.0, 1.0, 1.0};
    for (int ax = 0; ax < dim; ++ax) {
        const auto n = get_le<std::int64_t>(is);
        if (n < 2) {
            throw ShapeError("binary snapshot: bad cell count");
        }
        cells[ax] = static_cast<std::size_t>(n);
    }
    for (int ax = 0; ax < dim; ++ax) {
        extents[ax] = get_le<double>(is);
    }
    SpatialGrid grid(static_cast<int>(dim), cells, extents);
    StateField f = StateField::zeros(grid);
    for (int c = 0; c < 3; ++c) {
        for (double& x : f.component(c)) {
            x = get_le<double>(is);
        }
    }
    if (grid_out != nullptr) {
        *grid_out = grid;
    }
    return f;
}

} // namespace hrsim
