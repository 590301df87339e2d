#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace hrsim {

using ScalarField = std::vector<double>;

/// Cell-centred discretisation of a box [0, L1] x ... x [0, Ld], d <= 3, with
/// homogeneous Neumann (zero-flux) boundaries realised by ghost reflection.
/// Fields are stored row-major with the last axis fastest.
class SpatialGrid {
public:
    SpatialGrid(int dim, std::array<std::size_t, 3> n_cells, std::array<double, 3> extents);

    /// Uniform box with the same cell count and extent along every axis.
    static SpatialGrid box(int dim, std::size_t cells, double extent);

    /// Parses "dim:cells:extent", e.g. "1:32:1.0".
    static SpatialGrid parse(const std::string& spec);
    std::string spec() const;

    int dim() const noexcept { return dim_; }
    std::size_t cells(int axis) const noexcept { return n_[axis]; }
    double extent(int axis) const noexcept { return extents_[axis]; }
    double spacing(int axis) const noexcept { return h_[axis]; }
    std::size_t stride(int axis) const noexcept { return stride_[axis]; }
    std::size_t size() const noexcept { return size_; }
    double cell_volume() const noexcept { return cell_volume_; }
    /// |Omega|, product of the extents.
    double measure() const noexcept { return measure_; }

    /// Centre coordinate of cell `index` along `axis`.
    double coordinate(std::size_t index, int axis) const noexcept;

    bool operator==(const SpatialGrid&) const = default;

private:
    int dim_;
    std::array<std::size_t, 3> n_{1, 1, 1};
    std::array<double, 3> extents_{1.0, 1.0, 1.0};
    std::array<double, 3> h_{1.0, 1.0, 1.0};
    std::array<std::size_t, 3> stride_{1, 1, 1};
    std::size_t size_ = 1;
    double cell_volume_ = 1.0;
    double measure_ = 1.0;
};

/// The state triple (U, V, Z) on a grid.
struct StateField {
    ScalarField U;
    ScalarField V;
    ScalarField Z;

    static StateField zeros(const SpatialGrid& grid);
    static StateField constant(const SpatialGrid& grid, double u, double v, double z);

    ScalarField& component(int i) { return i == 0 ? U : (i == 1 ? V : Z); }
    const ScalarField& component(int i) const { return i == 0 ? U : (i == 1 ? V : Z); }

    bool conforms(const SpatialGrid& grid) const noexcept;
    bool all_finite() const noexcept;

    StateField& operator*=(double s);
    bool operator==(const StateField&) const = default;
};

StateField operator*(double s, StateField f);
StateField operator-(const StateField& a, const StateField& b);

void check_conforms(std::span<const double> f, const SpatialGrid& grid);
void check_conforms(const StateField& f, const SpatialGrid& grid);

/// Second-order central Laplacian with mirror ghost cells.
ScalarField neumann_laplacian(std::span<const double> f, const SpatialGrid& grid);
void neumann_laplacian_into(std::span<const double> f, const SpatialGrid& grid, std::span<double> out);

double inner(std::span<const double> f, std::span<const double> g, const SpatialGrid& grid);
double l2_norm(std::span<const double> f, const SpatialGrid& grid);
double l2_norm(const StateField& f, const SpatialGrid& grid);
double l4_norm(std::span<const double> f, const SpatialGrid& grid);

/// Squared H1 seminorm from face-centred differences; boundary faces carry no flux.
double h1_seminorm_sq(std::span<const double> f, const SpatialGrid& grid);
double h1_seminorm(std::span<const double> f, const SpatialGrid& grid);
/// |grad U|^2 + |grad V|^2 + |grad Z|^2.
double h1_seminorm_sq(const StateField& f, const SpatialGrid& grid);

/// Snapshot export: CSV (index, coordinates, U, V, Z).
void write_field_csv(std::ostream& os, const StateField& f, const SpatialGrid& grid);

/// Binary snapshot: int64 dim, int64 n_cells[dim], float64 extents[dim], then
/// U, V, Z as row-major float64 arrays; all little-endian.
void write_field_binary(std::ostream& os, const StateField& f, const SpatialGrid& grid);
StateField read_field_binary(std::istream& is, SpatialGrid* grid_out = nullptr);

} // namespace hrsim
