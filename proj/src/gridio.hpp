#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fdops.hpp"

namespace convexsdp {

// CSV with header "x1,...,xd,value": one row per node in node order,
// coordinates i/n and values printed with 17 significant digits.
void write_grid(const GridFunction& u, std::ostream& out);
void write_grid(const GridFunction& u, const std::string& path);

// Dimension comes from the header and n from the row count. When
// `expected` is given the file must describe that grid.
GridFunction read_grid(std::istream& in, const std::optional<Grid>& expected = std::nullopt);
GridFunction read_grid(const std::string& path, const std::optional<Grid>& expected = std::nullopt);

// 1e-7, 0.1, 0.2, ..., 1.1
std::vector<double> default_contour_levels();

constexpr int kContourRefinement = 4;

// JSON document with u interpolated on a lattice 4x finer than the grid
// plus the contour levels; d = 2 only.
std::string contour_json(const GridFunction& u, const std::vector<double>& levels);
void write_contours(const GridFunction& u, const std::vector<double>& levels, const std::string& path);

}  // namespace convexsdp
