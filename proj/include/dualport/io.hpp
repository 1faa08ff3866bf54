#pragma once

#include <string>
#include <vector>

namespace dualport {

/// Shortest decimal form with 17 significant digits (round-trips doubles).
std::string format_sig17(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

/// Writes header + rows with 17 significant digits per cell.
void write_csv(const std::string& path, const CsvTable& table);

struct PlotSlice {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Dependency-free SVG line plot: one polyline per slice, shared axes.
void write_polyline_svg(const std::string& path, const std::string& title,
                        const std::string& x_label, const std::string& y_label,
                        const std::vector<PlotSlice>& slices);

}  // namespace dualport
