#pragma once
#include <filesystem>
#include <string>

#include "dirty/experiments.hpp"

namespace dirty {

/// Standalone SVG line chart of success rate against theta, one polyline
/// per (method, p, alpha) curve plus a legend. Throws std::invalid_argument
/// on an empty table.
std::string render_svg(const SweepTable& table);

/// Writes render_svg(table) to path. Nothing is created for an empty table;
/// an unwritable path throws std::runtime_error.
void emit_svg(const SweepTable& table, const std::filesystem::path& path);

} // namespace dirty
