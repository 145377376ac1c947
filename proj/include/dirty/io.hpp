#pragma once
#include <filesystem>
#include <iosfwd>
#include <stdexcept>

#include "dirty/core.hpp"

namespace dirty::io {

// Plain-text matrix files. The first line is "p r n"; lines starting with
// '#' and blank lines are ignored.
//
//   problem file:      for each task, n rows of "x_1 ... x_p y"
//   coefficient file:  n = 0, then p rows of r values
//   pair file:         n = 0, then p rows of B followed by p rows of S

class FormatError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_problem(std::ostream& os, const MultiTaskProblem& problem);
MultiTaskProblem read_problem(std::istream& is);

void write_matrix(std::ostream& os, const CoefMatrix& m);
CoefMatrix read_matrix(std::istream& is);

void write_pair(std::ostream& os, const DirtyPair& pair);
/// Also accepts a plain coefficient file, read as B = 0 and S = the matrix.
DirtyPair read_pair(std::istream& is);

MultiTaskProblem load_problem(const std::filesystem::path& path);
CoefMatrix load_matrix(const std::filesystem::path& path);
DirtyPair load_pair(const std::filesystem::path& path);

} // namespace dirty::io
