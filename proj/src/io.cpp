#include "dirty/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace dirty::io {

namespace {

struct Header {
    std::size_t p = 0;
    std::size_t r = 0;
    std::size_t n = 0;
};

// Pulls whitespace-separated numbers, skipping comments and blank lines.
class Tokens {
public:
    explicit Tokens(std::istream& is) : is_(is) {}

    bool next_line(std::vector<double>& out) {
        std::string line;
        while (std::getline(is_, line)) {
            ++line_no_;
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '#')
                continue;
            out.clear();
            std::istringstream ls(line);
            std::string tok;
            while (ls >> tok) {
                std::size_t used = 0;
                double v = 0.0;
                try {
                    v = std::stod(tok, &used);
                } catch (const std::exception&) {
                    used = 0;
                }
                if (used != tok.size() || !std::isfinite(v))
                    fail("bad number '" + tok + "'");
                out.push_back(v);
            }
            return true;
        }
        return false;
    }

    std::vector<double> row(std::size_t width) {
        std::vector<double> out;
        if (!next_line(out))
            fail("unexpected end of file");
        if (out.size() != width)
            fail("expected " + std::to_string(width) + " values, got " + std::to_string(out.size()));
        return out;
    }

    void expect_end() {
        std::vector<double> extra;
        if (next_line(extra))
            fail("trailing data");
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw FormatError("line " + std::to_string(line_no_) + ": " + what);
    }

private:
    std::istream& is_;
    std::size_t line_no_ = 0;
};

Header read_header(Tokens& tok) {
    const auto h = tok.row(3);
    for (double v : h)
        if (v < 0 || v != std::floor(v))
            tok.fail("header must be three nonnegative integers \"p r n\"");
    return Header{static_cast<std::size_t>(h[0]), static_cast<std::size_t>(h[1]), static_cast<std::size_t>(h[2])};
}

void set_precision(std::ostream& os) { os << std::setprecision(std::numeric_limits<double>::max_digits10); }

void write_rows(std::ostream& os, const CoefMatrix& m) {
    for (Eigen::Index j = 0; j < m.rows(); ++j) {
        for (Eigen::Index k = 0; k < m.cols(); ++k)
            os << (k ? " " : "") << m(j, k);
        os << '\n';
    }
}

CoefMatrix read_rows(Tokens& tok, std::size_t p, std::size_t r) {
    CoefMatrix m(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(r));
    for (std::size_t j = 0; j < p; ++j) {
        const auto row = tok.row(r);
        for (std::size_t k = 0; k < r; ++k)
            m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = row[k];
    }
    return m;
}

template <class F>
auto with_file(const std::filesystem::path& path, F&& f) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    try {
        return f(in);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

} // namespace

void write_problem(std::ostream& os, const MultiTaskProblem& problem) {
    problem.validate();
    set_precision(os);
    const auto n = problem.samples();
    const auto p = problem.features();
    os << p << ' ' << problem.tasks() << ' ' << n << '\n';
    for (std::size_t k = 0; k < problem.tasks(); ++k) {
        const auto& x = problem.designs[k];
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            for (Eigen::Index j = 0; j < x.cols(); ++j)
                os << x(i, j) << ' ';
            os << problem.responses[k][i] << '\n';
        }
    }
}

MultiTaskProblem read_problem(std::istream& is) {
    Tokens tok(is);
    const Header h = read_header(tok);
    if (h.p == 0 || h.r == 0 || h.n == 0)
        tok.fail("problem file needs positive p, r and n");
    MultiTaskProblem problem;
    for (std::size_t k = 0; k < h.r; ++k) {
        Eigen::MatrixXd x(static_cast<Eigen::Index>(h.n), static_cast<Eigen::Index>(h.p));
        Eigen::VectorXd y(static_cast<Eigen::Index>(h.n));
        for (std::size_t i = 0; i < h.n; ++i) {
            const auto row = tok.row(h.p + 1);
            for (std::size_t j = 0; j < h.p; ++j)
                x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
            y[static_cast<Eigen::Index>(i)] = row[h.p];
        }
        problem.designs.push_back(std::move(x));
        problem.responses.push_back(std::move(y));
    }
    tok.expect_end();
    return problem;
}

void write_matrix(std::ostream& os, const CoefMatrix& m) {
    set_precision(os);
    os << m.rows() << ' ' << m.cols() << " 0\n";
    write_rows(os, m);
}

CoefMatrix read_matrix(std::istream& is) {
    Tokens tok(is);
    const Header h = read_header(tok);
    if (h.n != 0)
        tok.fail("coefficient file header must end in 0");
    CoefMatrix m = read_rows(tok, h.p, h.r);
    tok.expect_end();
    return m;
}

void write_pair(std::ostream& os, const DirtyPair& pair) {
    set_precision(os);
    os << pair.features() << ' ' << pair.tasks() << " 0\n";
    write_rows(os, pair.b);
    write_rows(os, pair.s);
}

DirtyPair read_pair(std::istream& is) {
    Tokens tok(is);
    const Header h = read_header(tok);
    if (h.n != 0)
        tok.fail("coefficient file header must end in 0");
    CoefMatrix first = read_rows(tok, h.p, h.r);
    std::vector<double> probe;
    if (!tok.next_line(probe)) {
        CoefMatrix zero = CoefMatrix::Zero(first.rows(), first.cols());
        return DirtyPair(std::move(zero), std::move(first));
    }
    if (probe.size() != h.r)
        tok.fail("expected " + std::to_string(h.r) + " values, got " + std::to_string(probe.size()));
    CoefMatrix second(static_cast<Eigen::Index>(h.p), static_cast<Eigen::Index>(h.r));
    for (std::size_t k = 0; k < h.r; ++k)
        second(0, static_cast<Eigen::Index>(k)) = probe[k];
    if (h.p > 1)
        second.bottomRows(static_cast<Eigen::Index>(h.p - 1)) = read_rows(tok, h.p - 1, h.r);
    tok.expect_end();
    return DirtyPair(std::move(first), std::move(second));
}

MultiTaskProblem load_problem(const std::filesystem::path& path) {
    return with_file(path, [](std::istream& in) { return read_problem(in); });
}

CoefMatrix load_matrix(const std::filesystem::path& path) {
    return with_file(path, [](std::istream& in) { return read_matrix(in); });
}

DirtyPair load_pair(const std::filesystem::path& path) {
    return with_file(path, [](std::istream& in) { return read_pair(in); });
}

} // namespace dirty::io
