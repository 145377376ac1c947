#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "dirty/io.hpp"
#include "dirty/manifest.hpp"
#include "dirty/svg.hpp"
#include "oracles.hpp"

using namespace dirty;
namespace fs = std::filesystem;

namespace {

std::size_t count(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1))
        ++n;
    return n;
}

SweepTable table_for(std::initializer_list<SolverMode> methods) {
    SweepTable t;
    for (SolverMode m : methods)
        for (double theta : {1.0, 1.5, 2.0}) {
            SweepPoint pt;
            pt.method = m;
            pt.p = 128;
            pt.s = 12;
            pt.alpha = 0.5;
            pt.theta = theta;
            pt.trials = 10;
            pt.successes = static_cast<std::size_t>(theta * 4);
            t.push_back(pt);
        }
    return t;
}

} // namespace

TEST_CASE("problem round trip") {
    std::mt19937_64 rng(51);
    const auto pr = oracle::random_problem(rng, 7, 3, 2);
    std::stringstream ss;
    io::write_problem(ss, pr);
    const auto back = io::read_problem(ss);
    REQUIRE(back.tasks() == 2);
    for (std::size_t k = 0; k < 2; ++k) {
        CHECK(back.designs[k] == pr.designs[k]);
        CHECK(back.responses[k] == pr.responses[k]);
    }
}

TEST_CASE("matrix and pair round trip") {
    CoefMatrix m(3, 2);
    m << 1.0 / 3.0, -2, 0, 1e-17, 5, 0.1;
    std::stringstream ss;
    io::write_matrix(ss, m);
    CHECK(io::read_matrix(ss) == m);

    const DirtyPair pair(m, 2 * m);
    std::stringstream ps;
    io::write_pair(ps, pair);
    const DirtyPair back = io::read_pair(ps);
    CHECK(back.b == pair.b);
    CHECK(back.s == pair.s);

    std::stringstream plain("# theta only\n2 2 0\n\n1 2\n3 4\n");
    const DirtyPair as_s = io::read_pair(plain);
    CHECK(as_s.b.isZero());
    CHECK(as_s.s(1, 0) == 3.0);
}

TEST_CASE("format errors") {
    std::stringstream bad_header("2 x 0\n");
    CHECK_THROWS_AS(io::read_matrix(bad_header), io::FormatError);
    std::stringstream short_rows("2 2 0\n1 2\n");
    CHECK_THROWS_AS(io::read_matrix(short_rows), io::FormatError);
    std::stringstream wide("1 2 0\n1 2 3\n");
    CHECK_THROWS_AS(io::read_matrix(wide), io::FormatError);
    std::stringstream empty("");
    CHECK_THROWS_AS(io::read_problem(empty), io::FormatError);
    CHECK_THROWS(io::load_matrix(fs::temp_directory_path() / "dirty_missing_matrix.txt"));
}

TEST_CASE("svg rendering") {
    const std::string one = render_svg(table_for({SolverMode::dirty}));
    CHECK(count(one, "<polyline") == 1);
    CHECK(one.find("<svg") != std::string::npos);
    CHECK(one.find("</svg>") != std::string::npos);
    const std::string three =
        render_svg(table_for({SolverMode::dirty, SolverMode::lasso_only, SolverMode::linf_only}));
    CHECK(count(three, "<polyline") == 3);
    const auto legend = three.substr(three.find("class=\"legend\""));
    CHECK(count(legend, "<text") == 3);
    CHECK(legend.find("lasso") != std::string::npos);

    const fs::path out = fs::temp_directory_path() / "dirty_empty.svg";
    fs::remove(out);
    CHECK_THROWS_AS(emit_svg({}, out), std::invalid_argument);
    CHECK_FALSE(fs::exists(out));
    emit_svg(table_for({SolverMode::dirty}), out);
    CHECK(fs::file_size(out) == one.size());
    fs::remove(out);
}

TEST_CASE("manifest") {
    RunManifest m;
    m.command = "sweep";
    m.argv = {"dirty", "sweep", "--seed", "3"};
    m.flags = {{"seed", "3"}, {"p", "128"}};
    m.seed = 3;
    m.duration_seconds = 1.5;
    const RunManifest back = manifest_from_json(to_json(m));
    CHECK(back.command == m.command);
    CHECK(back.argv == m.argv);
    CHECK(back.flags == m.flags);
    CHECK(back.seed == m.seed);
    CHECK(back.version == kVersion);
    CHECK(back.duration_seconds == 1.5);

    RunManifest unseeded;
    unseeded.command = "predict";
    CHECK_FALSE(manifest_from_json(to_json(unseeded)).seed.has_value());

    CHECK(manifest_path("out/a.csv") == fs::path("out/a.csv.manifest.json"));
    const fs::path target = fs::temp_directory_path() / "dirty_manifest_test.csv";
    write_manifest(m, target);
    std::ifstream in(manifest_path(target));
    std::stringstream text;
    text << in.rdbuf();
    CHECK(manifest_from_json(text.str()).command == "sweep");
    fs::remove(manifest_path(target));
}
