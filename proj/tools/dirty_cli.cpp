#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dirty/certify.hpp"
#include "dirty/decompose.hpp"
#include "dirty/digits.hpp"
#include "dirty/experiments.hpp"
#include "dirty/io.hpp"
#include "dirty/manifest.hpp"
#include "dirty/rng.hpp"
#include "dirty/svg.hpp"
#include "dirty/synth.hpp"

using namespace dirty;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr double kRangeTol = 1e-9;

// "a:b:step" (b exclusive), "a,b,c" or a single number.
std::vector<double> parse_range(const std::string& text) {
    std::vector<double> out;
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size())
            throw UsageError("bad number '" + s + "' in '" + text + "'");
        return v;
    };
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string part; std::getline(ss, part, ':');)
            parts.push_back(part);
        if (parts.size() != 3)
            throw UsageError("range must look like start:stop:step, got '" + text + "'");
        const double start = number(parts[0]), stop = number(parts[1]), step = number(parts[2]);
        if (!(step > 0.0))
            throw UsageError("range step must be positive");
        for (std::size_t i = 0;; ++i) {
            const double v = start + step * static_cast<double>(i);
            if (v >= stop - kRangeTol)
                break;
            out.push_back(v);
        }
    } else {
        std::stringstream ss(text);
        for (std::string part; std::getline(ss, part, ',');)
            out.push_back(number(part));
    }
    if (out.empty())
        throw UsageError("empty range '" + text + "'");
    return out;
}

std::vector<SolverMode> parse_methods(const std::string& text) {
    std::vector<SolverMode> out;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ',');) {
        try {
            out.push_back(parse_mode(part));
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    return out;
}

// Output sink: a file (with manifest) or stdout for "-".
class Output {
public:
    explicit Output(std::string path) : path_(std::move(path)) {
        if (path_ != "-") {
            file_ = std::make_unique<std::ofstream>(path_);
            if (!*file_)
                throw std::runtime_error("cannot write " + path_);
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }
    bool is_file() const { return file_ != nullptr; }
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::unique_ptr<std::ofstream> file_;
};

struct Run {
    CLI::App* sub = nullptr;
    std::vector<std::string> argv;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    std::optional<std::uint64_t> seed;

    RunManifest manifest() const {
        RunManifest m;
        m.command = sub->get_name();
        m.argv = argv;
        for (const CLI::Option* opt : sub->get_options()) {
            if (opt->get_name() == "--help")
                continue;
            std::string value;
            if (opt->count() > 0) {
                const auto& res = opt->results();
                for (std::size_t i = 0; i < res.size(); ++i)
                    value += (i ? "," : "") + res[i];
            } else {
                value = opt->get_default_str();
            }
            m.flags[opt->get_name()] = value;
        }
        m.seed = seed;
        m.duration_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return m;
    }

    void record(const std::string& path) const {
        if (!path.empty() && path != "-")
            write_manifest(manifest(), path);
    }
};

void print_support(std::ostream& os, const SignSupport& sup) {
    for (Eigen::Index j = 0; j < sup.rows(); ++j) {
        if ((sup.row(j).array() == 0).all())
            continue;
        os << "  row " << j << ":";
        for (Eigen::Index k = 0; k < sup.cols(); ++k)
            os << ' ' << (sup(j, k) > 0 ? '+' : sup(j, k) < 0 ? '-' : '0');
        os << '\n';
    }
}

struct SynthFlags {
    std::size_t p = 128;
    std::size_t s = 0;
    double alpha = 0.5;
    double sigma = 0.1;
    std::size_t r = 2;

    void add(CLI::App* app) {
        app->add_option("--p", p, "feature count")->capture_default_str();
        app->add_option("--s", s, "per-task support size (0: floor(p/10))")->capture_default_str();
        app->add_option("--alpha", alpha, "overlap fraction")->capture_default_str();
        app->add_option("--sigma", sigma, "noise standard deviation")->capture_default_str();
        app->add_option("--r", r, "task count")->capture_default_str();
    }
    InstanceSpec spec() const {
        InstanceSpec sp;
        sp.p = p;
        sp.s = s;
        sp.alpha = alpha;
        sp.sigma = sigma;
        sp.r = r;
        return sp;
    }
};

struct SolverFlags {
    double epsilon = 1e-6;
    std::size_t max_sweeps = 10000;
    double filter = kDefaultFilter;

    void add(CLI::App* app) {
        app->add_option("--epsilon", epsilon, "relative objective change to stop at")->capture_default_str();
        app->add_option("--max-sweeps", max_sweeps, "outer iteration cap")->capture_default_str();
        app->add_option("--filter", filter, "entries with |x| <= filter count as zero")->capture_default_str();
    }
    SolverConfig config(SolverMode mode = SolverMode::dirty) const {
        SolverConfig c;
        c.epsilon = epsilon;
        c.max_sweeps = max_sweeps;
        c.filter_threshold = filter;
        c.mode = mode;
        return c;
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dirty-model multi-task regression: solver, certificates and experiments"};
    app.require_subcommand(1);
    Run run;
    run.argv.assign(argv, argv + argc);

    // solve
    auto* solve_cmd = app.add_subcommand("solve", "Fit one instance and print objective, support and KKT report");
    std::string problem_path, solve_out, solve_method = "dirty";
    double lambda_s = 0.0, lambda_b = 0.0;
    std::size_t solve_n = 100;
    std::uint64_t seed = 0;
    SynthFlags solve_synth;
    SolverFlags solve_flags;
    solve_cmd->add_option("--problem", problem_path, "problem file (otherwise a synthetic instance is drawn)");
    solve_synth.add(solve_cmd);
    solve_cmd->add_option("--n", solve_n, "samples per task for the synthetic instance")->capture_default_str();
    solve_cmd->add_option("--seed", seed, "seed for the synthetic instance");
    solve_cmd->add_option("--method", solve_method, "dirty, lasso or linf")->capture_default_str();
    solve_cmd->add_option("--lambda-s", lambda_s, "lambda_s (omit both lambdas to select by CV)");
    solve_cmd->add_option("--lambda-b", lambda_b, "lambda_b");
    solve_cmd->add_option("--out", solve_out, "write the fitted (B, S) pair file here");
    solve_flags.add(solve_cmd);

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "Success probability against theta (phase-transition curves)");
    SynthFlags sweep_synth;
    SolverFlags sweep_flags;
    std::string theta_range = "0.8:3.2:0.2", sweep_methods = "dirty,lasso,linf", sweep_out = "-", sweep_svg;
    std::size_t trials = 100, workers = 1;
    sweep_synth.add(sweep_cmd);
    sweep_cmd->add_option("--theta", theta_range, "theta grid, start:stop:step (stop exclusive) or a,b,c")
        ->capture_default_str();
    sweep_cmd->add_option("--methods", sweep_methods, "comma-separated methods")->capture_default_str();
    sweep_cmd->add_option("--trials", trials, "instances per point")->capture_default_str();
    sweep_cmd->add_option("--seed", seed, "base seed")->required();
    sweep_cmd->add_option("--workers", workers, "worker threads")->capture_default_str();
    sweep_cmd->add_option("--out", sweep_out, "CSV path, - for stdout")->capture_default_str();
    sweep_cmd->add_option("--svg", sweep_svg, "also plot the curves to this SVG file");
    sweep_flags.add(sweep_cmd);

    // threshold
    auto* thr_cmd = app.add_subcommand("threshold", "50% thresholds per method, p and alpha");
    SynthFlags thr_synth;
    SolverFlags thr_flags;
    std::string thr_alphas = "0.3,0.6667,0.8", thr_ps = "128", thr_from, thr_out = "-", thr_sweep_out;
    std::string thr_theta = "0.4:4.2:0.2", thr_methods = "dirty,lasso,linf";
    std::size_t thr_trials = 100, thr_workers = 1;
    thr_synth.add(thr_cmd);
    thr_cmd->add_option("--alphas", thr_alphas, "overlap fractions")->capture_default_str();
    thr_cmd->add_option("--ps", thr_ps, "feature counts")->capture_default_str();
    thr_cmd->add_option("--theta", thr_theta, "theta grid for each sweep")->capture_default_str();
    thr_cmd->add_option("--methods", thr_methods, "comma-separated methods")->capture_default_str();
    thr_cmd->add_option("--trials", thr_trials, "instances per point")->capture_default_str();
    thr_cmd->add_option("--seed", seed, "base seed (not needed with --from)");
    thr_cmd->add_option("--workers", thr_workers, "worker threads")->capture_default_str();
    thr_cmd->add_option("--from", thr_from, "read an existing sweep CSV instead of running sweeps");
    thr_cmd->add_option("--sweep-out", thr_sweep_out, "also write the underlying sweep CSV");
    thr_cmd->add_option("--out", thr_out, "CSV path, - for stdout")->capture_default_str();
    thr_flags.add(thr_cmd);

    // predict
    auto* pred_cmd = app.add_subcommand("predict", "Analytic thresholds g(kappa, tau, alpha) and baselines");
    std::string pred_alpha = "0.5";
    double tau = 0.0, kappa = std::sqrt(2.0);
    std::string pred_method = "dirty";
    pred_cmd->add_option("--alpha", pred_alpha, "overlap fraction, or a range for a CSV curve")
        ->capture_default_str();
    pred_cmd->add_option("--tau", tau, "unbalanced share of the shared rows")->capture_default_str();
    pred_cmd->add_option("--kappa", kappa, "lambda_b / lambda_s")->capture_default_str();
    pred_cmd->add_option("--method", pred_method, "dirty, lasso or linf")->capture_default_str();

    // decompose
    auto* dec_cmd = app.add_subcommand("decompose", "Split a coefficient matrix into (B, S) by row clipping");
    std::string dec_matrix, dec_out = "-";
    std::size_t dec_d = 0;
    double dec_ls = 0.0, dec_lb = 0.0;
    dec_cmd->add_option("--matrix", dec_matrix, "coefficient file")->required();
    dec_cmd->add_option("--d", dec_d, "block size (1 <= d <= r)");
    dec_cmd->add_option("--lambda-s", dec_ls, "with --lambda-b: d = floor(lambda_b / lambda_s)");
    dec_cmd->add_option("--lambda-b", dec_lb, "");
    dec_cmd->add_option("--out", dec_out, "pair file, - for stdout")->capture_default_str();

    // certify
    auto* cert_cmd = app.add_subcommand("certify", "Check optimality conditions of a (B, S) pair");
    std::string cert_problem, cert_pair;
    double cert_ls = 0.0, cert_lb = 0.0, cert_tol = 1e-4, cert_filter = kDefaultFilter;
    cert_cmd->add_option("--problem", cert_problem, "problem file")->required();
    cert_cmd->add_option("--pair", cert_pair, "pair file (a plain coefficient file is read as S)")->required();
    cert_cmd->add_option("--lambda-s", cert_ls, "lambda_s")->required();
    cert_cmd->add_option("--lambda-b", cert_lb, "lambda_b")->required();
    cert_cmd->add_option("--tol", cert_tol, "slack relative to lambda")->capture_default_str();
    cert_cmd->add_option("--filter", cert_filter, "support filter")->capture_default_str();

    // digits
    auto* dig_cmd = app.add_subcommand("digits", "Handwritten-digits classification study");
    std::string mfeat_dir, dig_methods = "dirty,lasso,linf", dig_out = "-";
    double fraction = 0.1;
    std::size_t repeats = 5;
    SolverFlags dig_flags;
    dig_cmd->add_option("--mfeat-dir", mfeat_dir, "directory with mfeat-* files (default $MFEAT_DIR, then data/mfeat)");
    dig_cmd->add_option("--fraction", fraction, "training rows per digit as a fraction of 200")->capture_default_str();
    dig_cmd->add_option("--methods", dig_methods, "comma-separated methods")->capture_default_str();
    dig_cmd->add_option("--repeats", repeats, "random splits averaged per method")->capture_default_str();
    dig_cmd->add_option("--seed", seed, "base seed")->required();
    dig_cmd->add_option("--workers", workers, "worker threads")->capture_default_str();
    dig_cmd->add_option("--out", dig_out, "CSV path, - for stdout")->capture_default_str();
    dig_flags.add(dig_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        run.sub = app.get_subcommands().front();
        if (const auto* so = run.sub->get_option_no_throw("--seed"); so && so->count() > 0)
            run.seed = seed;

        if (*solve_cmd) {
            const SolverMode mode = parse_methods(solve_method).at(0);
            MultiTaskProblem train, test;
            std::optional<GroundTruth> truth;
            if (!problem_path.empty()) {
                train = io::load_problem(problem_path);
            } else {
                if (!run.seed)
                    throw UsageError("--seed is required to draw a synthetic instance");
                InstanceSpec spec = solve_synth.spec();
                spec.n = solve_n;
                spec.seed = seed;
                Instance inst = generate_instance(spec);
                train = std::move(inst.train);
                test = std::move(inst.test);
                truth = std::move(inst.truth);
            }
            const bool have_lambdas = solve_cmd->get_option("--lambda-s")->count() > 0 ||
                                      solve_cmd->get_option("--lambda-b")->count() > 0;
            SolverConfig cfg = solve_flags.config(mode);
            RegPair reg{lambda_s, lambda_b};
            SolveResult res;
            if (have_lambdas) {
                res = solve(train, reg, cfg);
            } else {
                if (test.designs.empty())
                    throw UsageError("give --lambda-s/--lambda-b when solving a problem file");
                const CvResult cv = cv_select(train, test, default_cv_grid(), mode, cfg);
                reg = cv.reg;
                res = solve(train, reg, cfg, cv.pair);
            }
            const RegPair eff{mode == SolverMode::linf_only ? 0.0 : reg.lambda_s,
                              mode == SolverMode::lasso_only ? 0.0 : reg.lambda_b};
            std::cout << std::setprecision(10) << "method: " << to_string(mode) << "\n"
                      << "lambda_s: " << eff.lambda_s << "\nlambda_b: " << eff.lambda_b << "\n"
                      << "objective: " << objective(train, res.pair, eff) << "\n"
                      << "sweeps: " << res.sweeps_used << "\nconverged: " << (res.converged ? "true" : "false")
                      << "\n";
            const SignSupport sup = signed_support(res.pair.theta(), cfg.filter_threshold);
            std::cout << "support_size: " << (sup.array() != 0).count() << "\n";
            if (truth)
                std::cout << "support_recovered: " << (sup == truth->sign_support ? "true" : "false") << "\n";
            std::cout << "support:\n";
            print_support(std::cout, sup);
            if (mode == SolverMode::dirty) {
                std::cout << to_text(check_kkt(train, res.pair, reg, cfg.filter_threshold));
            }
            if (!solve_out.empty()) {
                Output out(solve_out);
                io::write_pair(out.stream(), res.pair);
                run.record(solve_out);
            }
            return 0;
        }

        if (*sweep_cmd) {
            InstanceSpec tmpl = sweep_synth.spec();
            tmpl.seed = seed;
            SweepOptions opt;
            opt.trials = trials;
            opt.workers = workers;
            opt.config = sweep_flags.config();
            opt.on_point = [](const SweepPoint& pt) {
                std::cerr << to_string(pt.method) << " p=" << pt.p << " alpha=" << pt.alpha << " theta=" << pt.theta
                          << " n=" << pt.n << " success=" << pt.successes << "/" << pt.trials << std::endl;
            };
            const SweepTable table = sweep_phase(tmpl, parse_range(theta_range), parse_methods(sweep_methods), opt);
            Output out(sweep_out);
            write_sweep_csv(out.stream(), table);
            run.record(sweep_out);
            if (!sweep_svg.empty()) {
                emit_svg(table, sweep_svg);
                run.record(sweep_svg);
            }
            return 0;
        }

        if (*thr_cmd) {
            SweepTable table;
            if (!thr_from.empty()) {
                std::ifstream in(thr_from);
                if (!in)
                    throw std::runtime_error("cannot open " + thr_from);
                std::string line;
                std::getline(in, line);
                if (line != kSweepCsvHeader)
                    throw std::runtime_error(thr_from + ": not a sweep CSV");
                while (std::getline(in, line)) {
                    if (line.empty())
                        continue;
                    std::stringstream ss(line);
                    std::vector<std::string> f;
                    for (std::string cell; std::getline(ss, cell, ',');)
                        f.push_back(cell);
                    if (f.size() != 9)
                        throw std::runtime_error(thr_from + ": bad row '" + line + "'");
                    SweepPoint pt;
                    pt.method = parse_mode(f[0]);
                    pt.p = std::stoul(f[1]);
                    pt.s = std::stoul(f[2]);
                    pt.alpha = std::stod(f[3]);
                    pt.theta = std::stod(f[4]);
                    pt.n = std::stoul(f[5]);
                    pt.trials = std::stoul(f[6]);
                    pt.successes = std::stoul(f[7]);
                    table.push_back(pt);
                }
            } else {
                if (!run.seed)
                    throw UsageError("--seed is required unless --from is given");
                SweepOptions opt;
                opt.trials = thr_trials;
                opt.workers = thr_workers;
                opt.config = thr_flags.config();
                opt.on_point = [](const SweepPoint& pt) {
                    std::cerr << to_string(pt.method) << " p=" << pt.p << " alpha=" << pt.alpha
                              << " theta=" << pt.theta << " success=" << pt.successes << "/" << pt.trials
                              << std::endl;
                };
                const auto thetas = parse_range(thr_theta);
                const auto methods = parse_methods(thr_methods);
                for (double p : parse_range(thr_ps)) {
                    for (double alpha : parse_range(thr_alphas)) {
                        InstanceSpec tmpl = thr_synth.spec();
                        tmpl.p = static_cast<std::size_t>(p);
                        tmpl.alpha = alpha;
                        tmpl.seed = hash_seed({seed, tmpl.p, static_cast<std::uint64_t>(std::llround(alpha * 1e6))});
                        const SweepTable part = sweep_phase(tmpl, thetas, methods, opt);
                        table.insert(table.end(), part.begin(), part.end());
                    }
                }
                if (!thr_sweep_out.empty()) {
                    Output sw(thr_sweep_out);
                    write_sweep_csv(sw.stream(), table);
                    run.record(thr_sweep_out);
                }
            }
            Output out(thr_out);
            write_threshold_csv(out.stream(), extract_thresholds(table));
            run.record(thr_out);
            return 0;
        }

        if (*pred_cmd) {
            const SolverMode mode = parse_methods(pred_method).at(0);
            const auto alphas = parse_range(pred_alpha);
            auto value = [&](double a) {
                return mode == SolverMode::dirty ? predicted_threshold(TheoryParams{kappa, tau, a})
                                                 : baseline_threshold(mode, a);
            };
            if (alphas.size() == 1) {
                std::cout << value(alphas.front()) << "\n";
            } else {
                std::cout << "alpha,threshold\n";
                for (double a : alphas)
                    std::cout << a << ',' << value(a) << "\n";
            }
            return 0;
        }

        if (*dec_cmd) {
            const CoefMatrix theta = io::load_matrix(dec_matrix);
            std::size_t d = dec_d;
            if (dec_cmd->get_option("--d")->count() == 0) {
                if (!(dec_ls > 0.0 && dec_lb > 0.0))
                    throw UsageError("give --d or both --lambda-s and --lambda-b");
                d = block_size_for(dec_lb, dec_ls);
            }
            const DirtyPair pair = h_transform(theta, d);
            const StarReport rep = check_star_properties(pair, d);
            Output out(dec_out);
            io::write_pair(out.stream(), pair);
            std::cerr << "d: " << d << "\np1: " << rep.p1 << "\np2: " << rep.p2 << "\np3: " << rep.p3 << "\n";
            run.record(dec_out);
            return 0;
        }

        if (*cert_cmd) {
            const MultiTaskProblem problem = io::load_problem(cert_problem);
            const DirtyPair pair = io::load_pair(cert_pair);
            const RegPair reg{cert_ls, cert_lb};
            reg.validate(problem.tasks());
            std::cout << to_text(check_kkt(problem, pair, reg, cert_filter, cert_tol));
            return 0;
        }

        if (*dig_cmd) {
            if (mfeat_dir.empty()) {
                const char* env = std::getenv("MFEAT_DIR");
                mfeat_dir = env ? env : "data/mfeat";
            }
            if (!(fraction > 0.0 && fraction <= 1.0))
                throw UsageError("--fraction must lie in (0, 1]");
            const auto n_per_digit = static_cast<std::size_t>(std::llround(fraction * digits::kPerDigit));
            const auto scaled = digits::scale_features(digits::load_mfeat(mfeat_dir));
            const auto methods = parse_methods(dig_methods);
            const SolverConfig cfg = dig_flags.config();
            const CvGrid grid = digits::digits_cv_grid();

            std::vector<digits::DigitsMetrics> runs(methods.size() * repeats);
            parallel_for(runs.size(), workers, [&](std::size_t i) {
                const SolverMode m = methods[i / repeats];
                const std::size_t rep = i % repeats;
                runs[i] = digits::run_digits(scaled, n_per_digit, m, hash_seed({seed, rep}), cfg, grid).metrics;
            });

            Output out(dig_out);
            out.stream() << digits::kDigitsCsvHeader << '\n';
            for (std::size_t mi = 0; mi < methods.size(); ++mi) {
                digits::DigitsMetrics avg;
                double b_rows = 0, rows = 0, s_sup = 0, sup = 0;
                for (std::size_t rep = 0; rep < repeats; ++rep) {
                    const auto& m = runs[mi * repeats + rep];
                    avg.mean_error += m.mean_error / static_cast<double>(repeats);
                    avg.error_variance += m.error_variance / static_cast<double>(repeats);
                    b_rows += static_cast<double>(m.b_row_support);
                    rows += static_cast<double>(m.combined_row_support);
                    s_sup += static_cast<double>(m.s_support);
                    sup += static_cast<double>(m.combined_support);
                    std::cerr << to_string(methods[mi]) << " split " << rep << ": mean_error=" << m.mean_error
                              << std::endl;
                }
                const auto r = static_cast<double>(repeats);
                avg.b_row_support = static_cast<std::size_t>(std::llround(b_rows / r));
                avg.combined_row_support = static_cast<std::size_t>(std::llround(rows / r));
                avg.s_support = static_cast<std::size_t>(std::llround(s_sup / r));
                avg.combined_support = static_cast<std::size_t>(std::llround(sup / r));
                digits::write_digits_row(out.stream(), fraction, methods[mi], avg);
            }
            run.record(dig_out);
            return 0;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n" << app.help() << std::flush;
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
