#include "fanneal/commands.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <memory>

#include "fanneal/analysis.hpp"
#include "fanneal/digest.hpp"
#include "fanneal/parallel.hpp"
#include "fanneal/random.hpp"
#include "fanneal/stats.hpp"
#include "fanneal/sde.hpp"
#include "fanneal/steady.hpp"

namespace fanneal {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kChunk = 256;

/// CSV files written under "<name>.partial" and renamed on commit; anything
/// left uncommitted is removed.
class OutputSet {
public:
    OutputSet(fs::path dir, std::string command, const Scenario& s, const RunOptions& opts)
        : dir_(std::move(dir)), command_(std::move(command)), scenario_(s), opts_(opts) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec || !fs::is_directory(dir_)) throw IoError("cannot create output directory '" + dir_.string() + "'");
    }
    OutputSet(const OutputSet&) = delete;
    OutputSet& operator=(const OutputSet&) = delete;

    ~OutputSet() {
        if (committed_) return;
        for (auto& f : files_) {
            f.stream.reset();
            std::error_code ec;
            fs::remove(partial(f.name), ec);
        }
    }

    std::ostream& open(const std::string& name) {
        auto stream = std::make_unique<std::ofstream>(partial(name), std::ios::binary | std::ios::trunc);
        if (!*stream) throw IoError("cannot write to '" + partial(name).string() + "'");
        files_.push_back({name, std::move(stream)});
        return *files_.back().stream;
    }

    RunResult commit(std::uint64_t seed) {
        RunResult result;
        for (auto& f : files_) {
            f.stream->flush();
            if (!*f.stream) throw IoError("write failed for '" + f.name + "'");
            f.stream->close();
        }
        std::vector<std::pair<std::string, std::string>> digests;
        for (auto& f : files_) digests.emplace_back(f.name, sha256_file(partial(f.name)));

        std::ostream& m = open("manifest.txt");
        m << "tool: fanneal\n"
          << "version: " << FANNEAL_VERSION << "\n"
          << "command: " << command_ << "\n"
          << "timestamp: " << timestamp() << "\n"
          << "effective_seed: " << seed << "\n"
          << "threads: " << opts_.threads << "\n"
          << "zero_noise: " << (opts_.zero_noise ? "true" : "false") << "\n"
          << "scenario: " << scenario_to_json(scenario_) << "\n";
        for (const auto& [name, digest] : digests) m << "sha256 " << name << ": " << digest << "\n";
        auto& mf = files_.back();
        mf.stream->flush();
        if (!*mf.stream) throw IoError("write failed for manifest.txt");
        mf.stream->close();

        for (auto& f : files_) {
            std::error_code ec;
            fs::rename(partial(f.name), dir_ / f.name, ec);
            if (ec) throw IoError("cannot move '" + f.name + "' into place: " + ec.message());
            result.files.push_back(dir_ / f.name);
        }
        committed_ = true;
        return result;
    }

private:
    struct File {
        std::string name;
        std::unique_ptr<std::ofstream> stream;
    };

    [[nodiscard]] fs::path partial(const std::string& name) const { return dir_ / (name + ".partial"); }

    static std::string timestamp() {
        const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::tm tm{};
        gmtime_r(&now, &tm);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
        return buf;
    }

    fs::path dir_;
    std::string command_;
    const Scenario& scenario_;
    const RunOptions& opts_;
    std::vector<File> files_;
    bool committed_ = false;
};

void put(std::ostream& out, double x) { out << format_number(x); }
void put(std::ostream& out, std::size_t x) { out << x; }

template <class... Ts>
void row(std::ostream& out, const Ts&... xs) {
    bool first = true;
    ((out << (first ? "" : ","), put(out, xs), first = false), ...);
    out << '\n';
}

void header(std::ostream& out, std::initializer_list<std::string> names) {
    bool first = true;
    for (const auto& n : names) {
        out << (first ? "" : ",") << n;
        first = false;
    }
    out << '\n';
}

std::uint64_t effective_seed(const Scenario& s, const RunOptions& opts) { return opts.seed.value_or(s.master_seed); }

/// Runs compute(r) for replicates in chunks of parallel work, then emit(r)
/// sequentially in replicate order.
template <class Slot, class Compute, class Emit>
void chunked(std::size_t replicates, unsigned threads, Compute&& compute, Emit&& emit) {
    std::vector<Slot> slots;
    for (std::size_t lo = 0; lo < replicates; lo += kChunk) {
        const std::size_t hi = std::min(replicates, lo + kChunk);
        slots.assign(hi - lo, Slot{});
        parallel_for(hi - lo, threads, [&](std::size_t k) { slots[k] = compute(lo + k); });
        for (std::size_t k = 0; k < slots.size(); ++k) emit(lo + k, slots[k]);
    }
}

/// Running mean and variance (Welford), updated in replicate order.
struct Moments {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }
    [[nodiscard]] double std_error() const {
        return n < 2 ? 0.0 : std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
    }
};

void require_dim2(const Scenario& s, const char* command) {
    if (s.dim() != 2) throw ConfigError("hurst", std::string(command) + " needs exactly two dimensions");
}

}  // namespace

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

RunResult run_simulate_fbm(const Scenario& s, const RunOptions& opts) {
    const TimeGrid grid = s.grid();
    const auto hurst = s.hurst_params();
    const std::uint64_t seed = effective_seed(s, opts);
    std::vector<double> eps{0.0};
    eps.insert(eps.end(), s.epsilon_ladder.begin(), s.epsilon_ladder.end());
    const WienerEnsemble ens{grid, s.dim(), seed, s.replicates};

    OutputSet out(opts.out_dir, "simulate-fbm", s, opts);
    std::ostream& csv = out.open("fbm_paths.csv");
    header(csv, {"t", "replicate", "dim", "value", "epsilon"});
    const auto nodes = grid.node_values();
    using Slot = std::vector<std::vector<double>>;  // [eps][dim] flattened
    chunked<Slot>(
        s.replicates, opts.threads,
        [&](std::size_t r) {
            const WienerPath w = ens.path(r);
            Slot slot;
            for (double e : eps)
                for (std::size_t j = 0; j < s.dim(); ++j) slot.push_back(fbm_from_wiener(w, hurst[j], e, j).values);
            return slot;
        },
        [&](std::size_t r, const Slot& slot) {
            std::size_t k = 0;
            for (double e : eps) {
                for (std::size_t j = 0; j < s.dim(); ++j, ++k) {
                    for (std::size_t n = 0; n < nodes.size(); ++n) row(csv, nodes[n], r, j + 1, slot[k][n], e);
                }
            }
        });
    return out.commit(seed);
}

RunResult run_anneal(const Scenario& s, const RunOptions& opts) {
    const EnergyFunction g = s.energy_function();
    const TimeGrid grid = s.grid();
    const std::uint64_t seed = effective_seed(s, opts);
    const std::size_t d = s.dim();
    AnnealingConfig cfg;
    cfg.temperature = opts.zero_noise ? 0.0 : s.temperature;
    cfg.hurst_per_dim = s.hurst_params();
    cfg.epsilon_per_dim.assign(d, 0.0);
    cfg.initial_state = Eigen::Map<const Eigen::VectorXd>(s.x_init.data(), static_cast<Eigen::Index>(d));
    cfg.grid = grid;
    cfg.validate();
    const WienerEnsemble ens{grid, d, seed, s.replicates};
    const bool noiseless = cfg.temperature == 0.0;

    OutputSet out(opts.out_dir, "anneal", s, opts);
    std::ostream& paths = out.open("anneal_paths.csv");
    std::ostream& summary = out.open("anneal_summary.csv");
    {
        std::vector<std::string> cols{"t", "replicate"};
        for (std::size_t j = 1; j <= d; ++j) cols.push_back("x" + std::to_string(j));
        cols.emplace_back("energy");
        for (std::size_t c = 0; c < cols.size(); ++c) paths << (c ? "," : "") << cols[c];
        paths << '\n';
        std::vector<std::string> sc{"t"};
        for (std::size_t j = 1; j <= d; ++j) sc.push_back("mean_x" + std::to_string(j));
        sc.emplace_back("mean_energy");
        for (std::size_t j = 1; j <= d; ++j) sc.push_back("se_x" + std::to_string(j));
        sc.emplace_back("se_energy");
        for (std::size_t c = 0; c < sc.size(); ++c) summary << (c ? "," : "") << sc[c];
        summary << '\n';
    }
    const auto nodes = grid.node_values();
    std::vector<Moments> moments(nodes.size() * (d + 1));
    struct Slot {
        Eigen::MatrixXd x;
        std::vector<double> energy;
    };
    chunked<Slot>(
        s.replicates, opts.threads,
        [&](std::size_t r) {
            std::vector<FbmPath> driving;
            if (noiseless) {
                for (std::size_t j = 0; j < d; ++j)
                    driving.push_back({grid, cfg.hurst_per_dim[j], 0.0, std::vector<double>(grid.nodes(), 0.0), 0});
            } else {
                const WienerPath w = ens.path(r);
                for (std::size_t j = 0; j < d; ++j) driving.push_back(fbm_from_wiener(w, cfg.hurst_per_dim[j], 0.0, j));
            }
            Slot slot{euler_maruyama(g, cfg, driving, static_cast<long>(r)).values, {}};
            slot.energy.resize(nodes.size());
            for (std::size_t n = 0; n < nodes.size(); ++n)
                slot.energy[n] = g.value(slot.x.row(static_cast<Eigen::Index>(n)).transpose());
            return slot;
        },
        [&](std::size_t r, const Slot& slot) {
            for (std::size_t n = 0; n < nodes.size(); ++n) {
                const auto ni = static_cast<Eigen::Index>(n);
                paths << format_number(nodes[n]) << ',' << r;
                for (std::size_t j = 0; j < d; ++j) {
                    const double x = slot.x(ni, static_cast<Eigen::Index>(j));
                    paths << ',' << format_number(x);
                    moments[n * (d + 1) + j].add(x);
                }
                paths << ',' << format_number(slot.energy[n]) << '\n';
                moments[n * (d + 1) + d].add(slot.energy[n]);
            }
        });
    for (std::size_t n = 0; n < nodes.size(); ++n) {
        summary << format_number(nodes[n]);
        for (std::size_t c = 0; c <= d; ++c) summary << ',' << format_number(moments[n * (d + 1) + c].mean);
        for (std::size_t c = 0; c <= d; ++c) summary << ',' << format_number(moments[n * (d + 1) + c].std_error());
        summary << '\n';
    }
    return out.commit(seed);
}

RunResult run_linearize(const Scenario& s, const RunOptions& opts) {
    require_dim2(s, "linearize");
    const EnergyFunction g = s.energy_function();
    const TimeGrid grid = s.grid();
    const std::uint64_t seed = effective_seed(s, opts);
    const auto hurst = s.hurst_params();
    const SteadyState steady =
        find_steady_state(g, Eigen::Map<const Eigen::VectorXd>(s.x_init.data(), static_cast<Eigen::Index>(2)));
    const LinearModel model = linearize(g, steady, s.temperature);
    const auto deviation = [&](double xi) {
        return xi == 0.0 ? std::nan("") : expm_paper(model, grid.dt(), xi).deviation;
    };
    const LinearSolutionOptions lopts{s.expm_mode, XiChoice::paper, LagConvention::left};
    const WienerEnsemble ens{grid, 2, seed, s.replicates};

    OutputSet out(opts.out_dir, "linearize", s, opts);
    std::ostream& mcsv = out.open("linear_model.csv");
    header(mcsv, {"x_star_1", "x_star_2", "a1", "b1", "a2", "b2", "lambda", "xi_paper", "xi_sqrt",
                  "expm_deviation_paper", "expm_deviation_sqrt", "gradient_norm", "iterations"});
    row(mcsv, steady.point(0), steady.point(1), model.a1(), model.b1(), model.a2(), model.b2(), model.lambda,
        model.xi_paper, model.xi_sqrt, deviation(model.xi_paper), deviation(model.xi_sqrt), steady.gradient_norm,
        static_cast<std::size_t>(steady.iterations));

    std::ostream& pcsv = out.open("linear_paths.csv");
    header(pcsv, {"t", "replicate", "epsilon", "u1", "u2", "x1", "x2"});
    const auto nodes = grid.node_values();
    struct Slot {
        Eigen::MatrixXd u;
        Eigen::MatrixXd x;
    };
    for (double e : s.epsilon_ladder) {
        chunked<Slot>(
            s.replicates, opts.threads,
            [&](std::size_t r) {
                const WienerPath w = ens.path(r);
                const std::array<FbmPath, 2> driving{fbm_from_wiener(w, hurst[0], e, 0),
                                                     fbm_from_wiener(w, hurst[1], e, 1)};
                const LinearSolutionPath u = linear_solution(model, driving, lopts);
                return Slot{u.values, reconstruct_state(steady, u).values};
            },
            [&](std::size_t r, const Slot& slot) {
                for (std::size_t n = 0; n < nodes.size(); ++n) {
                    const auto ni = static_cast<Eigen::Index>(n);
                    row(pcsv, nodes[n], r, e, slot.u(ni, 0), slot.u(ni, 1), slot.x(ni, 0), slot.x(ni, 1));
                }
            });
    }
    return out.commit(seed);
}

RunResult run_converge(const Scenario& s, const RunOptions& opts) {
    require_dim2(s, "converge");
    if (s.epsilon_ladder.size() < 4) throw ConfigError("epsilon_ladder", "converge needs at least 4 rungs");
    if (s.replicates < 2) throw ConfigError("replicates", "converge needs at least 2 replicates");
    for (std::size_t j = 0; j < s.dim(); ++j) {
        if (s.hurst[j] == 0.5) {
            throw ConfigError("hurst[" + std::to_string(j) + "]",
                              "H = 1/2 makes B^{H,eps} - B^H identically zero; there is no rate to measure");
        }
    }
    const EnergyFunction g = s.energy_function();
    const TimeGrid grid = s.grid();
    const std::uint64_t seed = effective_seed(s, opts);
    const auto hurst = s.hurst_params();

    std::vector<QuadratureRate> rates;
    std::array<double, 2> prefactor{};
    for (std::size_t j = 0; j < 2; ++j) {
        rates.push_back(quadrature_rate(hurst[j], s.t_end, s.epsilon_ladder));
        prefactor[j] = rates.back().variance.prefactor();
    }

    const SteadyState steady =
        find_steady_state(g, Eigen::Map<const Eigen::VectorXd>(s.x_init.data(), static_cast<Eigen::Index>(2)));
    const LinearModel model = linearize(g, steady, s.temperature);
    const WienerEnsemble ens{grid, 2, seed, s.replicates};
    std::vector<std::size_t> checkpoint_nodes;
    for (double t : s.checkpoints) checkpoint_nodes.push_back(grid.index_of(t));
    const std::size_t rungs = s.epsilon_ladder.size();
    const std::size_t ck = checkpoint_nodes.size();

    // squares[rung][checkpoint][coordinate][replicate]
    std::vector<std::vector<std::array<std::vector<double>, 2>>> squares(
        rungs, std::vector<std::array<std::vector<double>, 2>>(
                   ck, {std::vector<double>(s.replicates), std::vector<double>(s.replicates)}));
    parallel_for(s.replicates, opts.threads, [&](std::size_t r) {
        const WienerPath w = ens.path(r);
        const auto solve = [&](double e) {
            const std::array<FbmPath, 2> driving{fbm_from_wiener(w, hurst[0], e, 0), fbm_from_wiener(w, hurst[1], e, 1)};
            return linear_solution(model, driving).values;
        };
        const Eigen::MatrixXd exact = solve(0.0);
        for (std::size_t k = 0; k < rungs; ++k) {
            const Eigen::MatrixXd approx = solve(s.epsilon_ladder[k]);
            for (std::size_t c = 0; c < ck; ++c) {
                const auto n = static_cast<Eigen::Index>(checkpoint_nodes[c]);
                for (Eigen::Index j = 0; j < 2; ++j) {
                    const double diff = exact(n, j) - approx(n, j);
                    squares[k][c][static_cast<std::size_t>(j)][r] = diff * diff;
                }
            }
        }
    });

    OutputSet out(opts.out_dir, "converge", s, opts);
    std::ostream& rcsv = out.open("rate_report.csv");
    header(rcsv, {"dim", "H", "t", "slope_variance", "intercept_variance", "r2_variance", "slope_rms",
                  "intercept_rms", "r2_rms"});
    for (std::size_t j = 0; j < 2; ++j) {
        const auto& q = rates[j];
        row(rcsv, j + 1, s.hurst[j], s.t_end, q.variance.slope, q.variance.intercept, q.variance.r_squared,
            q.rms.slope, q.rms.intercept, q.rms.r_squared);
    }
    std::ostream& gcsv = out.open("gronwall_report.csv");
    header(gcsv, {"epsilon", "t", "measured", "measured_se", "bound_paper", "bound_safe", "M_paper", "M_safe",
                  "C_alpha_eps"});
    for (std::size_t k = 0; k < rungs; ++k) {
        const std::array<double, 2> eps{s.epsilon_ladder[k], s.epsilon_ladder[k]};
        const GronwallReport rep = gronwall_from_squares(model, hurst, eps, s.checkpoints, prefactor, squares[k]);
        for (std::size_t c = 0; c < ck; ++c) {
            row(gcsv, s.epsilon_ladder[k], rep.t_checkpoints[c], rep.measured[c], rep.measured_se[c],
                rep.bound_paper[c], rep.bound_safe[c], rep.M_paper, rep.M_safe, rep.C_alpha_eps);
        }
    }
    return out.commit(seed);
}

RunResult run_covcheck(const Scenario& s, const RunOptions& opts) {
    const TimeGrid grid = s.grid();
    const std::uint64_t seed = effective_seed(s, opts);
    const auto hurst = s.hurst_params();
    const std::size_t d = s.dim();
    std::vector<double> eps{0.0};
    eps.insert(eps.end(), s.epsilon_ladder.begin(), s.epsilon_ladder.end());
    std::vector<double> times = s.checkpoints;
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    std::vector<std::size_t> idx;
    for (double t : times) idx.push_back(grid.index_of(t));
    const std::size_t k = times.size();

    std::vector<KernelTable> kernels;  // [dim][eps]
    for (std::size_t j = 0; j < d; ++j)
        for (double e : eps) kernels.push_back(liouville_kernel(grid, hurst[j], e));

    // values[r][(j * |eps| + e) * k + c] = B at checkpoint c
    const std::size_t per = d * eps.size() * k;
    std::vector<double> values(s.replicates * per);
    const WienerEnsemble ens{grid, d, seed, s.replicates};
    parallel_for(s.replicates, opts.threads, [&](std::size_t r) {
        const WienerPath w = ens.path(r);
        for (std::size_t j = 0; j < d; ++j) {
            for (std::size_t e = 0; e < eps.size(); ++e) {
                for (std::size_t c = 0; c < k; ++c) {
                    values[r * per + (j * eps.size() + e) * k + c] =
                        convolve_at(kernels[j * eps.size() + e], w.column(j), idx[c]);
                }
            }
        }
    });

    OutputSet out(opts.out_dir, "covcheck", s, opts);
    std::ostream& csv = out.open("covariance.csv");
    header(csv, {"dim", "H", "epsilon", "t", "s", "mc_cov", "mc_se", "discrete_oracle", "continuous_quadrature",
                 "mandelbrot"});
    std::vector<double> prod(s.replicates);
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t e = 0; e < eps.size(); ++e) {
            for (std::size_t a = 0; a < k; ++a) {
                for (std::size_t b = 0; b <= a; ++b) {
                    const std::size_t base = (j * eps.size() + e) * k;
                    for (std::size_t r = 0; r < s.replicates; ++r)
                        prod[r] = values[r * per + base + a] * values[r * per + base + b];
                    const MeanEstimate mc = mean_with_error(prod);
                    const double mandel =
                        hurst[j].H() == 0.5 ? mandelbrot_covariance(times[a], times[b], hurst[j]) : std::nan("");
                    row(csv, j + 1, s.hurst[j], eps[e], times[a], times[b], mc.mean, mc.std_error,
                        liouville_covariance_discrete(grid, idx[a], idx[b], hurst[j], eps[e]),
                        liouville_covariance(times[a], times[b], hurst[j], eps[e]), mandel);
                }
            }
        }
    }
    return out.commit(seed);
}

RunResult run_command(const std::string& command, const Scenario& s, const RunOptions& opts) {
    if (command == "simulate-fbm") return run_simulate_fbm(s, opts);
    if (command == "anneal") return run_anneal(s, opts);
    if (command == "linearize") return run_linearize(s, opts);
    if (command == "converge") return run_converge(s, opts);
    if (command == "covcheck") return run_covcheck(s, opts);
    throw InvalidArgument("unknown command '" + command + "'");
}

std::vector<std::string> command_names() { return {"simulate-fbm", "anneal", "linearize", "converge", "covcheck"}; }

}  // namespace fanneal
