#include "tflab/io.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "tflab/physical.hpp"
#include "tflab/spectral.hpp"

namespace tflab {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct CsvWriter {
    std::ofstream out;
    explicit CsvWriter(const fs::path& file, const std::string& header)
        : out(file) {
        if (!out) throw ValidationError("cannot open " + file.string());
        out << header << "\n";
    }
    void row(std::initializer_list<double> vals) {
        bool first = true;
        for (double v : vals) {
            if (!first) out << ",";
            out << fmt17(v);
            first = false;
        }
        out << "\n";
    }
};

} // namespace

ExponentConfig auto_exponents(const MobilityParams& par) {
    const auto window = admissible_p_interval(par.n);
    if (window.empty())
        throw NoAdmissibleP("auto_exponents: empty admissible p window");
    double p;
    if (window.unbounded())
        p = 2.0 * window.p_lo; // midpoint undefined; scale-free doubling
    else
        p = 0.5 * (window.p_lo + window.p_hi);
    p = std::round(p * 100.0) / 100.0;

    const double beta = par.beta;
    double cap = std::min(std::min(-par.gamma[1], beta - 1.0 / p),
                          std::min(1.0 / p, 1.0 - 1.0 / p));
    // keep the shifted weights inside the coercivity range as well
    const auto& r = par.coercivity;
    cap = std::min(cap, (-1.0 + 1.0 / p) - r.lo);
    cap = std::min(cap, r.hi - (-1.0 + 1.0 / p));
    cap = std::min(cap, (-1.0 + beta) - r.lo);
    cap = std::min(cap, r.hi - (-1.0 + beta));
    if (!(cap > 0.0))
        throw NoAdmissibleP("auto_exponents: no margin for the delta weights");

    ExponentConfig cfg;
    cfg.p = p;
    cfg.delta_tilde = 0.45 * cap;
    cfg.delta = 0.5 * cfg.delta_tilde;
    cfg.k = 0;
    const double need = std::min(cfg.k + 4.0 - 4.0 / p, cfg.k + 0.5 + 4.0 / p);
    cfg.k_tilde = static_cast<int>(std::floor(need)) + 1;
    cfg.validate(par);
    return cfg;
}

std::string experiment_name(Experiment e) {
    switch (e) {
        case Experiment::Params: return "params";
        case Experiment::Coercivity: return "coercivity";
        case Experiment::Symbol: return "symbol";
        case Experiment::Spectrum: return "spectrum";
        case Experiment::InvertCheck: return "invert-check";
        case Experiment::Simulate: return "simulate";
        case Experiment::Picard: return "picard";
        case Experiment::Reconstruct: return "reconstruct";
    }
    return "params";
}

Experiment experiment_from_name(const std::string& s) {
    for (Experiment e : {Experiment::Params, Experiment::Coercivity,
                         Experiment::Symbol, Experiment::Spectrum,
                         Experiment::InvertCheck, Experiment::Simulate,
                         Experiment::Picard, Experiment::Reconstruct})
        if (experiment_name(e) == s) return e;
    throw ValidationError("unknown experiment: " + s);
}

void apply_config_line(RunConfig& cfg, const std::string& key,
                       const std::string& value) {
    auto d = [&] { return std::stod(value); };
    auto i = [&] { return std::stoi(value); };
    if (key == "n") cfg.n = d();
    else if (key == "x_min") cfg.x_min = d();
    else if (key == "x_max") cfg.x_max = d();
    else if (key == "nodes") cfg.n_nodes = i();
    else if (key == "experiment") cfg.experiment = experiment_from_name(value);
    else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "seed") cfg.seed = std::stoul(value);
    else if (key == "amplitude") cfg.amplitude = d();
    else if (key == "alpha") cfg.alpha = d();
    else if (key == "alpha_samples") cfg.alpha_samples = i();
    else if (key == "xi_max") cfg.xi_max = d();
    else if (key == "n_xi") cfg.n_xi = i();
    else if (key == "input_csv") cfg.input_csv = value;
    else if (key == "dt") cfg.solve.dt_init = d();
    else if (key == "t_final") cfg.solve.t_final = d();
    else if (key == "snapshot_stride") cfg.solve.snapshot_stride = i();
    else if (key == "picard_max_iter") cfg.solve.picard_max_iter = i();
    else if (key == "picard_tol") cfg.solve.picard_tol = d();
    else if (key == "adapt") cfg.solve.adapt = (value == "true" || value == "1");
    else if (key == "scheme") {
        if (value == "imex_be") cfg.solve.scheme = Scheme::IMEX_BE;
        else if (value == "imex_bdf2") cfg.solve.scheme = Scheme::IMEX_BDF2;
        else if (value == "picard") cfg.solve.scheme = Scheme::PicardGlobal;
        else throw ValidationError("unknown scheme: " + value);
    } else if (key == "p" || key == "k" || key == "k_tilde" ||
               key == "delta" || key == "delta_tilde") {
        if (!cfg.exponents) cfg.exponents = ExponentConfig{};
        if (key == "p") cfg.exponents->p = d();
        else if (key == "k") cfg.exponents->k = i();
        else if (key == "k_tilde") cfg.exponents->k_tilde = i();
        else if (key == "delta") cfg.exponents->delta = d();
        else cfg.exponents->delta_tilde = d();
    } else {
        throw ValidationError("unknown config key: " + key);
    }
}

RunConfig parse_config_file(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw ValidationError("cannot read config file " + file.string());
    RunConfig cfg;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const char* ws = " \t\r";
            s.erase(0, s.find_first_not_of(ws));
            const auto e = s.find_last_not_of(ws);
            s.erase(e == std::string::npos ? 0 : e + 1);
            return s;
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) continue;
        apply_config_line(cfg, key, value);
    }
    return cfg;
}

void write_grid_function_csv(const fs::path& file, const GridFunction& u) {
    CsvWriter w(file, "x,value");
    for (int i = 0; i < u.size(); ++i) w.row({u.grid().x[i], u[i]});
}

GridFunction read_grid_function_csv(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw ValidationError("cannot read " + file.string());
    std::string line;
    std::getline(in, line); // header
    std::vector<double> xs, vs;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        xs.push_back(std::stod(line.substr(0, comma)));
        vs.push_back(std::stod(line.substr(comma + 1)));
    }
    if (xs.size() < 16) throw ValidationError("grid CSV too short");
    auto grid = make_log_grid(xs.front(), xs.back(),
                              static_cast<int>(xs.size()));
    return GridFunction(grid, std::move(vs));
}

namespace {

json params_json(const MobilityParams& par) {
    json j;
    j["n"] = par.n;
    j["branch"] = par.branch == Branch::Upper ? "upper" : "lower";
    j["gamma"] = {par.gamma[0], par.gamma[1], par.gamma[2], par.gamma[3]};
    j["beta"] = par.beta;
    if (par.wave_speed) j["V"] = *par.wave_speed;
    j["mean_gamma"] = par.mean_gamma;
    j["sigma_gamma"] = par.sigma_gamma;
    j["coercivity"] = {par.coercivity.lo, par.coercivity.hi};
    const auto w = admissible_p_interval(par.n);
    j["p_window"] = {w.p_lo, w.p_hi};
    return j;
}

json exponents_json(const ExponentConfig& e) {
    json j;
    j["p"] = e.p;
    j["k"] = e.k;
    j["k_tilde"] = e.k_tilde;
    j["delta"] = e.delta;
    j["delta_tilde"] = e.delta_tilde;
    return j;
}

json config_json(const RunConfig& cfg) {
    json j;
    j["experiment"] = experiment_name(cfg.experiment);
    j["n"] = cfg.n;
    j["grid"] = {cfg.x_min, cfg.x_max, cfg.n_nodes};
    j["seed"] = cfg.seed;
    j["amplitude"] = cfg.amplitude;
    j["alpha"] = cfg.alpha;
    j["alpha_samples"] = cfg.alpha_samples;
    j["xi_max"] = cfg.xi_max;
    j["n_xi"] = cfg.n_xi;
    j["solve"] = {{"scheme", cfg.solve.scheme == Scheme::IMEX_BE ? "imex_be"
                             : cfg.solve.scheme == Scheme::IMEX_BDF2
                                 ? "imex_bdf2"
                                 : "picard"},
                  {"dt", cfg.solve.dt_init},
                  {"t_final", cfg.solve.t_final},
                  {"snapshot_stride", cfg.solve.snapshot_stride},
                  {"picard_max_iter", cfg.solve.picard_max_iter},
                  {"picard_tol", cfg.solve.picard_tol},
                  {"adapt", cfg.solve.adapt}};
    if (!cfg.input_csv.empty()) j["input_csv"] = cfg.input_csv;
    return j;
}

void write_trajectory(const fs::path& dir, const Trajectory& tr,
                      const MobilityParams& par, const ExponentConfig& cfg) {
    const auto rep = stability_report(tr, par, cfg);
    CsvWriter w(dir / "trajectory.csv", "t,u0,ubeta,sup_norm,E_alpha");
    for (int i = 0; i < tr.size(); ++i)
        w.row({tr.times[i], tr.u0_series[i], tr.ubeta_series[i],
               rep.sup_norm[i], rep.energy[i]});
    fs::create_directories(dir / "snapshots");
    for (int i = 0; i < tr.size(); ++i) {
        std::ostringstream name;
        name << "u_" << i << ".csv";
        write_grid_function_csv(dir / "snapshots" / name.str(),
                                tr.snapshots[i]);
    }
    CsvWriter z(dir / "contact_line.csv", "t,Z");
    for (const auto& [t, zz] : contact_line_evolve(tr, par)) z.row({t, zz});
}

GridFunction default_perturbation(GridPtr grid, double amplitude) {
    return sample([amplitude](double x) { return amplitude * std::exp(-x); },
                  grid);
}

// randomized two-sided-decaying profiles for the inversion experiment
std::vector<GridFunction> random_family(GridPtr grid, unsigned long seed,
                                        int count) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> center(-3.0, 0.0);
    std::uniform_real_distribution<double> width(1.0, 2.0);
    std::vector<GridFunction> fam;
    for (int i = 0; i < count; ++i) {
        const double c = center(rng), w = width(rng);
        fam.push_back(sample(
            [c, w](double x) {
                const double s = std::log(x);
                return std::exp(-0.5 * (s - c) * (s - c) / (w * w));
            },
            grid));
    }
    return fam;
}

} // namespace

int run(const RunConfig& cfg) {
    const auto t_start = std::chrono::steady_clock::now();
    json manifest;
    manifest["tool"] = "tflab";
    manifest["version"] = "1.0.0";
    manifest["config"] = config_json(cfg);
    int status = 0;

    try {
        fs::create_directories(cfg.out_dir);
        const auto par = make_params(cfg.n);
        manifest["derived"] = params_json(par);
        ExponentConfig exps = cfg.exponents ? *cfg.exponents
                                            : auto_exponents(par);
        exps.validate(par);
        manifest["exponents"] = exponents_json(exps);
        const double alpha = cfg.alpha != 0.0
                                 ? cfg.alpha
                                 : 0.5 * (par.coercivity.lo + par.coercivity.hi);

        switch (cfg.experiment) {
            case Experiment::Params: {
                std::ofstream out(cfg.out_dir / "params.json");
                out << params_json(par).dump(2) << "\n";
                break;
            }
            case Experiment::Coercivity: {
                const auto rows = verify_coercivity(par, cfg.alpha_samples);
                CsvWriter w(cfg.out_dir / "coercivity.csv",
                            "alpha,inf_ratio,cond_interval,cond_variance");
                for (const auto& r : rows)
                    w.row({r.alpha, r.inf_ratio,
                           r.condition_interval ? 1.0 : 0.0,
                           r.condition_variance ? 1.0 : 0.0});
                break;
            }
            case Experiment::Symbol: {
                const auto scan =
                    coercivity_constant(par, alpha, cfg.xi_max, cfg.n_xi);
                CsvWriter w(cfg.out_dir / "symbol.csv", "xi,re_p,ratio");
                for (size_t i = 0; i < scan.xi.size(); ++i)
                    w.row({scan.xi[i], scan.re_p[i], scan.ratio[i]});
                manifest["inf_ratio"] = scan.inf_ratio;
                break;
            }
            case Experiment::Spectrum: {
                auto grid = make_log_grid(cfg.x_min, cfg.x_max, cfg.n_nodes);
                OperatorStencil st(par, grid);
                const auto eigs = discrete_spectrum(st, alpha);
                CsvWriter w(cfg.out_dir / "spectrum.csv",
                            "re_lambda,im_lambda,kernel_correlation");
                for (const auto& e : eigs)
                    w.row({e.lambda.real(), e.lambda.imag(),
                           e.kernel_correlation});
                break;
            }
            case Experiment::InvertCheck: {
                auto grid = make_log_grid(cfg.x_min, cfg.x_max, cfg.n_nodes);
                OperatorStencil st(par, grid);
                const auto fam = random_family(grid, cfg.seed, 10);
                CsvWriter w(cfg.out_dir / "invert_check.csv",
                            "member,right_residual,left_residual,u0,ubeta");
                int id = 0;
                for (const auto& v : fam) {
                    const auto [u, bc] = elliptic_inverse_B(st, v);
                    const GridFunction Au = apply_A(st, u);
                    double right = 0.0;
                    for (int i = 0; i < v.size(); ++i)
                        right = std::max(right, std::abs(Au[i] - v[i]));
                    right /= std::max(v.sup_norm(), 1e-300);
                    const GridFunction Av = apply_A(st, v);
                    const auto [w2, bc2] = elliptic_inverse_B(st, Av);
                    double left = 0.0;
                    for (int i = 0; i < v.size(); ++i)
                        left = std::max(left, std::abs(w2[i] - v[i]));
                    left /= std::max(v.sup_norm(), 1e-300);
                    w.row({static_cast<double>(id++), right, left, bc.u0,
                           bc.ubeta});
                }
                break;
            }
            case Experiment::Simulate: {
                auto grid = make_log_grid(cfg.x_min, cfg.x_max, cfg.n_nodes);
                OperatorStencil st(par, grid);
                const auto u0 = default_perturbation(grid, cfg.amplitude);
                const auto tr = imex_simulate(st, u0, cfg.solve);
                write_trajectory(cfg.out_dir, tr, par, exps);
                break;
            }
            case Experiment::Picard: {
                auto grid = make_log_grid(cfg.x_min, cfg.x_max, cfg.n_nodes);
                OperatorStencil st(par, grid);
                const auto u0 = default_perturbation(grid, cfg.amplitude);
                const auto res = picard_solve(st, u0, cfg.solve, exps);
                write_trajectory(cfg.out_dir, res.trajectory, par, exps);
                CsvWriter w(cfg.out_dir / "picard.csv", "iterate,distance");
                for (size_t i = 0; i < res.iterate_distances.size(); ++i)
                    w.row({static_cast<double>(i + 1),
                           res.iterate_distances[i]});
                manifest["picard_converged"] = res.converged;
                break;
            }
            case Experiment::Reconstruct: {
                auto grid = make_log_grid(cfg.x_min, cfg.x_max, cfg.n_nodes);
                GridFunction u = cfg.input_csv.empty()
                                     ? default_perturbation(grid, cfg.amplitude)
                                     : read_grid_function_csv(cfg.input_csv);
                const auto prof = reconstruct_height(par, u, 0.0);
                CsvWriter w(cfg.out_dir / "height.csv", "z_tilde,h");
                for (const auto& [z, hh] : prof.samples) w.row({z, hh});
                json side;
                side["Z0"] = prof.z_offset;
                side["t"] = 0.0;
                side["branch"] =
                    par.branch == Branch::Upper ? "upper" : "lower";
                std::ofstream out(cfg.out_dir / "height.json");
                out << side.dump(2) << "\n";
                break;
            }
        }
    } catch (const ValidationError& e) {
        manifest["failure"] = e.what();
        status = 2;
    } catch (const NumericalError& e) {
        manifest["failure"] = e.what();
        status = 3;
    } catch (const std::exception& e) {
        manifest["failure"] = e.what();
        status = 1;
    }

    const auto t_end = std::chrono::steady_clock::now();
    manifest["wall_time_s"] =
        std::chrono::duration<double>(t_end - t_start).count();
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    std::ofstream out(cfg.out_dir / "manifest.json");
    if (out) out << manifest.dump(2) << "\n";
    return status;
}

} // namespace tflab
