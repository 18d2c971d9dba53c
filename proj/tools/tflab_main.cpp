// Command-line driver. Subcommands select the experiment; common flags
// override values from an optional flat key=value config file.

#include <CLI11.hpp>

#include <iostream>
#include <thread>
#include <vector>

#include "tflab/io.hpp"

namespace {

struct CommonFlags {
    std::string config_file;
    double n = -1.0;
    std::vector<double> grid; // x_min x_max N
    std::string out_dir;
    long seed = -1;
};

void add_common(CLI::App* cmd, CommonFlags& fl) {
    cmd->add_option("--config", fl.config_file, "flat key=value config file");
    cmd->add_option("--n", fl.n, "mobility exponent");
    cmd->add_option("--grid", fl.grid, "x_min x_max nodes")->expected(3);
    cmd->add_option("--out-dir", fl.out_dir, "output directory");
    cmd->add_option("--seed", fl.seed, "rng seed for test families");
}

tflab::RunConfig assemble(const CommonFlags& fl, tflab::Experiment exp) {
    tflab::RunConfig cfg;
    if (!fl.config_file.empty())
        cfg = tflab::parse_config_file(fl.config_file);
    cfg.experiment = exp;
    if (fl.n > 0.0) cfg.n = fl.n;
    if (fl.grid.size() == 3) {
        cfg.x_min = fl.grid[0];
        cfg.x_max = fl.grid[1];
        cfg.n_nodes = static_cast<int>(fl.grid[2]);
    }
    if (!fl.out_dir.empty()) cfg.out_dir = fl.out_dir;
    if (fl.seed >= 0) cfg.seed = static_cast<unsigned long>(fl.seed);
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"thin-film contact-line laboratory"};
    app.require_subcommand(1);

    struct Sub {
        CLI::App* cmd;
        CommonFlags flags;
        tflab::Experiment exp;
    };
    std::vector<std::unique_ptr<Sub>> subs;
    auto add = [&](const std::string& name, const std::string& desc,
                   tflab::Experiment exp) {
        auto s = std::make_unique<Sub>();
        s->cmd = app.add_subcommand(name, desc);
        s->exp = exp;
        add_common(s->cmd, s->flags);
        return subs.emplace_back(std::move(s)).get();
    };

    add("params", "closed-form constants for a mobility exponent",
        tflab::Experiment::Params);
    auto* co = add("coercivity", "symbol positivity table over alpha",
                   tflab::Experiment::Coercivity);
    int alpha_samples = 0;
    co->cmd->add_option("--alpha-samples", alpha_samples, "table resolution");
    auto* sy = add("symbol", "Re p(alpha+i xi) scan", tflab::Experiment::Symbol);
    double alpha = 0.0;
    sy->cmd->add_option("--alpha", alpha, "weight for the scan");
    auto* sp = add("spectrum", "dense spectrum of the discrete generator",
                   tflab::Experiment::Spectrum);
    double alpha_sp = 0.0;
    sp->cmd->add_option("--alpha", alpha_sp, "inner-product weight");
    add("invert-check", "elliptic inverse round-trip residuals",
        tflab::Experiment::InvertCheck);
    auto* si = add("simulate", "IMEX evolution of a perturbed wave",
                   tflab::Experiment::Simulate);
    double amp_si = -1.0, dt_si = -1.0, tf_si = -1.0;
    si->cmd->add_option("--amplitude", amp_si, "perturbation amplitude");
    si->cmd->add_option("--dt", dt_si, "time step");
    si->cmd->add_option("--t-final", tf_si, "final time");
    auto* pi = add("picard", "global fixed-point iteration",
                   tflab::Experiment::Picard);
    double amp_pi = -1.0, dt_pi = -1.0, tf_pi = -1.0;
    pi->cmd->add_option("--amplitude", amp_pi, "perturbation amplitude");
    pi->cmd->add_option("--dt", dt_pi, "time step");
    pi->cmd->add_option("--t-final", tf_pi, "final time");
    auto* re = add("reconstruct", "height profile from transformed data",
                   tflab::Experiment::Reconstruct);
    std::string input_csv;
    re->cmd->add_option("--input", input_csv, "CSV of (x,u) samples");

    auto* sw = app.add_subcommand("sweep", "run config files concurrently");
    std::vector<std::string> sweep_configs;
    sw->add_option("configs", sweep_configs, "config files")->required();
    int workers = 4;
    sw->add_option("--workers", workers, "worker pool size");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sw->parsed()) {
            std::vector<int> codes(sweep_configs.size(), 0);
            std::vector<std::thread> pool;
            std::atomic<size_t> next{0};
            const int nw = std::max(1, std::min<int>(workers,
                                    static_cast<int>(sweep_configs.size())));
            for (int w = 0; w < nw; ++w)
                pool.emplace_back([&] {
                    for (size_t i = next.fetch_add(1); i < sweep_configs.size();
                         i = next.fetch_add(1)) {
                        auto cfg = tflab::parse_config_file(sweep_configs[i]);
                        codes[i] = tflab::run(cfg);
                    }
                });
            for (auto& t : pool) t.join();
            int worst = 0;
            for (int c : codes) worst = std::max(worst, c);
            return worst;
        }
        for (const auto& s : subs) {
            if (!s->cmd->parsed()) continue;
            auto cfg = assemble(s->flags, s->exp);
            if (alpha_samples > 0) cfg.alpha_samples = alpha_samples;
            if (alpha != 0.0 && s->exp == tflab::Experiment::Symbol)
                cfg.alpha = alpha;
            if (alpha_sp != 0.0 && s->exp == tflab::Experiment::Spectrum)
                cfg.alpha = alpha_sp;
            if (s->exp == tflab::Experiment::Simulate) {
                if (amp_si > 0.0) cfg.amplitude = amp_si;
                if (dt_si > 0.0) cfg.solve.dt_init = dt_si;
                if (tf_si > 0.0) cfg.solve.t_final = tf_si;
            }
            if (s->exp == tflab::Experiment::Picard) {
                if (amp_pi > 0.0) cfg.amplitude = amp_pi;
                if (dt_pi > 0.0) cfg.solve.dt_init = dt_pi;
                if (tf_pi > 0.0) cfg.solve.t_final = tf_pi;
                cfg.solve.scheme = tflab::Scheme::PicardGlobal;
            }
            if (s->exp == tflab::Experiment::Reconstruct && !input_csv.empty())
                cfg.input_csv = input_csv;
            const int code = tflab::run(cfg);
            if (code != 0)
                std::cerr << "experiment failed; see manifest.json in "
                          << cfg.out_dir << "\n";
            return code;
        }
    } catch (const tflab::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const tflab::NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
