// Command-line driver: weight analysis, periodic/subharmonic searches,
// eigenvalue reports, necklace counting, and the two builtin reproductions.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "subh/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitGate = 2;
constexpr int kExitNumerical = 3;

subh::RunConfig build_config(const std::string& preset, const std::string& config_path,
                             const std::vector<std::string>& sets) {
    subh::RunConfig cfg = preset.empty() ? subh::RunConfig{} : subh::preset_config(preset);
    if (!config_path.empty()) cfg = subh::parse_config_file(config_path, cfg);
    for (const std::string& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw subh::ConfigError("--set expects key=value, got: " + kv);
        subh::apply_config_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
}

void write_outputs(const subh::RunResult& res, const subh::RunConfig& cfg) {
    if (cfg.out_dir.empty()) {
        std::cout << res.manifest.dump(2) << "\n";
        return;
    }
    std::filesystem::create_directories(cfg.out_dir);
    const std::string mpath = cfg.out_dir + "/manifest.json";
    std::ofstream out(mpath);
    out << res.manifest.dump(2) << "\n";
    out.close();
    const double stride = cfg.csv_stride > 0.0 ? cfg.csv_stride : cfg.period / 1024.0;
    for (const subh::PeriodicityClass& c : res.solve.classes) {
        const subh::PeriodicOrbit& o = res.solve.orbits[c.representative];
        subh::export_csv(o, cfg.out_dir + "/orbit_class" + std::to_string(c.id) + ".csv", stride);
    }
    std::cout << "wrote " << mpath << " and " << res.solve.classes.size() << " orbit CSV file(s)\n";
}

int report_run(const subh::RunResult& res) {
    std::printf("m = %d positive humps, mu = %.6g, mu_sharp = %.6g, mean value = %.6g\n",
                res.weight.num_positive_humps(), res.weight.mu(), res.mu_sharp_value,
                res.mean_value_one_period);
    if (!res.gate_q_sharp)
        std::printf("WARNING: mean value condition (q_#) fails (integral of q >= 0)\n");
    std::printf("orbits: %zu in %zu periodicity classes (r = %.6g, R = %.6g)\n",
                res.solve.orbits.size(), res.solve.classes.size(), res.solve.thresholds.r,
                res.solve.thresholds.R);
    for (const subh::PeriodicityClass& c : res.solve.classes) {
        const subh::PeriodicOrbit& o = res.solve.orbits[c.representative];
        std::printf("  class %d  string %s  y0 = (%.9g, %.9g)  residual %.3g  %s\n", c.id,
                    c.canonical.str().c_str(), o.y0[0], o.y0[1], o.residual,
                    c.minimal ? "minimal" : "not minimal");
    }
    if (res.numerical_failure) {
        std::printf("no orbits found\n");
        return kExitNumerical;
    }
    return res.gate_q_sharp ? kExitOk : kExitGate;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Positive periodic and subharmonic solutions of u'' + q(t) g(u) = 0"};
    app.require_subcommand(1);

    std::string config_path, preset_name;
    std::vector<std::string> sets;
    std::string out_dir;
    app.add_option("--config", config_path, "flat key=value config file")->expected(1);
    app.add_option("--set", sets, "override a config key (key=value, repeatable)");
    app.add_option("--out", out_dir, "output directory for manifest and CSV files");

    auto* weight_cmd = app.add_subcommand("weight-report", "hump structure and scalar functionals");
    auto* solve_cmd = app.add_subcommand("solve", "search kT-periodic positive solutions");
    auto* sub_cmd = app.add_subcommand("subharmonics", "search subharmonics of order k >= 2");
    auto* eigen_cmd = app.add_subcommand("eigen", "Hill and Dirichlet eigenvalue report");
    auto* count_cmd = app.add_subcommand("count", "table of Witt's subharmonic counts S_n(k)");
    auto* repro_cmd = app.add_subcommand("reproduce", "builtin experiments: fig1 or fig2");
    for (auto* sc : {weight_cmd, solve_cmd, sub_cmd, eigen_cmd, count_cmd, repro_cmd})
        sc->fallthrough();

    unsigned count_n = 2, count_kmin = 2, count_kmax = 10;
    count_cmd->add_option("--n", count_n, "alphabet size");
    count_cmd->add_option("--k-min", count_kmin, "smallest word length");
    count_cmd->add_option("--k-max", count_kmax, "largest word length");

    std::string repro_name;
    repro_cmd->add_option("name", repro_name, "fig1 or fig2")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (count_cmd->parsed()) {
            std::printf("k    S_%u(k)\n", count_n);
            for (unsigned k = count_kmin; k <= count_kmax; ++k)
                std::printf("%-4u %llu\n", k,
                            static_cast<unsigned long long>(subh::witt_count(count_n, k)));
            return kExitOk;
        }

        if (repro_cmd->parsed()) preset_name = repro_name;
        subh::RunConfig cfg = build_config(preset_name, config_path, sets);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (repro_cmd->parsed() && cfg.out_dir.empty()) cfg.out_dir = "out/" + repro_name;

        if (weight_cmd->parsed()) {
            subh::validate_config(cfg);
            subh::WeightSpec w =
                cfg.weight_kind == "sin"
                    ? subh::WeightSpec::sinusoid(cfg.period, cfg.mu, cfg.weight_freq)
                    : [&] {
                          std::vector<double> t, v;
                          for (std::size_t i = 0; i + 1 < cfg.weight_table.size(); i += 2) {
                              t.push_back(cfg.weight_table[i]);
                              v.push_back(cfg.weight_table[i + 1]);
                          }
                          return subh::WeightSpec::table(cfg.period, cfg.mu, t, v);
                      }();
            if (!w.sign_changing()) {
                std::printf("weight has a single sign: hypothesis (q_*) fails\n");
                return kExitGate;
            }
            std::printf("period T = %.9g, mu = %.6g, m = %d positive humps\n", w.period(), w.mu(),
                        w.num_positive_humps());
            for (const subh::SignedInterval& s : w.humps())
                std::printf("  %c hump %d: [%.9g, %.9g]\n", s.sign > 0 ? '+' : '-', s.index_i,
                            s.lo, s.hi);
            const double mv = subh::mean_value(w, 1);
            const double ms = subh::mu_sharp(w);
            std::printf("mean value = %.9g, mu_sharp = %.9g, (q_#) %s\n", mv, ms,
                        mv < 0.0 ? "holds" : "FAILS");
            return mv < 0.0 ? kExitOk : kExitGate;
        }

        if (eigen_cmd->parsed()) {
            subh::validate_config(cfg);
            subh::WeightSpec w = subh::WeightSpec::sinusoid(cfg.period, cfg.mu, cfg.weight_freq);
            const subh::HillResult hr = subh::principal_eigenvalue(w.coefficient(), w.period());
            std::printf("lambda0(q) = %.12g  (discriminant %.12g, %d bisection steps)\n",
                        hr.lambda0, hr.discriminant_at_lambda0, hr.iterations);
            for (int i = 1; i <= w.num_positive_humps(); ++i)
                std::printf("lambda1 on hump %d = %.12g\n", i, subh::dirichlet_eigenvalue(w, i));
            return kExitOk;
        }

        if (sub_cmd->parsed() && cfg.k < 2) cfg.k = 2;

        subh::RunResult res = subh::run_experiment(cfg);
        write_outputs(res, cfg);
        return report_run(res);
    } catch (const subh::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitGate;
    } catch (const subh::NoSignChangeError& e) {
        std::fprintf(stderr, "weight error: %s\n", e.what());
        return kExitGate;
    } catch (const subh::DefiniteWeightError& e) {
        std::fprintf(stderr, "weight error: %s\n", e.what());
        return kExitGate;
    } catch (const subh::BadParamsError& e) {
        std::fprintf(stderr, "parameter error: %s\n", e.what());
        return kExitGate;
    } catch (const subh::Error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    }
}
