#include "splitbench/harness.hpp"

#include "splitting/errors.hpp"
#include "splitting/oscillatory.hpp"
#include "splitting/stability.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

using namespace splitting;
using namespace splitbench;

namespace {

enum Exit { ok = 0, failure = 1, validation = 2, blowup = 3 };

// stdout unless --out names a file
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw Error("cannot open '" + path + "' for writing");
        }
    }
    std::ostream& get() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

void list_command(std::ostream& out) {
    out << fmt::format("{:<22} {:<18} {:>6} {:>6}  {}\n", "scheme", "family", "stages", "order", "flags");
    for (const auto& s : builtin_catalog()) {
        const auto f = classify(s);
        std::string flags;
        const auto add = [&](bool on, const char* name) {
            if (on) flags += (flags.empty() ? "" : ",") + std::string(name);
        };
        add(f.palindromic, "palindromic");
        add(f.symmetric_conjugate, "sym-conj");
        add(f.complex, "complex");
        add(f.positive_coeffs, "positive");
        add(s.has_commutator(), "commutator");
        add(s.processor_id.has_value(), "processed");
        const std::string order = s.is_processor ? "-" : std::to_string(s.claimed_order);
        out << fmt::format("{:<22} {:<18} {:>6} {:>6}  {}\n", s.id, to_string(s.family), s.stages(), order, flags);
    }
    out << "\npresets\n";
    for (const auto& p : presets()) out << fmt::format("  {:<24} {}\n", p.name, p.description);
}

int verify_command(const std::string& target, double tol, std::ostream& out) {
    std::vector<SplittingScheme> schemes;
    if (std::filesystem::exists(target))
        schemes = load_catalog_file(target, tol);
    else
        schemes.push_back(builtin(target));
    for (std::size_t i = 0; i < schemes.size(); ++i) {
        if (i) out << "\n";
        write_verify(out, schemes[i], verify_summary(schemes[i], tol));
    }
    return ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Benchmarks and checks for splitting methods"};
    app.require_subcommand(1);

    std::string out_path;
    double tol = kConditionTol;

    auto* list = app.add_subcommand("list", "Builtin schemes and experiment presets");
    list->add_option("--out", out_path, "Output file");

    std::string target;
    auto* verify = app.add_subcommand("verify", "Order conditions and diagnostics for a scheme id or catalog file");
    verify->add_option("scheme", target, "Builtin id or catalog file")->required();
    verify->add_option("--tol", tol, "Condition residual tolerance");
    verify->add_option("--out", out_path, "Output file");

    std::string preset;
    PresetOverrides ov;
    double tf = 0.0;
    auto* runc = app.add_subcommand("run", "Run an experiment preset and write CSV");
    runc->add_option("preset", preset, "Preset name")->required();
    runc->add_option("--seed", ov.seed, "Seed for random problems");
    runc->add_option("--out", out_path, "Output CSV (default stdout)");
    auto* tf_opt = runc->add_option("--tf", tf, "Final time");
    runc->add_option("--costs", ov.costs, "Cost budgets")->delimiter(',');
    runc->add_option("--methods", ov.methods, "Scheme ids")->delimiter(',');
    runc->add_option("--problem", ov.problem, "Keep problems whose id contains this string");
    runc->add_option("--threads", ov.threads, "Worker threads (0: all cores)");

    std::string stab_id;
    double z_max = 10.0;
    int samples = 200;
    auto* stab = app.add_subcommand("stability", "Stability polynomial samples and interval on the harmonic oscillator");
    stab->add_option("scheme", stab_id, "Builtin id")->required();
    stab->add_option("--zmax", z_max, "Largest z");
    stab->add_option("--samples", samples, "Number of samples");
    stab->add_option("--tol", tol, "Bisection tolerance");
    stab->add_option("--out", out_path, "Output CSV");

    double osc_h = 0.0, osc_tf = 500.0;
    int osc_m = 4;
    auto* osc = app.add_subcommand("oscillatory", "Processed Strang on the pendulum; a sweep over h without --step");
    auto* h_opt = osc->add_option("--step", osc_h, "Single step size h");
    osc->add_option("--tf", osc_tf, "Final time");
    osc->add_option("--m", osc_m, "Processor size m");
    osc->add_option("--out", out_path, "Output CSV");
    osc->add_option("--threads", ov.threads, "Worker threads");

    CLI11_PARSE(app, argc, argv);

    try {
        Output out(out_path);
        if (*list) {
            list_command(out.get());
        } else if (*verify) {
            return verify_command(target, tol, out.get());
        } else if (*runc) {
            if (*tf_opt) ov.tf = tf;
            write_csv(out.get(), run_preset(preset, ov));
        } else if (*stab) {
            const auto prof = stability_profile(builtin(stab_id), z_max, samples);
            write_stability_csv(out.get(), prof);
            const double z_star = stability_interval(builtin(stab_id), z_max, tol == kConditionTol ? 1e-12 : tol);
            std::cerr << "z_star = " << format_number(z_star) << "\n";
        } else if (*osc) {
            if (!*h_opt) {
                ov.tf = osc_tf;
                write_csv(out.get(), run_preset("oscillatory-resonance", ov));
            } else {
                const auto sys = pendulum_system();
                const auto n = static_cast<std::size_t>(std::max(1.0, std::round(osc_tf / osc_h)));
                const double t_end = osc_h * static_cast<double>(n);
                std::vector<BenchmarkRecord> recs;
                const auto plain = run_oscillatory_experiment(sys, builtin("strang-aba"), osc_h, t_end);
                recs.push_back({"strang-rkr", "pendulum-rotation-kick", osc_h, n, static_cast<double>(n),
                                plain.max_error, plain.rel_error.back(), 0.0});
                const auto proc = run_oscillatory_experiment(sys, processed_strang(osc_m, 1.0, osc_h), osc_h, t_end);
                recs.push_back({"processed-strang-m" + std::to_string(osc_m), "pendulum-rotation-kick", osc_h, n,
                                static_cast<double>(n + 2 * osc_m), proc.max_error, proc.rel_error.back(), 0.0});
                write_csv(out.get(), recs);
            }
        }
    } catch (const ValidationFailed& e) {
        std::cerr << "error: " << e.what() << "\n";
        return validation;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return validation;
    } catch (const NotConsistent& e) {
        std::cerr << "error: " << e.what() << "\n";
        return validation;
    } catch (const NumericalBlowup& e) {
        std::cerr << "error: " << e.what() << "\n";
        return blowup;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return failure;
    }
    return ok;
}
