#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "freegeo/gmap.hpp"
#include "freegeo/io.hpp"
#include "freegeo/lyapunov.hpp"
#include "freegeo/measure.hpp"
#include "freegeo/rmt.hpp"

namespace {

using namespace freegeo;

struct MeasureArgs {
    std::string family;
    std::string param;
    std::string spec;
};

struct CommonArgs {
    std::string output;
    std::string format = "csv";
    int grid_points = EvalConfig{}.grid_size;
    double tol = EvalConfig{}.root_tol;
};

void add_measure_flags(CLI::App* cmd, MeasureArgs& a) {
    cmd->add_option("--family", a.family,
                    "named family: point_mass, projection, marchenko_pastur, "
                    "quarter_circle_squared");
    cmd->add_option("--param", a.param, "family parameter, e.g. c=1.0 or just 1.0");
    cmd->add_option("--spec", a.spec, "measure spec file");
}

void add_common_flags(CLI::App* cmd, CommonArgs& c, bool output_required = true) {
    auto* out = cmd->add_option("--output", c.output, "output file path");
    if (output_required) out->required();
    cmd->add_option("--format", c.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--grid-points", c.grid_points, "grid size for tables");
    cmd->add_option("--tol", c.tol, "root-finding tolerance");
}

EvalConfig make_config(const CommonArgs& c) {
    EvalConfig cfg;
    cfg.grid_size = c.grid_points;
    cfg.root_tol = c.tol;
    cfg.require_valid();
    return cfg;
}

Measure resolve_measure(const MeasureArgs& a, const EvalConfig& cfg) {
    io::MeasureSpec spec;
    if (!a.spec.empty()) spec = io::parse_measure_spec(a.spec);
    if (!a.family.empty()) {
        if (spec.family && family_name(*spec.family) != a.family)
            std::cerr << "warning: --family overrides spec file family\n";
        spec.family = family_from_string(a.family);
        spec.atoms.clear();
        spec.density_csv.reset();
    }
    if (!a.param.empty()) {
        std::string value = a.param;
        auto eq = value.find('=');
        if (eq != std::string::npos) {
            std::string name = value.substr(0, eq);
            if (spec.family && !name.empty() && name != family_param_name(*spec.family))
                std::cerr << "warning: parameter name '" << name << "' does not match family\n";
            value = value.substr(eq + 1);
        }
        if (spec.param) std::cerr << "warning: --param overrides spec file param\n";
        spec.param = io::parse_double(value);
    }
    if (!spec.family && spec.atoms.empty() && !spec.density_csv)
        throw ValidationError("no measure given: use --family/--param or --spec");
    return io::build_measure(spec, cfg);
}

void write_measure(const CommonArgs& c, const Measure& m) {
    if (c.format == "json")
        io::write_measure_json(c.output, m);
    else
        io::write_measure_csv(c.output, m);
}

void print_measure_summary(const char* op, const Measure& m) {
    std::cout << op << ": atom_mass=" << io::format_double(m.atom_mass())
              << " mass=" << io::format_double(m.total_mass());
    if (m.has_density())
        std::cout << " support=[" << io::format_double(m.grid().front()) << ", "
                  << io::format_double(m.grid().back()) << "]";
    else if (!m.atoms().empty())
        std::cout << " atom_at=" << io::format_double(m.atoms().front().location);
    std::cout << "\n";
}

std::uint64_t seed_with_env_override(std::uint64_t flag_seed) {
    const char* env = std::getenv("FREEGEO_SEED");
    if (env == nullptr || *env == '\0') return flag_seed;
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end == nullptr || *end != '\0')
        throw ValidationError("FREEGEO_SEED is not a decimal integer");
    std::cerr << "note: seed overridden by FREEGEO_SEED=" << v << "\n";
    return static_cast<std::uint64_t>(v);
}

int run(int argc, char** argv) {
    CLI::App app{"limit laws of geometric means of free operators: transforms, "
                 "power laws, Lyapunov spectra and Monte Carlo verification"};
    app.require_subcommand(1);

    // gmap
    auto* cmd_gmap = app.add_subcommand("gmap", "compute the limit law nu = G(mu)");
    MeasureArgs gm_measure;
    CommonArgs gm_common;
    std::string gm_dump;
    add_measure_flags(cmd_gmap, gm_measure);
    add_common_flags(cmd_gmap, gm_common);
    cmd_gmap->add_option("--dump-transforms", gm_dump,
                         "also write a (z, chi, s) diagnostic table to this CSV");
    cmd_gmap->callback([&] {
        EvalConfig cfg = make_config(gm_common);
        Measure mu = resolve_measure(gm_measure, cfg);
        if (!gm_dump.empty()) {
            double beta = mu.atom_at_zero();
            std::string table = "z,chi,s\n";
            const int rows = 256;
            for (int k = 0; k < rows; ++k) {
                double z = (beta - 1.0) * (rows - k - 0.5) / rows;
                double x = chi(mu, z, cfg);
                table += io::format_double(z) + "," + io::format_double(x) + "," +
                         io::format_double((1.0 + z) / z * x) + "\n";
            }
            std::ofstream out(gm_dump, std::ios::binary | std::ios::trunc);
            if (!out) throw ValidationError("cannot write '" + gm_dump + "'");
            out << table;
        }
        Measure nu = gmap(mu, cfg);
        write_measure(gm_common, nu);
        print_measure_summary("gmap", nu);
    });

    // power
    auto* cmd_power = app.add_subcommand(
        "power", "limit law of the n-fold free convolution power of mu");
    MeasureArgs pw_measure;
    CommonArgs pw_common;
    std::string pw_op;
    int pw_n = 1;
    add_measure_flags(cmd_power, pw_measure);
    add_common_flags(cmd_power, pw_common);
    cmd_power->add_option("--op", pw_op, "boxplus (additive) or boxtimes (multiplicative)")
        ->required()
        ->check(CLI::IsMember({"boxplus", "boxtimes"}));
    cmd_power->add_option("--n", pw_n, "convolution power")->required();
    cmd_power->callback([&] {
        EvalConfig cfg = make_config(pw_common);
        Measure mu = resolve_measure(pw_measure, cfg);
        Measure nu = (pw_op == "boxplus") ? gmap_boxplus_power(mu, pw_n, cfg)
                                          : gmap_boxtimes_power(mu, pw_n, cfg);
        write_measure(pw_common, nu);
        print_measure_summary("power", nu);
    });

    // lyapunov
    auto* cmd_lyap = app.add_subcommand(
        "lyapunov", "distribution of the Lyapunov exponents (log pushforward)");
    MeasureArgs ly_measure;
    CommonArgs ly_common;
    add_measure_flags(cmd_lyap, ly_measure);
    add_common_flags(cmd_lyap, ly_common);
    cmd_lyap->callback([&] {
        EvalConfig cfg = make_config(ly_common);
        Measure gamma = lyapunov_distribution(resolve_measure(ly_measure, cfg), cfg);
        write_measure(ly_common, gamma);
        print_measure_summary("lyapunov", gamma);
    });

    // simulate
    auto* cmd_sim = app.add_subcommand(
        "simulate", "random-matrix Monte Carlo sample of the B_n^{1/2n} spectrum");
    MeasureArgs sm_measure;
    CommonArgs sm_common;
    rmt::SimConfig sim;
    std::string sm_method = "qr_log";
    add_measure_flags(cmd_sim, sm_measure);
    add_common_flags(cmd_sim, sm_common);
    cmd_sim->add_option("--dim", sim.dim, "matrix size N")->required();
    cmd_sim->add_option("--n", sim.n_factors, "number of factors n")->required();
    cmd_sim->add_option("--trials", sim.trials, "independent trials");
    cmd_sim->add_option("--seed", sim.seed, "RNG seed (FREEGEO_SEED overrides)");
    cmd_sim->add_option("--method", sm_method, "direct or qr_log")
        ->check(CLI::IsMember({"direct", "qr_log"}));
    cmd_sim->callback([&] {
        EvalConfig cfg = make_config(sm_common);
        sim.method = rmt::method_from_string(sm_method);
        sim.seed = seed_with_env_override(sim.seed);
        sim.measure_spec = !sm_measure.spec.empty()
                               ? sm_measure.spec
                               : sm_measure.family + (sm_measure.param.empty() ? "" : "(" + sm_measure.param + ")");
        Measure mu = resolve_measure(sm_measure, cfg);
        sim.require_valid();
        rmt::SpectrumSample sample = rmt::simulate(mu, sim);
        if (sm_common.format == "json")
            io::write_sample_json(sm_common.output, sample);
        else
            io::write_sample_csv(sm_common.output, sample);
        std::cout << "simulate: " << sample.values.size() << " eigenvalues, method="
                  << rmt::method_name(sim.method) << " seed=" << sim.seed << "\n";
    });

    // compare
    auto* cmd_cmp = app.add_subcommand(
        "compare", "Kolmogorov-Smirnov comparison of a sample against a predicted law");
    MeasureArgs cp_measure;
    CommonArgs cp_common;
    std::string cp_sample, cp_predicted;
    bool cp_apply_gmap = false;
    add_measure_flags(cmd_cmp, cp_measure);
    add_common_flags(cmd_cmp, cp_common, /*output_required=*/false);
    cmd_cmp->add_option("--sample", cp_sample, "sample CSV (eigenvalue column)")->required();
    cmd_cmp->add_option("--predicted", cp_predicted,
                        "predicted law from a gmap/power/lyapunov output file");
    cmd_cmp->add_flag("--apply-gmap", cp_apply_gmap,
                      "push the given measure through G before comparing");
    cmd_cmp->callback([&] {
        EvalConfig cfg = make_config(cp_common);
        rmt::SpectrumSample sample;
        sample.values = io::read_sample_csv(cp_sample);
        Measure predicted;
        if (!cp_predicted.empty()) {
            predicted = io::read_measure_output(cp_predicted);
        } else {
            predicted = resolve_measure(cp_measure, cfg);
            if (cp_apply_gmap) predicted = gmap(predicted, cfg);
        }
        rmt::GofReport rep = rmt::ks_report(sample, predicted);
        if (!cp_common.output.empty()) {
            if (cp_common.format == "json")
                io::write_gof_json(cp_common.output, rep);
            else
                io::write_gof_csv(cp_common.output, rep);
        }
        std::cout << "ks_distance = " << io::format_double(rep.ks_distance) << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;  // command-line misuse is a validation error
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
