#include "cli.hpp"

#include "plp/core_model.hpp"
#include "plp/deconvolution.hpp"
#include "plp/errors.hpp"
#include "plp/experiments.hpp"
#include "plp/io.hpp"
#include "plp/pca.hpp"
#include "plp/phantom.hpp"
#include "plp/weights.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

namespace plp::cli {

namespace {

using nlohmann::json;

/// Writes to a file, or to the supplied stream for "-".
class OutputTarget {
  public:
    OutputTarget(const std::string& path, std::ostream& fallback) {
        if (path == "-" || path.empty()) {
            stream_ = &fallback;
        } else {
            file_.open(path, std::ios::binary);
            if (!file_) {
                throw InvalidArgument("cannot open output file '" + path + "'");
            }
            stream_ = &file_;
        }
    }
    std::ostream& stream() { return *stream_; }

  private:
    std::ofstream file_;
    std::ostream* stream_ = nullptr;
};

std::ifstream open_input(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidArgument(std::string("cannot open ") + what + " '" + path + "'");
    }
    return in;
}

/// Grid and AIF flags shared by most subcommands.
struct SourceOptions {
    Index n = 60;
    double d = 1.0;
    double a = 3.0;
    double b = 1.0 / 1.5;
    std::string aif_path;
    std::string data_path;
    std::string mask_path;

    void add_grid(CLI::App* app) {
        app->add_option("--n", n, "Number of time points")->check(CLI::PositiveNumber);
        app->add_option("--d", d, "Inter-image interval in seconds")->check(CLI::PositiveNumber);
    }
    void add_aif(CLI::App* app) {
        add_grid(app);
        app->add_option("--a", a, "Gamma AIF exponent a in t^a exp(-b t)");
        app->add_option("--b", b, "Gamma AIF decay rate b in t^a exp(-b t)");
        app->add_option("--aif", aif_path, "AIF CSV file (overrides the gamma AIF and grid flags)");
    }
    void add_data(CLI::App* app, bool required) {
        auto* opt = app->add_option("--data", data_path, "Pixel data CSV file");
        if (required) {
            opt->required();
        }
        app->add_option("--mask", mask_path, "Region-of-interest mask file (P rows of 0/1)");
    }

    std::optional<PixelSeriesMatrix> load_data(const std::optional<TimeGrid>& grid_hint) const {
        if (data_path.empty()) {
            return std::nullopt;
        }
        auto in = open_input(data_path, "data file");
        io::PixelFile file = io::read_pixel_csv(in);
        TimeGrid grid = grid_hint ? *grid_hint
                                  : (file.instants.empty() ? TimeGrid::uniform(file.values.cols(), d)
                                                           : TimeGrid::from_instants(file.instants));
        if (grid.size() != file.values.cols()) {
            throw InvalidArgument("--data has " + std::to_string(file.values.cols()) +
                                  " time points but the AIF grid has " + std::to_string(grid.size()));
        }
        std::optional<std::vector<bool>> mask;
        if (!mask_path.empty()) {
            auto mi = open_input(mask_path, "mask file");
            mask = io::read_mask(mi);
        }
        return PixelSeriesMatrix(std::move(grid), std::move(file.values), std::move(mask));
    }

    AifCurve load_aif() const {
        if (!aif_path.empty()) {
            auto in = open_input(aif_path, "AIF file");
            return io::read_aif_csv(in);
        }
        return gamma_aif({a, b}, TimeGrid::uniform(n, d));
    }

    /// AIF plus optional data; the data grid follows the AIF when one is given.
    MethodSource load_source(bool with_aif) const {
        if (with_aif) {
            AifCurve aif = load_aif();
            TimeGrid grid = aif.grid();
            auto data = load_data(grid);
            return {std::move(grid), std::move(aif), std::move(data)};
        }
        auto data = load_data(std::nullopt);
        TimeGrid grid = data ? data->grid() : TimeGrid::uniform(n, d);
        return {std::move(grid), std::nullopt, std::move(data)};
    }
};

/// Method parameter flags shared by weights, schedule, recover and spectrum.
struct MethodOptions {
    double fraction = 0.2;
    Index rank = 0;
    double alpha = -1.0;
    std::string constraint = "identity";
    Index basis_size = 8;
    std::string basis_kind = "direct";
    double tail = 0.25;

    void add(CLI::App* app, bool with_basis) {
        app->add_option("--fraction", fraction, "TSVD cutoff fraction of the largest singular value")
            ->check(CLI::Range(0.0, 1.0));
        app->add_option("--rank", rank, "Explicit TSVD rank (0 = use --fraction)");
        app->add_option("--alpha", alpha,
                        "Tikhonov alpha (negative = singular value at the --fraction cutoff)");
        app->add_option("--constraint", constraint, "Tikhonov constraint")
            ->check(CLI::IsMember({"identity", "difference"}));
        if (with_basis) {
            app->add_option("--basis-size", basis_size, "Number of cubic B-spline basis functions");
            app->add_option("--basis-kind", basis_kind, "Basis fit target")
                ->check(CLI::IsMember({"direct", "convolved"}));
        }
        app->add_option("--tail", tail, "Tail fraction for the divergence metric")->check(CLI::Range(0.0, 1.0));
    }

    MethodParams params() const {
        MethodParams p;
        p.cutoff_fraction = fraction;
        if (rank > 0) {
            p.rank = rank;
        }
        if (alpha >= 0.0) {
            p.alpha = alpha;
        }
        p.constraint = constraint == "difference" ? Constraint::first_difference : Constraint::identity;
        p.basis_size = basis_size;
        p.basis_kind = basis_kind == "convolved" ? BasisKind::convolved : BasisKind::direct;
        p.tail_fraction = tail;
        return p;
    }

    InverseMatrix inverse(const std::string& method, const ConvolutionMatrix& a, const AifCurve& aif) const {
        if (method == "exact") {
            return exact_inverse(a.entries);
        }
        if (method == "tsvd") {
            const TsvdConfig config = rank > 0 ? TsvdConfig::rank(rank) : TsvdConfig::fraction(fraction);
            return tsvd_inverse(compute_svd(a), config);
        }
        const MethodParams p = params();
        const double strength = p.alpha ? *p.alpha : cutoff_singular_value(aif, fraction);
        return tikhonov_inverse(a.entries, {strength, p.constraint});
    }
};

/// Family name or full tag to the pair of vectors the weights command emits.
std::vector<WeightMethod> family_methods(const std::string& method, BasisKind kind) {
    if (method == "exact") return {WeightMethod::exact_volume, WeightMethod::exact_flow};
    if (method == "tsvd") return {WeightMethod::tsvd_volume, WeightMethod::tsvd_flow};
    if (method == "tikhonov") return {WeightMethod::tikhonov_volume, WeightMethod::tikhonov_flow};
    if (method == "axel") return {WeightMethod::axel_volume, WeightMethod::axel_mtt};
    if (method == "patlak") return {WeightMethod::patlak_vr, WeightMethod::patlak_perm};
    if (method == "basis") {
        return {WeightMethod::basis_volume,
                kind == BasisKind::convolved ? WeightMethod::basis_flow : WeightMethod::basis_mtt};
    }
    if (method == "fpc") return {WeightMethod::fpc};
    if (auto tag = parse_weight_method(method)) return {*tag};
    throw InvalidArgument("--method: unknown method '" + method + "'");
}

/// Schedule experiments use the volume vector of a family.
WeightMethod schedule_method(const std::string& method) {
    return family_methods(method, BasisKind::direct).front();
}

bool needs_aif(const std::vector<WeightMethod>& methods) {
    for (WeightMethod m : methods) {
        if (m != WeightMethod::axel_volume && m != WeightMethod::axel_mtt && m != WeightMethod::fpc &&
            m != WeightMethod::basis_volume && m != WeightMethod::basis_mtt) {
            return true;
        }
    }
    return false;
}

std::vector<double> parse_values(const std::string& text, const char* flag) {
    // Either "v1,v2,..." or "lo:hi:count" (inclusive linear spacing).
    std::vector<double> out;
    const auto parse = [&](const std::string& s) {
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size()) {
                throw std::invalid_argument(s);
            }
            return v;
        } catch (const std::exception&) {
            throw InvalidArgument(std::string(flag) + ": cannot parse '" + s + "'");
        }
    };
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ':');) {
            parts.push_back(p);
        }
        if (parts.size() != 3) {
            throw InvalidArgument(std::string(flag) + ": range must be lo:hi:count");
        }
        const double lo = parse(parts[0]);
        const double hi = parse(parts[1]);
        const auto count = static_cast<long>(parse(parts[2]));
        if (count < 1) {
            throw InvalidArgument(std::string(flag) + ": range count must be >= 1");
        }
        for (long k = 0; k < count; ++k) {
            out.push_back(count == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1));
        }
        return out;
    }
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) {
        out.push_back(parse(p));
    }
    if (out.empty()) {
        throw InvalidArgument(std::string(flag) + ": empty list");
    }
    return out;
}

std::string json_scalar(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

/// Fills options not given on the command line from a flat JSON object.
void apply_config(CLI::App* app, const std::string& path) {
    auto in = open_input(path, "config file");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw InvalidArgument("--config: " + std::string(e.what()));
    }
    if (!j.is_object()) {
        throw InvalidArgument("--config: top level must be an object");
    }
    for (const auto& [key, value] : j.items()) {
        CLI::Option* opt = app->get_option_no_throw("--" + key);
        if (opt == nullptr || key == "config") {
            throw InvalidArgument("--config: unknown key '" + key + "' for '" + app->get_name() + "'");
        }
        if (opt->count() > 0) {
            continue;
        }
        opt->clear();
        if (value.is_array()) {
            for (const auto& item : value) {
                opt->add_result(json_scalar(item));
            }
        } else {
            opt->add_result(json_scalar(value));
        }
        opt->run_callback();
    }
}

struct Command {
    CLI::App* app = nullptr;
    std::function<void()> action;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Perfusion linearity toolkit: deconvolution weights, PCA maps and sampling experiments", "plp"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);

    std::vector<Command> commands;
    std::string output = "-";
    std::string config_path;
    const auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help) {
        CLI::App* sub = parent->add_subcommand(name, help);
        sub->add_option("--output", output, "Output path ('-' for standard output)");
        sub->add_option("--config", config_path, "JSON file of option values; explicit flags win");
        return sub;
    };

    // aif gen
    SourceOptions aif_src;
    CLI::App* aif_group = app.add_subcommand("aif", "Arterial input functions")->require_subcommand(1);
    CLI::App* aif_gen = leaf(aif_group, "gen", "Sample a gamma AIF t^a exp(-b t) to CSV");
    aif_src.add_grid(aif_gen);
    aif_gen->add_option("--a", aif_src.a, "Exponent a");
    aif_gen->add_option("--b", aif_src.b, "Decay rate b");
    commands.push_back({aif_gen, [&] {
                            OutputTarget target(output, out);
                            io::write_aif_csv(target.stream(), aif_src.load_aif());
                        }});

    // weights
    SourceOptions w_src;
    MethodOptions w_opts;
    std::string w_method = "tsvd";
    std::string metrics_path;
    CLI::App* weights = leaf(&app, "weights", "Compute PLP weight vectors for a method");
    weights->add_option("--method", w_method,
                        "exact|tsvd|tikhonov|axel|patlak|basis|fpc or a single weight tag such as tsvd-volume");
    w_src.add_aif(weights);
    w_src.add_data(weights, false);
    w_opts.add(weights, true);
    weights->add_option("--metrics", metrics_path, "Write the metric report JSON here");
    commands.push_back({weights, [&] {
                            const MethodParams params = w_opts.params();
                            const auto methods = family_methods(w_method, params.basis_kind);
                            const MethodSource source = w_src.load_source(needs_aif(methods) || !w_src.aif_path.empty());
                            std::vector<WeightVector> vectors;
                            for (WeightMethod m : methods) {
                                vectors.push_back(method_weights(m, source, params));
                            }
                            OutputTarget target(output, out);
                            io::write_weights_csv(target.stream(), vectors);
                            if (!metrics_path.empty()) {
                                OutputTarget metrics(metrics_path, out);
                                metrics.stream() << io::weight_metrics_json(vectors, params.tail_fraction).dump(2)
                                                 << '\n';
                            }
                        }});

    // spectrum
    SourceOptions s_src;
    MethodOptions s_opts;
    std::string s_method;
    std::string matrix_path;
    std::string inverse_path;
    CLI::App* spectrum = leaf(&app, "spectrum", "Singular spectrum of the convolution matrix (index,lambda CSV)");
    s_src.add_aif(spectrum);
    s_opts.add(spectrum, false);
    spectrum->add_option("--matrix-output", matrix_path, "Also write the convolution matrix CSV");
    spectrum->add_option("--inverse-output", inverse_path, "Also write the inverse matrix CSV (needs --method)");
    spectrum->add_option("--method", s_method, "Inverse for --inverse-output: exact|tsvd|tikhonov");
    commands.push_back({spectrum, [&] {
                            const AifCurve aif = s_src.load_aif();
                            const ConvolutionMatrix a = build_convolution_matrix(aif, aif.grid());
                            OutputTarget target(output, out);
                            io::write_spectrum_csv(target.stream(), compute_svd(a).singular_values);
                            if (!matrix_path.empty()) {
                                OutputTarget m(matrix_path, out);
                                io::write_matrix_csv(m.stream(), a.entries);
                            }
                            if (!inverse_path.empty()) {
                                if (s_method != "exact" && s_method != "tsvd" && s_method != "tikhonov") {
                                    throw InvalidArgument("--method must be exact, tsvd or tikhonov");
                                }
                                OutputTarget m(inverse_path, out);
                                io::write_matrix_csv(m.stream(), s_opts.inverse(s_method, a, aif).entries);
                            }
                        }});

    // surface cond|cutoff
    std::string a_values = "0:6:13";
    std::string b_values = "0.05:1.6:32";
    Index surface_n = 60;
    double surface_fraction = 0.2;
    CLI::App* surface = app.add_subcommand("surface", "Gamma AIF conditioning surfaces")->require_subcommand(1);
    std::vector<CLI::App*> surface_leaves{leaf(surface, "cond", "log10(lambda_N/lambda_1) over (a, b)"),
                                          leaf(surface, "cutoff", "Cutoff rank r(a, b) over (a, b)")};
    for (CLI::App* s : surface_leaves) {
        s->add_option("--a-values", a_values, "List v1,v2,... or range lo:hi:count");
        s->add_option("--b-values", b_values, "List v1,v2,... or range lo:hi:count");
        s->add_option("--n", surface_n, "Time points t = 1..n")->check(CLI::PositiveNumber);
    }
    surface_leaves[1]->add_option("--fraction", surface_fraction, "Cutoff fraction")->check(CLI::Range(0.0, 1.0));
    for (std::size_t k = 0; k < surface_leaves.size(); ++k) {
        commands.push_back({surface_leaves[k], [&, k] {
                                const auto av = parse_values(a_values, "--a-values");
                                const auto bv = parse_values(b_values, "--b-values");
                                const SurfaceGrid grid = k == 0 ? condition_surface(av, bv, surface_n)
                                                                : cutoff_surface(av, bv, surface_n, surface_fraction);
                                OutputTarget target(output, out);
                                io::write_surface_csv(target.stream(), grid);
                            }});
    }

    // panorama
    SourceOptions p_src;
    std::vector<Index> ranks{1, 6, 12};
    CLI::App* panorama = leaf(&app, "panorama", "TSVD volume and flow weights at several explicit ranks");
    p_src.add_aif(panorama);
    panorama->add_option("--ranks", ranks, "Ranks to keep")->delimiter(',');
    commands.push_back({panorama, [&] {
                            OutputTarget target(output, out);
                            io::write_panorama_csv(target.stream(), weight_panorama(p_src.load_aif(), ranks));
                        }});

    // phantom gen
    SourceOptions ph_src;
    std::string spec_path;
    std::string truth_path;
    std::string aif_out_path;
    std::string classes = "60:1:4,40:0.4:8";
    double noise = 0.01;
    std::uint64_t seed = 1;
    CLI::App* phantom_group = app.add_subcommand("phantom", "Synthetic phantoms")->require_subcommand(1);
    CLI::App* phantom_gen = leaf(phantom_group, "gen", "Generate a phantom pixel series with ground truth");
    phantom_gen->add_option("--spec", spec_path, "Phantom spec JSON (overrides the flags below)");
    ph_src.add_aif(phantom_gen);
    phantom_gen->add_option("--classes", classes, "Tissue classes pixels:flow:mtt, comma separated");
    phantom_gen->add_option("--noise", noise, "Noise sigma as a fraction of peak contrast");
    phantom_gen->add_option("--seed", seed, "Random seed");
    phantom_gen->add_option("--truth", truth_path, "Ground-truth CSV (pixel,Vb,Fb,Tmtt)");
    phantom_gen->add_option("--aif-output", aif_out_path, "Also write the phantom AIF CSV");
    commands.push_back({phantom_gen, [&] {
                            PhantomSpec spec = [&] {
                                if (!spec_path.empty()) {
                                    auto in = open_input(spec_path, "phantom spec");
                                    json j;
                                    try {
                                        j = json::parse(in);
                                    } catch (const json::exception& e) {
                                        throw InvalidArgument("--spec: " + std::string(e.what()));
                                    }
                                    return io::parse_phantom_spec(
                                        j, std::filesystem::path(spec_path).parent_path().string());
                                }
                                const AifCurve aif = ph_src.load_aif();
                                std::vector<TissueClass> tissues;
                                std::stringstream ss(classes);
                                for (std::string item; std::getline(ss, item, ',');) {
                                    std::vector<std::string> parts;
                                    std::stringstream fields(item);
                                    for (std::string f; std::getline(fields, f, ':');) {
                                        parts.push_back(f);
                                    }
                                    if (parts.size() != 3) {
                                        throw InvalidArgument("--classes: expected pixels:flow:mtt, got '" + item + "'");
                                    }
                                    const auto pixels = parse_values(parts[0], "--classes");
                                    const auto flow = parse_values(parts[1], "--classes");
                                    const auto mtt = parse_values(parts[2], "--classes");
                                    if (pixels[0] < 1.0 || pixels[0] != static_cast<double>(static_cast<Index>(pixels[0]))) {
                                        throw InvalidArgument("--classes: pixel count must be a positive integer");
                                    }
                                    tissues.push_back(
                                        {static_cast<Index>(pixels[0]), ExponentialResidue{flow[0], mtt[0]}});
                                }
                                return PhantomSpec{aif.grid(), aif, std::move(tissues), noise, seed};
                            }();
                            const Phantom phantom = generate(spec);
                            OutputTarget target(output, out);
                            io::write_pixel_csv(target.stream(), phantom.data);
                            if (!truth_path.empty()) {
                                OutputTarget t(truth_path, out);
                                io::write_truth_csv(t.stream(), phantom.truth);
                            }
                            if (!aif_out_path.empty()) {
                                OutputTarget a(aif_out_path, out);
                                io::write_aif_csv(a.stream(), spec.aif);
                            }
                        }});

    // map fpc
    SourceOptions m_src;
    std::string report_path;
    CLI::App* map_group = app.add_subcommand("map", "Parameter maps")->require_subcommand(1);
    CLI::App* map_fpc = leaf(map_group, "fpc", "First principal component map (pixel,P_FPC CSV)");
    m_src.add_data(map_fpc, true);
    map_fpc->add_option("--d", m_src.d, "Interval used when the data file carries no instants");
    map_fpc->add_option("--report", report_path, "Write weights, eigenvalues and energy ratio JSON here");
    commands.push_back({map_fpc, [&] {
                            const PixelSeriesMatrix data = *m_src.load_data(std::nullopt);
                            const PcaResult pca = fit_pca(data);
                            OutputTarget target(output, out);
                            io::write_map_csv(target.stream(), fpc_map(data, pca));
                            if (!report_path.empty()) {
                                const auto vec = [](const Eigen::VectorXd& v) {
                                    return std::vector<double>(v.data(), v.data() + v.size());
                                };
                                json j{{"weights", vec(pca.component_weights)},
                                       {"eigenvalues", vec(pca.eigenvalues)},
                                       {"energy_ratio", energy_ratio(pca)},
                                       {"observations", pca.observations}};
                                OutputTarget r(report_path, out);
                                r.stream() << j.dump(2) << '\n';
                            }
                        }});

    // schedule
    SourceOptions sc_src;
    MethodOptions sc_opts;
    std::string sc_method = "fpc";
    std::vector<std::string> strategies{"subsample:4", "truncate:14", "interp:4-7"};
    CLI::App* schedule = leaf(&app, "schedule", "Weight consistency under image-reduction strategies (JSON)");
    schedule->add_option("--method", sc_method, "Method family or weight tag (families use their volume vector)");
    schedule->add_option("--strategies", strategies, "subsample:K[:FIRST], truncate:M, interp:L-R (1-based)")
        ->delimiter(',');
    sc_src.add_aif(schedule);
    sc_src.add_data(schedule, false);
    sc_opts.add(schedule, true);
    commands.push_back({schedule, [&] {
                            const WeightMethod method = schedule_method(sc_method);
                            const bool aif = needs_aif({method}) || !sc_src.aif_path.empty();
                            const MethodSource source = sc_src.load_source(aif);
                            std::vector<ScheduleStrategy> parsed;
                            for (const auto& s : strategies) {
                                parsed.push_back(parse_strategy(s));
                            }
                            const ConsistencyReport report =
                                consistency_experiment(method, source, parsed, sc_opts.params());
                            OutputTarget target(output, out);
                            target.stream() << io::consistency_report_json(report).dump(2) << '\n';
                        }});

    // recover
    SourceOptions r_src;
    MethodOptions r_opts;
    std::string r_method = "tsvd";
    std::string residual_path;
    CLI::App* recover = leaf(&app, "recover", "Deconvolve every pixel and report Vb, Fb, Tmtt");
    recover->add_option("--method", r_method, "Inverse method")->check(CLI::IsMember({"exact", "tsvd", "tikhonov"}));
    r_src.add_aif(recover);
    r_src.add_data(recover, true);
    r_opts.add(recover, false);
    recover->add_option("--residual-output", residual_path, "Write recovered residues in the pixel data format");
    commands.push_back({recover, [&] {
                            const AifCurve aif = r_src.load_aif();
                            const PixelSeriesMatrix data = *r_src.load_data(aif.grid());
                            const ConvolutionMatrix a = build_convolution_matrix(aif, aif.grid());
                            const InverseMatrix inverse = r_opts.inverse(r_method, a, aif);
                            Eigen::MatrixXd residues(data.pixel_count(), aif.grid().size());
                            std::vector<PerfusionTriple> triples;
                            for (Index p = 0; p < data.pixel_count(); ++p) {
                                const Eigen::VectorXd r = recover_residual(inverse, data.values().row(p).transpose());
                                residues.row(p) = r.transpose();
                                triples.push_back(perfusion_params(r, aif.grid()));
                            }
                            OutputTarget target(output, out);
                            io::write_truth_csv(target.stream(), triples);
                            if (!residual_path.empty()) {
                                OutputTarget rr(residual_path, out);
                                io::write_pixel_csv(rr.stream(), PixelSeriesMatrix(aif.grid(), residues));
                            }
                        }});

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    for (const Command& command : commands) {
        if (!command.app->parsed()) {
            continue;
        }
        try {
            if (!config_path.empty()) {
                apply_config(command.app, config_path);
            }
            command.action();
            return 0;
        } catch (const CLI::ParseError& e) {
            err << "error: " << e.what() << '\n';
            return 1;
        } catch (const InvalidArgument& e) {
            err << "error: " << e.what() << '\n';
            return 1;
        } catch (const SingularInput& e) {
            err << "singular input: " << e.what() << '\n';
            return 2;
        } catch (const NumericFailure& e) {
            err << "numeric failure: " << e.what() << '\n';
            return 2;
        } catch (const DegenerateData& e) {
            err << "degenerate data: " << e.what() << '\n';
            return 2;
        }
    }
    err << "error: no command selected\n";
    return 1;
}

}  // namespace plp::cli
