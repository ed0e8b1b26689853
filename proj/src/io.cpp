#include "plp/io.hpp"

#include "plp/errors.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace plp::io {

namespace {

std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep)) {
        out.push_back(field);
    }
    if (!line.empty() && line.back() == sep) {
        out.emplace_back();
    }
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text, const char* context) {
    const std::string t = trim(text);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size()) {
        throw InvalidArgument(std::string(context) + ": cannot parse number '" + t + "'");
    }
    return v;
}

double normalized_entry(const WeightVector& w, Index i) {
    const double norm = w.weights.norm();
    if (w.normalized) {
        return w.weights(i);
    }
    return norm > 0.0 ? w.weights(i) / norm : std::nan("");
}

}  // namespace

std::string format_number(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", value);
    return buf;
}

void write_aif_csv(std::ostream& out, const AifCurve& aif) {
    out << "# K0=" << format_number(aif.value_at_zero()) << '\n';
    out << "t,value\n";
    for (Index i = 0; i < aif.grid().size(); ++i) {
        out << format_number(aif.grid().instant(i)) << ',' << format_number(aif.values()(i)) << '\n';
    }
}

AifCurve read_aif_csv(std::istream& in) {
    std::string line;
    std::vector<double> t;
    std::vector<double> v;
    double k0 = 0.0;
    bool have_k0 = false;
    bool have_header = false;
    while (std::getline(in, line)) {
        const std::string s = trim(line);
        if (s.empty()) {
            continue;
        }
        if (s.front() == '#') {
            const auto pos = s.find("K0=");
            if (pos != std::string::npos) {
                k0 = parse_number(s.substr(pos + 3), "AIF K0");
                have_k0 = true;
            }
            continue;
        }
        if (!have_header) {
            if (s != "t,value") {
                throw InvalidArgument("AIF CSV header must be 't,value', got '" + s + "'");
            }
            have_header = true;
            continue;
        }
        const auto fields = split(s);
        if (fields.size() != 2) {
            throw InvalidArgument("AIF CSV row must have 2 fields: '" + s + "'");
        }
        t.push_back(parse_number(fields[0], "AIF time"));
        v.push_back(parse_number(fields[1], "AIF value"));
    }
    if (!have_k0) {
        throw InvalidArgument("AIF CSV is missing the '# K0=' line");
    }
    TimeGrid grid = TimeGrid::from_instants(std::move(t));
    return AifCurve(grid, Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Index>(v.size())), k0);
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
    for (Index r = 0; r < m.rows(); ++r) {
        for (Index c = 0; c < m.cols(); ++c) {
            out << (c ? "," : "") << format_number(m(r, c));
        }
        out << '\n';
    }
}

void write_spectrum_csv(std::ostream& out, const Eigen::VectorXd& singular_values) {
    out << "index,lambda\n";
    for (Index i = 0; i < singular_values.size(); ++i) {
        out << i + 1 << ',' << format_number(singular_values(i)) << '\n';
    }
}

void write_weights_csv(std::ostream& out, const std::vector<WeightVector>& vectors) {
    out << "index,t,weight_raw,weight_normalized,method\n";
    for (const auto& w : vectors) {
        for (Index i = 0; i < w.weights.size(); ++i) {
            out << i + 1 << ',' << format_number(w.grid.instant(i)) << ',' << format_number(w.weights(i)) << ','
                << format_number(normalized_entry(w, i)) << ',' << to_string(w.method) << '\n';
        }
    }
}

nlohmann::json weight_metrics_json(const std::vector<WeightVector>& vectors, double tail_fraction) {
    nlohmann::json j;
    j["tail_fraction"] = tail_fraction;
    j["vectors"] = nlohmann::json::array();
    for (const auto& w : vectors) {
        j["vectors"].push_back({{"method", std::string(to_string(w.method))},
                                {"n", w.weights.size()},
                                {"sign_changes", sign_changes(w)},
                                {"tail_divergence", tail_divergence(w, tail_fraction)}});
    }
    j["correlations"] = nlohmann::json::array();
    for (std::size_t a = 0; a < vectors.size(); ++a) {
        for (std::size_t b = a + 1; b < vectors.size(); ++b) {
            j["correlations"].push_back({{"a", std::string(to_string(vectors[a].method))},
                                         {"b", std::string(to_string(vectors[b].method))},
                                         {"correlation", centered_correlation(vectors[a], vectors[b])}});
        }
    }
    return j;
}

void write_pixel_csv(std::ostream& out, const PixelSeriesMatrix& data) {
    out << data.pixel_count() << ',' << data.grid().size() << '\n';
    out << "# t=";
    for (Index i = 0; i < data.grid().size(); ++i) {
        out << (i ? "," : "") << format_number(data.grid().instant(i));
    }
    out << '\n';
    write_matrix_csv(out, data.values());
}

PixelFile read_pixel_csv(std::istream& in) {
    std::string line;
    Index p = -1;
    Index n = -1;
    PixelFile file;
    std::vector<double> flat;
    while (std::getline(in, line)) {
        const std::string s = trim(line);
        if (s.empty()) {
            continue;
        }
        if (s.front() == '#') {
            if (s.rfind("# t=", 0) == 0) {
                for (const auto& f : split(s.substr(4))) {
                    file.instants.push_back(parse_number(f, "pixel file instants"));
                }
            }
            continue;
        }
        const auto fields = split(s);
        if (p < 0) {
            if (fields.size() != 2) {
                throw InvalidArgument("pixel file must start with a 'P,N' line");
            }
            p = static_cast<Index>(parse_number(fields[0], "pixel count"));
            n = static_cast<Index>(parse_number(fields[1], "time point count"));
            if (p < 1 || n < 2) {
                throw InvalidArgument("pixel file needs P >= 1 and N >= 2");
            }
            continue;
        }
        if (static_cast<Index>(fields.size()) != n) {
            throw InvalidArgument("pixel row " + std::to_string(flat.size() / static_cast<std::size_t>(n) + 1) +
                                  " has " + std::to_string(fields.size()) + " values, expected " + std::to_string(n));
        }
        for (const auto& f : fields) {
            flat.push_back(parse_number(f, "pixel value"));
        }
    }
    if (p < 0) {
        throw InvalidArgument("pixel file is empty");
    }
    if (static_cast<Index>(flat.size()) != p * n) {
        throw InvalidArgument("pixel file declares " + std::to_string(p) + " rows but holds " +
                              std::to_string(flat.size() / static_cast<std::size_t>(n)));
    }
    if (!file.instants.empty() && static_cast<Index>(file.instants.size()) != n) {
        throw InvalidArgument("pixel file instants line has the wrong length");
    }
    file.values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        flat.data(), p, n);
    return file;
}

std::vector<bool> read_mask(std::istream& in) {
    std::vector<bool> mask;
    std::string line;
    while (std::getline(in, line)) {
        const std::string s = trim(line);
        if (s.empty() || s.front() == '#') {
            continue;
        }
        if (s == "1") {
            mask.push_back(true);
        } else if (s == "0") {
            mask.push_back(false);
        } else {
            throw InvalidArgument("mask rows must be 0 or 1, got '" + s + "'");
        }
    }
    return mask;
}

void write_map_csv(std::ostream& out, const Eigen::VectorXd& map) {
    out << "pixel,P_FPC\n";
    for (Index p = 0; p < map.size(); ++p) {
        out << p + 1 << ',' << format_number(map(p)) << '\n';
    }
}

void write_truth_csv(std::ostream& out, const std::vector<PerfusionTriple>& triples) {
    out << "pixel,Vb,Fb,Tmtt\n";
    for (std::size_t p = 0; p < triples.size(); ++p) {
        const auto& t = triples[p];
        out << p + 1 << ',' << format_number(t.blood_volume) << ',' << format_number(t.blood_flow) << ','
            << format_number(t.mean_transit_time.value_or(std::nan(""))) << '\n';
    }
}

void write_surface_csv(std::ostream& out, const SurfaceGrid& surface) {
    out << "a,b,value\n";
    for (std::size_t ia = 0; ia < surface.a_values.size(); ++ia) {
        for (std::size_t ib = 0; ib < surface.b_values.size(); ++ib) {
            out << format_number(surface.a_values[ia]) << ',' << format_number(surface.b_values[ib]) << ','
                << format_number(surface.at(ia, ib)) << '\n';
        }
    }
}

void write_panorama_csv(std::ostream& out, const std::vector<PanoramaEntry>& entries) {
    out << "r,index,t,volume_raw,volume_normalized,flow_raw,flow_normalized\n";
    for (const auto& e : entries) {
        for (Index i = 0; i < e.volume.weights.size(); ++i) {
            out << e.rank << ',' << i + 1 << ',' << format_number(e.volume.grid.instant(i)) << ','
                << format_number(e.volume.weights(i)) << ',' << format_number(normalized_entry(e.volume, i)) << ','
                << format_number(e.flow.weights(i)) << ',' << format_number(normalized_entry(e.flow, i)) << '\n';
        }
    }
}

nlohmann::json consistency_report_json(const ConsistencyReport& report) {
    const auto to_vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
    nlohmann::json j;
    j["method"] = std::string(to_string(report.method));
    j["full"] = {{"n", report.full.weights.size()},
                 {"weights", to_vec(report.full.weights)},
                 {"tail_divergence", report.full_tail_divergence},
                 {"sign_changes", report.full_sign_changes}};
    j["strategies"] = nlohmann::json::array();
    for (const auto& o : report.outcomes) {
        std::vector<Index> kept_one_based;
        for (Index k : o.kept) {
            kept_one_based.push_back(k + 1);
        }
        j["strategies"].push_back({{"method", std::string(to_string(report.method))},
                                   {"strategy", to_string(o.strategy)},
                                   {"correlation", o.correlation},
                                   {"max_abs_diff", o.max_abs_diff},
                                   {"tail_divergence", o.tail_divergence},
                                   {"sign_changes", o.sign_changes},
                                   {"kept_indices", kept_one_based},
                                   {"weights", to_vec(o.reduced.weights)}});
    }
    return j;
}

PhantomSpec parse_phantom_spec(const nlohmann::json& j, const std::string& base_dir) {
    try {
        const auto& g = j.at("grid");
        TimeGrid grid = g.contains("instants") ? TimeGrid::from_instants(g.at("instants").get<std::vector<double>>())
                                               : TimeGrid::uniform(g.at("n").get<Index>(), g.value("d", 1.0));

        const auto& a = j.at("aif");
        std::optional<AifCurve> aif;
        if (a.contains("csv")) {
            std::filesystem::path path = a.at("csv").get<std::string>();
            if (path.is_relative()) {
                path = std::filesystem::path(base_dir) / path;
            }
            std::ifstream in(path);
            if (!in) {
                throw InvalidArgument("cannot open AIF file " + path.string());
            }
            aif = read_aif_csv(in);
            if (!(aif->grid() == grid)) {
                throw InvalidArgument("AIF file grid does not match the phantom grid");
            }
        } else {
            aif = gamma_aif({a.value("a", 3.0), a.value("b", 1.0 / 1.5)}, grid);
        }

        std::vector<TissueClass> classes;
        for (const auto& c : j.at("classes")) {
            TissueClass tissue;
            tissue.pixel_count = c.at("pixels").get<Index>();
            if (c.contains("residue")) {
                const auto r = c.at("residue").get<std::vector<double>>();
                tissue.residue = Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Index>(r.size())));
            } else {
                tissue.residue = ExponentialResidue{c.at("flow").get<double>(), c.at("mtt").get<double>()};
            }
            classes.push_back(std::move(tissue));
        }
        return {std::move(grid), std::move(*aif), std::move(classes), j.value("noise_sigma", 0.0),
                j.value("seed", std::uint64_t{0})};
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("phantom spec: ") + e.what());
    }
}

}  // namespace plp::io
