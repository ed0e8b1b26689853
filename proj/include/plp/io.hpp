#pragma once

#include "plp/core_model.hpp"
#include "plp/deconvolution.hpp"
#include "plp/experiments.hpp"
#include "plp/pca.hpp"
#include "plp/phantom.hpp"
#include "plp/weights.hpp"

#include "json.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace plp::io {

/// 15 significant digits; inf/-inf/nan spelled out.
std::string format_number(double value);

// AIF: "# K0=<k0>", header "t,value", one row per sample.
void write_aif_csv(std::ostream& out, const AifCurve& aif);
AifCurve read_aif_csv(std::istream& in);

// Dense rows, comma separated.
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);
void write_spectrum_csv(std::ostream& out, const Eigen::VectorXd& singular_values);

// "index,t,weight_raw,weight_normalized,method", 1-based index.
void write_weights_csv(std::ostream& out, const std::vector<WeightVector>& vectors);

/// method, sign_changes, tail_divergence per vector plus pairwise correlations.
nlohmann::json weight_metrics_json(const std::vector<WeightVector>& vectors, double tail_fraction);

/**
 * Pixel data: first line "P,N", an optional "# t=t1,t2,..." line carrying the
 * sampling instants, then P rows of N comma-separated values.
 */
void write_pixel_csv(std::ostream& out, const PixelSeriesMatrix& data);

struct PixelFile {
    Eigen::MatrixXd values;
    std::vector<double> instants;  // empty when the file carries none
};
PixelFile read_pixel_csv(std::istream& in);

/// P rows of 0/1.
std::vector<bool> read_mask(std::istream& in);

// "pixel,P_FPC", 1-based pixel.
void write_map_csv(std::ostream& out, const Eigen::VectorXd& map);

// "pixel,Vb,Fb,Tmtt"; undefined Tmtt written as nan.
void write_truth_csv(std::ostream& out, const std::vector<PerfusionTriple>& triples);

// "a,b,value" long format.
void write_surface_csv(std::ostream& out, const SurfaceGrid& surface);

// "r,index,t,volume_raw,volume_normalized,flow_raw,flow_normalized".
void write_panorama_csv(std::ostream& out, const std::vector<PanoramaEntry>& entries);

nlohmann::json consistency_report_json(const ConsistencyReport& report);

/**
 * Phantom spec JSON:
 *   {"grid": {"n": 60, "d": 1} | {"instants": [...]},
 *    "aif": {"a": 3, "b": 0.6667} | {"csv": "path"},
 *    "classes": [{"pixels": 50, "flow": 1, "mtt": 4} | {"pixels": 5, "residue": [...]}],
 *    "noise_sigma": 0.01, "seed": 7}
 * Relative AIF paths resolve against base_dir.
 */
PhantomSpec parse_phantom_spec(const nlohmann::json& j, const std::string& base_dir = ".");

}  // namespace plp::io
