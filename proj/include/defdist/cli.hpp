#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "defdist/complex_matrix.hpp"
#include "defdist/gallery.hpp"

namespace defdist::cli {

enum class OutputFormat { text, csv, json };

/// Configuration shared by the distance/gallery/psgrid commands. Exactly
/// one matrix source must be set (input file XOR gallery spec).
struct RunConfig {
    std::string input_path;                          // Matrix Market file
    std::optional<gallery::GallerySpec> gallery_spec;

    double z0_re = 0.0;
    double z0_im = 0.0;
    std::optional<double> eps0;  // explicit epsilon0; default: sigma_min(A - z0 I)

    double tol = 1e-14;
    std::size_t max_iter = 50;

    OutputFormat format = OutputFormat::text;
    std::string output_path;  // empty: stdout

    // psgrid window
    double re_lo = -1.0, re_hi = 1.0;
    double im_lo = -1.0, im_hi = 1.0;
    std::size_t n_re = 51, n_im = 51;
};

/// Exit codes: 0 certified success, 1 I/O or configuration error,
/// 2 Newton failure, 3 certification failure.
int cmd_distance(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Writes the gallery matrix in Matrix Market format. Exit 0/1.
int cmd_gallery(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Writes the sigma_min grid as CSV. Exit 0/1.
int cmd_psgrid(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Loads the configured matrix (file XOR gallery).
ComplexMatrix load_matrix(const RunConfig& cfg);

}  // namespace defdist::cli
