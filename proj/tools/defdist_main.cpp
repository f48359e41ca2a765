#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "defdist/cli.hpp"
#include "defdist/gallery.hpp"

namespace {

using defdist::cli::OutputFormat;
using defdist::cli::RunConfig;
using defdist::gallery::GalleryKind;

bool parse_kind(const std::string& name, GalleryKind& kind) {
    if (name == "kahan") kind = GalleryKind::kahan;
    else if (name == "grcar") kind = GalleryKind::grcar;
    else if (name == "embedded-kahan") kind = GalleryKind::embedded_kahan;
    else return false;
    return true;
}

bool parse_z0(const std::string& text, RunConfig& cfg) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) return false;
    try {
        std::size_t pos = 0;
        cfg.z0_re = std::stod(text.substr(0, comma), &pos);
        if (pos != comma) return false;
        const std::string im = text.substr(comma + 1);
        cfg.z0_im = std::stod(im, &pos);
        return pos == im.size();
    } catch (const std::exception&) {
        return false;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"distance from a complex matrix to the nearest defective matrix"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string gallery_name, z0_text = "0,0", eps0_text = "auto", format_text = "text";
    std::size_t gallery_n = 6;
    double kahan_target = 0.1;
    std::size_t block = 6;
    bool have_gallery = false;

    auto add_source = [&](CLI::App* cmd) {
        cmd->add_option("--input", cfg.input_path, "Matrix Market input file");
        cmd->add_option("--gallery", gallery_name, "gallery matrix: kahan|grcar|embedded-kahan")
            ->check([&](const std::string& v) -> std::string {
                GalleryKind k;
                return parse_kind(v, k) ? "" : "unknown gallery kind '" + v + "'";
            });
        cmd->add_option("--n", gallery_n, "gallery dimension");
        cmd->add_option("--block", block, "embedded-kahan block size");
        cmd->add_option("--target", kahan_target, "kahan target value of s^(n-1)");
    };

    CLI::App* dist = app.add_subcommand("distance", "run the Newton iteration and certify");
    add_source(dist);
    dist->add_option("--z0", z0_text, "start point RE,IM (default 0,0)");
    dist->add_option("--eps0", eps0_text, "start epsilon: a value, or 'auto' for sigma_min");
    dist->add_option("--tol", cfg.tol, "stopping tolerance on ||g|| (default 1e-14)");
    dist->add_option("--maxit", cfg.max_iter, "maximum Newton updates (default 50)");
    dist->add_option("--format", format_text, "output format: text|csv|json");
    dist->add_option("-o,--output", cfg.output_path, "output file (default stdout)");

    CLI::App* gal = app.add_subcommand("gallery", "write a gallery matrix in Matrix Market format");
    std::string gal_kind_positional;
    gal->add_option("kind", gal_kind_positional, "kahan|grcar|embedded-kahan")->required();
    gal->add_option("--n", gallery_n, "dimension");
    gal->add_option("--block", block, "embedded-kahan block size");
    gal->add_option("--target", kahan_target, "kahan target value of s^(n-1)");
    gal->add_option("-o,--output", cfg.output_path, "output file (default stdout)");

    CLI::App* grid = app.add_subcommand("psgrid", "write a sigma_min grid as CSV");
    add_source(grid);
    grid->add_option("--re-min", cfg.re_lo, "window: smallest real part");
    grid->add_option("--re-max", cfg.re_hi, "window: largest real part");
    grid->add_option("--im-min", cfg.im_lo, "window: smallest imaginary part");
    grid->add_option("--im-max", cfg.im_hi, "window: largest imaginary part");
    grid->add_option("--nre", cfg.n_re, "samples along the real axis");
    grid->add_option("--nim", cfg.n_im, "samples along the imaginary axis");
    grid->add_option("-o,--output", cfg.output_path, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    have_gallery = !gallery_name.empty() || !gal_kind_positional.empty();
    if (have_gallery) {
        defdist::gallery::GallerySpec spec;
        const std::string& name = gal_kind_positional.empty() ? gallery_name : gal_kind_positional;
        if (!parse_kind(name, spec.kind)) {
            std::cerr << "error: unknown gallery kind '" << name << "'\n";
            return 1;
        }
        spec.n = gallery_n;
        spec.kahan_target = kahan_target;
        spec.block = block;
        cfg.gallery_spec = spec;
    }

    if (format_text == "text") cfg.format = OutputFormat::text;
    else if (format_text == "csv") cfg.format = OutputFormat::csv;
    else if (format_text == "json") cfg.format = OutputFormat::json;
    else {
        std::cerr << "error: unknown format '" << format_text << "'\n";
        return 1;
    }

    if (!parse_z0(z0_text, cfg)) {
        std::cerr << "error: --z0 expects RE,IM\n";
        return 1;
    }
    if (eps0_text != "auto") {
        try {
            cfg.eps0 = std::stod(eps0_text);
        } catch (const std::exception&) {
            std::cerr << "error: --eps0 expects a number or 'auto'\n";
            return 1;
        }
    }

    if (dist->parsed()) return defdist::cli::cmd_distance(cfg, std::cout, std::cerr);
    if (gal->parsed()) return defdist::cli::cmd_gallery(cfg, std::cout, std::cerr);
    if (grid->parsed()) return defdist::cli::cmd_psgrid(cfg, std::cout, std::cerr);
    std::cerr << "error: no subcommand\n";
    return 1;
}
