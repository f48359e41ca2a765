#include "defdist/cli.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "defdist/certify.hpp"
#include "defdist/errors.hpp"
#include "defdist/implicit_determinant.hpp"
#include "defdist/matrix_market.hpp"

namespace defdist::cli {

namespace {

std::string fmt_e(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "% .4e", v);
    return buf;
}

std::string fmt_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_complex(Complex z) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "% .4e %c %.4e i", z.real(), z.imag() < 0.0 ? '-' : '+',
                  std::abs(z.imag()));
    return buf;
}

void print_table(std::ostream& out, const std::vector<impdet::ConvergenceRecord>& records) {
    out << "   i         alpha          beta       epsilon         ||g||          F_ab\n";
    for (const auto& r : records) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%4zu  %s  %s  %s  %s  %s\n", r.iteration,
                      fmt_e(r.alpha).c_str(), fmt_e(r.beta).c_str(), fmt_e(r.epsilon).c_str(),
                      fmt_e(r.g_norm).c_str(), fmt_e(r.F_alphabeta).c_str());
        out << buf;
    }
}

void print_table_csv(std::ostream& out, const std::vector<impdet::ConvergenceRecord>& records) {
    out << "i,alpha,beta,epsilon,g_norm,F_alphabeta\n";
    for (const auto& r : records) {
        out << r.iteration << ',' << fmt_full(r.alpha) << ',' << fmt_full(r.beta) << ','
            << fmt_full(r.epsilon) << ',' << fmt_full(r.g_norm) << ','
            << fmt_full(r.F_alphabeta) << '\n';
    }
}

void print_certificate(std::ostream& out, const certify::DefectiveCertificate& cert,
                       const std::vector<impdet::ConvergenceRecord>& records) {
    out << "\nconverged in " << (records.empty() ? 0 : records.back().iteration)
        << " iterations, ||g|| = " << fmt_e(records.empty() ? 0.0 : records.back().g_norm) << "\n";
    out << "z*            = " << fmt_complex(cert.z_star) << "\n";
    out << "epsilon*      = " << fmt_e(cert.epsilon_star) << "\n";
    out << "F_alphabeta   = " << fmt_e(cert.F_alphabeta) << "\n";
    out << "||Bv*-z*v*||  = " << fmt_e(cert.residual_right) << "\n";
    out << "||u*^HB-z*u*^H|| = " << fmt_e(cert.residual_left) << "\n";
    out << "|u*^H v*|     = " << fmt_e(cert.orthogonality) << "\n";
    if (cert.coalescing_pair.size() == 2) {
        out << "coalescing eigenvalues of A: " << fmt_complex(cert.coalescing_pair[0]) << ",  "
            << fmt_complex(cert.coalescing_pair[1]) << "\n";
    } else {
        out << "coalescing eigenvalues of A: n/a (n exceeds the diagnostic eigensolver cap)\n";
    }
}

void print_json(std::ostream& out, const certify::DefectiveCertificate& cert,
                const std::vector<impdet::ConvergenceRecord>& records) {
    nlohmann::ordered_json doc;
    doc["z_star_re"] = cert.z_star.real();
    doc["z_star_im"] = cert.z_star.imag();
    doc["epsilon_star"] = cert.epsilon_star;
    doc["residual_right"] = cert.residual_right;
    doc["residual_left"] = cert.residual_left;
    doc["orthogonality"] = cert.orthogonality;
    doc["F_alphabeta"] = cert.F_alphabeta;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : records) {
        nlohmann::ordered_json row;
        row["i"] = r.iteration;
        row["alpha"] = r.alpha;
        row["beta"] = r.beta;
        row["epsilon"] = r.epsilon;
        row["g_norm"] = r.g_norm;
        row["F_alphabeta"] = r.F_alphabeta;
        rows.push_back(std::move(row));
    }
    doc["iterations"] = std::move(rows);
    out << doc.dump(2) << "\n";
}

/// Opens cfg.output_path for writing when set, otherwise uses `fallback`.
class OutputTarget {
public:
    OutputTarget(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw Error("cannot open '" + path + "' for writing");
            stream_ = &file_;
        }
    }
    std::ostream& get() { return *stream_; }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

void validate_source(const RunConfig& cfg) {
    const bool has_file = !cfg.input_path.empty();
    const bool has_gallery = cfg.gallery_spec.has_value();
    if (has_file == has_gallery)
        throw BadParameterError("exactly one matrix source required (--input or --gallery)");
}

}  // namespace

ComplexMatrix load_matrix(const RunConfig& cfg) {
    validate_source(cfg);
    if (!cfg.input_path.empty()) return mm::read_matrix_market(cfg.input_path);
    return gallery::make(*cfg.gallery_spec);
}

int cmd_distance(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    std::vector<impdet::ConvergenceRecord> records;
    try {
        if (!(cfg.tol > 0.0)) throw BadParameterError("tolerance must be positive");
        ComplexMatrix A = load_matrix(cfg);
        impdet::ProblemInstance problem(std::move(A));

        impdet::InitOverrides ov;
        ov.epsilon0 = cfg.eps0;
        impdet::NewtonStart start =
            impdet::initialize(problem, Complex(cfg.z0_re, cfg.z0_im), ov);

        impdet::NewtonSettings settings;
        settings.tol = cfg.tol;
        settings.max_iter = cfg.max_iter;

        impdet::NewtonResult result = impdet::newton_solve(problem, settings, start);
        records = result.records;
        for (const std::string& w : result.warnings) err << "warning: " << w << "\n";

        certify::DefectiveCertificate cert =
            certify::certify(problem.matrix(), result.final_state);

        OutputTarget target(cfg.output_path, out);
        switch (cfg.format) {
            case OutputFormat::text:
                print_table(target.get(), records);
                print_certificate(target.get(), cert, records);
                break;
            case OutputFormat::csv:
                print_table_csv(target.get(), records);
                break;
            case OutputFormat::json:
                print_json(target.get(), cert, records);
                break;
        }
        return 0;
    } catch (const impdet::MaxIterationsError& e) {
        err << "error: " << e.what() << "\n";
        if (cfg.format == OutputFormat::text && cfg.output_path.empty()) print_table(out, e.records);
        return 2;
    } catch (const SingularJacobianError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const SingularBorderedMatrixError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const NoConvergenceError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const CertificationError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_gallery(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        if (!cfg.gallery_spec.has_value()) throw BadParameterError("gallery: no spec given");
        ComplexMatrix A = gallery::make(*cfg.gallery_spec);
        OutputTarget target(cfg.output_path, out);
        mm::write_matrix_market(target.get(), A);
        if (!target.get()) throw Error("write failed");
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_psgrid(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        ComplexMatrix A = load_matrix(cfg);
        certify::PseudospectrumGrid grid = certify::sigma_min_grid(
            A, cfg.re_lo, cfg.re_hi, cfg.im_lo, cfg.im_hi, cfg.n_re, cfg.n_im);
        OutputTarget target(cfg.output_path, out);
        certify::write_grid_csv(target.get(), grid);
        if (!target.get()) throw Error("write failed");
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace defdist::cli
