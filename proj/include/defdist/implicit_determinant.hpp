#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "defdist/complex_matrix.hpp"
#include "defdist/errors.hpp"
#include "defdist/factorization.hpp"

namespace defdist::impdet {

/// Validated problem input: a square complex matrix with n >= 2 (a 1x1
/// matrix has no pair of eigenvalues to coalesce).
class ProblemInstance {
public:
    explicit ProblemInstance(ComplexMatrix A);
    const ComplexMatrix& matrix() const { return A_; }
    std::size_t n() const { return A_.rows(); }

private:
    ComplexMatrix A_;
};

/// Border vector c of the bordered matrix M = [[K, c], [c^H, 0]].
class BorderVector {
public:
    explicit BorderVector(ComplexVector c);
    const ComplexVector& vec() const { return c_; }

private:
    ComplexVector c_;
};

struct NewtonSettings {
    double tol = 1e-14;          // stop when ||g||_2 < tol
    std::size_t max_iter = 50;   // Newton updates before giving up
    double ill_condition_threshold = 1e12;  // on the 1-norm condition estimate of M
    double degeneracy_threshold = 1e-8;     // on |F_alphabeta| relative to f_epsilon^2
};

/// Everything computed at one point (alpha, beta, epsilon): the bordered
/// solve vector x = [u; v] (normalized by c^H x = 1), f = det K / det M,
/// and the first and second partial derivatives obtained from the nine
/// solves against the single factorization of M.
struct IterateState {
    double alpha = 0.0;
    double beta = 0.0;
    double epsilon = 0.0;

    ComplexVector x, x_alpha, x_beta, x_epsilon;  // length 2n

    double f = 0.0;
    double f_alpha = 0.0;
    double f_beta = 0.0;
    double f_epsilon = 0.0;
    double f_alpha_alpha = 0.0;
    double f_alpha_beta = 0.0;
    double f_beta_beta = 0.0;
    double f_alpha_epsilon = 0.0;
    double f_beta_epsilon = 0.0;

    /// Largest observed |Im w| / (1 + |w|) over all f-values before their
    /// truncation to real. Stays around machine precision at
    /// well-conditioned points; the reference runs keep it below 1e-10.
    double max_imag_leak_rel = 0.0;

    ComplexVector u() const { return ComplexVector(x.begin(), x.begin() + x.size() / 2); }
    ComplexVector v() const { return ComplexVector(x.begin() + x.size() / 2, x.end()); }

    /// Nondegeneracy value F_ab = f_aa f_bb - f_ab^2 (negative at a saddle).
    double F_alphabeta() const { return f_alpha_alpha * f_beta_beta - f_alpha_beta * f_alpha_beta; }
};

/// One row of the convergence table.
struct ConvergenceRecord {
    std::size_t iteration = 0;
    double alpha = 0.0;
    double beta = 0.0;
    double epsilon = 0.0;
    double g_norm = 0.0;
    double F_alphabeta = 0.0;
};

/// Newton gave up after max_iter updates; the payload carries the full
/// record list so callers can report the path.
class MaxIterationsError : public Error {
public:
    MaxIterationsError(const std::string& what, std::vector<ConvergenceRecord> records)
        : Error(what), records(std::move(records)) {}
    std::vector<ConvergenceRecord> records;
};

/// 2n x 2n Hermitian matrix [[-eps I, A - zI], [(A - zI)^H, -eps I]] with
/// z = alpha + i beta. Hermitian bitwise: the lower-left block is formed as
/// the conjugate transpose of the upper-right one.
ComplexMatrix build_K(const ComplexMatrix& A, double alpha, double beta, double epsilon);

/// (2n+1) x (2n+1) bordered matrix [[K, c], [c^H, 0]].
ComplexMatrix build_M(const ComplexMatrix& K, const ComplexVector& c);

/// A partially or fully evaluated Newton step. The factorization of M is
/// kept so the second-derivative solves reuse it (one factorization, nine
/// solves per step).
struct StepEvaluation {
    IterateState state;
    linalg::Factorization factorization;
    /// True when M was numerically singular and the solves went through the
    /// pivot-clamped fallback (residual-verified). Happens at degenerate
    /// configurations such as an exactly defective input with epsilon = 0.
    bool pivot_clamp_fallback = false;
};

/// One factorization of M(alpha, beta, epsilon) and three solves:
/// rhs (0,...,0,1)      -> [x; f]
/// rhs [v; u; 0]        -> [x_alpha; f_alpha]
/// rhs i[v; -u; 0]      -> [x_beta; f_beta]
/// f-values are checked for imaginary leaks and stored as reals.
/// Throws SingularBorderedMatrixError when M cannot be solved reliably
/// (the caller should re-border).
StepEvaluation evaluate_f_and_gradient(const ComplexMatrix& A, const BorderVector& c,
                                       double alpha, double beta, double epsilon);

/// Six further solves against the same factorization fill f_epsilon and
/// the five second derivatives (f_ba = f_ab by symmetry).
void evaluate_jacobian(StepEvaluation& step);

/// Both stages in one call.
IterateState evaluate_full(const ComplexMatrix& A, const BorderVector& c, double alpha,
                           double beta, double epsilon);

/// g = (f, f_alpha, f_beta)
std::array<double, 3> assemble_g(const IterateState& s);
/// Rows (f_a, f_b, f_e), (f_aa, f_ab, f_ae), (f_ab, f_bb, f_be).
std::array<std::array<double, 3>, 3> assemble_G(const IterateState& s);

struct NewtonStart {
    double alpha0 = 0.0;
    double beta0 = 0.0;
    double epsilon0 = 0.0;
    BorderVector c;
};

/// Optional overrides for initialize(): an explicit epsilon0 (e.g. 0 for
/// the Grcar-style start) and/or explicit start vectors (u0, v0) bypassing
/// the singular-triplet computation. Explicit vectors require an explicit
/// epsilon0.
struct InitOverrides {
    std::optional<double> epsilon0;
    std::optional<std::pair<ComplexVector, ComplexVector>> vectors;
};

/// Builds the start point at z0: alpha0 = Re z0, beta0 = Im z0, and by
/// default (epsilon0, u0, v0) from the smallest singular triplet of
/// A - z0 I. The border is c = x0 = [u0; v0].
NewtonStart initialize(const ProblemInstance& problem, Complex z0, const InitOverrides& ov = {});

struct NewtonResult {
    std::vector<ConvergenceRecord> records;  // one row per iterate, including the start
    IterateState final_state;
    BorderVector border;     // border in effect at the end
    std::size_t iterations;  // Newton updates performed
    std::size_t restarts;    // re-border events (at most 1)
    std::vector<std::string> warnings;
    /// Largest relative imaginary leak seen across every evaluation.
    double max_imag_leak_rel = 0.0;
};

/// Algorithm: evaluate g and G at the current point (one factorization,
/// nine solves), record the row, stop when ||g|| < tol, otherwise solve the
/// 3x3 real system G delta = -g and update. The border stays fixed; if M
/// turns out singular or the condition estimate trips the threshold
/// mid-run, restarts once with c = current x estimate, then fails.
NewtonResult newton_solve(const ProblemInstance& problem, const NewtonSettings& settings,
                          const NewtonStart& start);

}  // namespace defdist::impdet
