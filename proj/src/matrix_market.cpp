#include "defdist/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "defdist/errors.hpp"

namespace defdist::mm {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string> tokens(const std::string& line) {
    std::istringstream iss(line);
    std::vector<std::string> out;
    std::string t;
    while (iss >> t) out.push_back(t);
    return out;
}

double parse_double(const std::string& tok, std::size_t line_no) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &pos);
    } catch (const std::exception&) {
        throw ParseError("matrix market: bad numeric token '" + tok + "'", line_no);
    }
    if (pos != tok.size())
        throw ParseError("matrix market: trailing characters in numeric token '" + tok + "'",
                         line_no);
    if (!std::isfinite(v))
        throw ParseError("matrix market: non-finite value '" + tok + "'", line_no);
    return v;
}

std::size_t parse_index(const std::string& tok, std::size_t line_no) {
    for (char ch : tok)
        if (!std::isdigit(static_cast<unsigned char>(ch)))
            throw ParseError("matrix market: bad index token '" + tok + "'", line_no);
    return static_cast<std::size_t>(std::stoull(tok));
}

/// Next non-comment, non-blank line; returns false at EOF. CR from CRLF
/// endings is stripped.
bool next_data_line(std::istream& in, std::string& line, std::size_t& line_no) {
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t i = 0;
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i == line.size()) continue;
        if (line[i] == '%') continue;
        return true;
    }
    return false;
}

}  // namespace

ComplexMatrix read_matrix_market(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError("matrix market: empty input", 0);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    auto header = tokens(line);
    if (header.size() < 5 || lower(header[0]) != "%%matrixmarket")
        throw ParseError("matrix market: missing %%MatrixMarket banner", line_no);
    const std::string object = lower(header[1]);
    const std::string format = lower(header[2]);
    const std::string field = lower(header[3]);
    const std::string symmetry = lower(header[4]);

    if (object != "matrix")
        throw UnsupportedFormatError("matrix market: object '" + object + "' not supported");
    if (format != "coordinate" && format != "array")
        throw UnsupportedFormatError("matrix market: format '" + format + "' not supported");
    if (field == "pattern")
        throw UnsupportedFormatError("matrix market: pattern field not supported");
    if (field != "complex" && field != "real" && field != "integer")
        throw UnsupportedFormatError("matrix market: field '" + field + "' not supported");
    if (symmetry != "general")
        throw UnsupportedFormatError("matrix market: symmetry '" + symmetry +
                                     "' not supported (general only)");
    const bool is_complex = field == "complex";
    const std::size_t vals_per_entry = is_complex ? 2 : 1;

    if (!next_data_line(in, line, line_no))
        throw ParseError("matrix market: missing size line", line_no);
    auto size_toks = tokens(line);

    if (format == "coordinate") {
        if (size_toks.size() != 3)
            throw ParseError("matrix market: coordinate size line needs 'rows cols nnz'", line_no);
        const std::size_t rows = parse_index(size_toks[0], line_no);
        const std::size_t cols = parse_index(size_toks[1], line_no);
        const std::size_t nnz = parse_index(size_toks[2], line_no);
        if (rows == 0 || cols == 0)
            throw ParseError("matrix market: zero matrix dimension", line_no);
        ComplexMatrix A(rows, cols);
        std::vector<char> seen(rows * cols, 0);
        for (std::size_t k = 0; k < nnz; ++k) {
            if (!next_data_line(in, line, line_no))
                throw ParseError("matrix market: expected " + std::to_string(nnz) +
                                     " entries, got " + std::to_string(k),
                                 line_no);
            auto t = tokens(line);
            if (t.size() != 2 + vals_per_entry)
                throw ParseError("matrix market: entry needs 'i j " +
                                     std::string(is_complex ? "re im" : "value") + "'",
                                 line_no);
            const std::size_t i = parse_index(t[0], line_no);
            const std::size_t j = parse_index(t[1], line_no);
            if (i < 1 || i > rows || j < 1 || j > cols)
                throw ParseError("matrix market: index (" + t[0] + ", " + t[1] + ") out of range",
                                 line_no);
            if (seen[(i - 1) * cols + (j - 1)])
                throw ParseError("matrix market: duplicate entry (" + t[0] + ", " + t[1] + ")",
                                 line_no);
            seen[(i - 1) * cols + (j - 1)] = 1;
            const double re = parse_double(t[2], line_no);
            const double im = is_complex ? parse_double(t[3], line_no) : 0.0;
            A(i - 1, j - 1) = Complex(re, im);
        }
        if (next_data_line(in, line, line_no))
            throw ParseError("matrix market: extra data after the last entry", line_no);
        return A;
    }

    // array format, column-major
    if (size_toks.size() != 2)
        throw ParseError("matrix market: array size line needs 'rows cols'", line_no);
    const std::size_t rows = parse_index(size_toks[0], line_no);
    const std::size_t cols = parse_index(size_toks[1], line_no);
    if (rows == 0 || cols == 0) throw ParseError("matrix market: zero matrix dimension", line_no);
    ComplexMatrix A(rows, cols);
    for (std::size_t j = 0; j < cols; ++j) {
        for (std::size_t i = 0; i < rows; ++i) {
            if (!next_data_line(in, line, line_no))
                throw ParseError("matrix market: array data ended early", line_no);
            auto t = tokens(line);
            if (t.size() != vals_per_entry)
                throw ParseError("matrix market: array entry needs " +
                                     std::string(is_complex ? "'re im'" : "one value"),
                                 line_no);
            const double re = parse_double(t[0], line_no);
            const double im = is_complex ? parse_double(t[1], line_no) : 0.0;
            A(i, j) = Complex(re, im);
        }
    }
    if (next_data_line(in, line, line_no))
        throw ParseError("matrix market: extra data after the last entry", line_no);
    return A;
}

ComplexMatrix read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "' for reading");
    return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const ComplexMatrix& A) {
    std::size_t nnz = 0;
    for (const Complex& e : A.entries())
        if (e != 0.0) ++nnz;
    out << "%%MatrixMarket matrix coordinate complex general\n";
    out << A.rows() << " " << A.cols() << " " << nnz << "\n";
    char buf[96];
    for (std::size_t i = 0; i < A.rows(); ++i) {
        for (std::size_t j = 0; j < A.cols(); ++j) {
            const Complex e = A(i, j);
            if (e == 0.0) continue;
            std::snprintf(buf, sizeof buf, "%zu %zu %.17g %.17g\n", i + 1, j + 1, e.real(),
                          e.imag());
            out << buf;
        }
    }
}

void write_matrix_market(const std::string& path, const ComplexMatrix& A) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    write_matrix_market(out, A);
    if (!out) throw Error("write to '" + path + "' failed");
}

}  // namespace defdist::mm
